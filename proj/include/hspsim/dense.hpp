#pragma once

#include <vector>

#include "hspsim/cascade.hpp"

namespace hspsim {

struct DenseOptions {
  // Per-candidate transversal override (size r); empty uses the catalog's.
  std::vector<std::vector<int>> transversals;
  // Labeling override (size N, values in 0..N/|H|-1); empty uses the
  // canonical oracle labeling.  Must still be strictly H-periodic.
  std::vector<int> labels;
  // Maximum number of state-vector slots, (r+1)^2 * (N * range)^s.
  // 0 means default_dense_cap().
  long long amplitude_cap = 0;
};

// Default 2^20, overridable via the HSPSIM_DENSE_CAP environment variable.
long long default_dense_cap();

// Independent correctness oracle for the branch representation: materializes
// the full (2+2s)-register state with explicit function registers, applies
// every Test_mu using projector matrices built from transversal cosets, and
// measures the first register.  Exact rationals throughout (the global
// N^(-s/2) normalization enters probabilities only as N^(-s)).
OutcomeDistribution dense_reference_distribution(const FiniteGroup& G, const Subgroup& H, int s,
                                                 CatalogRef candidates,
                                                 const DenseOptions& opts = {});

}  // namespace hspsim
