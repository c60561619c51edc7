#include "hspsim/report.hpp"

int main(int argc, char** argv) { return hspsim::run_cli(argc, argv); }
