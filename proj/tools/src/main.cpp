#include "spectools/runner.hpp"

int main(int argc, char** argv) { return speclab::tools::run_cli(argc, argv); }
