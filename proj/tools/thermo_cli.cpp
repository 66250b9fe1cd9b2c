#include "thermo/cli_runner.hpp"

int main(int argc, char** argv) { return thermo::run_cli(argc, argv); }
