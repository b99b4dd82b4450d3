#include "cochainflow_cli/cli.hpp"

int main(int argc, char** argv) { return cochainflow::cli_main(argc, argv); }
