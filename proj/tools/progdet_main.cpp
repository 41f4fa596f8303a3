#include "progdet/cli_io.hpp"

int main(int argc, char** argv) { return progdet::run_cli(argc, argv); }
