#include "cssk/io/cli.hpp"

int main(int argc, char** argv) { return cssk::io::run_subcommand(argc, argv); }
