#pragma once

namespace cssk::io {

/// Entry point of the cssk tool (argv[0] is the program name). Returns 0 on
/// success, 2 on usage/configuration errors, 3 on runtime failures; error
/// messages go to standard error.
int run_subcommand(int argc, const char* const* argv);

}  // namespace cssk::io
