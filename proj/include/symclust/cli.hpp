#ifndef SYMCLUST_CLI_HPP
#define SYMCLUST_CLI_HPP

namespace symclust {

// Entry point behind the symclust binary. Subcommands:
//   cluster  --config PATH [--sequential]
//   cut      --tree PATH (--k N | --height H) [--assignments PATH] [--out PATH]
//   profile  --clustering PATH --units PATH --schema PATH [--out PATH]
//   generate --profile PATH --seed N [--out-dir DIR]
// Exit codes: 0 ok, 1 runtime/data error, 2 usage or config error.
int run_cli(int argc, const char* const* argv);

}  // namespace symclust

#endif  // SYMCLUST_CLI_HPP
