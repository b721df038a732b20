#pragma once

namespace iwmc::cli {

/// Entry point of the `iwmc` executable. Returns the process exit code:
/// 0 on success, 1 on a failed pipeline, 2 on bad usage.
int run_cli(int argc, char** argv);

}  // namespace iwmc::cli
