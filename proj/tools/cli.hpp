#pragma once

namespace swarmload::cli {

/// Entry point used by the `swarmload` binary and the CLI tests.
/// Exit codes: 0 success, 2 input/validation problem, 3 profile/model
/// problem, 4 internal error.
int run(int argc, const char* const* argv);

}  // namespace swarmload::cli
