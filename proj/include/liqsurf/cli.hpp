#pragma once

namespace liqsurf {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitIo = 2,
    kExitConfig = 3,
};

/// Entry point of the `liqsurf` tool: detect, eval, synth, sweep.
int run_cli(int argc, char** argv);

} // namespace liqsurf
