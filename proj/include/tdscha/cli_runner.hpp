#pragma once

#include <cstdint>
#include <string>

namespace tdscha {

struct CliArgs {
    std::string command;
    std::string config_path;
    std::string out_dir = ".";
    int workers = 0; // 0 = use the config value (default 1)
    std::uint64_t seed = 0;
    bool seed_set = false;
};

// Returns the process exit code: 0 success, 1 config error, 2 partial scan
// failure, 3 numerical failure.  A manifest is written to out_dir in every
// case once the config has been read.
int run_cli(const CliArgs& args);

} // namespace tdscha
