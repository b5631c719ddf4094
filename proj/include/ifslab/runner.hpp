#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ifslab/config.hpp"

namespace ifslab {

struct RunOptions {
    std::string subcommand;
    std::filesystem::path out_dir;
    std::string format = "json";  // "json" or "csv" (csv adds flat tables)
    std::uint64_t master_seed = 1;
    int workers = 1;
};

// Dispatches a subcommand, writes its report files under out_dir, and returns
// the process exit code: 0 success, 2 when the run completed but an
// assertion-style verdict failed (e.g. no contraction certificate).
int run_subcommand(const SystemSpec& spec, const RunOptions& opt);

const std::vector<std::string>& subcommand_names();

}  // namespace ifslab
