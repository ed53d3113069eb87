#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace sigdrift::cli {

// Flat `key = value` file. Blank lines and lines starting with '#' are
// skipped; keys are returned with '_' turned into '-'.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path);

}  // namespace sigdrift::cli
