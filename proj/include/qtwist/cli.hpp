#pragma once

// Command-line front end: flag and config-file handling and command dispatch.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace qtwist::cli {

/// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRange = 3;
inline constexpr int kExitAccuracy = 4;

/// Environment variable consulted for the cache directory when --cache.dir is absent.
inline constexpr const char* kCacheDirEnv = "QTWIST_CACHE_DIR";

/// Keys accepted in a config file; identical to the long flag names.
const std::vector<std::string>& config_keys();

/// Flat "key = value" file. Blank lines and text after '#' are ignored.
/// Throws PreconditionError on a line without '=' or with an empty key.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Parses args (without the program name), runs the command and returns the exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qtwist::cli
