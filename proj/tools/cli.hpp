#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

namespace hankelcp::cli {

enum ExitCode : int { kOk = 0, kSelfTestFailed = 1, kInputError = 2 };

/// Entry point of the `hankelcp` tool; argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace hankelcp::cli
