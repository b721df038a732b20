#pragma once

#include <filesystem>
#include <optional>
#include <string>

namespace iwmc::cli {

/// Lowercase hex SHA-256 of a file.
std::string sha256_file(const std::filesystem::path& path);

/// Downloads `url` to `dest` through a temporary file. With `expected_sha256`
/// set, a digest mismatch deletes the download and throws DataError.
/// Returns the digest of the written file.
std::string fetch(const std::string& url, const std::filesystem::path& dest,
                  const std::optional<std::string>& expected_sha256);

}  // namespace iwmc::cli
