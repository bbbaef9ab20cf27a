#pragma once

#include <filesystem>
#include <string>

namespace bird {

/// Whole-file read; throws Errc::io with the path on failure.
std::string read_file(const std::filesystem::path& path);

/// Write-then-rename so partial runs never leave a corrupt artifact.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace bird
