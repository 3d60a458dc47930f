#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace lvmr {

/// Whole-file read in binary mode. Throws Error when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes `contents` to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace lvmr
