#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace carto {

// Writes to a temporary sibling, fsyncs, then renames over `path`. On any
// failure the temporary is removed, `path` is untouched, and io_error is thrown.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace carto
