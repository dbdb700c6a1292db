#pragma once

#include <filesystem>
#include <string_view>

namespace flowgrowth {

/// Writes `content` to a sibling temp file and renames it over `path`, so a
/// reader never sees a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace flowgrowth
