#pragma once

#include <string>

namespace optliq {

inline constexpr const char* kLibraryVersion = "0.1.0";

// Writes via a temp file in the same directory and renames into place, so
// readers never observe a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace optliq
