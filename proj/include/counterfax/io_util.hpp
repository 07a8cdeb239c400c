#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace counterfax {

/// Writes `content` to a sibling temp file and renames it over `path`, so
/// readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Appends one line (newline added) and flushes it to disk.
void append_line(const std::filesystem::path& path, const std::string& line);

/// All lines of a text file, without trailing newlines. Throws
/// std::runtime_error if the file cannot be opened.
std::vector<std::string> read_lines(const std::filesystem::path& path);

} // namespace counterfax
