#ifndef NEWSLENS_IO_HPP
#define NEWSLENS_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace newslens::io {

std::string read_file(const std::filesystem::path& path);

// Write via a temp file in the same directory, then rename into place, so a
// reader never sees a partially written artifact.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Tab-separated rows; lines starting with '#' and blank lines are skipped.
// The first surviving row is returned too -- header handling is the caller's.
std::vector<std::vector<std::string>> read_tsv(const std::filesystem::path& path);

// Minimal CSV quoting: fields containing comma, quote or newline get quoted.
std::string csv_row(const std::vector<std::string>& fields);

}  // namespace newslens::io

#endif  // NEWSLENS_IO_HPP
