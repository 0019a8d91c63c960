#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace bore {

// 17 significant digits: round-trip exact in binary64, locale-independent.
std::string format_double(double v);

// One documented header line, then rows of format_double values.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

std::string iso_timestamp();

}  // namespace bore
