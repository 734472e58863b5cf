#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace cqed {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  // -1 when absent
};

// All numeric output uses round-trip precision (%.17g) so reruns are
// byte-identical and fixtures diff cleanly.
std::string format_double(double v);

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace cqed
