#pragma once

#include <cstddef>
#include <fstream>
#include <string>
#include <vector>

namespace speclab::tools {

/// Formats a double with full round-trip precision; output bytes are a pure
/// function of the value, which is what the determinism contract needs.
std::string format_double(double v);

/// Minimal CSV writer with a fixed header.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  std::size_t columns_;
};

}  // namespace speclab::tools
