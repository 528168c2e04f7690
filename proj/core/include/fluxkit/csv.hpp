#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fluxkit {

using CsvValue = std::variant<double, long long, std::string>;

// Deterministic CSV: '#'-prefixed metadata lines, one header line, then rows.
// Doubles are printed with 9 significant digits so repeated runs are
// byte-identical.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void metadata(std::string_view key, std::string_view value);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<CsvValue>& values);

  static std::string format_double(double v);

 private:
  std::ostream& os_;
  size_t columns_ = 0;
  bool header_written_ = false;
};

// FNV-1a, for config hashes in output metadata.
std::uint64_t fnv1a64(std::string_view data);

}  // namespace fluxkit
