#include "fluxkit/csv.hpp"

#include <cmath>
#include <cstdio>

#include "fluxkit/error.hpp"

namespace fluxkit {

std::string CsvWriter::format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void CsvWriter::metadata(std::string_view key, std::string_view value) {
  if (header_written_)
    throw ValidationError("CsvWriter: metadata must precede the header");
  os_ << "# " << key << ": " << value << "\n";
}

void CsvWriter::header(const std::vector<std::string>& columns) {
  if (header_written_) throw ValidationError("CsvWriter: header already written");
  columns_ = columns.size();
  header_written_ = true;
  for (size_t i = 0; i < columns.size(); ++i)
    os_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
}

void CsvWriter::row(const std::vector<CsvValue>& values) {
  if (!header_written_) throw ValidationError("CsvWriter: header not written");
  if (values.size() != columns_)
    throw ValidationError("CsvWriter: row width does not match header");
  for (size_t i = 0; i < values.size(); ++i) {
    if (const double* d = std::get_if<double>(&values[i]))
      os_ << format_double(*d);
    else if (const long long* n = std::get_if<long long>(&values[i]))
      os_ << *n;
    else
      os_ << std::get<std::string>(values[i]);
    os_ << (i + 1 < values.size() ? "," : "\n");
  }
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace fluxkit
