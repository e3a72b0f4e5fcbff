#include "noetherlab/csv.hpp"

#include <charconv>

namespace noetherlab {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) os_ << ',';
    os_ << header[i];
  }
  os_ << '\n';
}

void CsvWriter::row(std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os_ << ',';
    os_ << format_double(values[i]);
  }
  os_ << '\n';
}

void CsvWriter::row(const std::string& label, std::span<const double> values) {
  os_ << label;
  for (double v : values) os_ << ',' << format_double(v);
  os_ << '\n';
}

}  // namespace noetherlab
