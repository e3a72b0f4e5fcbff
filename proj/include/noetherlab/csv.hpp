#ifndef NOETHERLAB_CSV_HPP
#define NOETHERLAB_CSV_HPP

#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace noetherlab {

/// %.17g, independent of the locale.
std::string format_double(double v);

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& header);

  void row(std::span<const double> values);
  /// Leading text cell followed by numbers.
  void row(const std::string& label, std::span<const double> values);

 private:
  std::ostream& os_;
};

}  // namespace noetherlab

#endif  // NOETHERLAB_CSV_HPP
