#include "srad/csv.hpp"

#include <charconv>
#include <cmath>

namespace srad {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // folds -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

CsvWriter& CsvWriter::cell(const std::string& text) {
  if (!first_) os_ << ',';
  os_ << text;
  first_ = false;
  return *this;
}

void CsvWriter::end_row() {
  os_ << '\n';
  first_ = true;
}

}  // namespace srad
