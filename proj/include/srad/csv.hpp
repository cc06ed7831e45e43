#pragma once

#include <ostream>
#include <string>

namespace srad {

/// Shortest round-trip decimal representation; locale independent.
std::string format_number(double value);

/// Writes comma-separated cells terminated by '\n'.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  CsvWriter& cell(const std::string& text);
  CsvWriter& cell(double value) { return cell(format_number(value)); }
  CsvWriter& cell(long long value) { return cell(std::to_string(value)); }
  CsvWriter& cell(int value) { return cell(std::to_string(value)); }
  CsvWriter& cell(long value) { return cell(std::to_string(value)); }
  void end_row();

 private:
  std::ostream& os_;
  bool first_ = true;
};

}  // namespace srad
