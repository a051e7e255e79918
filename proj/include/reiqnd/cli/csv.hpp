#pragma once

#include <string>
#include <vector>

namespace reiqnd::cli {

/// Shortest round-trippable-enough text for a double ("%.10g").
std::string format_number(double x);

/// RFC 4180: fields holding a comma, quote or line break are quoted, inner
/// quotes doubled, records end in CRLF.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void row(const std::vector<std::string>& fields);
  void row(const std::vector<double>& values);

  const std::string& str() const { return text_; }

 private:
  void write_record(const std::vector<std::string>& fields);

  std::size_t columns_;
  std::string text_;
};

std::string csv_escape(const std::string& field);

}  // namespace reiqnd::cli
