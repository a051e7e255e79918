#include "reiqnd/cli/csv.hpp"

#include <cstdio>

#include "reiqnd/error.hpp"

namespace reiqnd::cli {

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  require(columns_ > 0, "CsvWriter: header must not be empty");
  write_record(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_)
    throw Error("CsvWriter: row has " + std::to_string(fields.size()) + " fields, expected " +
                std::to_string(columns_));
  write_record(fields);
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> fields;
  fields.reserve(values.size());
  for (double v : values) fields.push_back(format_number(v));
  row(fields);
}

void CsvWriter::write_record(const std::vector<std::string>& fields) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) text_ += ',';
    text_ += csv_escape(fields[k]);
  }
  text_ += "\r\n";
}

}  // namespace reiqnd::cli
