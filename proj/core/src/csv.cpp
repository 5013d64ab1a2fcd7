#include "contmech/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>

#include "contmech/error.hpp"

namespace contmech {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
  require(!header.empty(), "csv: empty header");
  out_ << kCsvVersionLine << '\n';
  write(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  require(fields.size() == columns_, "csv: row width does not match the header");
  write(fields);
  ++rows_;
}

void CsvWriter::write(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\n") == std::string::npos) {
      out_ << f;
      continue;
    }
    out_ << '"';
    for (char c : f) {
      if (c == '"') out_ << '"';
      out_ << c;
    }
    out_ << '"';
  }
  out_ << '\n';
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvVersionLine)
    throw UsageError("csv: missing '# contmech-v1' version line");
  CsvTable table;
  if (!std::getline(in, line)) throw UsageError("csv: missing header");
  table.header = split_line(line);
  while (std::getline(in, line)) {
    auto fields = split_line(line);
    if (fields.size() != table.header.size()) throw UsageError("csv: row width does not match the header");
    table.rows.push_back(std::move(fields));
  }
  return table;
}

}  // namespace contmech
