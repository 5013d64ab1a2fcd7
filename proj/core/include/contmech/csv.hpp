#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace contmech {

inline constexpr const char* kCsvVersionLine = "# contmech-v1";

// Shortest decimal that round-trips the double.
std::string format_number(double x);

// Writes the version line and the header on construction; LF line endings.
// Fields containing a comma, quote or newline are quoted.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& fields);
  std::size_t rows() const noexcept { return rows_; }

 private:
  void write(const std::vector<std::string>& fields);

  std::ostream& out_;
  std::size_t columns_;
  std::size_t rows_ = 0;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Reads a file written by CsvWriter. Throws UsageError when the version line
// is missing or a row has the wrong number of fields.
CsvTable read_csv(std::istream& in);

}  // namespace contmech
