#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hrom {

/// Doubles with 17 significant digits; "nan", "inf" and "-inf" for the rest.
std::string csv_field(double v);
std::string csv_field(std::uint64_t v);
std::string csv_field(int v);

/// Comma-separated writer; the header is written on construction. Fields
/// containing a comma, quote or newline are quoted.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);
  void row(const std::vector<std::string>& fields);
  std::size_t columns() const noexcept { return header_.size(); }

 private:
  std::ostream& out_;
  std::vector<std::string> header_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  /// Column index, or -1 when absent.
  int column(const std::string& name) const;
};

/// Reads a table written by CsvWriter. Throws IoError on ragged rows.
CsvTable read_csv(std::istream& in);

}  // namespace hrom
