#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fluxepr {

// One-line-header CSV with leading '#' comment lines; period decimal
// separator, scientific notation allowed.
struct CsvTable {
  std::vector<std::string> comments;  // without the leading "# "
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> row_notes;  // optional trailing text column

  // index of a named column; throws DataError naming the column when absent
  std::size_t column_index(const std::string& name) const;
};

std::string format_number(double value);

void write_csv(std::ostream& out, const CsvTable& table,
               const std::string& note_column_name = "");
void write_csv_file(const std::string& path, const CsvTable& table,
                    const std::string& note_column_name = "");

// Reads comments, header, and numeric cells (non-numeric cells go to
// row_notes when they are in the last position, otherwise DataError).
CsvTable read_csv_file(const std::string& path);

}  // namespace fluxepr
