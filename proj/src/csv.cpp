#include "fluxepr/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fluxepr/errors.hpp"

namespace fluxepr {

std::size_t CsvTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw DataError("missing column: " + name);
}

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

void write_csv(std::ostream& out, const CsvTable& table,
               const std::string& note_column_name) {
  for (const auto& comment : table.comments) out << "# " << comment << "\n";
  const bool with_notes = !note_column_name.empty();
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out << ",";
    out << table.columns[i];
  }
  if (with_notes) out << "," << note_column_name;
  out << "\n";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      out << format_number(row[i]);
    }
    if (with_notes) out << "," << (r < table.row_notes.size() ? table.row_notes[r] : "");
    out << "\n";
  }
}

void write_csv_file(const std::string& path, const CsvTable& table,
                    const std::string& note_column_name) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  write_csv(out, table, note_column_name);
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input file: " + path);

  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string comment = line.substr(1);
      if (!comment.empty() && comment[0] == ' ') comment = comment.substr(1);
      table.comments.push_back(comment);
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");

    if (!have_header) {
      table.columns = cells;
      have_header = true;
      continue;
    }
    std::vector<double> row;
    std::string note;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      try {
        std::size_t used = 0;
        const double value = std::stod(cells[i], &used);
        if (used != cells[i].size()) throw std::invalid_argument(cells[i]);
        row.push_back(value);
      } catch (const std::exception&) {
        if (i + 1 == cells.size()) {
          note = cells[i];  // trailing annotation column
        } else {
          throw DataError("non-numeric cell '" + cells[i] + "' in " + path);
        }
      }
    }
    table.rows.push_back(std::move(row));
    table.row_notes.push_back(note);
  }
  if (!have_header) throw DataError("empty CSV file: " + path);
  return table;
}

}  // namespace fluxepr
