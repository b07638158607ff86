// Copyright 2026 The ibsplit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ibsplit/data/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <system_error>

#include "ibsplit/common/error.hpp"

namespace ibsplit::data {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string cell = line.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    // Trim surrounding whitespace and a possible trailing CR.
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ' ||
                             cell.back() == '\t')) {
      cell.pop_back();
    }
    std::size_t lead = 0;
    while (lead < cell.size() && (cell[lead] == ' ' || cell[lead] == '\t')) {
      ++lead;
    }
    cells.push_back(cell.substr(lead));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

}  // namespace

std::size_t CsvTable::col_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) {
    throw DataError("schema column '" + name + "' not found in CSV header");
  }
  return static_cast<std::size_t>(it - columns.begin());
}

double CsvTable::numeric(std::size_t row, std::size_t col) const {
  const std::string& cell = cells[row][col];
  double v = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || cell.empty()) {
    throw DataError("non-numeric cell '" + cell + "' in column '" +
                    columns[col] + "' at data row " + std::to_string(row + 1));
  }
  return v;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open CSV file: " + path.string());
  }
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("CSV file has no header: " + path.string());
  }
  table.columns = split_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != table.columns.size()) {
      throw DataError("row " + std::to_string(table.cells.size() + 1) +
                      " has " + std::to_string(cells.size()) +
                      " cells, header has " +
                      std::to_string(table.columns.size()));
    }
    table.cells.push_back(std::move(cells));
  }
  return table;
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) {
    throw NumericError("failed to format double");
  }
  return std::string(buf, ptr);
}

std::string join_csv_row(const std::vector<std::string>& cells) {
  std::string row;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) row += ',';
    row += cells[i];
  }
  row += '\n';
  return row;
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::vector<std::string>& header)
    : path_(path), n_cols_(header.size()) {
  buffer_ = join_csv_row(header);
}

CsvWriter::~CsvWriter() {
  try {
    close();
  } catch (...) {
    // Destructors must not throw; an explicit close() surfaces errors.
  }
}

void CsvWriter::write_row(const std::vector<std::string>& cells) {
  if (cells.size() != n_cols_) {
    throw DataError("CSV row has " + std::to_string(cells.size()) +
                    " cells, header has " + std::to_string(n_cols_));
  }
  buffer_ += join_csv_row(cells);
}

void CsvWriter::close() {
  if (closed_) return;
  closed_ = true;
  std::ofstream out(path_, std::ios::binary);
  if (!out) {
    throw IoError("cannot open CSV file for writing: " + path_.string());
  }
  out << buffer_;
  if (!out) {
    throw IoError("failed writing CSV file: " + path_.string());
  }
}

}  // namespace ibsplit::data
