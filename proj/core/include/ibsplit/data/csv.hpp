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

#ifndef IBSPLIT_DATA_CSV_HPP_
#define IBSPLIT_DATA_CSV_HPP_

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace ibsplit::data {

/// A parsed CSV file: header plus rows of raw cells. Numeric access parses on
/// demand and reports the offending 1-based data row on failure.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> cells;

  std::size_t n_rows() const { return cells.size(); }

  /// Index of a named column; throws DataError naming the column if missing.
  std::size_t col_index(const std::string& name) const;

  /// Cell parsed as double; throws DataError with the data row index (1-based,
  /// excluding the header) when the cell is not numeric.
  double numeric(std::size_t row, std::size_t col) const;

  const std::string& cell(std::size_t row, std::size_t col) const {
    return cells[row][col];
  }
};

CsvTable read_csv(const std::filesystem::path& path);

/// Formats a double with the shortest representation that round-trips
/// exactly (std::to_chars); integral values print without an exponent.
std::string format_double(double v);

/// Writes one CSV row from preformatted cells.
std::string join_csv_row(const std::vector<std::string>& cells);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path,
            const std::vector<std::string>& header);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void write_row(const std::vector<std::string>& cells);
  void close();

 private:
  std::filesystem::path path_;
  std::string buffer_;
  std::size_t n_cols_;
  bool closed_ = false;
};

}  // namespace ibsplit::data

#endif  // IBSPLIT_DATA_CSV_HPP_
