// Copyright 2026 The pepsrqc Authors
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pepsrqc {

/// Canonical number text for report tables: 13 significant digits in
/// scientific notation ("{:.12e}"), "nan", "inf" or "-inf".
std::string format_number(double v);
std::string format_number(std::size_t v);
std::string format_number(std::int64_t v);

/// Comma-separated table with one header line. Cells are stored as text so
/// that parse followed by to_csv reproduces the input byte for byte.
class Table {
   public:
    Table() = default;
    explicit Table(std::vector<std::string> header);

    const std::vector<std::string> &header() const noexcept {
        return header_;
    }
    const std::vector<std::vector<std::string>> &rows() const noexcept {
        return rows_;
    }
    std::size_t column(std::string_view name) const;

    void add_row(std::vector<std::string> cells);
    double number(std::size_t row, std::string_view col) const;
    const std::string &text(std::size_t row, std::string_view col) const;

    std::string to_csv() const;
    static Table parse(std::string_view csv);

   private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

void write_text(const std::string &path, std::string_view content);
std::string read_text(const std::string &path);
Table read_table(const std::string &path);
void write_table(const std::string &path, const Table &t);

std::string sha256_hex(std::string_view data);

}  // namespace pepsrqc
