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

#include "pepsrqc/report.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "pepsrqc/error.hpp"

namespace pepsrqc {

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    if (v == 0.0) {
        v = 0.0;  // no negative zero
    }
    return fmt::format("{:.12e}", v);
}

std::string format_number(std::size_t v) {
    return std::to_string(v);
}

std::string format_number(std::int64_t v) {
    return std::to_string(v);
}

Table::Table(std::vector<std::string> header) : header_(std::move(header)) {
    for (const auto &h : header_) {
        if (h.empty() || h.find_first_of(",\n\r") != std::string::npos) {
            throw Error(ErrorKind::Format, fmt::format("invalid column name '{}'", h));
        }
    }
}

std::size_t Table::column(std::string_view name) const {
    for (std::size_t k = 0; k < header_.size(); ++k) {
        if (header_[k] == name) {
            return k;
        }
    }
    throw Error(ErrorKind::Format, fmt::format("table has no column '{}'", name));
}

void Table::add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) {
        throw Error(ErrorKind::Format,
                    fmt::format("row has {} cells for {} columns", cells.size(), header_.size()));
    }
    for (const auto &c : cells) {
        if (c.find_first_of(",\n\r") != std::string::npos) {
            throw Error(ErrorKind::Format, fmt::format("cell '{}' contains a delimiter", c));
        }
    }
    rows_.push_back(std::move(cells));
}

const std::string &Table::text(std::size_t row, std::string_view col) const {
    return rows_.at(row).at(column(col));
}

double Table::number(std::size_t row, std::string_view col) const {
    const std::string &t = text(row, col);
    if (t == "nan") {
        return std::nan("");
    }
    if (t == "inf") {
        return HUGE_VAL;
    }
    if (t == "-inf") {
        return -HUGE_VAL;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
        throw Error(ErrorKind::Format, fmt::format("'{}' is not a number", t));
    }
    return v;
}

std::string Table::to_csv() const {
    std::string out;
    auto line = [&out](const std::vector<std::string> &cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k) {
                out += ',';
            }
            out += cells[k];
        }
        out += '\n';
    };
    line(header_);
    for (const auto &r : rows_) {
        line(r);
    }
    return out;
}

Table Table::parse(std::string_view csv) {
    std::vector<std::vector<std::string>> lines;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        std::size_t end = csv.find('\n', pos);
        if (end == std::string_view::npos) {
            throw Error(ErrorKind::Format, "table does not end with a newline");
        }
        std::vector<std::string> cells;
        std::string_view line = csv.substr(pos, end - pos);
        std::size_t c = 0;
        while (true) {
            const std::size_t comma = line.find(',', c);
            cells.emplace_back(line.substr(c, comma == std::string_view::npos ? std::string_view::npos : comma - c));
            if (comma == std::string_view::npos) {
                break;
            }
            c = comma + 1;
        }
        lines.push_back(std::move(cells));
        pos = end + 1;
    }
    if (lines.empty()) {
        throw Error(ErrorKind::Format, "table has no header");
    }
    Table t(std::move(lines.front()));
    for (std::size_t k = 1; k < lines.size(); ++k) {
        t.add_row(std::move(lines[k]));
    }
    return t;
}

void write_text(const std::string &path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorKind::Io, fmt::format("cannot open '{}' for writing", path));
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
        throw Error(ErrorKind::Io, fmt::format("write failed for '{}'", path));
    }
}

std::string read_text(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::Io, fmt::format("cannot read '{}'", path));
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Table read_table(const std::string &path) {
    return Table::parse(read_text(path));
}

void write_table(const std::string &path, const Table &t) {
    write_text(path, t.to_csv());
}

std::string sha256_hex(std::string_view data) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
        throw Error(ErrorKind::Resource, "SHA-256 digest failed");
    }
    std::string hex;
    for (unsigned int k = 0; k < len; ++k) {
        hex += fmt::format("{:02x}", digest[k]);
    }
    return hex;
}

}  // namespace pepsrqc
