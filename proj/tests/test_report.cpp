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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "pepsrqc/error.hpp"
#include "pepsrqc/report.hpp"

namespace pepsrqc {
namespace {

ErrorKind kind_of(const std::function<void()> &f) {
    try {
        f();
    } catch (const Error &e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::Io;
}

TEST(FormatNumber, CanonicalText) {
    EXPECT_EQ(format_number(0.5), "5.000000000000e-01");
    EXPECT_EQ(format_number(-0.0), "0.000000000000e+00");
    EXPECT_EQ(format_number(std::nan("")), "nan");
    EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
    EXPECT_EQ(format_number(std::size_t{42}), "42");
    EXPECT_EQ(format_number(std::int64_t{-7}), "-7");
}

TEST(Table, ReparseIsByteIdentical) {
    Table t({"a", "b", "label"});
    t.add_row({format_number(1.0 / 3.0), format_number(std::size_t{5}), "x"});
    t.add_row({format_number(-2e-300), "nan", "fsim(1.570796;0.523599)"});
    const std::string csv = t.to_csv();
    const Table back = Table::parse(csv);
    EXPECT_EQ(back.to_csv(), csv);
    EXPECT_NEAR(back.number(0, "a"), 1.0 / 3.0, 1e-12);
    EXPECT_TRUE(std::isnan(back.number(1, "b")));
    EXPECT_EQ(back.text(1, "label"), "fsim(1.570796;0.523599)");
}

TEST(Table, Errors) {
    Table t({"a", "b"});
    EXPECT_EQ(kind_of([&] { t.add_row({"1"}); }), ErrorKind::Format);
    EXPECT_EQ(kind_of([&] { t.add_row({"1", "2,3"}); }), ErrorKind::Format);
    EXPECT_EQ(kind_of([&] { t.column("c"); }), ErrorKind::Format);
    t.add_row({"1", "abc"});
    EXPECT_EQ(kind_of([&] { t.number(0, "b"); }), ErrorKind::Format);
    EXPECT_EQ(kind_of([] { Table::parse("a,b\n1,2"); }), ErrorKind::Format);
    EXPECT_EQ(kind_of([] { Table::parse(""); }), ErrorKind::Format);
    EXPECT_EQ(kind_of([] { read_text("/nonexistent/x.csv"); }), ErrorKind::Io);
}

TEST(Sha256, KnownDigests) {
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(ErrorKind, Names) {
    EXPECT_EQ(error_kind_name(ErrorKind::Resource), "resource");
    EXPECT_EQ(error_kind_name(ErrorKind::EmptyOutput), "empty_output");
}

}  // namespace
}  // namespace pepsrqc
