// Copyright 2026 The atrisk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace atrisk::csv {

/// One parsed line: its 1-based line number in the file and its fields.
struct Row {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

/// Splits on commas. Quoting is not supported; none of the formats need it.
std::vector<std::string> split_fields(std::string_view line, char sep = ',');

/// Reads a whole CSV file. The first row is the header. Blank lines are skipped
/// and a trailing '\r' is stripped from each line.
std::vector<Row> read_file(const std::filesystem::path& path);

void write_file(const std::filesystem::path& path, const std::string& contents);

std::string read_text(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

double parse_double(std::string_view text);
long long parse_int(std::string_view text);
bool parse_bool(std::string_view text);

}  // namespace atrisk::csv
