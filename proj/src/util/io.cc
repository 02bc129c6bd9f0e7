// Copyright 2026 The ECW Authors
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

#include "ecw/util/io.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ecw/errors.h"

namespace ecw::util {

namespace fs = std::filesystem;

std::string FormatDouble(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string FormatOptional(const std::optional<double>& value) {
  return value ? FormatDouble(*value) : std::string();
}

void WriteTextFile(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw UsageError("failed writing '" + path.string() + "'");
}

std::string ReadTextFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteJsonFile(const fs::path& path, const nlohmann::json& doc) {
  WriteTextFile(path, doc.dump(2) + "\n");
}

nlohmann::json ReadJsonFile(const fs::path& path) {
  try {
    return nlohmann::json::parse(ReadTextFile(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("invalid JSON in '" + path.string() + "': " + e.what());
  }
}

void PrepareOutputDir(const fs::path& dir,
                      const std::vector<std::string>& sentinels) {
  for (const auto& name : sentinels) {
    if (fs::exists(dir / name)) {
      throw UsageError("refusing to overwrite completed output '" +
                       (dir / name).string() + "'");
    }
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw UsageError("cannot create directory '" + dir.string() +
                     "': " + ec.message());
  }
}

namespace {

std::vector<std::string> SplitFields(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace

CsvTable CsvTable::Parse(std::string_view text) {
  CsvTable table;
  bool have_header = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    if (!have_header) {
      table.header_ = SplitFields(line);
      have_header = true;
      continue;
    }
    auto fields = SplitFields(line);
    if (fields.size() != table.header_.size()) {
      throw ConfigError("CSV row has " + std::to_string(fields.size()) +
                        " fields, header has " +
                        std::to_string(table.header_.size()));
    }
    table.rows_.push_back(std::move(fields));
  }
  if (!have_header) throw ConfigError("CSV input has no header");
  return table;
}

CsvTable CsvTable::Load(const fs::path& path) {
  try {
    return Parse(ReadTextFile(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

bool CsvTable::HasColumn(std::string_view name) const {
  for (const auto& h : header_) {
    if (h == name) return true;
  }
  return false;
}

std::size_t CsvTable::Column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  throw ConfigError("missing CSV column '" + std::string(name) + "'");
}

const std::string& CsvTable::At(std::size_t row, std::string_view column) const {
  return rows_.at(row)[Column(column)];
}

double CsvTable::Number(std::size_t row, std::string_view column) const {
  const std::string& cell = At(row, column);
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("column '" + std::string(column) + "' row " +
                      std::to_string(row) + " is not a number: '" + cell +
                      "'");
  }
}

std::optional<double> CsvTable::OptionalNumber(std::size_t row,
                                               std::string_view column) const {
  if (At(row, column).empty()) return std::nullopt;
  return Number(row, column);
}

std::vector<double> CsvTable::NumberColumn(std::string_view column) const {
  std::vector<double> out;
  out.reserve(rows_.size());
  for (std::size_t r = 0; r < rows_.size(); ++r) out.push_back(Number(r, column));
  return out;
}

}  // namespace ecw::util
