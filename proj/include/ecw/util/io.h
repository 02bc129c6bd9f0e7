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

#ifndef ECW_UTIL_IO_H_
#define ECW_UTIL_IO_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace ecw::util {

// Shortest form that round-trips ("%.17g"); empty for nullopt.
std::string FormatDouble(double value);
std::string FormatOptional(const std::optional<double>& value);

void WriteTextFile(const std::filesystem::path& path, std::string_view text);
std::string ReadTextFile(const std::filesystem::path& path);
void WriteJsonFile(const std::filesystem::path& path,
                   const nlohmann::json& doc);
nlohmann::json ReadJsonFile(const std::filesystem::path& path);

// Creates dir if needed. Throws UsageError if any of the sentinel files
// already exist there: completed outputs are never overwritten.
void PrepareOutputDir(const std::filesystem::path& dir,
                      const std::vector<std::string>& sentinels);

// A small CSV reader: first non-comment line is the header, lines starting
// with '#' are skipped, fields are not quoted.
class CsvTable {
 public:
  static CsvTable Parse(std::string_view text);
  static CsvTable Load(const std::filesystem::path& path);

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  bool HasColumn(std::string_view name) const;
  // Throws ConfigError naming the missing column.
  std::size_t Column(std::string_view name) const;
  const std::string& At(std::size_t row, std::string_view column) const;
  double Number(std::size_t row, std::string_view column) const;
  std::optional<double> OptionalNumber(std::size_t row,
                                       std::string_view column) const;
  std::vector<double> NumberColumn(std::string_view column) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace ecw::util

#endif  // ECW_UTIL_IO_H_
