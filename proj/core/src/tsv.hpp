// Copyright 2026 The ptree-engine Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PTREE_SRC_TSV_HPP_
#define PTREE_SRC_TSV_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ptree::detail {

struct TsvRow {
  std::size_t line = 0;    // 1-based
  std::size_t offset = 0;  // byte offset of the line start
  std::vector<std::string> fields;
};

// Splits on '\n' and '\t'; strips '\r'; skips blank lines and lines that
// start with '#'.
inline std::vector<TsvRow> parse_tsv(std::string_view text) {
  std::vector<TsvRow> rows;
  std::size_t pos = 0, line = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view l = text.substr(pos, eol - pos);
    ++line;
    const std::size_t start = pos;
    pos = eol + 1;
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    if (l.empty() || l.front() == '#') continue;
    TsvRow row{line, start, {}};
    std::size_t f = 0;
    while (true) {
      std::size_t tab = l.find('\t', f);
      row.fields.emplace_back(
          l.substr(f, tab == std::string_view::npos ? l.npos : tab - f));
      if (tab == std::string_view::npos) break;
      f = tab + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ptree::detail

#endif  // PTREE_SRC_TSV_HPP_
