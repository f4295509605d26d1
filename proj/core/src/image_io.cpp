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

#include "ptree/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>

#include "ptree/errors.hpp"

namespace ptree {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

// Skips whitespace and '#' comments in a PGM header.
void skip_pgm_space(std::string_view bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    if (bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
      ++pos;
    } else {
      break;
    }
  }
}

std::uint32_t pgm_number(std::string_view bytes, std::size_t& pos,
                         const std::string& source) {
  skip_pgm_space(bytes, pos);
  std::uint32_t v = 0;
  const auto* begin = bytes.data() + pos;
  const auto* end = bytes.data() + bytes.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr == begin) {
    throw FormatError("malformed PGM header", pos, source);
  }
  pos += static_cast<std::size_t>(ptr - begin);
  return v;
}

}  // namespace

BandGrid parse_pgm(std::string_view bytes, std::uint8_t band_id,
                   const std::string& source) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw FormatError("not a binary PGM (expected P5)", 0, source);
  }
  std::size_t pos = 2;
  const std::uint32_t width = pgm_number(bytes, pos, source);
  const std::uint32_t height = pgm_number(bytes, pos, source);
  const std::size_t maxval_pos = pos;
  const std::uint32_t maxval = pgm_number(bytes, pos, source);
  if (maxval != 255) {
    throw FormatError("PGM maxval must be 255", maxval_pos, source);
  }
  if (width == 0 || height == 0) {
    throw FormatError("PGM has a zero dimension", 2, source);
  }
  if (pos >= bytes.size() ||
      !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw FormatError("missing whitespace before PGM raster", pos, source);
  }
  ++pos;
  const std::size_t n = static_cast<std::size_t>(width) * height;
  if (bytes.size() - pos < n) {
    throw FormatError("truncated PGM raster", bytes.size(), source);
  }
  std::vector<std::uint8_t> values(n);
  std::transform(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                 bytes.begin() + static_cast<std::ptrdiff_t>(pos + n),
                 values.begin(),
                 [](char c) { return static_cast<std::uint8_t>(c); });
  return BandGrid(band_id, width, height, std::move(values));
}

std::string format_pgm(const BandGrid& band) {
  std::string out = "P5\n" + std::to_string(band.width) + " " +
                    std::to_string(band.height) + "\n255\n";
  out.append(band.values.begin(), band.values.end());
  return out;
}

BandGrid parse_csv_grid(std::string_view text, std::uint8_t band_id,
                        const std::string& source) {
  std::vector<std::uint8_t> values;
  std::uint32_t width = 0, height = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    const std::size_t line_start = pos;
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    std::uint32_t cols = 0;
    std::size_t cell = 0;
    while (true) {
      std::size_t comma = line.find(',', cell);
      std::string_view field =
          line.substr(cell, comma == std::string_view::npos ? line.npos
                                                            : comma - cell);
      const auto first = field.find_first_not_of(" \t");
      const auto last = field.find_last_not_of(" \t");
      if (first == std::string_view::npos) {
        throw FormatError("empty CSV field", line_start + cell, source);
      }
      field = field.substr(first, last - first + 1);
      int v = 0;
      auto [ptr, ec] =
          std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size() || v < 0 ||
          v > 255) {
        throw FormatError("CSV value '" + std::string(field) +
                              "' is not an integer in [0, 255]",
                          line_start + cell, source);
      }
      values.push_back(static_cast<std::uint8_t>(v));
      ++cols;
      if (comma == std::string_view::npos) break;
      cell = comma + 1;
    }
    if (height == 0) {
      width = cols;
    } else if (cols != width) {
      throw FormatError("ragged CSV row " + std::to_string(height + 1),
                        line_start, source);
    }
    ++height;
  }
  if (height == 0) {
    throw FormatError("empty CSV grid", 0, source);
  }
  return BandGrid(band_id, width, height, std::move(values));
}

std::string format_csv_grid(const BandGrid& band) {
  std::ostringstream out;
  for (std::uint32_t y = 0; y < band.height; ++y) {
    for (std::uint32_t x = 0; x < band.width; ++x) {
      if (x) out << ',';
      out << static_cast<int>(band.at(x, y));
    }
    out << '\n';
  }
  return out.str();
}

BandGrid read_band(const std::filesystem::path& path, std::uint8_t band_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open " + path.string());
  }
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  const std::string ext = lower(path.extension().string());
  if (ext == ".pgm") return parse_pgm(bytes, band_id, path.string());
  if (ext == ".csv") return parse_csv_grid(bytes, band_id, path.string());
  throw InputError("unsupported image extension '" + ext + "' for " +
                   path.string() + " (expected .pgm or .csv)");
}

void write_band(const BandGrid& band, const std::filesystem::path& path) {
  const std::string ext = lower(path.extension().string());
  std::string bytes;
  if (ext == ".pgm") {
    bytes = format_pgm(band);
  } else if (ext == ".csv") {
    bytes = format_csv_grid(band);
  } else {
    throw InputError("unsupported image extension '" + ext + "'");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw InputError("cannot write " + path.string());
  }
}

}  // namespace ptree
