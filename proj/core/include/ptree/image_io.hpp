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

#ifndef PTREE_IMAGE_IO_HPP_
#define PTREE_IMAGE_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <string_view>

#include "ptree/bitplane.hpp"

namespace ptree {

// Binary PGM (P5) with maxval 255.
BandGrid parse_pgm(std::string_view bytes, std::uint8_t band_id,
                   const std::string& source = {});
std::string format_pgm(const BandGrid& band);

// One image row per line, comma separated integers in [0, 255].
BandGrid parse_csv_grid(std::string_view text, std::uint8_t band_id,
                        const std::string& source = {});
std::string format_csv_grid(const BandGrid& band);

// Picks PGM for ".pgm" and CSV for ".csv" (case-insensitive).
BandGrid read_band(const std::filesystem::path& path, std::uint8_t band_id);
void write_band(const BandGrid& band, const std::filesystem::path& path);

}  // namespace ptree

#endif  // PTREE_IMAGE_IO_HPP_
