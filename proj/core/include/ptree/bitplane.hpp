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

#ifndef PTREE_BITPLANE_HPP_
#define PTREE_BITPLANE_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ptree {

inline constexpr int kBitsPerBand = 8;
// Sides are stored as u16 in the file formats.
inline constexpr std::uint32_t kMaxSide = 1u << 15;

// Conventional band ids for the two microarray channels.
inline constexpr std::uint8_t kRedBand = 1;
inline constexpr std::uint8_t kGreenBand = 2;

/*
 * One 8-bit band of an image, row-major, origin at the top-left pixel.
 */
struct BandGrid {
  std::uint8_t band_id = 0;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> values;

  BandGrid() = default;
  // Throws InputError unless values.size() == width * height and both
  // dimensions are non-zero.
  BandGrid(std::uint8_t band, std::uint32_t w, std::uint32_t h,
           std::vector<std::uint8_t> v);

  std::uint8_t at(std::uint32_t x, std::uint32_t y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }

  friend bool operator==(const BandGrid&, const BandGrid&) = default;
};

struct PlaneInfo {
  std::uint8_t band_id = 0;
  std::uint8_t bit_index = 1;  // 1 = most significant bit
  std::uint32_t side = 1;
  std::uint32_t orig_width = 1;
  std::uint32_t orig_height = 1;

  friend bool operator==(const PlaneInfo&, const PlaneInfo&) = default;
};

/*
 * One bit position of one band in Peano (Z) order over the padded square.
 * bits[i] is 0 or 1; bits.size() == side * side.
 */
struct BitPlane {
  PlaneInfo info;
  std::vector<std::uint8_t> bits;

  std::uint64_t popcount() const;
  bool contains_pixel(std::uint32_t x, std::uint32_t y) const {
    return x < info.orig_width && y < info.orig_height;
  }

  friend bool operator==(const BitPlane&, const BitPlane&) = default;
};

bool is_power_of_two(std::uint64_t v);

// Smallest power of two >= max(width, height).
std::uint32_t pad_side(std::uint32_t width, std::uint32_t height);

// Bit interleave of (x, y), y bit major within each pair, so the four
// children of a quadrant come out NW, NE, SW, SE.
std::uint64_t peano_index(std::uint32_t x, std::uint32_t y, std::uint32_t side);
std::pair<std::uint32_t, std::uint32_t> peano_coords(std::uint64_t index,
                                                     std::uint32_t side);

std::array<BitPlane, kBitsPerBand> decompose_band(const BandGrid& band);
// Planes may come in any order; their bit indices must be exactly 1..8.
BandGrid recompose_band(std::span<const BitPlane> planes);

// bSQ file: "BSQ1", u16 side, u16 orig_width, u16 orig_height, u8 band_id,
// u8 bit_index (all little-endian), then ceil(side^2 / 8) payload bytes.
std::vector<std::uint8_t> encode_bsq(const BitPlane& plane);
BitPlane decode_bsq(std::span<const std::uint8_t> bytes,
                    const std::string& source = {});
void write_bsq(const BitPlane& plane, const std::filesystem::path& path);
BitPlane read_bsq(const std::filesystem::path& path);

}  // namespace ptree

#endif  // PTREE_BITPLANE_HPP_
