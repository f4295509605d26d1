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

#include "ptree/bitplane.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <iterator>

#include "byte_io.hpp"
#include "ptree/errors.hpp"

namespace ptree {

namespace detail {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open " + path.string());
  }
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw InputError("cannot write " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw InputError("short write to " + path.string());
  }
}

}  // namespace detail

BandGrid::BandGrid(std::uint8_t band, std::uint32_t w, std::uint32_t h,
                   std::vector<std::uint8_t> v)
    : band_id(band), width(w), height(h), values(std::move(v)) {
  if (w == 0 || h == 0) {
    throw InputError("band grid must have non-zero width and height");
  }
  if (values.size() != static_cast<std::size_t>(w) * h) {
    throw InputError("band grid has " + std::to_string(values.size()) +
                     " values, expected " +
                     std::to_string(static_cast<std::size_t>(w) * h));
  }
}

std::uint64_t BitPlane::popcount() const {
  return static_cast<std::uint64_t>(std::count(bits.begin(), bits.end(), 1));
}

bool is_power_of_two(std::uint64_t v) { return std::has_single_bit(v); }

std::uint32_t pad_side(std::uint32_t width, std::uint32_t height) {
  if (width == 0 || height == 0) {
    throw InputError("grid dimensions must be >= 1");
  }
  std::uint32_t side = std::bit_ceil(std::max(width, height));
  if (side > kMaxSide) {
    throw InputError("grid too large: padded side " + std::to_string(side) +
                     " exceeds " + std::to_string(kMaxSide));
  }
  return side;
}

std::uint64_t peano_index(std::uint32_t x, std::uint32_t y,
                          std::uint32_t side) {
  if (!is_power_of_two(side)) {
    throw CoordinateError("side " + std::to_string(side) +
                          " is not a power of two");
  }
  if (x >= side || y >= side) {
    throw CoordinateError("coordinate (" + std::to_string(x) + ", " +
                          std::to_string(y) + ") outside side " +
                          std::to_string(side));
  }
  std::uint64_t index = 0;
  for (int bit = 0; (1u << bit) < side; ++bit) {
    index |= static_cast<std::uint64_t>((x >> bit) & 1u) << (2 * bit);
    index |= static_cast<std::uint64_t>((y >> bit) & 1u) << (2 * bit + 1);
  }
  return index;
}

std::pair<std::uint32_t, std::uint32_t> peano_coords(std::uint64_t index,
                                                     std::uint32_t side) {
  if (!is_power_of_two(side)) {
    throw CoordinateError("side " + std::to_string(side) +
                          " is not a power of two");
  }
  const auto cells = static_cast<std::uint64_t>(side) * side;
  if (index >= cells) {
    throw CoordinateError("peano index " + std::to_string(index) +
                          " outside side " + std::to_string(side));
  }
  std::uint32_t x = 0, y = 0;
  for (int bit = 0; (1u << bit) < side; ++bit) {
    x |= static_cast<std::uint32_t>((index >> (2 * bit)) & 1u) << bit;
    y |= static_cast<std::uint32_t>((index >> (2 * bit + 1)) & 1u) << bit;
  }
  return {x, y};
}

std::array<BitPlane, kBitsPerBand> decompose_band(const BandGrid& band) {
  if (band.width == 0 || band.height == 0 || band.values.empty()) {
    throw InputError("cannot decompose an empty band");
  }
  if (band.values.size() != static_cast<std::size_t>(band.width) * band.height) {
    throw InputError("band value count does not match its dimensions");
  }
  const std::uint32_t side = pad_side(band.width, band.height);
  const std::size_t cells = static_cast<std::size_t>(side) * side;

  std::array<BitPlane, kBitsPerBand> planes;
  for (int k = 0; k < kBitsPerBand; ++k) {
    planes[k].info = PlaneInfo{band.band_id, static_cast<std::uint8_t>(k + 1),
                               side, band.width, band.height};
    planes[k].bits.assign(cells, 0);
  }
  for (std::uint32_t y = 0; y < band.height; ++y) {
    for (std::uint32_t x = 0; x < band.width; ++x) {
      const std::uint8_t v = band.at(x, y);
      const auto pos = peano_index(x, y, side);
      for (int k = 0; k < kBitsPerBand; ++k) {
        planes[k].bits[pos] = (v >> (kBitsPerBand - 1 - k)) & 1u;
      }
    }
  }
  return planes;
}

BandGrid recompose_band(std::span<const BitPlane> planes) {
  if (planes.size() != kBitsPerBand) {
    throw InputError("recomposition needs exactly 8 planes, got " +
                     std::to_string(planes.size()));
  }
  const PlaneInfo& ref = planes.front().info;
  std::array<const BitPlane*, kBitsPerBand> by_bit{};
  for (const BitPlane& p : planes) {
    if (p.info.band_id != ref.band_id || p.info.side != ref.side ||
        p.info.orig_width != ref.orig_width ||
        p.info.orig_height != ref.orig_height) {
      throw IncompatibleError("bit planes disagree on band or extent");
    }
    if (p.bits.size() != static_cast<std::size_t>(ref.side) * ref.side) {
      throw IncompatibleError("bit plane size does not match its side");
    }
    if (p.info.bit_index < 1 || p.info.bit_index > kBitsPerBand) {
      throw InputError("bit index " + std::to_string(p.info.bit_index) +
                       " outside [1, 8]");
    }
    by_bit[p.info.bit_index - 1] = &p;
  }
  for (int k = 0; k < kBitsPerBand; ++k) {
    if (by_bit[k] == nullptr) {
      throw InputError("missing bit index " + std::to_string(k + 1));
    }
  }

  std::vector<std::uint8_t> values(
      static_cast<std::size_t>(ref.orig_width) * ref.orig_height, 0);
  for (std::uint32_t y = 0; y < ref.orig_height; ++y) {
    for (std::uint32_t x = 0; x < ref.orig_width; ++x) {
      const auto pos = peano_index(x, y, ref.side);
      std::uint8_t v = 0;
      for (int k = 0; k < kBitsPerBand; ++k) {
        v = static_cast<std::uint8_t>((v << 1) | (by_bit[k]->bits[pos] & 1u));
      }
      values[static_cast<std::size_t>(y) * ref.orig_width + x] = v;
    }
  }
  return BandGrid(ref.band_id, ref.orig_width, ref.orig_height,
                  std::move(values));
}

namespace {

constexpr std::size_t kBsqHeaderSize = 12;

void check_plane(const PlaneInfo& info, std::size_t bit_count) {
  if (!is_power_of_two(info.side) || info.side > kMaxSide) {
    throw InputError("plane side must be a power of two <= 32768");
  }
  if (info.orig_width == 0 || info.orig_height == 0 ||
      info.orig_width > info.side || info.orig_height > info.side) {
    throw InputError("plane extent does not fit its side");
  }
  if (info.bit_index < 1 || info.bit_index > kBitsPerBand) {
    throw InputError("bit index outside [1, 8]");
  }
  if (bit_count != static_cast<std::size_t>(info.side) * info.side) {
    throw InputError("plane bit count does not match its side");
  }
}

}  // namespace

std::vector<std::uint8_t> encode_bsq(const BitPlane& plane) {
  check_plane(plane.info, plane.bits.size());
  std::vector<std::uint8_t> out;
  const std::size_t payload = (plane.bits.size() + 7) / 8;
  out.reserve(kBsqHeaderSize + payload);
  detail::put_magic(out, "BSQ1");
  detail::put_u16(out, static_cast<std::uint16_t>(plane.info.side));
  detail::put_u16(out, static_cast<std::uint16_t>(plane.info.orig_width));
  detail::put_u16(out, static_cast<std::uint16_t>(plane.info.orig_height));
  detail::put_u8(out, plane.info.band_id);
  detail::put_u8(out, plane.info.bit_index);

  const std::size_t base = out.size();
  out.resize(base + payload, 0);
  for (std::size_t i = 0; i < plane.bits.size(); ++i) {
    if (plane.bits[i]) {
      out[base + i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
    }
  }
  return out;
}

BitPlane decode_bsq(std::span<const std::uint8_t> bytes,
                    const std::string& source) {
  detail::ByteReader in(bytes, source);
  in.expect_magic("BSQ1");
  BitPlane plane;
  plane.info.side = in.u16();
  plane.info.orig_width = in.u16();
  plane.info.orig_height = in.u16();
  plane.info.band_id = in.u8();
  const std::size_t bit_index_offset = in.pos();
  plane.info.bit_index = in.u8();

  if (plane.info.bit_index < 1 || plane.info.bit_index > kBitsPerBand) {
    throw FormatError("bit index " + std::to_string(plane.info.bit_index) +
                          " outside [1, 8]",
                      bit_index_offset, source);
  }
  if (!is_power_of_two(plane.info.side)) {
    throw FormatError("side " + std::to_string(plane.info.side) +
                          " is not a power of two",
                      4, source);
  }
  if (plane.info.orig_width == 0 || plane.info.orig_height == 0 ||
      plane.info.orig_width > plane.info.side ||
      plane.info.orig_height > plane.info.side) {
    throw FormatError("original extent does not fit the side", 6, source);
  }

  const std::size_t cells =
      static_cast<std::size_t>(plane.info.side) * plane.info.side;
  const auto payload = in.take((cells + 7) / 8);
  if (in.remaining() != 0) {
    throw FormatError("trailing bytes after payload", in.pos(), source);
  }
  plane.bits.resize(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    plane.bits[i] = (payload[i / 8] >> (7 - i % 8)) & 1u;
  }
  for (std::size_t i = cells; i < payload.size() * 8; ++i) {
    if ((payload[i / 8] >> (7 - i % 8)) & 1u) {
      throw FormatError("non-zero trailing padding bits",
                        kBsqHeaderSize + i / 8, source);
    }
  }
  for (std::size_t i = 0; i < cells; ++i) {
    if (!plane.bits[i]) continue;
    const auto [x, y] = peano_coords(i, plane.info.side);
    if (!plane.contains_pixel(x, y)) {
      throw FormatError("set bit outside the original extent",
                        kBsqHeaderSize + i / 8, source);
    }
  }
  return plane;
}

void write_bsq(const BitPlane& plane, const std::filesystem::path& path) {
  detail::write_file(path, encode_bsq(plane));
}

BitPlane read_bsq(const std::filesystem::path& path) {
  return decode_bsq(detail::read_file(path), path.string());
}

}  // namespace ptree
