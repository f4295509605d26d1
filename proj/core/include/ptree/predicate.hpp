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

#ifndef PTREE_PREDICATE_HPP_
#define PTREE_PREDICATE_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ptree/bitplane.hpp"
#include "ptree/ptree.hpp"

namespace ptree {

/*
 * The eight basic P-trees of one band (index 0 holds bit 1, the MSB) plus
 * the extent mask that every derived predicate is ANDed with so padding
 * never counts.
 */
class BandPTrees {
 public:
  explicit BandPTrees(const BandGrid& band);
  // Trees in bit order 1..8. Throws IncompatibleError on side mismatch.
  BandPTrees(std::uint8_t band_id, std::uint32_t width, std::uint32_t height,
             std::array<PTree, kBitsPerBand> trees);

  std::uint8_t band_id() const { return band_id_; }
  std::uint32_t side() const { return extent_.side(); }
  std::uint32_t width() const { return width_; }
  std::uint32_t height() const { return height_; }
  // bit in [1, 8]
  const PTree& bit(int bit_index) const { return trees_.at(bit_index - 1); }
  const PTree& extent_mask() const { return extent_; }

 private:
  std::uint8_t band_id_;
  std::uint32_t width_, height_;
  std::array<PTree, kBitsPerBand> trees_;
  PTree extent_;
};

struct ValueQuery {
  std::uint8_t band_id = 0;
  std::uint32_t value = 0;
  int precision = kBitsPerBand;  // number of high-order bits compared
};

// Pixels whose top `precision` bits equal `value`.
PTree value_ptree(const BandPTrees& bands, const ValueQuery& q);
// Pixels whose top `precision` bits, read as an integer, are >= `threshold`.
PTree range_ptree(const BandPTrees& bands, std::uint32_t threshold,
                  int precision);

struct ReferenceStats {
  double mu = 0.0;
  double sigma = 1.0;
  double z = 2.0;
  double pseudocount = 1.0;
};

// Throws DegenerateReferenceError when sigma == 0, InputError for other
// out-of-range fields.
void validate(const ReferenceStats& stats);

struct RatioGrid {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<double> values;  // row-major

  double at(std::uint32_t x, std::uint32_t y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

// log2((red + pseudocount) / (green + pseudocount)) per pixel.
RatioGrid pixel_log_ratio(const BandGrid& red, const BandGrid& green,
                          const ReferenceStats& stats);

// ratio >= mu + z*sigma
PTree ep_tree(const RatioGrid& ratios, const ReferenceStats& stats);
// ratio <= mu - z*sigma
PTree rp_tree(const RatioGrid& ratios, const ReferenceStats& stats);
PTree ep_tree(const BandGrid& red, const BandGrid& green,
              const ReferenceStats& stats);
PTree rp_tree(const BandGrid& red, const BandGrid& green,
              const ReferenceStats& stats);

enum class Level : std::uint8_t {
  kVeryHighExpression,
  kHighExpression,
  kNeutral,
  kHighRepression,
  kVeryHighRepression,
};

inline constexpr std::array<Level, 5> kAllLevels = {
    Level::kVeryHighExpression, Level::kHighExpression, Level::kNeutral,
    Level::kHighRepression, Level::kVeryHighRepression};

// Cutoffs at mu +/- z*sigma and mu +/- 2z*sigma.
Level level_of(double ratio, const ReferenceStats& stats);

std::string_view to_string(Level level);
std::optional<Level> parse_level(std::string_view text);

}  // namespace ptree

#endif  // PTREE_PREDICATE_HPP_
