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

#include "ptree/predicate.hpp"

#include <cmath>

#include "ptree/errors.hpp"

namespace ptree {

namespace {

std::array<PTree, kBitsPerBand> build_band_trees(const BandGrid& band) {
  const auto planes = decompose_band(band);
  std::array<PTree, kBitsPerBand> trees;
  for (int k = 0; k < kBitsPerBand; ++k) trees[k] = build_from_plane(planes[k]);
  return trees;
}

void check_query(int precision, std::uint32_t value) {
  if (precision < 1 || precision > kBitsPerBand) {
    throw InputError("precision " + std::to_string(precision) +
                     " outside [1, 8]");
  }
  if (value >= (1u << precision)) {
    throw InputError("value " + std::to_string(value) +
                     " does not fit in " + std::to_string(precision) +
                     " bits");
  }
}

bool value_bit(std::uint32_t value, int precision, int bit_index) {
  return (value >> (precision - bit_index)) & 1u;
}

void require_same_extent(const BandGrid& red, const BandGrid& green) {
  if (red.width != green.width || red.height != green.height) {
    throw IncompatibleError("red and green bands differ in size");
  }
}

template <typename Pred>
PTree threshold_tree(const RatioGrid& ratios, Pred pred) {
  const std::uint32_t side = pad_side(ratios.width, ratios.height);
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(side) * side, 0);
  for (std::uint32_t y = 0; y < ratios.height; ++y) {
    for (std::uint32_t x = 0; x < ratios.width; ++x) {
      if (pred(ratios.at(x, y))) bits[peano_index(x, y, side)] = 1;
    }
  }
  return build_from_bits(bits, side);
}

}  // namespace

BandPTrees::BandPTrees(const BandGrid& band)
    : BandPTrees(band.band_id, band.width, band.height,
                 build_band_trees(band)) {}

BandPTrees::BandPTrees(std::uint8_t band_id, std::uint32_t width,
                       std::uint32_t height,
                       std::array<PTree, kBitsPerBand> trees)
    : band_id_(band_id), width_(width), height_(height),
      trees_(std::move(trees)) {
  const std::uint32_t side = trees_[0].side();
  for (const PTree& t : trees_) {
    if (t.side() != side) {
      throw IncompatibleError("basic P-trees of one band differ in side");
    }
  }
  if (pad_side(width, height) != side) {
    throw IncompatibleError("band extent does not pad to the tree side");
  }
  extent_ = build_extent_mask(side, width, height);
}

PTree value_ptree(const BandPTrees& bands, const ValueQuery& q) {
  if (q.band_id != bands.band_id()) {
    throw InputError("query names band " + std::to_string(q.band_id) +
                     " but trees belong to band " +
                     std::to_string(bands.band_id()));
  }
  check_query(q.precision, q.value);
  PTree result = bands.extent_mask();
  for (int i = 1; i <= q.precision; ++i) {
    const PTree& basic = bands.bit(i);
    result = value_bit(q.value, q.precision, i) ? result & basic
                                                : result & ~basic;
  }
  return result;
}

PTree range_ptree(const BandPTrees& bands, std::uint32_t threshold,
                  int precision) {
  check_query(precision, threshold);
  // From the least significant compared bit upward: ge_i = P_i AND ge_{i+1}
  // when the threshold bit is 1, P_i OR ge_{i+1} when it is 0.
  PTree ge = PTree::pure1(bands.side());
  for (int i = precision; i >= 1; --i) {
    const PTree& basic = bands.bit(i);
    ge = value_bit(threshold, precision, i) ? basic & ge : basic | ge;
  }
  return ge & bands.extent_mask();
}

void validate(const ReferenceStats& stats) {
  if (!std::isfinite(stats.mu) || !std::isfinite(stats.sigma)) {
    throw InputError("reference mu and sigma must be finite");
  }
  if (stats.sigma < 0) {
    throw InputError("reference sigma must be >= 0");
  }
  if (stats.sigma == 0) {
    throw DegenerateReferenceError(
        "reference sigma is 0; widen the reference spot set");
  }
  if (!(stats.z > 0) || !std::isfinite(stats.z)) {
    throw InputError("z must be > 0");
  }
  if (!(stats.pseudocount > 0) || !std::isfinite(stats.pseudocount)) {
    throw InputError("pseudocount must be > 0");
  }
}

RatioGrid pixel_log_ratio(const BandGrid& red, const BandGrid& green,
                          const ReferenceStats& stats) {
  require_same_extent(red, green);
  if (!(stats.pseudocount > 0)) {
    throw InputError("pseudocount must be > 0");
  }
  RatioGrid out{red.width, red.height, {}};
  out.values.resize(red.values.size());
  for (std::size_t i = 0; i < red.values.size(); ++i) {
    out.values[i] = std::log2((red.values[i] + stats.pseudocount) /
                              (green.values[i] + stats.pseudocount));
  }
  return out;
}

PTree ep_tree(const RatioGrid& ratios, const ReferenceStats& stats) {
  validate(stats);
  const double cut = stats.mu + stats.z * stats.sigma;
  return threshold_tree(ratios, [cut](double r) { return r >= cut; });
}

PTree rp_tree(const RatioGrid& ratios, const ReferenceStats& stats) {
  validate(stats);
  const double cut = stats.mu - stats.z * stats.sigma;
  return threshold_tree(ratios, [cut](double r) { return r <= cut; });
}

PTree ep_tree(const BandGrid& red, const BandGrid& green,
              const ReferenceStats& stats) {
  return ep_tree(pixel_log_ratio(red, green, stats), stats);
}

PTree rp_tree(const BandGrid& red, const BandGrid& green,
              const ReferenceStats& stats) {
  return rp_tree(pixel_log_ratio(red, green, stats), stats);
}

Level level_of(double ratio, const ReferenceStats& stats) {
  const double step = stats.z * stats.sigma;
  if (ratio >= stats.mu + 2 * step) return Level::kVeryHighExpression;
  if (ratio >= stats.mu + step) return Level::kHighExpression;
  if (ratio <= stats.mu - 2 * step) return Level::kVeryHighRepression;
  if (ratio <= stats.mu - step) return Level::kHighRepression;
  return Level::kNeutral;
}

std::string_view to_string(Level level) {
  switch (level) {
    case Level::kVeryHighExpression:
      return "very_high_expression";
    case Level::kHighExpression:
      return "high_expression";
    case Level::kNeutral:
      return "neutral";
    case Level::kHighRepression:
      return "high_repression";
    case Level::kVeryHighRepression:
      return "very_high_repression";
  }
  return "neutral";
}

std::optional<Level> parse_level(std::string_view text) {
  for (Level l : kAllLevels) {
    if (to_string(l) == text) return l;
  }
  return std::nullopt;
}

}  // namespace ptree
