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

#ifndef PTREE_SUPERCHIP_HPP_
#define PTREE_SUPERCHIP_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ptree/predicate.hpp"
#include "ptree/ptree.hpp"

namespace ptree {

// X: constitutive, called expressed / not expressed.
// Y: condition specific, called at one of the expression levels.
enum class GeneGroup : std::uint8_t { kX, kY };

std::string_view to_string(GeneGroup g);

// Inclusive pixel rectangle.
struct Region {
  std::uint32_t x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  std::uint64_t area() const {
    return static_cast<std::uint64_t>(x1 - x0 + 1) * (y1 - y0 + 1);
  }
};

struct Spot {
  std::string gene_id;
  Region region;
  GeneGroup group = GeneGroup::kX;
  bool is_reference = false;
};

struct SpotMap {
  std::vector<Spot> entries;

  // Throws SpotMapError for empty or out-of-extent regions and duplicate
  // gene ids.
  void validate(std::uint32_t width, std::uint32_t height) const;
  std::size_t reference_count() const;
};

// TSV with header `gene_id x0 y0 x1 y1 group reference`.
SpotMap parse_spot_map(std::string_view text, const std::string& source = {});
SpotMap read_spot_map(const std::filesystem::path& path);

struct GeneCatalog {
  std::map<std::string, GeneGroup> groups;

  std::size_t total_genes() const { return groups.size(); }
  static GeneCatalog from_spots(const SpotMap& spots);
};

using GeneState = std::variant<bool, Level>;

struct GeneCall {
  std::string experiment_id;
  std::string gene_id;
  GeneState state;

  GeneGroup group() const {
    return std::holds_alternative<bool>(state) ? GeneGroup::kX : GeneGroup::kY;
  }
  friend bool operator==(const GeneCall&, const GeneCall&) = default;
};

std::string format_state(const GeneState& state);

// Pooled statistics of pixel ratios inside reference spots (mean and
// population standard deviation). Needs at least two reference spots.
ReferenceStats reference_stats(const RatioGrid& ratios, const SpotMap& spots,
                               double z, double pseudocount);

// X genes: fraction of EP pixels in the region >= rho. Y genes: level of the
// mean region ratio.
std::vector<GeneCall> call_genes(std::string_view experiment_id,
                                 const PTree& ep, const PTree& rp,
                                 const RatioGrid& ratios, const SpotMap& spots,
                                 double rho, const ReferenceStats& stats);

struct ExperimentSpec {
  std::string experiment_id;
  std::filesystem::path red;
  std::filesystem::path green;
  std::optional<double> mu;
  std::optional<double> sigma;
};

// TSV (`experiment_id red green [mu sigma]`) or JSON (array of objects, or
// an object with an "experiments" array), selected by extension. Relative
// image paths resolve against the manifest's directory.
std::vector<ExperimentSpec> read_manifest(const std::filesystem::path& path);

struct CallParams {
  double rho = 0.5;
  double z = 2.0;
  double pseudocount = 1.0;
};

// Per-gene calls for one experiment. Stats come from the manifest when it
// gives both mu and sigma. Otherwise they are pooled from the reference
// spots, and a lone manifest mu or sigma replaces its computed value.
std::vector<GeneCall> call_experiment(const ExperimentSpec& spec,
                                      const SpotMap& spots,
                                      const CallParams& params);

// TSV `experiment_id gene_id state`, one header line.
std::string format_calls(std::span<const GeneCall> calls);
std::vector<GeneCall> parse_calls(std::string_view text,
                                  const std::string& source = {});

struct Item {
  std::string gene_id;
  GeneGroup group = GeneGroup::kX;
  // Set for Y items; X items stand for "expressed".
  std::optional<Level> level;

  // `gene_id:1` for X items, `gene_id:<level>` for Y items.
  std::string label() const;
  friend auto operator<=>(const Item&, const Item&) = default;
};

using ItemId = std::size_t;

/*
 * Experiments x gene-state items. Each item column is a bit vector over the
 * experiments laid out in Z-order on the smallest power-of-two square and
 * stored as a P-tree.
 */
class TransactionMatrix {
 public:
  TransactionMatrix(std::vector<std::string> experiments,
                    std::vector<Item> items, std::vector<PTree> columns);

  std::size_t n_transactions() const { return experiments_.size(); }
  std::size_t n_items() const { return items_.size(); }
  std::uint32_t side() const { return side_; }
  const std::vector<std::string>& experiments() const { return experiments_; }
  const std::vector<Item>& items() const { return items_; }
  const Item& item(ItemId id) const { return items_.at(id); }
  const PTree& column(ItemId id) const { return columns_.at(id); }

  std::optional<ItemId> find(const Item& item) const;
  std::optional<ItemId> find_label(std::string_view label) const;

 private:
  std::vector<std::string> experiments_;
  std::vector<Item> items_;
  std::vector<PTree> columns_;
  std::uint32_t side_;
};

// Smallest power-of-two side whose square holds n transactions.
std::uint32_t transaction_side(std::size_t n);

// Experiments in first-appearance order; items sorted by gene id then level.
TransactionMatrix build_superchip(std::span<const GeneCall> calls);

// root_count(AND of item columns) / n_transactions; 1 for the empty set.
double support(const TransactionMatrix& m, std::span<const ItemId> items);
double support(const TransactionMatrix& m, std::span<const Item> items);

}  // namespace ptree

#endif  // PTREE_SUPERCHIP_HPP_
