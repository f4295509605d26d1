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

#ifndef PTREE_MINER_HPP_
#define PTREE_MINER_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ptree/superchip.hpp"

namespace ptree {

enum class MiningMode : std::uint8_t {
  kUnconstrained,
  // antecedent only X items, consequent only Y items
  kXImpliesY,
};

struct MiningParams {
  double minsup = 0.5;
  double minconf = 0.5;
  MiningMode mode = MiningMode::kUnconstrained;
  std::size_t max_itemset_size = 0;  // 0 = unlimited, otherwise >= 2
  unsigned threads = 1;              // support counting workers

  void validate() const;
};

struct FrequentItemset {
  std::vector<ItemId> items;  // ascending
  std::uint64_t count = 0;    // transactions containing every item
  double support = 0.0;
};

struct FrequentItemsets {
  std::size_t n_transactions = 0;
  std::vector<Item> catalog;  // item id -> item
  // Sorted by size, then lexicographically by item id.
  std::vector<FrequentItemset> sets;
};

struct Rule {
  std::vector<ItemId> antecedent;
  std::vector<ItemId> consequent;
  std::uint64_t count = 0;             // of antecedent u consequent
  std::uint64_t antecedent_count = 0;  // of antecedent alone
  double support = 0.0;
  double confidence = 0.0;
};

// Smallest transaction count whose fraction of n reaches minsup.
std::uint64_t min_support_count(double minsup, std::size_t n_transactions);

// AND of the item columns left to right. Returns nullopt as soon as a
// partial count drops below `min_count`.
std::optional<std::uint64_t> itemset_count(const TransactionMatrix& m,
                                           std::span<const ItemId> items,
                                           std::uint64_t min_count);

// Levelwise Apriori with prefix join and subset pruning. Supports come from
// ANDed item columns.
FrequentItemsets frequent_itemsets(const TransactionMatrix& m,
                                   const MiningParams& params);

// Every split of a frequent set into non-empty antecedent and consequent
// meeting minconf (and the X => Y constraint in that mode). Sorted by
// support desc, confidence desc, then antecedent and consequent ids.
std::vector<Rule> generate_rules(const FrequentItemsets& frequent,
                                 const MiningParams& params);

std::vector<Rule> mine(const TransactionMatrix& m, const MiningParams& params);

// TSV `antecedent consequent support confidence`, items as `gene_id:state`
// joined by '+'. `top` = 0 writes every rule.
std::string format_rules_tsv(std::span<const Rule> rules,
                             std::span<const Item> catalog,
                             std::size_t top = 0);
std::string format_rules_json(std::span<const Rule> rules,
                              std::span<const Item> catalog,
                              std::size_t top = 0);

}  // namespace ptree

#endif  // PTREE_MINER_HPP_
