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

#include "ptree/miner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <thread>

#include "json.hpp"
#include "ptree/errors.hpp"

namespace ptree {

namespace {

// Absorbs binary rounding in minsup * n and confidence ratios.
constexpr double kThresholdSlack = 1e-9;

// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index writes
// only its own output slot, so ordering is unaffected by the worker count.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([w, workers, n, &fn] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::vector<std::vector<ItemId>> join_candidates(
    const std::vector<std::vector<ItemId>>& level) {
  std::set<std::vector<ItemId>> known(level.begin(), level.end());
  std::vector<std::vector<ItemId>> out;
  for (std::size_t i = 0; i < level.size(); ++i) {
    for (std::size_t j = i + 1; j < level.size(); ++j) {
      const auto& a = level[i];
      const auto& b = level[j];
      // level is sorted, so sets sharing a prefix are contiguous
      if (!std::equal(a.begin(), a.end() - 1, b.begin())) break;
      std::vector<ItemId> cand = a;
      cand.push_back(b.back());
      bool all_frequent = true;
      for (std::size_t drop = 0; drop + 2 < cand.size() && all_frequent;
           ++drop) {
        std::vector<ItemId> sub;
        sub.reserve(cand.size() - 1);
        for (std::size_t k = 0; k < cand.size(); ++k) {
          if (k != drop) sub.push_back(cand[k]);
        }
        all_frequent = known.count(sub) > 0;
      }
      if (all_frequent) out.push_back(std::move(cand));
    }
  }
  return out;
}

std::string join_labels(std::span<const ItemId> ids,
                        std::span<const Item> catalog) {
  std::string out;
  for (ItemId id : ids) {
    if (!out.empty()) out += '+';
    out += catalog[id].label();
  }
  return out;
}

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

void MiningParams::validate() const {
  if (!(minsup > 0.0 && minsup <= 1.0)) {
    throw InputError("minsup must be in (0, 1]");
  }
  if (!(minconf > 0.0 && minconf <= 1.0)) {
    throw InputError("minconf must be in (0, 1]");
  }
  if (max_itemset_size == 1) {
    throw InputError("max itemset size must be >= 2 (or 0 for unlimited)");
  }
}

std::uint64_t min_support_count(double minsup, std::size_t n_transactions) {
  const double raw = minsup * static_cast<double>(n_transactions);
  const auto count = static_cast<std::uint64_t>(std::ceil(raw - kThresholdSlack));
  return std::max<std::uint64_t>(count, 1);
}

std::optional<std::uint64_t> itemset_count(const TransactionMatrix& m,
                                           std::span<const ItemId> items,
                                           std::uint64_t min_count) {
  if (items.empty()) return m.n_transactions();
  PTree acc = m.column(items[0]);
  if (acc.root_count() < min_count) return std::nullopt;
  for (std::size_t i = 1; i < items.size(); ++i) {
    acc = acc & m.column(items[i]);
    if (acc.root_count() < min_count) return std::nullopt;
  }
  return acc.root_count();
}

FrequentItemsets frequent_itemsets(const TransactionMatrix& m,
                                   const MiningParams& params) {
  params.validate();
  if (m.n_transactions() == 0) {
    throw InputError("cannot mine an empty transaction matrix");
  }
  const std::size_t n = m.n_transactions();
  const std::uint64_t min_count = min_support_count(params.minsup, n);

  FrequentItemsets out;
  out.n_transactions = n;
  out.catalog = m.items();

  auto record = [&](std::vector<ItemId> items, std::uint64_t count) {
    out.sets.push_back(FrequentItemset{
        std::move(items), count,
        static_cast<double>(count) / static_cast<double>(n)});
  };

  std::vector<std::vector<ItemId>> level;
  for (ItemId id = 0; id < m.n_items(); ++id) {
    const std::uint64_t c = m.column(id).root_count();
    if (c >= min_count) {
      level.push_back({id});
      record({id}, c);
    }
  }

  for (std::size_t size = 2;
       !level.empty() &&
       (params.max_itemset_size == 0 || size <= params.max_itemset_size);
       ++size) {
    const auto candidates = join_candidates(level);
    std::vector<std::optional<std::uint64_t>> counts(candidates.size());
    parallel_for(candidates.size(), params.threads, [&](std::size_t i) {
      counts[i] = itemset_count(m, candidates[i], min_count);
    });
    level.clear();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (!counts[i]) continue;
      level.push_back(candidates[i]);
      record(candidates[i], *counts[i]);
    }
  }
  return out;
}

std::vector<Rule> generate_rules(const FrequentItemsets& frequent,
                                 const MiningParams& params) {
  params.validate();
  std::map<std::vector<ItemId>, std::uint64_t> counts;
  for (const auto& s : frequent.sets) counts.emplace(s.items, s.count);

  auto is_x = [&](ItemId id) {
    return frequent.catalog.at(id).group == GeneGroup::kX;
  };

  std::vector<Rule> rules;
  for (const auto& s : frequent.sets) {
    const std::size_t k = s.items.size();
    if (k < 2) continue;
    if (k >= 32) {
      throw InputError("itemsets of 32 or more items are not supported");
    }
    for (std::uint32_t mask = 1; mask + 1 < (1u << k); ++mask) {
      Rule r;
      for (std::size_t b = 0; b < k; ++b) {
        (mask >> b & 1u ? r.antecedent : r.consequent).push_back(s.items[b]);
      }
      if (params.mode == MiningMode::kXImpliesY &&
          (!std::all_of(r.antecedent.begin(), r.antecedent.end(), is_x) ||
           std::any_of(r.consequent.begin(), r.consequent.end(), is_x))) {
        continue;
      }
      auto it = counts.find(r.antecedent);
      if (it == counts.end()) {
        throw InputError("frequent itemset list is not closed under subsets");
      }
      r.count = s.count;
      r.antecedent_count = it->second;
      r.support = s.support;
      r.confidence =
          static_cast<double>(r.count) / static_cast<double>(r.antecedent_count);
      if (r.confidence + kThresholdSlack < params.minconf) continue;
      rules.push_back(std::move(r));
    }
  }

  std::sort(rules.begin(), rules.end(), [](const Rule& a, const Rule& b) {
    if (a.count != b.count) return a.count > b.count;
    // confidence desc without division: a.c/a.ac vs b.c/b.ac
    const auto lhs = a.count * b.antecedent_count;
    const auto rhs = b.count * a.antecedent_count;
    if (lhs != rhs) return lhs > rhs;
    if (a.antecedent != b.antecedent) return a.antecedent < b.antecedent;
    return a.consequent < b.consequent;
  });
  return rules;
}

std::vector<Rule> mine(const TransactionMatrix& m, const MiningParams& params) {
  return generate_rules(frequent_itemsets(m, params), params);
}

std::string format_rules_tsv(std::span<const Rule> rules,
                             std::span<const Item> catalog, std::size_t top) {
  std::string out = "antecedent\tconsequent\tsupport\tconfidence\n";
  const std::size_t n = top == 0 ? rules.size() : std::min(top, rules.size());
  for (std::size_t i = 0; i < n; ++i) {
    const Rule& r = rules[i];
    out += join_labels(r.antecedent, catalog) + '\t' +
           join_labels(r.consequent, catalog) + '\t' + fixed6(r.support) +
           '\t' + fixed6(r.confidence) + '\n';
  }
  return out;
}

std::string format_rules_json(std::span<const Rule> rules,
                              std::span<const Item> catalog, std::size_t top) {
  nlohmann::json list = nlohmann::json::array();
  const std::size_t n = top == 0 ? rules.size() : std::min(top, rules.size());
  for (std::size_t i = 0; i < n; ++i) {
    const Rule& r = rules[i];
    nlohmann::json ante = nlohmann::json::array();
    nlohmann::json cons = nlohmann::json::array();
    for (ItemId id : r.antecedent) ante.push_back(catalog[id].label());
    for (ItemId id : r.consequent) cons.push_back(catalog[id].label());
    list.push_back({{"antecedent", ante},
                    {"consequent", cons},
                    {"support", r.support},
                    {"confidence", r.confidence}});
  }
  return nlohmann::json{{"rules", list}}.dump(2) + "\n";
}

}  // namespace ptree
