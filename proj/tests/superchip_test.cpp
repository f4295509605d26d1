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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "ptree/errors.hpp"
#include "ptree/image_io.hpp"
#include "ptree/superchip.hpp"
#include "test_util.hpp"

using namespace ptree;
using ptree::fixtures::tiny_band1;
using ptree::fixtures::tiny_band2;

namespace {

const ReferenceStats kUnitStats{0.0, 1.0, 2.0, 1.0};

Spot spot(std::string gene, Region r, GeneGroup g, bool ref = false) {
  return Spot{std::move(gene), r, g, ref};
}

oracle::Transactions random_transactions(std::mt19937& rng, int n_tx,
                                         int n_items, double density) {
  std::bernoulli_distribution d(density);
  oracle::Transactions t(n_tx);
  for (auto& tx : t) {
    for (int i = 0; i < n_items; ++i) {
      if (d(rng)) tx.insert(i);
    }
  }
  return t;
}

}  // namespace

TEST(CallGenes, TinyPair) {
  const RatioGrid ratios = pixel_log_ratio(tiny_band1(), tiny_band2(), kUnitStats);
  const PTree ep = ep_tree(ratios, kUnitStats);
  const PTree rp = rp_tree(ratios, kUnitStats);
  SpotMap spots;
  spots.entries = {spot("gx", {0, 0, 0, 0}, GeneGroup::kX),
                   spot("gx_off", {1, 0, 1, 0}, GeneGroup::kX),
                   spot("gy", {1, 1, 1, 1}, GeneGroup::kY),
                   spot("gy_rep", {0, 1, 0, 1}, GeneGroup::kY)};
  const auto calls = call_genes("e1", ep, rp, ratios, spots, 0.5, kUnitStats);
  ASSERT_EQ(calls.size(), 4u);
  EXPECT_EQ(calls[0].state, GeneState(true));
  EXPECT_EQ(calls[1].state, GeneState(false));
  EXPECT_EQ(calls[2].state, GeneState(Level::kHighExpression));
  EXPECT_EQ(calls[3].state, GeneState(Level::kHighRepression));
  EXPECT_EQ(calls[0].experiment_id, "e1");
}

TEST(CallGenes, FractionThreshold) {
  // EP pixels at (0,0) and (1,1) of the 2x2 pair; a full-image X region holds 2 of 4.
  const RatioGrid ratios = pixel_log_ratio(tiny_band1(), tiny_band2(), kUnitStats);
  const PTree ep = ep_tree(ratios, kUnitStats);
  const PTree rp = rp_tree(ratios, kUnitStats);
  SpotMap spots;
  spots.entries = {spot("g", {0, 0, 1, 1}, GeneGroup::kX)};
  EXPECT_EQ(call_genes("e", ep, rp, ratios, spots, 0.5, kUnitStats)[0].state,
            GeneState(true));
  EXPECT_EQ(call_genes("e", ep, rp, ratios, spots, 0.51, kUnitStats)[0].state,
            GeneState(false));
  EXPECT_THROW(call_genes("e", ep, rp, ratios, spots, 0.0, kUnitStats),
               InputError);
  EXPECT_THROW(call_genes("e", ep, rp, ratios, spots, 1.5, kUnitStats),
               InputError);
}

TEST(CallGenes, SpotMapErrors) {
  const RatioGrid ratios = pixel_log_ratio(tiny_band1(), tiny_band2(), kUnitStats);
  const PTree ep = ep_tree(ratios, kUnitStats);
  SpotMap outside;
  outside.entries = {spot("g", {0, 0, 2, 0}, GeneGroup::kX)};
  EXPECT_THROW(call_genes("e", ep, ep, ratios, outside, 0.5, kUnitStats),
               SpotMapError);
  SpotMap dup;
  dup.entries = {spot("g", {0, 0, 0, 0}, GeneGroup::kX),
                 spot("g", {1, 1, 1, 1}, GeneGroup::kY)};
  EXPECT_THROW(call_genes("e", ep, ep, ratios, dup, 0.5, kUnitStats),
               SpotMapError);
  SpotMap empty;
  empty.entries = {spot("g", {1, 0, 0, 0}, GeneGroup::kX)};
  EXPECT_THROW(empty.validate(2, 2), SpotMapError);
}

TEST(ReferenceStats, PooledPixels) {
  std::mt19937 rng(8);
  const BandGrid red = fixtures::random_band(rng, 6, 4, 1);
  const BandGrid green = fixtures::random_band(rng, 6, 4, 2);
  const RatioGrid ratios = pixel_log_ratio(red, green, kUnitStats);
  SpotMap spots;
  spots.entries = {spot("r1", {0, 0, 1, 1}, GeneGroup::kX, true),
                   spot("r2", {4, 2, 5, 3}, GeneGroup::kX, true),
                   spot("g", {2, 0, 3, 3}, GeneGroup::kY)};

  std::vector<double> pool;
  for (auto [x0, y0] : {std::pair{0, 0}, std::pair{4, 2}}) {
    for (int y = y0; y <= y0 + 1; ++y) {
      for (int x = x0; x <= x0 + 1; ++x) {
        pool.push_back(oracle::log_ratio(red.at(x, y), green.at(x, y)));
      }
    }
  }
  double mean = 0;
  for (double v : pool) mean += v;
  mean /= pool.size();
  double var = 0;
  for (double v : pool) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / pool.size());

  const ReferenceStats s = reference_stats(ratios, spots, 2.5, 1.0);
  EXPECT_NEAR(s.mu, mean, 1e-12);
  EXPECT_NEAR(s.sigma, sd, 1e-12);
  EXPECT_EQ(s.z, 2.5);

  spots.entries[1].is_reference = false;
  EXPECT_THROW(reference_stats(ratios, spots, 2.0, 1.0), SpotMapError);
}

TEST(Superchip, ItemVectorLayout) {
  const oracle::Transactions t = {{0}, {0}, {}, {0}};
  const TransactionMatrix m = build_superchip(fixtures::calls_for(t, 2));
  EXPECT_EQ(m.n_transactions(), 4u);
  EXPECT_EQ(m.side(), 2u);
  ASSERT_EQ(m.n_items(), 2u);
  EXPECT_EQ(to_bits(m.column(0)), (std::vector<std::uint8_t>{1, 1, 0, 1}));
  EXPECT_EQ(m.column(0).root_count(), 3u);
  EXPECT_EQ(m.column(1), PTree::pure0(2));
  EXPECT_EQ(m.item(0).label(), "g00:1");
}

TEST(Superchip, Padding) {
  const oracle::Transactions five = {{0}, {0}, {0}, {0}, {0}};
  const TransactionMatrix m = build_superchip(fixtures::calls_for(five, 1));
  EXPECT_EQ(m.side(), 4u);
  const auto bits = to_bits(m.column(0));
  EXPECT_EQ(oracle::popcount(bits), 5u);
  EXPECT_EQ(std::count(bits.begin() + 5, bits.end(), 0), 11);
  EXPECT_EQ(transaction_side(1), 1u);
  EXPECT_EQ(transaction_side(16), 4u);
  EXPECT_EQ(transaction_side(17), 8u);
}

TEST(Superchip, YLevelsAndExclusivity) {
  std::vector<GeneCall> calls = {
      {"e1", "y", Level::kHighExpression},
      {"e2", "y", Level::kVeryHighRepression},
      {"e3", "y", Level::kNeutral},
      {"e4", "y", Level::kHighExpression},
      {"e1", "x", true},
  };
  const TransactionMatrix m = build_superchip(calls);
  ASSERT_EQ(m.n_items(), 3u);
  EXPECT_EQ(m.item(0).label(), "x:1");
  EXPECT_EQ(m.item(1).label(), "y:high_expression");
  EXPECT_EQ(m.item(2).label(), "y:very_high_repression");
  EXPECT_EQ((m.column(1) & m.column(2)).root_count(), 0u);
  EXPECT_EQ(m.experiments(), (std::vector<std::string>{"e1", "e2", "e3", "e4"}));
  EXPECT_EQ(m.find_label("y:high_expression"), ItemId{1});
  EXPECT_FALSE(m.find_label("y:neutral").has_value());
}

TEST(Superchip, InputErrors) {
  std::vector<GeneCall> dup = {{"e1", "g", true}, {"e1", "g", false}};
  EXPECT_THROW(build_superchip(dup), InputError);
  std::vector<GeneCall> mixed = {{"e1", "g", true},
                                 {"e2", "g", Level::kHighExpression}};
  EXPECT_THROW(build_superchip(mixed), InputError);
  EXPECT_THROW(build_superchip(std::vector<GeneCall>{}), InputError);
}

TEST(Superchip, MissingCallsAreAbsent) {
  std::vector<GeneCall> calls = {{"e1", "a", true}, {"e2", "b", true}};
  const TransactionMatrix m = build_superchip(calls);
  EXPECT_EQ(to_bits(m.column(0))[1], 0);
  EXPECT_EQ(to_bits(m.column(1))[0], 0);
}

TEST(Superchip, DeterministicUnderCallOrder) {
  std::mt19937 rng(4);
  const auto t = random_transactions(rng, 9, 6, 0.5);
  auto calls = fixtures::calls_for(t, 6, {4, 5});
  const TransactionMatrix a = build_superchip(calls);
  // shuffle within each experiment; experiment first-appearance order kept
  for (std::size_t e = 0; e < t.size(); ++e) {
    std::shuffle(calls.begin() + e * 6, calls.begin() + (e + 1) * 6, rng);
  }
  const TransactionMatrix b = build_superchip(calls);
  ASSERT_EQ(a.items(), b.items());
  for (ItemId i = 0; i < a.n_items(); ++i) EXPECT_EQ(a.column(i), b.column(i));
}

TEST(Support, WorkedValues) {
  // A = [1,1,0,1], B = [1,0,0,1]
  const oracle::Transactions t = {{0, 1}, {0}, {}, {0, 1}};
  const TransactionMatrix m = build_superchip(fixtures::calls_for(t, 2));
  const std::vector<ItemId> ab{0, 1}, a{0}, none{};
  EXPECT_DOUBLE_EQ(support(m, ab), 0.5);
  EXPECT_DOUBLE_EQ(support(m, a), 0.75);
  EXPECT_DOUBLE_EQ(support(m, none), 1.0);
  const std::vector<Item> by_item{fixtures::item_for(0), fixtures::item_for(1)};
  EXPECT_DOUBLE_EQ(support(m, by_item), 0.5);
  const std::vector<Item> unknown{Item{"zz", GeneGroup::kX, std::nullopt}};
  EXPECT_THROW(support(m, unknown), LookupError);
  const std::vector<ItemId> bad_id{7};
  EXPECT_THROW(support(m, bad_id), LookupError);
}

TEST(Support, OracleAgreementAndAntiMonotone) {
  std::mt19937 rng(12);
  std::uniform_int_distribution<int> n_tx(1, 32), n_items(1, 10);
  std::uniform_real_distribution<double> density(0.1, 0.9);
  for (int iter = 0; iter < 60; ++iter) {
    const int items = n_items(rng);
    const auto t = random_transactions(rng, n_tx(rng), items, density(rng));
    const TransactionMatrix m = build_superchip(fixtures::calls_for(t, items));
    ASSERT_EQ(m.n_items(), static_cast<std::size_t>(items));
    std::vector<double> by_mask(1u << items);
    for (std::uint32_t mask = 0; mask < (1u << items); ++mask) {
      std::vector<ItemId> ids;
      std::set<int> s;
      for (int i = 0; i < items; ++i) {
        if (mask >> i & 1u) {
          ids.push_back(i);
          s.insert(i);
        }
      }
      by_mask[mask] = support(m, ids);
      ASSERT_DOUBLE_EQ(by_mask[mask], static_cast<double>(oracle::occurrences(t, s)) /
                                          static_cast<double>(t.size()));
      for (int i = 0; i < items; ++i) {
        if (mask >> i & 1u) {
          ASSERT_LE(by_mask[mask], by_mask[mask & ~(1u << i)]);
        }
      }
    }
  }
}

TEST(Formats, SpotMapParsing) {
  const std::string text =
      "gene_id\tx0\ty0\tx1\ty1\tgroup\treference\n"
      "ref1\t0\t0\t1\t1\tX\t1\n"
      "gY\t2\t0\t3\t1\tY\t0\n";
  const SpotMap m = parse_spot_map(text);
  ASSERT_EQ(m.entries.size(), 2u);
  EXPECT_TRUE(m.entries[0].is_reference);
  EXPECT_EQ(m.entries[1].group, GeneGroup::kY);
  EXPECT_EQ(m.entries[1].region.x1, 3u);
  EXPECT_EQ(GeneCatalog::from_spots(m).total_genes(), 2u);

  EXPECT_THROW(parse_spot_map("gene\tx0\n"), FormatError);
  EXPECT_THROW(parse_spot_map("gene_id\tx0\ty0\tx1\ty1\tgroup\treference\n"
                              "g\t0\t0\t1\t1\tZ\t0\n"),
               FormatError);
  EXPECT_THROW(parse_spot_map("gene_id\tx0\ty0\tx1\ty1\tgroup\treference\n"
                              "g\t0\t-1\t1\t1\tX\t0\n"),
               FormatError);
}

TEST(Formats, CallsRoundTrip) {
  std::vector<GeneCall> calls = {{"e1", "a", true},
                                 {"e1", "b", Level::kVeryHighExpression},
                                 {"e2", "a", false},
                                 {"e2", "b", Level::kNeutral}};
  const std::string text = format_calls(calls);
  EXPECT_EQ(text.substr(0, text.find('\n')), "experiment_id\tgene_id\tstate");
  EXPECT_EQ(parse_calls(text), calls);
  EXPECT_THROW(parse_calls("experiment_id\tgene_id\tstate\ne\tg\thigh\n"),
               FormatError);
}

TEST(Formats, Manifests) {
  const auto dir = fixtures::temp_dir("manifest");
  std::ofstream(dir / "m.tsv") << "experiment_id\tred\tgreen\tmu\tsigma\n"
                                  "e1\tr.csv\tg.csv\t0.1\t-\n"
                                  "e2\t/abs/r.pgm\tg.pgm\t\t0.5\n";
  auto specs = read_manifest(dir / "m.tsv");
  ASSERT_EQ(specs.size(), 2u);
  EXPECT_EQ(specs[0].red, dir / "r.csv");
  EXPECT_EQ(specs[0].mu, 0.1);
  EXPECT_FALSE(specs[0].sigma.has_value());
  EXPECT_EQ(specs[1].red, std::filesystem::path("/abs/r.pgm"));
  EXPECT_EQ(specs[1].sigma, 0.5);

  std::ofstream(dir / "m.json")
      << R"({"experiments": [{"experiment_id": "e1", "red": "r.csv", "green": "g.csv", "sigma": 2}]})";
  specs = read_manifest(dir / "m.json");
  ASSERT_EQ(specs.size(), 1u);
  EXPECT_EQ(specs[0].green, dir / "g.csv");
  EXPECT_EQ(specs[0].sigma, 2.0);

  std::ofstream(dir / "dup.tsv") << "experiment_id\tred\tgreen\n"
                                    "e1\ta\tb\ne1\tc\td\n";
  EXPECT_THROW(read_manifest(dir / "dup.tsv"), InputError);
  std::ofstream(dir / "bad.json") << "[{";
  EXPECT_THROW(read_manifest(dir / "bad.json"), FormatError);
  std::filesystem::remove_all(dir);
}

TEST(CallExperiment, FromFilesWithOverrides) {
  const auto dir = fixtures::temp_dir("callexp");
  write_band(BandGrid(1, 2, 2, fixtures::kTinyBand1), dir / "r.csv");
  write_band(BandGrid(2, 2, 2, fixtures::kTinyBand2), dir / "g.pgm");
  SpotMap spots;
  spots.entries = {spot("gx", {0, 0, 0, 0}, GeneGroup::kX),
                   spot("gy", {1, 1, 1, 1}, GeneGroup::kY)};
  ExperimentSpec spec{"e1", dir / "r.csv", dir / "g.pgm", 0.0, 1.0};
  const auto calls = call_experiment(spec, spots, CallParams{});
  ASSERT_EQ(calls.size(), 2u);
  EXPECT_EQ(calls[0].state, GeneState(true));
  EXPECT_EQ(calls[1].state, GeneState(Level::kHighExpression));

  // no override and no reference spots
  spec.mu.reset();
  EXPECT_THROW(call_experiment(spec, spots, CallParams{}), SpotMapError);
  std::filesystem::remove_all(dir);
}
