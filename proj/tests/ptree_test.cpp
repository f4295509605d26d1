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

#include <random>

#include "oracles.hpp"
#include "ptree/errors.hpp"
#include "ptree/ptree.hpp"
#include "test_util.hpp"

using namespace ptree;
using ptree::fixtures::plane_of;

namespace {

PTree tree_of(std::vector<std::uint8_t> bits, std::uint32_t side) {
  return build_from_bits(bits, side);
}

// 8x8 plane whose Z-ordered 4x4 quadrants hold the given counts; full
// quadrants are all ones, partial ones are filled from their start.
std::vector<std::uint8_t> quadrant_plane(std::array<int, 4> counts) {
  std::vector<std::uint8_t> bits(64, 0);
  for (int q = 0; q < 4; ++q) {
    for (int i = 0; i < counts[q]; ++i) bits[q * 16 + i] = 1;
  }
  return bits;
}

bool canonical(const Node& n) {
  if (n.is_pure()) return true;
  const NodeKind k = n.child(0).kind();
  bool uniform = k != NodeKind::kMixed;
  std::uint64_t sum = 0;
  for (int i = 0; i < 4; ++i) {
    uniform = uniform && n.child(i).kind() == k;
    sum += n.child(i).count();
    if (!canonical(n.child(i))) return false;
  }
  return !uniform && sum == n.count();
}

}  // namespace

TEST(Build, TinyPlaneMsb) {
  const PTree t = tree_of({1, 0, 0, 1}, 2);
  EXPECT_EQ(t.root_count(), 2u);
  ASSERT_EQ(t.root().kind(), NodeKind::kMixed);
  EXPECT_EQ(t.root().child(0).kind(), NodeKind::kPure1);
  EXPECT_EQ(t.root().child(1).kind(), NodeKind::kPure0);
  EXPECT_EQ(t.root().child(2).kind(), NodeKind::kPure0);
  EXPECT_EQ(t.root().child(3).kind(), NodeKind::kPure1);
}

TEST(Build, AllOnesCollapsesToRoot) {
  const PTree t = tree_of(std::vector<std::uint8_t>(16, 1), 4);
  EXPECT_EQ(t.root().kind(), NodeKind::kPure1);
  EXPECT_EQ(t.root_count(), 16u);
  EXPECT_EQ(t.node_count(), 1u);
  EXPECT_EQ(tree_of(std::vector<std::uint8_t>(64, 0), 8).node_count(), 1u);
}

TEST(Build, QuadrantCounts16_8_15_16) {
  const PTree t = tree_of(quadrant_plane({16, 8, 15, 16}), 8);
  EXPECT_EQ(t.root_count(), 55u);
  const std::array<std::uint64_t, 4> expected{16, 8, 15, 16};
  for (int i = 0; i < 4; ++i) EXPECT_EQ(t.root().child(i).count(), expected[i]);
  EXPECT_EQ(t.root().child(0).kind(), NodeKind::kPure1);
  EXPECT_EQ(t.root().child(3).kind(), NodeKind::kPure1);
  EXPECT_EQ(t.root().child(1).kind(), NodeKind::kMixed);
  std::vector<int> path{1};
  EXPECT_EQ(t.quadrant_count(path), 8u);
}

TEST(Build, RejectsBadSide) {
  EXPECT_THROW(build_from_bits(std::vector<std::uint8_t>(9, 0), 3), InputError);
  EXPECT_THROW(build_from_bits(std::vector<std::uint8_t>(8, 0), 4), InputError);
  EXPECT_THROW(PTree::pure1(6), InputError);
}

TEST(Counts, RootAndQuadrant) {
  EXPECT_EQ(PTree::pure0(8).root_count(), 0u);
  EXPECT_EQ(PTree::pure1(8).root_count(), 64u);
  const PTree p1 = PTree::pure1(8);
  std::vector<int> path{2, 3};
  EXPECT_EQ(p1.quadrant_count(path), 4u);
  EXPECT_EQ(p1.quadrant_count({}), 64u);

  std::mt19937 rng(3);
  const auto bits = oracle::random_bits(rng, 256, 0.4);
  const PTree t = tree_of(bits, 16);
  EXPECT_EQ(t.quadrant_count({}), t.root_count());
  // every depth-2 path against a direct range popcount
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      std::vector<int> p{a, b};
      std::uint64_t want = 0;
      for (int i = 0; i < 16; ++i) want += bits[a * 64 + b * 16 + i];
      EXPECT_EQ(t.quadrant_count(p), want);
    }
  }
}

TEST(Counts, PathErrors) {
  const PTree t = PTree::pure1(4);
  std::vector<int> deep{0, 0, 0};
  std::vector<int> bad{4};
  std::vector<int> neg{-1};
  EXPECT_THROW(t.quadrant_count(deep), PathError);
  EXPECT_THROW(t.quadrant_count(bad), PathError);
  EXPECT_THROW(t.quadrant_count(neg), PathError);
  // invalid index below a pure node is still rejected
  std::vector<int> bad_tail{0, 7};
  EXPECT_THROW(t.quadrant_count(bad_tail), PathError);
}

TEST(Algebra, TinyExamples) {
  const PTree b11 = tree_of({1, 0, 0, 1}, 2);
  const PTree b18 = tree_of({0, 1, 0, 1}, 2);
  const PTree both = b11 & b18;
  EXPECT_EQ(both.root_count(), 1u);
  EXPECT_EQ(to_bits(both), (std::vector<std::uint8_t>{0, 0, 0, 1}));

  const PTree neg = ~b11;
  EXPECT_EQ(neg.root_count(), 2u);
  EXPECT_EQ(to_bits(neg), (std::vector<std::uint8_t>{0, 1, 1, 0}));
}

TEST(Algebra, IdentityAndAnnihilator) {
  std::mt19937 rng(5);
  const PTree t = tree_of(oracle::random_bits(rng, 64, 0.5), 8);
  EXPECT_EQ(t & PTree::pure0(8), PTree::pure0(8));
  EXPECT_EQ(t | PTree::pure0(8), t);
  EXPECT_EQ(t & PTree::pure1(8), t);
  EXPECT_EQ(t | PTree::pure1(8), PTree::pure1(8));
}

TEST(Algebra, SideMismatch) {
  EXPECT_THROW(PTree::pure0(4) & PTree::pure0(8), IncompatibleError);
  EXPECT_THROW(PTree::pure0(4) | PTree::pure1(2), IncompatibleError);
}

TEST(Algebra, RandomOracleAndIdentities) {
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> log_side(0, 6);
  std::uniform_real_distribution<double> density(0.0, 1.0);
  for (int iter = 0; iter < 300; ++iter) {
    const std::uint32_t side = 1u << log_side(rng);
    const std::size_t n = static_cast<std::size_t>(side) * side;
    const auto a = oracle::random_bits(rng, n, density(rng));
    const auto b = oracle::random_bits(rng, n, density(rng));
    const auto c = oracle::random_bits(rng, n, density(rng));
    const PTree ta = tree_of(a, side), tb = tree_of(b, side),
                tc = tree_of(c, side);

    ASSERT_EQ(ta.root_count(), oracle::popcount(a));
    ASSERT_EQ(to_bits(ta), a);
    ASSERT_TRUE(canonical(ta.root()));
    ASSERT_EQ(to_bits(ta & tb),
              oracle::bitwise(a, b, [](bool x, bool y) { return x && y; }));
    ASSERT_EQ(to_bits(ta | tb),
              oracle::bitwise(a, b, [](bool x, bool y) { return x || y; }));
    ASSERT_EQ(to_bits(~ta), oracle::negate(a));
    ASSERT_TRUE(canonical((ta & tb).root()));
    ASSERT_TRUE(canonical((ta | tb).root()));

    ASSERT_EQ(ta & tb, tb & ta);
    ASSERT_EQ(ta | tb, tb | ta);
    ASSERT_EQ((ta & tb) & tc, ta & (tb & tc));
    ASSERT_EQ((ta | tb) | tc, ta | (tb | tc));
    ASSERT_EQ(~~ta, ta);
    ASSERT_EQ(~(ta & tb), ~ta | ~tb);
    ASSERT_EQ(~(ta | tb), ~ta & ~tb);
    ASSERT_EQ((ta & ~ta).root_count(), 0u);
    ASSERT_EQ((ta | ~ta).root_count(), ta.cell_count());
    ASSERT_LE(ta.node_count(), ((std::size_t{1} << (2 * (ta.depth() + 1))) - 1) / 3);
  }
}

TEST(ToPlane, Conversions) {
  const PTree b21 = tree_of({0, 1, 1, 0}, 2);
  EXPECT_EQ(to_plane(b21).bits, (std::vector<std::uint8_t>{0, 1, 1, 0}));
  EXPECT_EQ(to_plane(PTree::pure0(4)).bits, std::vector<std::uint8_t>(16, 0));

  std::mt19937 rng(23);
  for (int iter = 0; iter < 20; ++iter) {
    const BitPlane p = plane_of(oracle::random_bits(rng, 1024, 0.3), 32);
    EXPECT_EQ(to_plane(build_from_plane(p), p.info), p);
  }
  EXPECT_THROW(to_plane(b21, PlaneInfo{0, 1, 4, 4, 4}), IncompatibleError);
}

TEST(Masks, RectangleAndExtent) {
  const PTree m = build_rectangle_mask(8, 1, 2, 5, 3);
  EXPECT_EQ(m.root_count(), 10u);
  const auto bits = to_bits(m);
  const auto order = oracle::z_order(8);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto [x, y] = order[i];
    EXPECT_EQ(bits[i], (x >= 1 && x <= 5 && y >= 2 && y <= 3) ? 1 : 0);
  }
  EXPECT_EQ(build_extent_mask(8, 8, 8), PTree::pure1(8));
  EXPECT_EQ(build_extent_mask(8, 3, 5).root_count(), 15u);
  EXPECT_THROW(build_rectangle_mask(4, 0, 0, 4, 0), CoordinateError);
}

TEST(Serialize, TagStreams) {
  const auto one = serialize(PTree::pure1(256));
  EXPECT_EQ(one.size(), kPTreeHeaderSize + 1);
  EXPECT_EQ(one.back(), 1);
  EXPECT_EQ(std::string(one.begin(), one.begin() + 4), "PTR1");
  EXPECT_EQ(one[4] | (one[5] << 8), 256);

  const auto b11 = serialize(tree_of({1, 0, 0, 1}, 2));
  const std::vector<std::uint8_t> tags(b11.begin() + kPTreeHeaderSize,
                                       b11.end());
  EXPECT_EQ(tags, (std::vector<std::uint8_t>{2, 1, 0, 0, 1}));
}

TEST(Serialize, SingleBitPlaneIsSmall) {
  std::vector<std::uint8_t> bits(256 * 256, 0);
  bits[peano_index(77, 201, 256)] = 1;
  const PTree t = tree_of(bits, 256);
  EXPECT_EQ(t.mixed_node_count(), 8u);
  EXPECT_EQ(t.node_count(), 8u + 8u * 4u - 7u);
  EXPECT_LT(serialize(t).size(), 64u);
}

TEST(Serialize, RandomRoundTrip) {
  std::mt19937 rng(29);
  for (int iter = 0; iter < 100; ++iter) {
    const std::uint32_t side = 1u << (iter % 7);
    const PTree t =
        tree_of(oracle::random_bits(rng, std::size_t{side} * side, 0.2), side);
    const auto bytes = serialize(t);
    const PTree back = deserialize(bytes);
    ASSERT_EQ(back, t);
    ASSERT_EQ(back.root_count(), t.root_count());
    ASSERT_EQ(serialize(back), bytes);
  }
}

TEST(Serialize, FormatErrors) {
  auto bytes = serialize(tree_of({1, 0, 0, 1}, 2));
  auto bad_tag = bytes;
  bad_tag[kPTreeHeaderSize + 1] = 7;
  EXPECT_THROW(deserialize(bad_tag), FormatError);

  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_THROW(deserialize(truncated), FormatError);

  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_THROW(deserialize(trailing), FormatError);

  auto magic = bytes;
  magic[3] = '2';
  EXPECT_THROW(deserialize(magic), FormatError);

  // Mixed node with four Pure1 children is not canonical
  auto uniform = bytes;
  uniform[kPTreeHeaderSize + 2] = 1;
  uniform[kPTreeHeaderSize + 3] = 1;
  EXPECT_THROW(deserialize(uniform), FormatError);

  // Mixed tag at the 1x1 level
  std::vector<std::uint8_t> leaf_mixed(bytes.begin(),
                                       bytes.begin() + kPTreeHeaderSize);
  leaf_mixed.insert(leaf_mixed.end(), {2, 2, 0, 0, 0, 1, 0, 0, 0});
  EXPECT_THROW(deserialize(leaf_mixed), FormatError);

  try {
    deserialize(bad_tag, "t.pt");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), kPTreeHeaderSize + 1);
    EXPECT_EQ(e.source(), "t.pt");
  }
}

TEST(Serialize, FileRoundTrip) {
  const auto dir = fixtures::temp_dir("pt");
  const PTree t = tree_of({0, 1, 1, 1}, 2);
  write_ptree(t, dir / "t.pt");
  EXPECT_EQ(read_ptree(dir / "t.pt"), t);
  std::filesystem::remove_all(dir);
}
