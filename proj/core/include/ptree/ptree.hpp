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

#ifndef PTREE_PTREE_HPP_
#define PTREE_PTREE_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ptree/bitplane.hpp"

namespace ptree {

enum class NodeKind : std::uint8_t { kPure0 = 0, kPure1 = 1, kMixed = 2 };

/*
 * Peano count tree node. Pure nodes have no children; Mixed nodes have
 * exactly four, in NW, NE, SW, SE order, and cache the sum of their counts.
 * Nodes are immutable and may be shared between trees.
 */
class Node {
 public:
  NodeKind kind() const { return kind_; }
  bool is_pure() const { return kind_ != NodeKind::kMixed; }
  std::uint64_t count() const { return count_; }
  // Only valid for Mixed nodes.
  const Node& child(int i) const { return *children_[i]; }

 private:
  friend class PTree;
  friend struct NodeFactory;

  NodeKind kind_ = NodeKind::kPure0;
  std::uint64_t count_ = 0;
  std::array<std::shared_ptr<const Node>, 4> children_;
};

using NodePtr = std::shared_ptr<const Node>;

/*
 * Canonical, lossless quadrant count tree over a power-of-two square.
 * Canonical means no Mixed node has four children of the same pure kind,
 * so structural equality is set equality.
 */
class PTree {
 public:
  // Pure0 of side 1.
  PTree();

  static PTree pure0(std::uint32_t side);
  static PTree pure1(std::uint32_t side);

  std::uint32_t side() const { return side_; }
  // log2(side); the root sits at level `depth()` and 1x1 leaves at level 0.
  int depth() const { return depth_; }
  const Node& root() const { return *root_; }
  std::uint64_t root_count() const { return root_->count(); }
  std::uint64_t cell_count() const {
    return static_cast<std::uint64_t>(side_) * side_;
  }

  // 1-bit count of the sub-quadrant reached by following child indices
  // (0..3, NW NE SW SE) from the root. Throws PathError.
  std::uint64_t quadrant_count(std::span<const int> path) const;

  std::size_t node_count() const;
  std::size_t mixed_node_count() const;

  friend bool operator==(const PTree& a, const PTree& b);

 private:
  friend struct NodeFactory;

  PTree(std::uint32_t side, NodePtr root);

  std::uint32_t side_ = 1;
  int depth_ = 0;
  NodePtr root_;
};

PTree build_from_plane(const BitPlane& plane);
// `bits` in Peano order, size side * side.
PTree build_from_bits(std::span<const std::uint8_t> bits, std::uint32_t side);
// 1 on the inclusive rectangle [x0, x1] x [y0, y1], 0 elsewhere, built
// without materializing a plane.
PTree build_rectangle_mask(std::uint32_t side, std::uint32_t x0,
                           std::uint32_t y0, std::uint32_t x1,
                           std::uint32_t y1);
// 1 on the original (unpadded) extent of an image.
PTree build_extent_mask(std::uint32_t side, std::uint32_t width,
                        std::uint32_t height);

// Throw IncompatibleError on side mismatch.
PTree logical_and(const PTree& a, const PTree& b);
PTree logical_or(const PTree& a, const PTree& b);
// NOT and COMPLEMENT are the same operation.
PTree complement(const PTree& a);

inline PTree operator&(const PTree& a, const PTree& b) {
  return logical_and(a, b);
}
inline PTree operator|(const PTree& a, const PTree& b) {
  return logical_or(a, b);
}
inline PTree operator~(const PTree& a) { return complement(a); }

// Bits in Peano order. The overload without metadata reports band 0,
// bit 1 and an unpadded extent equal to the side.
BitPlane to_plane(const PTree& t);
BitPlane to_plane(const PTree& t, const PlaneInfo& info);
std::vector<std::uint8_t> to_bits(const PTree& t);

// "PTR1", u16 side (LE), u8 reserved, then a preorder tag stream
// (0 = Pure0, 1 = Pure1, 2 = Mixed followed by its four children).
std::vector<std::uint8_t> serialize(const PTree& t);
PTree deserialize(std::span<const std::uint8_t> bytes,
                  const std::string& source = {});
void write_ptree(const PTree& t, const std::filesystem::path& path);
PTree read_ptree(const std::filesystem::path& path);

inline constexpr std::size_t kPTreeHeaderSize = 7;

}  // namespace ptree

#endif  // PTREE_PTREE_HPP_
