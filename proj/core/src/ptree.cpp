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

#include "ptree/ptree.hpp"

#include <bit>

#include "byte_io.hpp"
#include "ptree/errors.hpp"

namespace ptree {

// Sole constructor of nodes and trees; keeps every produced tree canonical.
struct NodeFactory {
  static constexpr int kMaxLevel = std::countr_zero(kMaxSide);

  static std::uint64_t full_count(int level) {
    return std::uint64_t{1} << (2 * level);
  }

  static const NodePtr& pure0() {
    static const NodePtr node = [] {
      auto n = std::make_shared<Node>();
      n->kind_ = NodeKind::kPure0;
      n->count_ = 0;
      return NodePtr(std::move(n));
    }();
    return node;
  }

  static const NodePtr& pure1(int level) {
    static const std::array<NodePtr, kMaxLevel + 1> nodes = [] {
      std::array<NodePtr, kMaxLevel + 1> out;
      for (int l = 0; l <= kMaxLevel; ++l) {
        auto n = std::make_shared<Node>();
        n->kind_ = NodeKind::kPure1;
        n->count_ = full_count(l);
        out[l] = std::move(n);
      }
      return out;
    }();
    return nodes[level];
  }

  static NodePtr pure(bool one, int level) {
    return one ? pure1(level) : pure0();
  }

  // Collapses four identical pure children into their parent.
  static NodePtr mixed(int level, std::array<NodePtr, 4> children) {
    const NodeKind k = children[0]->kind();
    if (k != NodeKind::kMixed && children[1]->kind() == k &&
        children[2]->kind() == k && children[3]->kind() == k) {
      return pure(k == NodeKind::kPure1, level);
    }
    auto n = std::make_shared<Node>();
    n->kind_ = NodeKind::kMixed;
    n->count_ = 0;
    for (const auto& c : children) n->count_ += c->count();
    n->children_ = std::move(children);
    return n;
  }

  static PTree tree(std::uint32_t side, NodePtr root) {
    return PTree(side, std::move(root));
  }

  static const NodePtr& child_ptr(const Node& n, int i) {
    return n.children_[i];
  }

  static const NodePtr& root_ptr(const PTree& t) { return t.root_; }
};

namespace {

using F = NodeFactory;

int level_of_side(std::uint32_t side) {
  if (!is_power_of_two(side) || side > kMaxSide) {
    throw InputError("side " + std::to_string(side) +
                     " is not a power of two <= 32768");
  }
  return std::countr_zero(side);
}

NodePtr build_range(std::span<const std::uint8_t> bits, int level) {
  if (level == 0) return F::pure(bits[0] != 0, 0);
  const std::size_t quarter = bits.size() / 4;
  return F::mixed(level, {build_range(bits.subspan(0, quarter), level - 1),
                          build_range(bits.subspan(quarter, quarter), level - 1),
                          build_range(bits.subspan(2 * quarter, quarter), level - 1),
                          build_range(bits.subspan(3 * quarter, quarter), level - 1)});
}

NodePtr rect_node(std::uint32_t qx, std::uint32_t qy, std::uint32_t size,
                  int level, std::uint32_t x0, std::uint32_t y0,
                  std::uint32_t x1, std::uint32_t y1) {
  const std::uint32_t qx1 = qx + size - 1, qy1 = qy + size - 1;
  if (qx1 < x0 || qx > x1 || qy1 < y0 || qy > y1) return F::pure0();
  if (qx >= x0 && qx1 <= x1 && qy >= y0 && qy1 <= y1) return F::pure1(level);
  const std::uint32_t h = size / 2;
  return F::mixed(level, {rect_node(qx, qy, h, level - 1, x0, y0, x1, y1),
                          rect_node(qx + h, qy, h, level - 1, x0, y0, x1, y1),
                          rect_node(qx, qy + h, h, level - 1, x0, y0, x1, y1),
                          rect_node(qx + h, qy + h, h, level - 1, x0, y0, x1, y1)});
}

NodePtr and_node(const NodePtr& a, const NodePtr& b, int level) {
  if (a->kind() == NodeKind::kPure0 || b->kind() == NodeKind::kPure1) return a;
  if (b->kind() == NodeKind::kPure0 || a->kind() == NodeKind::kPure1) return b;
  std::array<NodePtr, 4> c;
  for (int i = 0; i < 4; ++i) {
    c[i] = and_node(F::child_ptr(*a, i), F::child_ptr(*b, i), level - 1);
  }
  return F::mixed(level, std::move(c));
}

NodePtr or_node(const NodePtr& a, const NodePtr& b, int level) {
  if (a->kind() == NodeKind::kPure1 || b->kind() == NodeKind::kPure0) return a;
  if (b->kind() == NodeKind::kPure1 || a->kind() == NodeKind::kPure0) return b;
  std::array<NodePtr, 4> c;
  for (int i = 0; i < 4; ++i) {
    c[i] = or_node(F::child_ptr(*a, i), F::child_ptr(*b, i), level - 1);
  }
  return F::mixed(level, std::move(c));
}

NodePtr not_node(const NodePtr& a, int level) {
  switch (a->kind()) {
    case NodeKind::kPure0:
      return F::pure1(level);
    case NodeKind::kPure1:
      return F::pure0();
    case NodeKind::kMixed:
      break;
  }
  std::array<NodePtr, 4> c;
  for (int i = 0; i < 4; ++i) c[i] = not_node(F::child_ptr(*a, i), level - 1);
  return F::mixed(level, std::move(c));
}

bool equal_nodes(const Node& a, const Node& b) {
  if (&a == &b) return true;
  if (a.kind() != b.kind() || a.count() != b.count()) return false;
  if (a.is_pure()) return true;
  for (int i = 0; i < 4; ++i) {
    if (!equal_nodes(a.child(i), b.child(i))) return false;
  }
  return true;
}

std::size_t count_nodes(const Node& n, bool mixed_only) {
  if (n.is_pure()) return mixed_only ? 0 : 1;
  std::size_t total = 1;
  for (int i = 0; i < 4; ++i) total += count_nodes(n.child(i), mixed_only);
  return total;
}

void fill_bits(const Node& n, std::span<std::uint8_t> out) {
  switch (n.kind()) {
    case NodeKind::kPure0:
      return;  // caller zero-initializes
    case NodeKind::kPure1:
      std::fill(out.begin(), out.end(), std::uint8_t{1});
      return;
    case NodeKind::kMixed:
      break;
  }
  const std::size_t quarter = out.size() / 4;
  for (int i = 0; i < 4; ++i) {
    fill_bits(n.child(i), out.subspan(i * quarter, quarter));
  }
}

void emit_tags(const Node& n, std::vector<std::uint8_t>& out) {
  out.push_back(static_cast<std::uint8_t>(n.kind()));
  if (n.is_pure()) return;
  for (int i = 0; i < 4; ++i) emit_tags(n.child(i), out);
}

NodePtr parse_tags(detail::ByteReader& in, int level) {
  const std::size_t at = in.pos();
  const std::uint8_t tag = in.u8();
  switch (tag) {
    case 0:
      return F::pure0();
    case 1:
      return F::pure1(level);
    case 2: {
      if (level == 0) {
        throw FormatError("mixed node below the 1x1 leaf level", at,
                          in.source());
      }
      std::array<NodePtr, 4> c;
      for (int i = 0; i < 4; ++i) c[i] = parse_tags(in, level - 1);
      NodePtr node = F::mixed(level, c);
      if (node->is_pure()) {
        throw FormatError("non-canonical mixed node with uniform children", at,
                          in.source());
      }
      return node;
    }
    default:
      throw FormatError("unknown node tag " + std::to_string(tag), at,
                        in.source());
  }
}

void require_same_side(const PTree& a, const PTree& b) {
  if (a.side() != b.side()) {
    throw IncompatibleError("P-tree sides differ: " + std::to_string(a.side()) +
                            " vs " + std::to_string(b.side()));
  }
}

}  // namespace

PTree::PTree() : PTree(1, F::pure0()) {}

PTree::PTree(std::uint32_t side, NodePtr root)
    : side_(side), depth_(std::countr_zero(side)), root_(std::move(root)) {}

PTree PTree::pure0(std::uint32_t side) {
  level_of_side(side);
  return PTree(side, F::pure0());
}

PTree PTree::pure1(std::uint32_t side) {
  return PTree(side, F::pure1(level_of_side(side)));
}

std::uint64_t PTree::quadrant_count(std::span<const int> path) const {
  if (path.size() > static_cast<std::size_t>(depth_)) {
    throw PathError("quadrant path of length " + std::to_string(path.size()) +
                    " exceeds tree depth " + std::to_string(depth_));
  }
  const Node* n = root_.get();
  int level = depth_;
  for (int idx : path) {
    if (idx < 0 || idx > 3) {
      throw PathError("quadrant index " + std::to_string(idx) +
                      " outside 0..3");
    }
    --level;
    if (n->is_pure()) {
      // keep descending only to validate the remaining indices
      continue;
    }
    n = &n->child(idx);
  }
  if (n->kind() == NodeKind::kPure1) return F::full_count(level);
  return n->count();
}

std::size_t PTree::node_count() const { return count_nodes(*root_, false); }

std::size_t PTree::mixed_node_count() const {
  return count_nodes(*root_, true);
}

bool operator==(const PTree& a, const PTree& b) {
  return a.side_ == b.side_ && equal_nodes(*a.root_, *b.root_);
}

PTree build_from_bits(std::span<const std::uint8_t> bits, std::uint32_t side) {
  const int level = level_of_side(side);
  if (bits.size() != static_cast<std::size_t>(side) * side) {
    throw InputError("bit count " + std::to_string(bits.size()) +
                     " does not match side " + std::to_string(side));
  }
  return F::tree(side, build_range(bits, level));
}

PTree build_from_plane(const BitPlane& plane) {
  return build_from_bits(plane.bits, plane.info.side);
}

PTree build_rectangle_mask(std::uint32_t side, std::uint32_t x0,
                           std::uint32_t y0, std::uint32_t x1,
                           std::uint32_t y1) {
  const int level = level_of_side(side);
  if (x0 > x1 || y0 > y1 || x1 >= side || y1 >= side) {
    throw CoordinateError("rectangle outside the square of side " +
                          std::to_string(side));
  }
  return F::tree(side, rect_node(0, 0, side, level, x0, y0, x1, y1));
}

PTree build_extent_mask(std::uint32_t side, std::uint32_t width,
                        std::uint32_t height) {
  if (width == 0 || height == 0) {
    throw InputError("extent must be non-empty");
  }
  return build_rectangle_mask(side, 0, 0, width - 1, height - 1);
}

PTree logical_and(const PTree& a, const PTree& b) {
  require_same_side(a, b);
  return F::tree(a.side(),
                 and_node(F::root_ptr(a), F::root_ptr(b), a.depth()));
}

PTree logical_or(const PTree& a, const PTree& b) {
  require_same_side(a, b);
  return F::tree(a.side(), or_node(F::root_ptr(a), F::root_ptr(b), a.depth()));
}

PTree complement(const PTree& a) {
  return F::tree(a.side(), not_node(F::root_ptr(a), a.depth()));
}

std::vector<std::uint8_t> to_bits(const PTree& t) {
  std::vector<std::uint8_t> bits(t.cell_count(), 0);
  fill_bits(t.root(), bits);
  return bits;
}

BitPlane to_plane(const PTree& t) {
  return to_plane(t, PlaneInfo{0, 1, t.side(), t.side(), t.side()});
}

BitPlane to_plane(const PTree& t, const PlaneInfo& info) {
  if (info.side != t.side()) {
    throw IncompatibleError("plane metadata side does not match the tree");
  }
  return BitPlane{info, to_bits(t)};
}

std::vector<std::uint8_t> serialize(const PTree& t) {
  std::vector<std::uint8_t> out;
  detail::put_magic(out, "PTR1");
  detail::put_u16(out, static_cast<std::uint16_t>(t.side()));
  detail::put_u8(out, 0);
  emit_tags(t.root(), out);
  return out;
}

PTree deserialize(std::span<const std::uint8_t> bytes,
                  const std::string& source) {
  detail::ByteReader in(bytes, source);
  in.expect_magic("PTR1");
  const std::uint16_t side = in.u16();
  if (!is_power_of_two(side)) {
    throw FormatError("side " + std::to_string(side) +
                          " is not a power of two",
                      4, source);
  }
  in.u8();  // reserved
  NodePtr root = parse_tags(in, std::countr_zero(side));
  if (in.remaining() != 0) {
    throw FormatError("trailing bytes after tag stream", in.pos(), source);
  }
  return F::tree(side, std::move(root));
}

void write_ptree(const PTree& t, const std::filesystem::path& path) {
  detail::write_file(path, serialize(t));
}

PTree read_ptree(const std::filesystem::path& path) {
  return deserialize(detail::read_file(path), path.string());
}

}  // namespace ptree
