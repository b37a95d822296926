// Copyright 2026 The rpkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <queue>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "rpkit/error.hpp"
#include "rpkit/io.hpp"
#include "rpkit/matrix.hpp"
#include "rpkit/parallel.hpp"
#include "rpkit/rng.hpp"

// Approximate nearest neighbors on forests of random-projection partition
// trees. Search runs in two stages: candidate selection by routing the
// query through every tree (with margin-ordered backtracking up to a
// budget), then exact Euclidean evaluation of the candidates.

namespace rpkit::ann {

inline constexpr std::size_t kDefaultLeafSize = 16;
inline constexpr std::size_t kDefaultTreeCount = 10;

// Default candidate budget for a requested neighbor count.
inline std::size_t default_budget(std::size_t top_k) { return 10 * top_k; }

// ---------------------------------------------------------------------------
// Trees
// ---------------------------------------------------------------------------

// Interior nodes carry a Gaussian direction and the median projection
// threshold; points with projection < threshold descend left, the rest
// right. Leaves carry row indices into the indexed matrix.
struct RpTreeNode {
  Vector direction;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::vector<std::uint32_t> indices;

  bool is_leaf() const { return left < 0; }
};

struct RpTree {
  // nodes[0] is the root; children always follow their parent.
  std::vector<RpTreeNode> nodes;
};

namespace detail {

inline double row_query_distance(const Matrix& data, std::uint32_t row,
                                 const Vector& q) {
  double acc = 0.0;
  for (std::size_t c = 0; c < data.cols(); ++c) {
    const double d = data(row, c) - q[c];
    acc += d * d;
  }
  return std::sqrt(acc);
}

inline double row_projection(const Matrix& data, std::uint32_t row,
                             const Vector& dir) {
  double acc = 0.0;
  for (std::size_t c = 0; c < data.cols(); ++c) acc += data(row, c) * dir[c];
  return acc;
}

inline std::int32_t build_node(const Matrix& data,
                               std::vector<std::uint32_t> members,
                               std::size_t leaf_size, RngStream& rng,
                               std::vector<RpTreeNode>& nodes) {
  const auto id = static_cast<std::int32_t>(nodes.size());
  nodes.emplace_back();
  if (members.size() <= leaf_size) {
    nodes[static_cast<std::size_t>(id)].indices = std::move(members);
    return id;
  }
  Vector dir = sample_gaussian(rng, data.cols());
  Vector proj(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    proj[i] = row_projection(data, members[i], dir);
  }
  Vector sorted = proj;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  const double threshold = (sorted.size() % 2 == 1)
                               ? sorted[mid]
                               : 0.5 * (sorted[mid - 1] + sorted[mid]);
  std::vector<std::uint32_t> left_members;
  std::vector<std::uint32_t> right_members;
  for (std::size_t i = 0; i < members.size(); ++i) {
    (proj[i] < threshold ? left_members : right_members)
        .push_back(members[i]);
  }
  if (left_members.empty() || right_members.empty()) {
    // All projections collided (duplicate points, typically). The median
    // rule cannot separate them, so fall back to an index split; any leaf
    // the query reaches then holds an equivalent point.
    left_members.clear();
    right_members.clear();
    const std::size_t half = members.size() / 2;
    left_members.assign(members.begin(), members.begin() + half);
    right_members.assign(members.begin() + half, members.end());
  }
  {
    auto& nd = nodes[static_cast<std::size_t>(id)];
    nd.direction = std::move(dir);
    nd.threshold = threshold;
  }
  const auto left = build_node(data, std::move(left_members), leaf_size, rng, nodes);
  nodes[static_cast<std::size_t>(id)].left = left;
  const auto right = build_node(data, std::move(right_members), leaf_size, rng, nodes);
  nodes[static_cast<std::size_t>(id)].right = right;
  return id;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Forest
// ---------------------------------------------------------------------------

class RpForest {
 public:
  RpForest(Matrix data, std::vector<RpTree> trees, std::size_t leaf_size,
           std::uint64_t seed)
      : data_(std::move(data)),
        trees_(std::move(trees)),
        leaf_size_(leaf_size),
        seed_(seed) {}

  const Matrix& data() const { return data_; }
  const std::vector<RpTree>& trees() const { return trees_; }
  std::size_t leaf_size() const { return leaf_size_; }
  std::uint64_t seed() const { return seed_; }

 private:
  Matrix data_;
  std::vector<RpTree> trees_;
  std::size_t leaf_size_;
  std::uint64_t seed_;
};

// Tree t draws from stream (seed, t), so the forest is identical whatever
// order or thread count builds it.
inline RpForest build_forest(const Matrix& data, std::size_t n_trees,
                             std::size_t leaf_size, std::uint64_t seed,
                             unsigned threads = 1) {
  if (data.rows() == 0) {
    throw std::invalid_argument("build_forest: dataset is empty");
  }
  if (data.rows() > 0xffffffffULL) {
    throw std::invalid_argument("build_forest: too many rows to index");
  }
  if (n_trees == 0) {
    throw std::invalid_argument("build_forest: n_trees must be >= 1");
  }
  if (leaf_size == 0) {
    throw std::invalid_argument("build_forest: leaf_size must be >= 1");
  }
  std::vector<RpTree> trees(n_trees);
  parallel_for_chunks(n_trees, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      RngStream rng(seed, t);
      std::vector<std::uint32_t> all(data.rows());
      std::iota(all.begin(), all.end(), 0u);
      trees[t].nodes.reserve(2 * data.rows() / leaf_size + 1);
      detail::build_node(data, std::move(all), leaf_size, rng, trees[t].nodes);
    }
  });
  return RpForest(data, std::move(trees), leaf_size, seed);
}

// ---------------------------------------------------------------------------
// Search
// ---------------------------------------------------------------------------

struct Neighbor {
  std::uint32_t index = 0;
  double distance = 0.0;
};

struct QueryResult {
  // Ascending by (distance, index).
  std::vector<Neighbor> neighbors;
  std::size_t candidate_count = 0;
};

inline QueryResult brute_force_knn(const Matrix& data, const Vector& q,
                                   std::size_t top_k) {
  if (q.size() != data.cols()) {
    throw std::invalid_argument(
        "knn: query has length " + std::to_string(q.size()) +
        " but data has " + std::to_string(data.cols()) + " columns");
  }
  if (top_k == 0) throw std::invalid_argument("knn: top_k must be >= 1");
  std::vector<Neighbor> all(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto row = static_cast<std::uint32_t>(i);
    all[i] = {row, detail::row_query_distance(data, row, q)};
  }
  std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
    return std::tie(a.distance, a.index) < std::tie(b.distance, b.index);
  });
  const std::size_t keep = std::min(top_k, all.size());
  all.resize(keep);
  return {std::move(all), data.rows()};
}

// Stage 1 routes q down every tree, then pops the smallest
// |projection - threshold| margin off a forest-wide priority queue and
// explores that skipped branch, until the distinct-candidate budget is met
// or the forest is exhausted. Stage 2 is exact.
inline QueryResult query(const RpForest& forest, const Vector& q,
                         std::size_t top_k, std::size_t budget) {
  const Matrix& data = forest.data();
  if (q.size() != data.cols()) {
    throw std::invalid_argument(
        "query: vector has length " + std::to_string(q.size()) +
        " but the forest indexes " + std::to_string(data.cols()) +
        " columns");
  }
  if (top_k == 0) throw std::invalid_argument("query: top_k must be >= 1");
  if (budget < top_k) {
    throw std::invalid_argument("query: budget " + std::to_string(budget) +
                                " is below top_k " + std::to_string(top_k));
  }

  struct Pending {
    double margin;
    std::uint32_t tree;
    std::int32_t node;
    bool operator>(const Pending& o) const {
      return std::tie(margin, tree, node) > std::tie(o.margin, o.tree, o.node);
    }
  };
  std::priority_queue<Pending, std::vector<Pending>, std::greater<Pending>>
      frontier;
  std::vector<char> seen(data.rows(), 0);
  std::vector<std::uint32_t> candidates;

  auto descend = [&](std::uint32_t tree, std::int32_t node) {
    const auto& nodes = forest.trees()[tree].nodes;
    while (!nodes[static_cast<std::size_t>(node)].is_leaf()) {
      const auto& nd = nodes[static_cast<std::size_t>(node)];
      const double p = dot(nd.direction, q);
      const bool go_left = p < nd.threshold;
      frontier.push({std::abs(p - nd.threshold), tree,
                     go_left ? nd.right : nd.left});
      node = go_left ? nd.left : nd.right;
    }
    for (const std::uint32_t idx : nodes[static_cast<std::size_t>(node)].indices) {
      if (!seen[idx]) {
        seen[idx] = 1;
        candidates.push_back(idx);
      }
    }
  };

  for (std::uint32_t t = 0; t < forest.trees().size(); ++t) descend(t, 0);
  while (candidates.size() < budget && !frontier.empty()) {
    const Pending next = frontier.top();
    frontier.pop();
    descend(next.tree, next.node);
  }

  std::vector<Neighbor> scored(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    scored[i] = {candidates[i],
                 detail::row_query_distance(data, candidates[i], q)};
  }
  std::sort(scored.begin(), scored.end(),
            [](const Neighbor& a, const Neighbor& b) {
              return std::tie(a.distance, a.index) <
                     std::tie(b.distance, b.index);
            });
  const std::size_t keep = std::min(top_k, scored.size());
  const std::size_t candidate_count = candidates.size();
  scored.resize(keep);
  return {std::move(scored), candidate_count};
}

// Mean overlap with the exact top_k over the query rows. The data argument
// must be the matrix the forest indexed; it is taken explicitly so the
// exact side of the comparison is visible at the call site.
inline double recall_at_k(const RpForest& forest, const Matrix& data,
                          const Matrix& queries, std::size_t top_k,
                          std::size_t budget) {
  if (!(data == forest.data())) {
    throw std::invalid_argument(
        "recall_at_k: data does not match the forest's indexed matrix");
  }
  if (queries.rows() == 0) {
    throw std::invalid_argument("recall_at_k: need at least one query");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < queries.rows(); ++i) {
    const Vector q = queries.row(i);
    const QueryResult approx = query(forest, q, top_k, budget);
    const QueryResult exact = brute_force_knn(data, q, top_k);
    std::vector<char> in_exact(data.rows(), 0);
    for (const auto& nb : exact.neighbors) in_exact[nb.index] = 1;
    std::size_t hits = 0;
    for (const auto& nb : approx.neighbors) hits += in_exact[nb.index];
    total += static_cast<double>(hits) / static_cast<double>(top_k);
  }
  return total / static_cast<double>(queries.rows());
}

// ---------------------------------------------------------------------------
// Forest files
// ---------------------------------------------------------------------------

inline constexpr char kForestMagic[4] = {'R', 'P', 'K', 'F'};
inline constexpr std::uint32_t kForestVersion = 1;

// Layout, all little-endian after the magic:
//   "RPKF" version:u32 rows:u32 cols:u32 n_trees:u32 leaf_size:u32 seed:u64
//   per tree: node_count:u32, then nodes in index order:
//     tag:u8 = 0 split: direction f64*cols, threshold f64, left u32, right u32
//     tag:u8 = 1 leaf:  count u32, indices u32*count
// The indexed matrix itself is not stored; loading takes it as an argument
// and cross-checks the header.
inline void save_forest(const std::string& path, const RpForest& forest) {
  std::string out;
  out.append(kForestMagic, 4);
  io::detail::put_u32(out, kForestVersion);
  io::detail::put_u32(out, static_cast<std::uint32_t>(forest.data().rows()));
  io::detail::put_u32(out, static_cast<std::uint32_t>(forest.data().cols()));
  io::detail::put_u32(out, static_cast<std::uint32_t>(forest.trees().size()));
  io::detail::put_u32(out, static_cast<std::uint32_t>(forest.leaf_size()));
  io::detail::put_u64(out, forest.seed());
  for (const RpTree& tree : forest.trees()) {
    io::detail::put_u32(out, static_cast<std::uint32_t>(tree.nodes.size()));
    for (const RpTreeNode& nd : tree.nodes) {
      if (nd.is_leaf()) {
        out.push_back(1);
        io::detail::put_u32(out, static_cast<std::uint32_t>(nd.indices.size()));
        for (const std::uint32_t idx : nd.indices) {
          io::detail::put_u32(out, idx);
        }
      } else {
        out.push_back(0);
        for (const double v : nd.direction) io::detail::put_f64(out, v);
        io::detail::put_f64(out, nd.threshold);
        io::detail::put_u32(out, static_cast<std::uint32_t>(nd.left));
        io::detail::put_u32(out, static_cast<std::uint32_t>(nd.right));
      }
    }
  }
  io::detail::write_file_bytes(path, out);
}

inline RpForest load_forest(const std::string& path, const Matrix& data) {
  const std::string b = io::detail::read_file_bytes(path);
  std::size_t off = 0;
  auto need = [&](std::size_t n) {
    if (b.size() - off < n) {
      throw io_error(path + ": truncated at byte " + std::to_string(b.size()));
    }
  };
  auto take_u32 = [&]() {
    need(4);
    const std::uint32_t v = io::detail::get_u32(b, off);
    off += 4;
    return v;
  };
  auto take_u64 = [&]() {
    need(8);
    const std::uint64_t v = io::detail::get_u64(b, off);
    off += 8;
    return v;
  };
  auto take_f64 = [&]() {
    need(8);
    const double v = io::detail::get_f64(b, off);
    off += 8;
    return v;
  };

  need(4);
  if (b.compare(0, 4, kForestMagic, 4) != 0) {
    throw io_error(path + ": bad magic at byte 0");
  }
  off = 4;
  const std::uint32_t version = take_u32();
  if (version != kForestVersion) {
    throw io_error(path + ": unsupported version " + std::to_string(version));
  }
  const std::uint32_t rows = take_u32();
  const std::uint32_t cols = take_u32();
  const std::uint32_t n_trees = take_u32();
  const std::uint32_t leaf_size = take_u32();
  const std::uint64_t seed = take_u64();
  if (rows != data.rows() || cols != data.cols()) {
    throw std::invalid_argument(
        path + ": forest indexes a " + rpkit::detail::shape_str(rows, cols) +
        " matrix but the supplied data is " +
        rpkit::detail::shape_str(data.rows(), data.cols()));
  }
  if (n_trees == 0 || leaf_size == 0) {
    throw io_error(path + ": zero tree count or leaf size in header");
  }

  std::vector<RpTree> trees(n_trees);
  for (std::uint32_t t = 0; t < n_trees; ++t) {
    const std::uint32_t node_count = take_u32();
    if (node_count == 0) {
      throw io_error(path + ": tree " + std::to_string(t) + " has no nodes");
    }
    trees[t].nodes.resize(node_count);
    std::vector<char> covered(rows, 0);
    std::size_t covered_total = 0;
    for (std::uint32_t i = 0; i < node_count; ++i) {
      need(1);
      const auto tag = static_cast<std::uint8_t>(b[off]);
      ++off;
      RpTreeNode& nd = trees[t].nodes[i];
      if (tag == 0) {
        nd.direction.resize(cols);
        for (std::uint32_t c = 0; c < cols; ++c) nd.direction[c] = take_f64();
        nd.threshold = take_f64();
        const std::uint32_t left = take_u32();
        const std::uint32_t right = take_u32();
        if (left <= i || left >= node_count || right <= i ||
            right >= node_count) {
          throw io_error(path + ": node " + std::to_string(i) + " of tree " +
                         std::to_string(t) + " has out-of-order children");
        }
        nd.left = static_cast<std::int32_t>(left);
        nd.right = static_cast<std::int32_t>(right);
      } else if (tag == 1) {
        const std::uint32_t count = take_u32();
        nd.indices.resize(count);
        for (std::uint32_t c = 0; c < count; ++c) {
          const std::uint32_t idx = take_u32();
          if (idx >= rows || covered[idx]) {
            throw io_error(path + ": leaf of tree " + std::to_string(t) +
                           " repeats or overflows row " + std::to_string(idx));
          }
          covered[idx] = 1;
          nd.indices[c] = idx;
        }
        covered_total += count;
      } else {
        throw io_error(path + ": unknown node tag at byte " +
                       std::to_string(off - 1));
      }
    }
    if (covered_total != rows) {
      throw io_error(path + ": tree " + std::to_string(t) + " covers " +
                     std::to_string(covered_total) + " of " +
                     std::to_string(rows) + " rows");
    }
  }
  if (off != b.size()) {
    throw io_error(path + ": trailing bytes after payload at byte " +
                   std::to_string(off));
  }
  return RpForest(data, std::move(trees), leaf_size, seed);
}

}  // namespace rpkit::ann
