// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LIDARCL_GEOM_KD_TREE_HPP_
#define LIDARCL_GEOM_KD_TREE_HPP_

#include <algorithm>
#include <cstdint>
#include <vector>

#include "lidarcl/geom/point_cloud.hpp"

namespace lidarcl {

/// Static 3D k-d tree over a subset of cloud points, used for exact
/// fixed-radius queries. Holds a reference to the cloud; the cloud must
/// outlive the tree.
class KdTree {
 public:
  KdTree(const PointCloud& cloud, IndexList indices) : cloud_(cloud), order_(std::move(indices)) {
    nodes_.reserve(order_.size());
    if (!order_.empty()) root_ = build(0, order_.size(), 0);
  }

  /// Appends every indexed point with squared distance <= radius_sq to `out`.
  void radius_search(const Vec3& query, double radius_sq, IndexList& out) const {
    if (root_ >= 0) search(root_, query, radius_sq, out);
  }

 private:
  struct Node {
    Index point;
    int axis;
    std::int32_t left = -1;
    std::int32_t right = -1;
  };

  std::int32_t build(std::size_t begin, std::size_t end, int depth) {
    if (begin >= end) return -1;
    const int axis = depth % 3;
    const std::size_t mid = begin + (end - begin) / 2;
    auto first = order_.begin();
    std::nth_element(first + static_cast<std::ptrdiff_t>(begin), first + static_cast<std::ptrdiff_t>(mid),
                     first + static_cast<std::ptrdiff_t>(end), [&](Index a, Index b) {
                       const double va = cloud_.points[a][axis];
                       const double vb = cloud_.points[b][axis];
                       return va < vb || (va == vb && a < b);
                     });
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({order_[mid], axis});
    const std::int32_t l = build(begin, mid, depth + 1);
    const std::int32_t r = build(mid + 1, end, depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  void search(std::int32_t id, const Vec3& q, double radius_sq, IndexList& out) const {
    const Node& node = nodes_[id];
    const Vec3& p = cloud_.points[node.point];
    if (distance_sq(p, q) <= radius_sq) out.push_back(node.point);
    const double diff = q[node.axis] - p[node.axis];
    const std::int32_t near = diff <= 0.0 ? node.left : node.right;
    const std::int32_t far = diff <= 0.0 ? node.right : node.left;
    if (near >= 0) search(near, q, radius_sq, out);
    // Squared axis gap never exceeds the full squared distance in floating
    // point, so this prune is exact.
    if (far >= 0 && diff * diff <= radius_sq) search(far, q, radius_sq, out);
  }

  const PointCloud& cloud_;
  IndexList order_;
  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
};

}  // namespace lidarcl

#endif  // LIDARCL_GEOM_KD_TREE_HPP_
