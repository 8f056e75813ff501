#include "gcl/spatial_index.hpp"

#include <algorithm>
#include <numeric>

#include "gcl/errors.hpp"

namespace gcl {

SpatialIndex::SpatialIndex(const PointCloud& cloud) : points_(cloud.points) {
  if (points_.empty()) throw DataError("SpatialIndex: empty cloud");
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(2 * points_.size() / kLeafSize + 8);
  root_ = build(0, static_cast<int>(order_.size()), 0);
}

int SpatialIndex::build(int begin, int end, int depth) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  if (end - begin <= kLeafSize) {
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    return id;
  }
  const int axis = depth % 3;
  const int mid = begin + (end - begin) / 2;
  // Index as secondary key keeps the partition deterministic under
  // duplicate coordinates.
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end, [&](int a, int b) {
                     const double ca = points_[a][axis];
                     const double cb = points_[b][axis];
                     return ca < cb || (ca == cb && a < b);
                   });
  const int pivot = order_[mid];
  const double split = points_[pivot][axis];
  const int left = build(begin, mid, depth + 1);
  const int right = build(mid + 1, end, depth + 1);
  Node& node = nodes_[id];
  node.axis = axis;
  node.split = split;
  node.pivot = pivot;
  node.left = left;
  node.right = right;
  return id;
}

void SpatialIndex::consider(int point_idx, const Eigen::Vector3d& q,
                            double& best_d2, int& best_idx) const {
  const double d2 = (points_[point_idx] - q).squaredNorm();
  if (d2 < best_d2 || (d2 == best_d2 && point_idx < best_idx)) {
    best_d2 = d2;
    best_idx = point_idx;
  }
}

void SpatialIndex::search(int node_id, const Eigen::Vector3d& q,
                          double& best_d2, int& best_idx) const {
  const Node& node = nodes_[node_id];
  if (node.axis < 0) {
    for (int i = node.begin; i < node.end; ++i) {
      consider(order_[i], q, best_d2, best_idx);
    }
    return;
  }
  const double delta = q[node.axis] - node.split;
  const int near = delta < 0.0 ? node.left : node.right;
  const int far = delta < 0.0 ? node.right : node.left;
  search(near, q, best_d2, best_idx);
  consider(node.pivot, q, best_d2, best_idx);
  // <= : an equal-distance point with a lower index may sit on the far side.
  if (delta * delta <= best_d2) {
    search(far, q, best_d2, best_idx);
  }
}

int SpatialIndex::nearest(const Eigen::Vector3d& query) const {
  double best_d2 = std::numeric_limits<double>::infinity();
  int best_idx = static_cast<int>(points_.size());
  search(root_, query, best_d2, best_idx);
  return best_idx;
}

}  // namespace gcl
