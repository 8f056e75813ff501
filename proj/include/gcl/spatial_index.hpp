#pragma once

#include <vector>

#include "gcl/point_cloud.hpp"

namespace gcl {

// Exact nearest-neighbour kd-tree over a fixed cloud. Results match a
// brute-force scan, including the tie rule: equal distances resolve to
// the lowest point index. Immutable after construction.
class SpatialIndex {
 public:
  explicit SpatialIndex(const PointCloud& cloud);

  int nearest(const Eigen::Vector3d& query) const;
  int size() const { return static_cast<int>(points_.size()); }

 private:
  struct Node {
    int axis = -1;       // -1 marks a leaf
    double split = 0.0;  // pivot coordinate along axis
    int pivot = -1;      // entry in order_ held at this node
    int left = -1;
    int right = -1;
    int begin = 0;  // leaf range into order_
    int end = 0;
  };

  int build(int begin, int end, int depth);
  void search(int node, const Eigen::Vector3d& q, double& best_d2,
              int& best_idx) const;
  void consider(int point_idx, const Eigen::Vector3d& q, double& best_d2,
                int& best_idx) const;

  std::vector<Eigen::Vector3d> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;

  static constexpr int kLeafSize = 16;
};

// argmin over the indexed cloud of Euclidean distance to query.
inline int nearest_index(const SpatialIndex& index,
                         const Eigen::Vector3d& query) {
  return index.nearest(query);
}

}  // namespace gcl
