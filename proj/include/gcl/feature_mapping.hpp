#pragma once

#include <Eigen/Core>
#include <vector>

#include "gcl/point_cloud.hpp"

namespace gcl {

// indices[j] is the view-1 point closest to view-2 point j, both clouds
// expressed in the original (inverse-augmented) frame. Entries may repeat.
struct StructuralMap {
  std::vector<int> indices;
};

// Exact nearest-neighbour association, ties to the lowest view-1 index.
StructuralMap structural_map(const PointCloud& view1_inverted,
                             const PointCloud& view2_inverted);

// Row j of the result is row map.indices[j] of features. Pure indexing.
Eigen::MatrixXd gather_features(const Eigen::MatrixXd& features,
                                const StructuralMap& map);

}  // namespace gcl
