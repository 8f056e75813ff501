#include "gcl/feature_mapping.hpp"

#include "gcl/errors.hpp"
#include "gcl/spatial_index.hpp"

namespace gcl {

StructuralMap structural_map(const PointCloud& view1_inverted,
                             const PointCloud& view2_inverted) {
  if (view1_inverted.points.empty() || view2_inverted.points.empty()) {
    throw DataError("structural_map: empty view");
  }
  const SpatialIndex index(view1_inverted);
  StructuralMap map;
  map.indices.reserve(view2_inverted.points.size());
  for (const auto& p : view2_inverted.points) {
    map.indices.push_back(index.nearest(p));
  }
  return map;
}

Eigen::MatrixXd gather_features(const Eigen::MatrixXd& features,
                                const StructuralMap& map) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(map.indices.size()),
                      features.cols());
  for (std::size_t j = 0; j < map.indices.size(); ++j) {
    const int idx = map.indices[j];
    if (idx < 0 || idx >= features.rows()) {
      throw DataError("gather_features: map index out of range");
    }
    out.row(static_cast<Eigen::Index>(j)) = features.row(idx);
  }
  return out;
}

}  // namespace gcl
