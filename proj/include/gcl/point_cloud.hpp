#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gcl {

struct PointCloud {
  std::vector<Eigen::Vector3d> points;
  std::optional<int> label;
  // Index of each point in the cloud it was derived from. Present after
  // subsampling / cropping so augmentations stay traceable to the source.
  std::optional<std::vector<int>> source_indices;

  int size() const { return static_cast<int>(points.size()); }
};

enum class ShapeKind { Plane, Sphere, Box, Cylinder };

const char* shape_name(ShapeKind kind);
ShapeKind shape_from_name(const std::string& name);

// Plain-text XYZ: one point per line, "x y z" or "x y z label",
// '#' comment lines and blank lines skipped. The label column, when
// present on every line, must be a single integer shared by all lines.
PointCloud load_xyz(const std::string& path);
void save_xyz(const PointCloud& cloud, const std::string& path);

// m distinct points, uniform without replacement, in sampled order.
// source_indices of the result holds the original indices.
PointCloud random_subsample(const PointCloud& cloud, int m,
                            std::uint64_t seed);

// One centroid per occupied voxel, in first-occurrence order.
PointCloud voxel_downsample(const PointCloud& cloud, double voxel_len);

// n points on the unit-scale surface of the primitive, centered at the
// origin, labeled by kind. Deterministic per seed.
PointCloud synth_shape(ShapeKind kind, int n, std::uint64_t seed);

}  // namespace gcl
