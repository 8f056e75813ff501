#include "gcl/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "gcl/errors.hpp"
#include "gcl/rng.hpp"

namespace gcl {

const char* shape_name(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Plane: return "plane";
    case ShapeKind::Sphere: return "sphere";
    case ShapeKind::Box: return "box";
    case ShapeKind::Cylinder: return "cylinder";
  }
  throw std::invalid_argument("unknown shape kind");
}

ShapeKind shape_from_name(const std::string& name) {
  if (name == "plane") return ShapeKind::Plane;
  if (name == "sphere") return ShapeKind::Sphere;
  if (name == "box") return ShapeKind::Box;
  if (name == "cylinder") return ShapeKind::Cylinder;
  throw DataError("unknown shape kind: " + name);
}

PointCloud load_xyz(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);

  PointCloud cloud;
  bool all_labeled = true;
  std::optional<long long> shared_label;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream fields(line);
    double x, y, z;
    if (!(fields >> x >> y >> z)) {
      throw DataError(path + ": parse error at line " +
                      std::to_string(line_no));
    }
    std::string fourth, extra;
    if (fields >> fourth) {
      if (fields >> extra) {
        throw DataError(path + ": too many fields at line " +
                        std::to_string(line_no));
      }
      std::size_t used = 0;
      long long label = 0;
      try {
        label = std::stoll(fourth, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != fourth.size()) {
        throw DataError(path + ": label must be an integer at line " +
                        std::to_string(line_no));
      }
      if (shared_label && *shared_label != label) {
        throw DataError(path + ": inconsistent label column at line " +
                        std::to_string(line_no));
      }
      shared_label = label;
    } else {
      all_labeled = false;
    }
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
      throw DataError(path + ": non-finite coordinate at line " +
                      std::to_string(line_no));
    }
    cloud.points.emplace_back(x, y, z);
  }
  if (cloud.points.empty()) throw DataError(path + ": no points");
  if (all_labeled && shared_label) {
    cloud.label = static_cast<int>(*shared_label);
  }
  return cloud;
}

void save_xyz(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  char buf[128];
  for (const auto& p : cloud.points) {
    // 17 significant digits round-trip doubles exactly.
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g", p.x(), p.y(), p.z());
    out << buf;
    if (cloud.label) out << ' ' << *cloud.label;
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

PointCloud random_subsample(const PointCloud& cloud, int m,
                            std::uint64_t seed) {
  const int n = cloud.size();
  if (m < 1 || m > n) {
    throw DataError("random_subsample: need 1 <= m <= " + std::to_string(n) +
                    ", got " + std::to_string(m));
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  // Partial Fisher-Yates: the first m slots are a uniform sample.
  for (int i = 0; i < m; ++i) {
    const int j = i + static_cast<int>(rng.index(n - i));
    std::swap(order[i], order[j]);
  }
  PointCloud out;
  out.label = cloud.label;
  out.points.reserve(m);
  std::vector<int> sources(m);
  for (int i = 0; i < m; ++i) {
    out.points.push_back(cloud.points[order[i]]);
    sources[i] = cloud.source_indices ? (*cloud.source_indices)[order[i]]
                                      : order[i];
  }
  out.source_indices = std::move(sources);
  return out;
}

namespace {

struct VoxelKey {
  std::int64_t x, y, z;
  bool operator==(const VoxelKey&) const = default;
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const {
    std::uint64_t h = splitmix64(static_cast<std::uint64_t>(k.x));
    h = splitmix64(h ^ static_cast<std::uint64_t>(k.y));
    h = splitmix64(h ^ static_cast<std::uint64_t>(k.z));
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

PointCloud voxel_downsample(const PointCloud& cloud, double voxel_len) {
  if (!(voxel_len > 0.0)) {
    throw DataError("voxel_downsample: voxel_len must be positive");
  }
  std::unordered_map<VoxelKey, int, VoxelKeyHash> slot;
  std::vector<Eigen::Vector3d> sums;
  std::vector<int> counts;
  for (const auto& p : cloud.points) {
    const VoxelKey key{static_cast<std::int64_t>(std::floor(p.x() / voxel_len)),
                       static_cast<std::int64_t>(std::floor(p.y() / voxel_len)),
                       static_cast<std::int64_t>(std::floor(p.z() / voxel_len))};
    auto [it, inserted] = slot.try_emplace(key, static_cast<int>(sums.size()));
    if (inserted) {
      sums.push_back(p);
      counts.push_back(1);
    } else {
      sums[it->second] += p;
      ++counts[it->second];
    }
  }
  PointCloud out;
  out.label = cloud.label;
  out.points.reserve(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i) {
    out.points.push_back(sums[i] / counts[i]);
  }
  return out;
}

namespace {

Eigen::Vector3d sample_plane(Rng& rng) {
  return {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), 0.0};
}

Eigen::Vector3d sample_sphere(Rng& rng) {
  const double z = rng.uniform(-1.0, 1.0);
  const double phi = rng.uniform(0.0, 2.0 * M_PI);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

Eigen::Vector3d sample_box(Rng& rng) {
  const int face = static_cast<int>(rng.index(6));
  const double u = rng.uniform(-1.0, 1.0);
  const double v = rng.uniform(-1.0, 1.0);
  const double s = (face % 2 == 0) ? 1.0 : -1.0;
  switch (face / 2) {
    case 0: return {s, u, v};
    case 1: return {u, s, v};
    default: return {u, v, s};
  }
}

Eigen::Vector3d sample_cylinder(Rng& rng) {
  // Radius 1, height 2. Lateral area 4*pi vs 2*pi for both caps.
  if (rng.uniform() < 2.0 / 3.0) {
    const double theta = rng.uniform(0.0, 2.0 * M_PI);
    return {std::cos(theta), std::sin(theta), rng.uniform(-1.0, 1.0)};
  }
  const double r = std::sqrt(rng.uniform());
  const double theta = rng.uniform(0.0, 2.0 * M_PI);
  const double z = rng.uniform() < 0.5 ? 1.0 : -1.0;
  return {r * std::cos(theta), r * std::sin(theta), z};
}

}  // namespace

PointCloud synth_shape(ShapeKind kind, int n, std::uint64_t seed) {
  if (n < 8) throw DataError("synth_shape: need n >= 8");
  Rng rng(seed);
  PointCloud cloud;
  cloud.points.reserve(n);
  for (int i = 0; i < n; ++i) {
    switch (kind) {
      case ShapeKind::Plane: cloud.points.push_back(sample_plane(rng)); break;
      case ShapeKind::Sphere: cloud.points.push_back(sample_sphere(rng)); break;
      case ShapeKind::Box: cloud.points.push_back(sample_box(rng)); break;
      case ShapeKind::Cylinder:
        cloud.points.push_back(sample_cylinder(rng));
        break;
    }
  }
  cloud.label = static_cast<int>(kind);
  return cloud;
}

}  // namespace gcl
