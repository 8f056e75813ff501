#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <vector>

#include "gcl/point_cloud.hpp"

namespace gcl {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct CropSpec {
  std::uint64_t anchor_seed = 0;
  double fraction = 0.3;  // share of points removed around the anchor
};

struct JitterSpec {
  double sigma = 0.0;  // meters; per-coordinate Gaussian noise
  std::uint64_t seed = 0;
};

// One augmentation parameter vector. Application order is fixed:
// crop, scale, rotate, translate, jitter.
struct Augmentation {
  std::optional<CropSpec> crop;
  Eigen::Vector3d scale{1.0, 1.0, 1.0};        // per-axis factors
  Eigen::Vector3d rotation{0.0, 0.0, 0.0};     // Euler angles, radians
  Eigen::Vector3d translation{0.0, 0.0, 0.0};  // meters
  JitterSpec jitter;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct AugRanges {
  Interval scale{0.5, 1.0};
  Interval rotation{0.0, kTwoPi};  // [0, 2pi) per axis
  Interval translation{-1.0, 1.0};
  bool crop_enabled = true;
  bool scale_enabled = true;
  bool rotation_enabled = true;
  bool translation_enabled = true;
  bool jitter_enabled = true;
  double crop_fraction = 0.3;
  double jitter_sigma = 0.01;

  void validate() const;  // lo <= hi per family, rotation within [0, 2pi)
};

// Side data that makes an application invertible: which input points
// survived (in output order) and the noise actually added to each.
struct AppliedRecord {
  Augmentation augmentation;
  std::vector<int> surviving_indices;
  std::vector<Eigen::Vector3d> jitter_noise;
};

// Intrinsic Euler composition R = Rz(yaw) * Ry(pitch) * Rx(roll).
Eigen::Matrix3d rotation_matrix(const Eigen::Vector3d& euler);

// Each enabled family sampled independently and uniformly in its range;
// disabled families are left at identity.
Augmentation sample_random(const AugRanges& ranges, std::uint64_t seed);

// Picks an anchor uniformly, removes the floor(fraction*n) points nearest
// to it (the anchor competes too), returns kept indices ascending.
std::vector<int> crop_indices(const PointCloud& cloud,
                              std::uint64_t anchor_seed, double fraction);

struct ApplyResult {
  PointCloud cloud;
  AppliedRecord record;
};

// Applies crop, scale, rotation, translation, jitter in that order.
// point_budget, when set, folds a final random subsample into the
// surviving indices (budgets >= the survivor count keep every point).
// The seed drives only the budget subsample; crop and jitter draw from
// their own seeds carried inside the augmentation.
ApplyResult apply(const Augmentation& aug, const PointCloud& cloud,
                  std::optional<int> point_budget = std::nullopt,
                  std::uint64_t seed = 0);

// Reverse order: jitter subtraction, translation negation, rotation
// transpose, per-axis scale reciprocal. Crop is skipped (not invertible).
// With invert_jitter=false the recorded noise is left in place, which
// models sensors whose noise cannot be known.
PointCloud invert_apply(const AppliedRecord& record, const PointCloud& cloud,
                        bool invert_jitter = true);

// Wraparound angular distance on rotations normalized to [0,1]:
// sum over dims of 0.5 - ||delta| - 0.5|  ==  min(|delta|, 1-|delta|).
double angular_distance(const Eigen::Vector3d& r1, const Eigen::Vector3d& r2);

struct DistanceWeights {
  double rotation = 1.0;
  double translation = 1.0;
  double scale = 1.0;
};

// Total augmentation distance: weighted sum of the angular rotation
// distance and the L2 distances of translation and scale, each family
// normalized to [0,1] first (rotation by 2pi, the others linearly by
// their configured range). Crop and jitter are point-specific and do
// not participate.
double aug_distance(const Augmentation& a, const Augmentation& b,
                    const DistanceWeights& weights = {},
                    const AugRanges& ranges = {});

Augmentation strip_crop(Augmentation aug);

void to_json(nlohmann::json& j, const Augmentation& aug);
void from_json(const nlohmann::json& j, Augmentation& aug);
void to_json(nlohmann::json& j, const AppliedRecord& record);
void from_json(const nlohmann::json& j, AppliedRecord& record);
void to_json(nlohmann::json& j, const AugRanges& ranges);
void from_json(const nlohmann::json& j, AugRanges& ranges);

}  // namespace gcl
