#include "gcl/augmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gcl/errors.hpp"
#include "gcl/rng.hpp"

namespace gcl {

void AugRanges::validate() const {
  if (scale.lo > scale.hi || rotation.lo > rotation.hi ||
      translation.lo > translation.hi) {
    throw DataError("AugRanges: lower bound exceeds upper bound");
  }
  if (rotation.lo < 0.0 || rotation.hi > kTwoPi) {
    throw DataError("AugRanges: rotation bounds must lie within [0, 2pi)");
  }
  if (crop_fraction <= 0.0 || crop_fraction >= 1.0) {
    throw DataError("AugRanges: crop fraction must be in (0, 1)");
  }
  if (jitter_sigma < 0.0) {
    throw DataError("AugRanges: jitter sigma must be nonnegative");
  }
}

Eigen::Matrix3d rotation_matrix(const Eigen::Vector3d& euler) {
  const double cr = std::cos(euler.x()), sr = std::sin(euler.x());
  const double cp = std::cos(euler.y()), sp = std::sin(euler.y());
  const double cy = std::cos(euler.z()), sy = std::sin(euler.z());
  Eigen::Matrix3d rx, ry, rz;
  rx << 1, 0, 0, 0, cr, -sr, 0, sr, cr;
  ry << cp, 0, sp, 0, 1, 0, -sp, 0, cp;
  rz << cy, -sy, 0, sy, cy, 0, 0, 0, 1;
  return rz * ry * rx;
}

Augmentation sample_random(const AugRanges& ranges, std::uint64_t seed) {
  ranges.validate();
  Rng rng(seed);
  Augmentation aug;
  if (ranges.scale_enabled) {
    for (int i = 0; i < 3; ++i) {
      aug.scale[i] = rng.uniform(ranges.scale.lo, ranges.scale.hi);
    }
  }
  if (ranges.rotation_enabled) {
    for (int i = 0; i < 3; ++i) {
      aug.rotation[i] = rng.uniform(ranges.rotation.lo, ranges.rotation.hi);
    }
  }
  if (ranges.translation_enabled) {
    for (int i = 0; i < 3; ++i) {
      aug.translation[i] =
          rng.uniform(ranges.translation.lo, ranges.translation.hi);
    }
  }
  if (ranges.crop_enabled) {
    aug.crop = CropSpec{rng.next_u64(), ranges.crop_fraction};
  }
  if (ranges.jitter_enabled) {
    aug.jitter = JitterSpec{ranges.jitter_sigma, rng.next_u64()};
  }
  return aug;
}

std::vector<int> crop_indices(const PointCloud& cloud,
                              std::uint64_t anchor_seed, double fraction) {
  const int n = cloud.size();
  if (n < 1) throw DataError("crop: empty cloud");
  if (fraction <= 0.0 || fraction >= 1.0) {
    throw DataError("crop: fraction must be in (0, 1)");
  }
  const int removed = static_cast<int>(std::floor(fraction * n));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (removed == 0) return order;
  if (removed >= n) throw DataError("crop: no survivors");

  Rng rng(anchor_seed);
  const int anchor = static_cast<int>(rng.index(n));
  const Eigen::Vector3d anchor_point = cloud.points[anchor];
  // Remove the `removed` points nearest to the anchor; ties by index so
  // the cut is deterministic.
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double da = (cloud.points[a] - anchor_point).squaredNorm();
    const double db = (cloud.points[b] - anchor_point).squaredNorm();
    return da < db || (da == db && a < b);
  });
  std::vector<int> kept(order.begin() + removed, order.end());
  std::sort(kept.begin(), kept.end());
  return kept;
}

ApplyResult apply(const Augmentation& aug, const PointCloud& cloud,
                  std::optional<int> point_budget, std::uint64_t seed) {
  if (cloud.points.empty()) throw DataError("apply: empty cloud");
  if ((aug.scale.array() == 0.0).any()) {
    throw DataError("apply: zero scale factor is not invertible");
  }

  std::vector<int> surviving;
  if (aug.crop) {
    surviving = crop_indices(cloud, aug.crop->anchor_seed, aug.crop->fraction);
  } else {
    surviving.resize(cloud.size());
    std::iota(surviving.begin(), surviving.end(), 0);
  }

  // Budget subsample folded into the surviving set (sampled order).
  if (point_budget && *point_budget < static_cast<int>(surviving.size())) {
    if (*point_budget < 1) throw DataError("apply: point budget must be >= 1");
    const int m = *point_budget;
    const int n = static_cast<int>(surviving.size());
    Rng rng(seed);
    for (int i = 0; i < m; ++i) {
      const int j = i + static_cast<int>(rng.index(n - i));
      std::swap(surviving[i], surviving[j]);
    }
    surviving.resize(m);
  }

  const Eigen::Matrix3d rot = rotation_matrix(aug.rotation);
  Rng jitter_rng(aug.jitter.seed);

  ApplyResult result;
  result.record.augmentation = aug;
  result.record.surviving_indices = surviving;
  result.record.jitter_noise.reserve(surviving.size());
  result.cloud.points.reserve(surviving.size());
  result.cloud.label = cloud.label;

  for (const int idx : surviving) {
    Eigen::Vector3d p = cloud.points[idx].cwiseProduct(aug.scale);
    p = rot * p + aug.translation;
    Eigen::Vector3d noise = Eigen::Vector3d::Zero();
    if (aug.jitter.sigma > 0.0) {
      noise = {jitter_rng.normal(0.0, aug.jitter.sigma),
               jitter_rng.normal(0.0, aug.jitter.sigma),
               jitter_rng.normal(0.0, aug.jitter.sigma)};
    }
    result.cloud.points.push_back(p + noise);
    result.record.jitter_noise.push_back(noise);
  }

  std::vector<int> sources(surviving.size());
  for (std::size_t i = 0; i < surviving.size(); ++i) {
    sources[i] = cloud.source_indices ? (*cloud.source_indices)[surviving[i]]
                                      : surviving[i];
  }
  result.cloud.source_indices = std::move(sources);
  return result;
}

PointCloud invert_apply(const AppliedRecord& record, const PointCloud& cloud,
                        bool invert_jitter) {
  const std::size_t n = cloud.points.size();
  if (record.surviving_indices.size() != n ||
      record.jitter_noise.size() != n) {
    throw DataError("invert_apply: record does not match cloud size");
  }
  const Augmentation& aug = record.augmentation;
  if ((aug.scale.array() == 0.0).any()) {
    throw NumericError("invert_apply: zero scale factor");
  }
  const Eigen::Matrix3d rot_t = rotation_matrix(aug.rotation).transpose();
  const Eigen::Vector3d inv_scale = aug.scale.cwiseInverse();

  PointCloud out;
  out.label = cloud.label;
  out.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Vector3d p = cloud.points[i];
    if (invert_jitter) p -= record.jitter_noise[i];
    p = rot_t * (p - aug.translation);
    out.points.push_back(p.cwiseProduct(inv_scale));
  }
  out.source_indices = record.surviving_indices;
  return out;
}

double angular_distance(const Eigen::Vector3d& r1, const Eigen::Vector3d& r2) {
  for (int i = 0; i < 3; ++i) {
    if (r1[i] < 0.0 || r1[i] > 1.0 || r2[i] < 0.0 || r2[i] > 1.0) {
      throw std::invalid_argument(
          "angular_distance: components must lie in [0, 1]");
    }
  }
  double d = 0.0;
  for (int i = 0; i < 3; ++i) {
    d += 0.5 - std::abs(std::abs(r1[i] - r2[i]) - 0.5);
  }
  return d;
}

namespace {

double normalized(double v, const Interval& range) {
  const double span = range.hi - range.lo;
  if (span <= 0.0) return 0.0;
  return (v - range.lo) / span;
}

void check_family(const Eigen::Vector3d& v, const Interval& range,
                  bool enabled, double identity, const char* name) {
  for (int i = 0; i < 3; ++i) {
    if (enabled) {
      if (v[i] < range.lo || v[i] > range.hi) {
        throw std::invalid_argument(std::string("aug_distance: ") + name +
                                    " component out of range");
      }
    } else if (v[i] != identity) {
      throw std::invalid_argument(std::string("aug_distance: ") + name +
                                  " must be identity when disabled");
    }
  }
}

}  // namespace

double aug_distance(const Augmentation& a, const Augmentation& b,
                    const DistanceWeights& weights, const AugRanges& ranges) {
  ranges.validate();
  check_family(a.rotation, ranges.rotation, ranges.rotation_enabled, 0.0,
               "rotation");
  check_family(b.rotation, ranges.rotation, ranges.rotation_enabled, 0.0,
               "rotation");
  check_family(a.translation, ranges.translation, ranges.translation_enabled,
               0.0, "translation");
  check_family(b.translation, ranges.translation, ranges.translation_enabled,
               0.0, "translation");
  check_family(a.scale, ranges.scale, ranges.scale_enabled, 1.0, "scale");
  check_family(b.scale, ranges.scale, ranges.scale_enabled, 1.0, "scale");

  // Rotation normalizes by the full circle so wraparound stays meaningful.
  const Eigen::Vector3d ra = a.rotation / kTwoPi;
  const Eigen::Vector3d rb = b.rotation / kTwoPi;
  double d = weights.rotation * angular_distance(ra, rb);

  Eigen::Vector3d ta, tb, sa, sb;
  for (int i = 0; i < 3; ++i) {
    ta[i] = normalized(a.translation[i], ranges.translation);
    tb[i] = normalized(b.translation[i], ranges.translation);
    sa[i] = normalized(a.scale[i], ranges.scale);
    sb[i] = normalized(b.scale[i], ranges.scale);
  }
  d += weights.translation * (ta - tb).norm();
  d += weights.scale * (sa - sb).norm();
  return d;
}

Augmentation strip_crop(Augmentation aug) {
  aug.crop.reset();
  return aug;
}

void to_json(nlohmann::json& j, const Augmentation& aug) {
  j = nlohmann::json{
      {"scale", {aug.scale.x(), aug.scale.y(), aug.scale.z()}},
      {"rotation", {aug.rotation.x(), aug.rotation.y(), aug.rotation.z()}},
      {"translation",
       {aug.translation.x(), aug.translation.y(), aug.translation.z()}},
      {"jitter", {{"sigma", aug.jitter.sigma}, {"seed", aug.jitter.seed}}},
  };
  if (aug.crop) {
    j["crop"] = {{"anchor_seed", aug.crop->anchor_seed},
                 {"fraction", aug.crop->fraction}};
  } else {
    j["crop"] = nullptr;
  }
}

namespace {

Eigen::Vector3d vec3_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw DataError("expected a 3-element array");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

void from_json(const nlohmann::json& j, Augmentation& aug) {
  aug = Augmentation{};
  if (j.contains("scale")) aug.scale = vec3_from_json(j.at("scale"));
  if (j.contains("rotation")) aug.rotation = vec3_from_json(j.at("rotation"));
  if (j.contains("translation")) {
    aug.translation = vec3_from_json(j.at("translation"));
  }
  if (j.contains("jitter")) {
    aug.jitter.sigma = j.at("jitter").at("sigma").get<double>();
    aug.jitter.seed = j.at("jitter").at("seed").get<std::uint64_t>();
  }
  if (j.contains("crop") && !j.at("crop").is_null()) {
    aug.crop = CropSpec{j.at("crop").at("anchor_seed").get<std::uint64_t>(),
                        j.at("crop").at("fraction").get<double>()};
  }
}

void to_json(nlohmann::json& j, const AppliedRecord& record) {
  nlohmann::json noise = nlohmann::json::array();
  for (const auto& v : record.jitter_noise) {
    noise.push_back({v.x(), v.y(), v.z()});
  }
  j = nlohmann::json{{"augmentation", record.augmentation},
                     {"surviving_indices", record.surviving_indices},
                     {"jitter_noise", std::move(noise)}};
}

void from_json(const nlohmann::json& j, AppliedRecord& record) {
  record.augmentation = j.at("augmentation").get<Augmentation>();
  record.surviving_indices =
      j.at("surviving_indices").get<std::vector<int>>();
  record.jitter_noise.clear();
  for (const auto& v : j.at("jitter_noise")) {
    record.jitter_noise.push_back(vec3_from_json(v));
  }
  if (record.jitter_noise.size() != record.surviving_indices.size()) {
    throw DataError("applied record: noise and index lengths differ");
  }
}

void to_json(nlohmann::json& j, const AugRanges& ranges) {
  j = nlohmann::json{
      {"scale",
       {{"lo", ranges.scale.lo},
        {"hi", ranges.scale.hi},
        {"enabled", ranges.scale_enabled}}},
      {"rotation",
       {{"lo", ranges.rotation.lo},
        {"hi", ranges.rotation.hi},
        {"enabled", ranges.rotation_enabled}}},
      {"translation",
       {{"lo", ranges.translation.lo},
        {"hi", ranges.translation.hi},
        {"enabled", ranges.translation_enabled}}},
      {"crop",
       {{"enabled", ranges.crop_enabled}, {"fraction", ranges.crop_fraction}}},
      {"jitter",
       {{"enabled", ranges.jitter_enabled}, {"sigma", ranges.jitter_sigma}}},
  };
}

void from_json(const nlohmann::json& j, AugRanges& ranges) {
  ranges = AugRanges{};
  auto interval = [&](const char* key, Interval& out, bool& enabled) {
    if (!j.contains(key)) return;
    const auto& o = j.at(key);
    if (o.contains("lo")) out.lo = o.at("lo").get<double>();
    if (o.contains("hi")) out.hi = o.at("hi").get<double>();
    if (o.contains("enabled")) enabled = o.at("enabled").get<bool>();
  };
  interval("scale", ranges.scale, ranges.scale_enabled);
  interval("rotation", ranges.rotation, ranges.rotation_enabled);
  interval("translation", ranges.translation, ranges.translation_enabled);
  if (j.contains("crop")) {
    const auto& o = j.at("crop");
    if (o.contains("enabled")) ranges.crop_enabled = o.at("enabled").get<bool>();
    if (o.contains("fraction")) {
      ranges.crop_fraction = o.at("fraction").get<double>();
    }
  }
  if (j.contains("jitter")) {
    const auto& o = j.at("jitter");
    if (o.contains("enabled")) {
      ranges.jitter_enabled = o.at("enabled").get<bool>();
    }
    if (o.contains("sigma")) ranges.jitter_sigma = o.at("sigma").get<double>();
  }
  ranges.validate();
}

}  // namespace gcl
