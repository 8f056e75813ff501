#include "gcl/memory_bank.hpp"

#include <cmath>
#include <limits>

#include "gcl/errors.hpp"
#include "gcl/rng.hpp"

namespace gcl {

double novelty_kernel(double distance, double epsilon) {
  if (distance < 0.0) {
    throw std::invalid_argument("novelty_kernel: negative distance");
  }
  if (epsilon <= 0.0) {
    throw std::invalid_argument("novelty_kernel: epsilon must be positive");
  }
  return epsilon / (distance + epsilon);
}

AugMemoryBank::AugMemoryBank(std::size_t capacity, double epsilon, double c)
    : capacity_(capacity), epsilon_(epsilon), c_(c) {
  if (capacity_ == 0) throw DataError("memory bank: capacity must be >= 1");
  if (epsilon_ <= 0.0 || c_ <= 0.0) {
    throw DataError("memory bank: epsilon and c must be positive");
  }
}

void AugMemoryBank::insert(const Augmentation& aug) {
  if (entries_.size() == capacity_) entries_.pop_front();
  entries_.push_back(aug);
}

nlohmann::json AugMemoryBank::to_json() const {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& aug : entries_) entries.push_back(aug);
  return nlohmann::json{{"capacity", capacity_},
                        {"epsilon", epsilon_},
                        {"c", c_},
                        {"entries", std::move(entries)}};
}

AugMemoryBank AugMemoryBank::from_json(const nlohmann::json& j) {
  AugMemoryBank bank(j.at("capacity").get<std::size_t>(),
                     j.at("epsilon").get<double>(), j.at("c").get<double>());
  for (const auto& entry : j.at("entries")) {
    bank.insert(entry.get<Augmentation>());
  }
  return bank;
}

double novelty_score(const Augmentation& candidate, const AugMemoryBank& bank,
                     const DistanceWeights& weights, const AugRanges& ranges) {
  double kernel_sum = 0.0;
  for (const auto& entry : bank.entries()) {
    kernel_sum += novelty_kernel(aug_distance(entry, candidate, weights, ranges),
                                 bank.epsilon());
  }
  return 1.0 / (std::sqrt(kernel_sum) + bank.stability_c());
}

Augmentation select_novel(AugMemoryBank& bank, const AugRanges& ranges,
                          int candidates, std::uint64_t seed,
                          const DistanceWeights& weights) {
  if (candidates < 1) throw DataError("select_novel: need >= 1 candidate");
  Augmentation best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < candidates; ++i) {
    const Augmentation candidate =
        sample_random(ranges, derive_seed(seed, static_cast<std::uint64_t>(i)));
    const double score = novelty_score(candidate, bank, weights, ranges);
    if (score > best_score) {  // ties keep the earlier candidate
      best_score = score;
      best = candidate;
    }
  }
  bank.insert(best);
  return best;
}

AugPair pair_for_sample(AugMemoryBank& bank, const AugRanges& ranges,
                        int candidates, std::uint64_t seed,
                        const DistanceWeights& weights) {
  const Augmentation a1 =
      select_novel(bank, ranges, candidates, derive_seed(seed, 0), weights);
  const Augmentation a2 =
      select_novel(bank, ranges, candidates, derive_seed(seed, 1), weights);
  // The first view keeps every whole-cloud family but never crops; the
  // bank keeps the uncropped-equivalent entry either way since crop does
  // not participate in the distance.
  return AugPair{strip_crop(a1), a2};
}

CoverageMetrics coverage_metrics(const std::vector<Augmentation>& samples,
                                 const DistanceWeights& weights,
                                 const AugRanges& ranges) {
  const std::size_t n = samples.size();
  if (n < 2) throw DataError("coverage_metrics: need at least 2 samples");
  std::vector<double> nn(n, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = aug_distance(samples[i], samples[j], weights, ranges);
      nn[i] = std::min(nn[i], d);
      nn[j] = std::min(nn[j], d);
    }
  }
  CoverageMetrics out;
  out.min_pairwise = nn[0];
  double sum = 0.0;
  for (const double d : nn) {
    out.min_pairwise = std::min(out.min_pairwise, d);
    sum += d;
  }
  out.mean_nn = sum / static_cast<double>(n);
  return out;
}

}  // namespace gcl
