#pragma once

#include <cstdint>
#include <deque>
#include <json.hpp>
#include <vector>

#include "gcl/augmentation.hpp"

namespace gcl {

// Inverse Dirac delta kernel: eps/(d+eps). Equals 1 iff d == 0 and
// decreases strictly with distance.
double novelty_kernel(double distance, double epsilon);

// Ordered store of explored augmentations. Insertion order is kept;
// once full, the oldest entry is evicted (FIFO).
class AugMemoryBank {
 public:
  AugMemoryBank(std::size_t capacity, double epsilon, double c);

  void insert(const Augmentation& aug);
  void clear() { entries_.clear(); }

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  double epsilon() const { return epsilon_; }
  double stability_c() const { return c_; }
  const std::deque<Augmentation>& entries() const { return entries_; }

  nlohmann::json to_json() const;
  static AugMemoryBank from_json(const nlohmann::json& j);

 private:
  std::deque<Augmentation> entries_;
  std::size_t capacity_;
  double epsilon_;
  double c_;
};

// Novelty objective for a candidate against the bank:
//   1 / (sqrt(sum over entries of K(d(entry, candidate))) + c).
// An empty bank gives the maximal score 1/c.
double novelty_score(const Augmentation& candidate, const AugMemoryBank& bank,
                     const DistanceWeights& weights = {},
                     const AugRanges& ranges = {});

// Samples `candidates` augmentations (sub-seed per candidate), keeps the
// one with the highest novelty score (ties to the lowest candidate index),
// inserts it into the bank and returns it.
Augmentation select_novel(AugMemoryBank& bank, const AugRanges& ranges,
                          int candidates, std::uint64_t seed,
                          const DistanceWeights& weights = {});

struct AugPair {
  Augmentation first;   // crop stripped, jitter retained
  Augmentation second;  // all families
};

// Two consecutive novelty selections; the bank is updated between them so
// the second pick accounts for the first.
AugPair pair_for_sample(AugMemoryBank& bank, const AugRanges& ranges,
                        int candidates, std::uint64_t seed,
                        const DistanceWeights& weights = {});

struct CoverageMetrics {
  double min_pairwise = 0.0;  // smallest nearest-neighbour distance
  double mean_nn = 0.0;       // mean nearest-neighbour distance
};

// Spread statistics of a sample set under aug_distance.
CoverageMetrics coverage_metrics(const std::vector<Augmentation>& samples,
                                 const DistanceWeights& weights = {},
                                 const AugRanges& ranges = {});

}  // namespace gcl
