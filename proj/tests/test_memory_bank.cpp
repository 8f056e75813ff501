#include <doctest.h>

#include <cmath>

#include "gcl/errors.hpp"
#include "gcl/memory_bank.hpp"
#include "gcl/rng.hpp"
#include "test_support.hpp"

using namespace gcl;

namespace {

Augmentation translation_only(double x, double y, double z) {
  Augmentation aug;
  aug.translation = {x, y, z};
  return aug;
}

}  // namespace

TEST_CASE("novelty kernel") {
  CHECK(novelty_kernel(0.0, 1e-3) == 1.0);
  CHECK(novelty_kernel(1e-3, 1e-3) == 0.5);
  CHECK(novelty_kernel(9e-3, 1e-3) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK_THROWS_AS(novelty_kernel(-1.0, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(novelty_kernel(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("novelty score: empty bank, duplicates, distant candidates") {
  const double c = 1e-3;
  AugMemoryBank bank(64, 1e-3, c);
  const Augmentation a = sample_random(AugRanges{}, 11);

  SUBCASE("empty bank scores 1/c for every candidate") {
    CHECK(novelty_score(a, bank) == 1.0 / c);
    CHECK(novelty_score(translation_only(1, 1, 1), bank) == 1.0 / c);
  }

  SUBCASE("a duplicate scores exactly 1/(1+c)") {
    bank.insert(a);
    CHECK(novelty_score(a, bank) == 1.0 / (1.0 + c));
  }

  SUBCASE("any positive-distance candidate beats the duplicate") {
    bank.insert(translation_only(-1, -1, -1));
    const double dup = novelty_score(translation_only(-1, -1, -1), bank);
    const double far = novelty_score(translation_only(1, 1, 1), bank);
    CHECK(dup == 1.0 / (1.0 + c));
    CHECK(far > dup);
    CHECK(far < 1.0 / c);  // approaches the empty-bank score from below
  }
}

TEST_CASE("novelty score decreases as the candidate approaches the bank") {
  AugMemoryBank bank(64, 1e-3, 1e-3);
  bank.insert(translation_only(0, 0, 0));
  bank.insert(translation_only(0.1, 0, 0));
  double previous = -1.0;
  // Walking away from both entries must raise the score monotonically.
  for (double x = 0.1; x <= 1.0; x += 0.1) {
    const double score = novelty_score(translation_only(x, 0, 0), bank);
    CHECK(score > previous);
    previous = score;
  }
}

TEST_CASE("memory bank is FIFO with a capacity bound") {
  AugMemoryBank bank(3, 1e-3, 1e-3);
  for (int i = 0; i < 5; ++i) {
    bank.insert(translation_only(0.1 * i, 0, 0));
    CHECK(bank.size() <= 3);
  }
  REQUIRE(bank.size() == 3);
  CHECK(bank.entries()[0].translation.x() == doctest::Approx(0.2));
  CHECK(bank.entries()[2].translation.x() == doctest::Approx(0.4));
  CHECK_THROWS_AS(AugMemoryBank(0, 1e-3, 1e-3), DataError);
  CHECK_THROWS_AS(AugMemoryBank(4, -1.0, 1e-3), DataError);
}

TEST_CASE("select_novel picks the best candidate deterministically") {
  const AugRanges ranges;

  SUBCASE("a single candidate is returned and inserted") {
    AugMemoryBank bank(16, 1e-3, 1e-3);
    const Augmentation picked = select_novel(bank, ranges, 1, 21);
    CHECK(bank.size() == 1);
    const Augmentation direct = sample_random(ranges, derive_seed(21, 0));
    CHECK(picked.translation == direct.translation);
    CHECK(picked.rotation == direct.rotation);
  }

  SUBCASE("empty bank ties resolve to candidate 0") {
    AugMemoryBank bank(16, 1e-3, 1e-3);
    const Augmentation picked = select_novel(bank, ranges, 8, 33);
    const Augmentation first = sample_random(ranges, derive_seed(33, 0));
    CHECK(picked.translation == first.translation);
  }

  SUBCASE("a candidate already in the bank never wins") {
    AugMemoryBank bank(16, 1e-3, 1e-3);
    AugMemoryBank reference(16, 1e-3, 1e-3);  // pre-selection state
    const Augmentation duplicate = sample_random(ranges, derive_seed(55, 0));
    bank.insert(duplicate);
    reference.insert(duplicate);
    const Augmentation picked = select_novel(bank, ranges, 4, 55);
    CHECK(picked.translation != duplicate.translation);
    CHECK(novelty_score(picked, reference) >
          novelty_score(duplicate, reference));
  }

  SUBCASE("deterministic for a fixed bank state and seed") {
    AugMemoryBank a(16, 1e-3, 1e-3), b(16, 1e-3, 1e-3);
    a.insert(translation_only(0.5, 0, 0));
    b.insert(translation_only(0.5, 0, 0));
    const Augmentation pa = select_novel(a, AugRanges{}, 6, 42);
    const Augmentation pb = select_novel(b, AugRanges{}, 6, 42);
    CHECK(pa.translation == pb.translation);
    CHECK(pa.rotation == pb.rotation);
  }

  SUBCASE("candidate count must be positive") {
    AugMemoryBank bank(16, 1e-3, 1e-3);
    CHECK_THROWS_AS(select_novel(bank, ranges, 0, 1), DataError);
  }
}

TEST_CASE("pair_for_sample strips crop from the first view only") {
  const AugRanges ranges;
  AugMemoryBank bank(512, 1e-3, 1e-3);

  int positive_distance = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t before = bank.size();
    const AugPair pair =
        pair_for_sample(bank, ranges, 4, derive_seed(70, trial));
    CHECK_FALSE(pair.first.crop.has_value());
    CHECK(pair.second.crop.has_value());
    CHECK(pair.first.jitter.sigma == 0.01);
    CHECK(bank.size() == before + 2);
    if (aug_distance(pair.first, pair.second) > 0.0) ++positive_distance;
  }
  CHECK(positive_distance == 100);
}

TEST_CASE("coverage metrics") {
  SUBCASE("identical samples collapse to zero") {
    const std::vector<Augmentation> samples{translation_only(0.5, 0, 0),
                                            translation_only(0.5, 0, 0)};
    const CoverageMetrics cov = coverage_metrics(samples);
    CHECK(cov.min_pairwise == 0.0);
    CHECK(cov.mean_nn == 0.0);
  }

  SUBCASE("translation endpoints sit at sqrt(3)") {
    const std::vector<Augmentation> samples{translation_only(-1, -1, -1),
                                            translation_only(1, 1, 1)};
    const CoverageMetrics cov = coverage_metrics(samples);
    CHECK(cov.min_pairwise == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
    CHECK(cov.mean_nn == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  }

  SUBCASE("fewer than two samples rejected") {
    CHECK_THROWS_AS(coverage_metrics({translation_only(0, 0, 0)}), DataError);
  }
}

TEST_CASE("guided selection spreads better than random (pinned seed)") {
  const AugRanges ranges;
  const int selections = 128;

  AugMemoryBank bank(512, 1e-3, 1e-3);
  std::vector<Augmentation> guided, random;
  for (int i = 0; i < selections; ++i) {
    guided.push_back(select_novel(bank, ranges, 16, derive_seed(123, 2 * i)));
    random.push_back(sample_random(ranges, derive_seed(321, i)));
  }
  const CoverageMetrics g = coverage_metrics(guided);
  const CoverageMetrics r = coverage_metrics(random);
  CHECK(g.mean_nn > r.mean_nn);
}

TEST_CASE("bank json round trips entries in order") {
  AugMemoryBank bank(8, 2e-3, 3e-3);
  for (int i = 0; i < 5; ++i) {
    bank.insert(sample_random(AugRanges{}, derive_seed(5, i)));
  }
  const AugMemoryBank back = AugMemoryBank::from_json(bank.to_json());
  CHECK(back.capacity() == 8);
  CHECK(back.epsilon() == 2e-3);
  CHECK(back.stability_c() == 3e-3);
  REQUIRE(back.size() == bank.size());
  for (std::size_t i = 0; i < bank.size(); ++i) {
    CHECK(back.entries()[i].translation == bank.entries()[i].translation);
    CHECK(back.entries()[i].rotation == bank.entries()[i].rotation);
    CHECK(back.entries()[i].scale == bank.entries()[i].scale);
  }
}
