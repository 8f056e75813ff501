#include <doctest.h>

#include <cmath>

#include "gcl/contrastive.hpp"
#include "gcl/errors.hpp"
#include "gcl/rng.hpp"

using namespace gcl;

namespace {

Eigen::VectorXd vec2(double x, double y) {
  Eigen::VectorXd v(2);
  v << x, y;
  return v;
}

LatentBatch random_batch(int size, int dim, std::uint64_t seed,
                         double temperature = 0.5) {
  Rng rng(seed);
  LatentBatch batch;
  batch.temperature = temperature;
  for (int i = 0; i < size; ++i) {
    Eigen::VectorXd a(dim), b(dim);
    for (int d = 0; d < dim; ++d) {
      a[d] = rng.uniform(-1, 1);
      b[d] = rng.uniform(-1, 1);
    }
    batch.view1.push_back(a);
    batch.view2.push_back(b);
  }
  return batch;
}

// The orthogonal construction: z1_i = e_i, z2_i = cos(theta_i) e_i +
// sin(theta_i) f_i with all e, f orthonormal. Only the positive-pair
// similarity of entry i depends on theta_i; every other similarity is 0.
LatentBatch orthogonal_batch(const std::vector<double>& thetas) {
  const int size = static_cast<int>(thetas.size());
  LatentBatch batch;
  for (int i = 0; i < size; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(2 * size);
    e[i] = 1.0;
    Eigen::VectorXd z = Eigen::VectorXd::Zero(2 * size);
    z[i] = std::cos(thetas[i]);
    z[size + i] = std::sin(thetas[i]);
    batch.view1.push_back(e);
    batch.view2.push_back(z);
  }
  return batch;
}

LatentGrads finite_difference(const LatentBatch& batch, double step) {
  LatentBatch work = batch;
  LatentGrads grads;
  auto run = [&](std::vector<Eigen::VectorXd>& view) {
    std::vector<Eigen::VectorXd> out;
    for (auto& z : view) {
      Eigen::VectorXd g(z.size());
      for (Eigen::Index d = 0; d < z.size(); ++d) {
        const double saved = z[d];
        z[d] = saved + step;
        const double plus = batch_loss(work);
        z[d] = saved - step;
        const double minus = batch_loss(work);
        z[d] = saved;
        g[d] = (plus - minus) / (2.0 * step);
      }
      out.push_back(g);
    }
    return out;
  };
  grads.view1 = run(work.view1);
  grads.view2 = run(work.view2);
  return grads;
}

double max_relative_error(const LatentGrads& a, const LatentGrads& b) {
  double scale = 1.0;
  double diff = 0.0;
  for (std::size_t i = 0; i < a.view1.size(); ++i) {
    scale = std::max({scale, a.view1[i].cwiseAbs().maxCoeff(),
                      a.view2[i].cwiseAbs().maxCoeff()});
    diff = std::max({diff, (a.view1[i] - b.view1[i]).cwiseAbs().maxCoeff(),
                     (a.view2[i] - b.view2[i]).cwiseAbs().maxCoeff()});
  }
  return diff / scale;
}

}  // namespace

TEST_CASE("cosine similarity") {
  CHECK(cosine_similarity(vec2(1, 0), vec2(1, 0)) == 1.0);
  CHECK(cosine_similarity(vec2(1, 0), vec2(0, 1)) == 0.0);
  CHECK(cosine_similarity(vec2(1, 1), vec2(1, 0)) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(cosine_similarity(vec2(0.3, -0.4), vec2(0.3, -0.4)) == 1.0);
  CHECK(cosine_similarity(vec2(1, 2), vec2(2, 4)) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(cosine_similarity(vec2(0, 0), vec2(1, 0)), NumericError);
  Eigen::VectorXd three(3);
  three << 1, 2, 3;
  CHECK_THROWS_AS(cosine_similarity(vec2(1, 0), three),
                  std::invalid_argument);
}

TEST_CASE("nt_xent pair loss closed forms") {
  SUBCASE("B = 1 collapses to zero") {
    LatentBatch batch;
    batch.view1 = {vec2(0.4, 0.3)};
    batch.view2 = {vec2(-0.1, 0.9)};
    CHECK(nt_xent_pair_loss(0, batch, LossDirection::OneToTwo) == 0.0);
    CHECK(batch_loss(batch) == 0.0);
  }

  SUBCASE("B = 2 orthogonal construction equals log(1 + 2 e^-2)") {
    LatentBatch batch;
    batch.view1 = {vec2(1, 0), vec2(0, 1)};
    batch.view2 = {vec2(1, 0), vec2(0, 1)};
    batch.temperature = 0.5;
    const double expected = std::log(1.0 + 2.0 * std::exp(-2.0));
    CHECK(std::abs(nt_xent_pair_loss(0, batch, LossDirection::OneToTwo) -
                   expected) < 1e-12);
    // every directional term is identical by symmetry
    CHECK(std::abs(batch_loss(batch) - expected) < 1e-12);
  }

  SUBCASE("index bounds") {
    LatentBatch batch;
    batch.view1 = {vec2(1, 0)};
    batch.view2 = {vec2(1, 0)};
    CHECK_THROWS_AS(nt_xent_pair_loss(1, batch, LossDirection::OneToTwo),
                    std::invalid_argument);
  }
}

TEST_CASE("batch loss contracts") {
  SUBCASE("nonnegative on random batches") {
    for (int trial = 0; trial < 50; ++trial) {
      const LatentBatch batch =
          random_batch(1 + trial % 6, 4, derive_seed(30, trial));
      CHECK(batch_loss(batch) >= 0.0);
    }
  }

  SUBCASE("scaling by powers of two is exactly invariant") {
    const LatentBatch batch = random_batch(5, 6, 77);
    for (const double k : {2.0, 4.0, 0.5}) {
      LatentBatch scaled = batch;
      for (auto& z : scaled.view1) z *= k;
      for (auto& z : scaled.view2) z *= k;
      CHECK(batch_loss(scaled) == batch_loss(batch));
    }
  }

  SUBCASE("scaling by 3 is invariant to machine precision") {
    const LatentBatch batch = random_batch(5, 6, 78);
    LatentBatch scaled = batch;
    for (auto& z : scaled.view1) z *= 3.0;
    for (auto& z : scaled.view2) z *= 3.0;
    CHECK(std::abs(batch_loss(scaled) - batch_loss(batch)) < 1e-12);
  }

  SUBCASE("swapping the views leaves the loss unchanged exactly") {
    for (int trial = 0; trial < 10; ++trial) {
      const LatentBatch batch = random_batch(4, 5, derive_seed(31, trial));
      LatentBatch swapped = batch;
      std::swap(swapped.view1, swapped.view2);
      CHECK(batch_loss(swapped) == batch_loss(batch));
    }
  }

  SUBCASE("raising the positive similarity lowers the pair loss") {
    double previous = 1e9;
    for (const double theta : {1.2, 0.9, 0.6, 0.3, 0.0}) {
      const LatentBatch batch = orthogonal_batch({theta, 0.7, 1.1});
      const double loss = nt_xent_pair_loss(0, batch, LossDirection::OneToTwo);
      CHECK(loss < previous);
      previous = loss;
    }
  }

  SUBCASE("temperature and shape validation") {
    LatentBatch batch = random_batch(2, 3, 5);
    batch.temperature = 0.0;
    CHECK_THROWS_AS(batch_loss(batch), DataError);
    batch.temperature = 0.5;
    batch.view2.pop_back();
    CHECK_THROWS_AS(batch_loss(batch), DataError);
    LatentBatch zero = random_batch(2, 3, 6);
    zero.view1[0].setZero();
    CHECK_THROWS_AS(batch_loss(zero), NumericError);
  }
}

TEST_CASE("loss_backward matches central finite differences") {
  SUBCASE("B = 4, dim 8, step 1e-6, error < 1e-5") {
    const LatentBatch batch = random_batch(4, 8, 91);
    const LatentGrads analytic = loss_backward(batch);
    const LatentGrads fd = finite_difference(batch, 1e-6);
    CHECK(max_relative_error(analytic, fd) < 1e-5);
  }

  SUBCASE("10 random instances under 1e-4") {
    for (int trial = 0; trial < 10; ++trial) {
      const LatentBatch batch =
          random_batch(2 + trial % 4, 3 + trial % 5, derive_seed(92, trial),
                       0.25 + 0.25 * (trial % 3));
      CHECK(max_relative_error(loss_backward(batch),
                               finite_difference(batch, 1e-6)) < 1e-4);
    }
  }

  SUBCASE("B = 1 gradients vanish") {
    LatentBatch batch;
    batch.view1 = {vec2(0.4, 0.3)};
    batch.view2 = {vec2(-0.1, 0.9)};
    const LatentGrads grads = loss_backward(batch);
    CHECK(grads.view1[0].isZero(0.0));
    CHECK(grads.view2[0].isZero(0.0));
  }

  SUBCASE("descent direction raises the positive similarity") {
    const LatentBatch batch = orthogonal_batch({0.9, 0.5, 1.3});
    const LatentGrads grads = loss_backward(batch);
    for (int i = 0; i < batch.size(); ++i) {
      const Eigen::VectorXd& u = batch.view1[i];
      const Eigen::VectorXd& v = batch.view2[i];
      const double sim = cosine_similarity(u, v);
      const Eigen::VectorXd dsim_dv =
          u / (u.norm() * v.norm()) - sim * v / (v.norm() * v.norm());
      CHECK((-grads.view2[i]).dot(dsim_dv) > 0.0);
    }
  }
}
