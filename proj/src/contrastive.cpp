#include "gcl/contrastive.hpp"

#include <cmath>
#include <limits>

#include "gcl/errors.hpp"

namespace gcl {

double cosine_similarity(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != v.size()) {
    throw std::invalid_argument("cosine_similarity: dimension mismatch");
  }
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) {
    throw NumericError("cosine_similarity: zero vector");
  }
  if (u == v) return 1.0;  // keeps self-similarity exact
  return u.dot(v) / (nu * nv);
}

void LatentBatch::validate() const {
  if (view1.empty() || view1.size() != view2.size()) {
    throw DataError("latent batch: views must be nonempty and aligned");
  }
  if (!(temperature > 0.0)) {
    throw DataError("latent batch: temperature must be positive");
  }
  const Eigen::Index dim = view1.front().size();
  for (const auto& z : view1) {
    if (z.size() != dim) throw DataError("latent batch: ragged view 1");
    if (z.norm() == 0.0) throw NumericError("latent batch: zero latent");
  }
  for (const auto& z : view2) {
    if (z.size() != dim) throw DataError("latent batch: ragged view 2");
    if (z.norm() == 0.0) throw NumericError("latent batch: zero latent");
  }
}

namespace {

double log_sum_exp(const std::vector<double>& terms) {
  double m = -std::numeric_limits<double>::infinity();
  for (const double t : terms) m = std::max(m, t);
  double sum = 0.0;
  for (const double t : terms) sum += std::exp(t - m);
  return m + std::log(sum);
}

}  // namespace

double nt_xent_pair_loss(int index, const LatentBatch& batch,
                         LossDirection direction) {
  batch.validate();
  const int b_count = batch.size();
  if (index < 0 || index >= b_count) {
    throw std::invalid_argument("nt_xent_pair_loss: index out of range");
  }
  const auto& same =
      direction == LossDirection::OneToTwo ? batch.view1 : batch.view2;
  const auto& cross =
      direction == LossDirection::OneToTwo ? batch.view2 : batch.view1;
  const double inv_tau = 1.0 / batch.temperature;

  std::vector<double> terms;
  terms.reserve(2 * b_count - 1);
  for (int b = 0; b < b_count; ++b) {
    if (b == index) continue;
    terms.push_back(cosine_similarity(same[index], same[b]) * inv_tau);
  }
  for (int b = 0; b < b_count; ++b) {
    terms.push_back(cosine_similarity(same[index], cross[b]) * inv_tau);
  }
  const double positive =
      cosine_similarity(same[index], cross[index]) * inv_tau;
  return log_sum_exp(terms) - positive;
}

double batch_loss(const LatentBatch& batch) {
  batch.validate();
  double total = 0.0;
  for (int i = 0; i < batch.size(); ++i) {
    // One addition per index keeps the sum bitwise symmetric in the views.
    total += nt_xent_pair_loss(i, batch, LossDirection::OneToTwo) +
             nt_xent_pair_loss(i, batch, LossDirection::TwoToOne);
  }
  return total / (2.0 * batch.size());
}

namespace {

// d sim(u, v) / du = v/(|u||v|) - sim * u/|u|^2
void add_cosine_grad(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                     double coeff, Eigen::VectorXd& grad_u,
                     Eigen::VectorXd& grad_v) {
  const double nu = u.norm();
  const double nv = v.norm();
  const double sim = u.dot(v) / (nu * nv);
  grad_u += coeff * (v / (nu * nv) - sim * u / (nu * nu));
  grad_v += coeff * (u / (nu * nv) - sim * v / (nv * nv));
}

}  // namespace

LatentGrads loss_backward(const LatentBatch& batch) {
  batch.validate();
  const int b_count = batch.size();
  const Eigen::Index dim = batch.view1.front().size();

  LatentGrads grads;
  grads.view1.assign(b_count, Eigen::VectorXd::Zero(dim));
  grads.view2.assign(b_count, Eigen::VectorXd::Zero(dim));

  const double inv_tau = 1.0 / batch.temperature;
  const double batch_scale = 1.0 / (2.0 * b_count);

  for (const auto direction :
       {LossDirection::OneToTwo, LossDirection::TwoToOne}) {
    const bool one_to_two = direction == LossDirection::OneToTwo;
    const auto& same = one_to_two ? batch.view1 : batch.view2;
    const auto& cross = one_to_two ? batch.view2 : batch.view1;
    auto& same_grads = one_to_two ? grads.view1 : grads.view2;
    auto& cross_grads = one_to_two ? grads.view2 : grads.view1;

    for (int i = 0; i < b_count; ++i) {
      // Denominator terms in a fixed order: same-view (b != i), then
      // cross-view (all b). The cross-view b == i term is the positive.
      std::vector<double> terms;
      terms.reserve(2 * b_count - 1);
      for (int b = 0; b < b_count; ++b) {
        if (b == i) continue;
        terms.push_back(cosine_similarity(same[i], same[b]) * inv_tau);
      }
      for (int b = 0; b < b_count; ++b) {
        terms.push_back(cosine_similarity(same[i], cross[b]) * inv_tau);
      }
      const double lse = log_sum_exp(terms);

      int k = 0;
      for (int b = 0; b < b_count; ++b) {
        if (b == i) continue;
        const double w = std::exp(terms[k] - lse);
        add_cosine_grad(same[i], same[b], batch_scale * w * inv_tau,
                        same_grads[i], same_grads[b]);
        ++k;
      }
      for (int b = 0; b < b_count; ++b) {
        const double w = std::exp(terms[k] - lse);
        const double delta_pos = (b == i) ? 1.0 : 0.0;
        add_cosine_grad(same[i], cross[b],
                        batch_scale * (w - delta_pos) * inv_tau, same_grads[i],
                        cross_grads[b]);
        ++k;
      }
    }
  }
  return grads;
}

}  // namespace gcl
