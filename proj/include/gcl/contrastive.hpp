#pragma once

#include <Eigen/Core>
#include <vector>

namespace gcl {

// sim(u, v) = u.v / (|u||v|). Bitwise-identical vectors short-circuit to
// exactly 1 so self-similarity is exact. Zero vectors are an error.
double cosine_similarity(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

// Two aligned lists of projected latents plus the softmax temperature.
struct LatentBatch {
  std::vector<Eigen::VectorXd> view1;
  std::vector<Eigen::VectorXd> view2;
  double temperature = 0.5;

  int size() const { return static_cast<int>(view1.size()); }
  void validate() const;
};

enum class LossDirection { OneToTwo, TwoToOne };

// NT-Xent term for one batch entry:
//   -log exp(sim(zA_i, zB_i)/tau) /
//        (sum_{b != i} exp(sim(zA_i, zA_b)/tau) + sum_b exp(sim(zA_i, zB_b)/tau))
// where (A, B) = (1, 2) or (2, 1) by direction. The cross-view sum keeps
// the positive, so the ratio is <= 1 and the loss nonnegative. Exponent
// sums run through log-sum-exp.
double nt_xent_pair_loss(int index, const LatentBatch& batch,
                         LossDirection direction);

// (1/2B) sum over entries of both directional terms.
double batch_loss(const LatentBatch& batch);

struct LatentGrads {
  std::vector<Eigen::VectorXd> view1;
  std::vector<Eigen::VectorXd> view2;
};

// Exact gradients of batch_loss with respect to every latent vector.
LatentGrads loss_backward(const LatentBatch& batch);

}  // namespace gcl
