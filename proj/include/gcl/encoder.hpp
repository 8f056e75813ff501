#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "gcl/point_cloud.hpp"

namespace gcl {

enum class Pooling { Max, Mean };

const char* pooling_name(Pooling p);
Pooling pooling_from_name(const std::string& name);

// Widths include the input layer: {3, 64, 64} is a 3->64->64 trunk.
// The head runs on the pooled feature, so head_widths.front() must equal
// trunk_widths.back(). Rectifier between affine layers, final layer of
// each stack linear.
struct EncoderConfig {
  std::vector<int> trunk_widths{3, 64, 64};
  std::vector<int> head_widths{64, 32};
  Pooling pooling = Pooling::Max;

  void validate() const;
  int feature_dim() const { return trunk_widths.back(); }
  int latent_dim() const { return head_widths.back(); }
};

struct AffineLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

struct EncoderParams {
  EncoderConfig config;
  std::vector<AffineLayer> trunk;
  std::vector<AffineLayer> head;

  std::size_t parameter_count() const;
};

// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero.
EncoderParams init_params(const EncoderConfig& config, std::uint64_t seed);

// Post-activation values per layer; activations[0] is the n x 3 input.
struct TrunkTrace {
  std::vector<Eigen::MatrixXd> activations;
};

// Shared-weight per-point trunk: row j of the result depends only on
// point j, so the whole map commutes with input permutations.
Eigen::MatrixXd encode_points(const EncoderParams& params,
                              const PointCloud& cloud,
                              TrunkTrace* trace = nullptr);

struct PoolTrace {
  int row_count = 0;
  std::vector<int> argmax_rows;  // per coordinate; empty for mean pooling
  std::vector<Eigen::VectorXd> head_activations;  // [0] = pooled vector
};

// Coordinate-wise pool over feature rows (argmax ties to the lowest row),
// then the projection head. Invariant to row permutations.
Eigen::VectorXd pool_project(const EncoderParams& params,
                             const Eigen::MatrixXd& features,
                             PoolTrace* trace = nullptr);

struct EncoderGrads {
  std::vector<AffineLayer> trunk;
  std::vector<AffineLayer> head;
};

EncoderGrads zero_grads(const EncoderParams& params);
void accumulate(EncoderGrads& into, const EncoderGrads& grads);
// params -= step * (grads + weight_decay * params)
void apply_gradient_step(EncoderParams& params, const EncoderGrads& grads,
                         double step, double weight_decay = 0.0);

// Backward through the head and the pool. Head parameter gradients are
// accumulated into `grads`; the return value is d(loss)/d(features),
// routed through the pool (max: first-encountered argmax row per
// coordinate; mean: uniform split).
Eigen::MatrixXd pool_project_backward(const EncoderParams& params,
                                      const PoolTrace& trace,
                                      const Eigen::VectorXd& upstream,
                                      EncoderGrads& grads);

// Backward through the per-point trunk given d(loss)/d(features).
void encode_points_backward(const EncoderParams& params,
                            const TrunkTrace& trace,
                            const Eigen::MatrixXd& feature_grad,
                            EncoderGrads& grads);

// Exact reverse-mode gradients of upstream . z with respect to every
// parameter, for z = pool_project(encode_points(cloud)).
EncoderGrads backward(const EncoderParams& params, const PointCloud& cloud,
                      const Eigen::VectorXd& upstream);

}  // namespace gcl
