#include "gcl/encoder.hpp"

#include <cmath>

#include "gcl/errors.hpp"
#include "gcl/rng.hpp"

namespace gcl {

const char* pooling_name(Pooling p) {
  return p == Pooling::Max ? "max" : "mean";
}

Pooling pooling_from_name(const std::string& name) {
  if (name == "max") return Pooling::Max;
  if (name == "mean") return Pooling::Mean;
  throw DataError("unknown pooling: " + name);
}

void EncoderConfig::validate() const {
  if (trunk_widths.size() < 2 || head_widths.size() < 2) {
    throw DataError("encoder: trunk and head need at least one affine layer");
  }
  if (trunk_widths.front() != 3) {
    throw DataError("encoder: trunk input width must be 3");
  }
  for (const int w : trunk_widths) {
    if (w < 1) throw DataError("encoder: zero-width trunk layer");
  }
  for (const int w : head_widths) {
    if (w < 1) throw DataError("encoder: zero-width head layer");
  }
  if (head_widths.front() != trunk_widths.back()) {
    throw DataError("encoder: head input must match trunk output width");
  }
}

std::size_t EncoderParams::parameter_count() const {
  std::size_t count = 0;
  for (const auto& layer : trunk) {
    count += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
  }
  for (const auto& layer : head) {
    count += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
  }
  return count;
}

namespace {

std::vector<AffineLayer> init_stack(const std::vector<int>& widths, Rng& rng) {
  std::vector<AffineLayer> stack;
  stack.reserve(widths.size() - 1);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const int fan_in = widths[l];
    const int fan_out = widths[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    AffineLayer layer;
    layer.weight.resize(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) {
        layer.weight(r, c) = rng.uniform(-bound, bound);
      }
    }
    layer.bias = Eigen::VectorXd::Zero(fan_out);
    stack.push_back(std::move(layer));
  }
  return stack;
}

}  // namespace

EncoderParams init_params(const EncoderConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  EncoderParams params;
  params.config = config;
  params.trunk = init_stack(config.trunk_widths, rng);
  params.head = init_stack(config.head_widths, rng);
  return params;
}

Eigen::MatrixXd encode_points(const EncoderParams& params,
                              const PointCloud& cloud, TrunkTrace* trace) {
  if (cloud.points.empty()) throw DataError("encode_points: empty cloud");
  const int n = cloud.size();
  Eigen::MatrixXd act(n, 3);
  for (int i = 0; i < n; ++i) act.row(i) = cloud.points[i].transpose();

  if (trace) {
    trace->activations.clear();
    trace->activations.push_back(act);
  }
  for (std::size_t l = 0; l < params.trunk.size(); ++l) {
    const AffineLayer& layer = params.trunk[l];
    Eigen::MatrixXd z = act * layer.weight.transpose();
    z.rowwise() += layer.bias.transpose();
    act = (l + 1 < params.trunk.size()) ? z.cwiseMax(0.0) : std::move(z);
    if (trace) trace->activations.push_back(act);
  }
  if (!act.allFinite()) {
    throw NumericError("encode_points: non-finite features");
  }
  return act;
}

Eigen::VectorXd pool_project(const EncoderParams& params,
                             const Eigen::MatrixXd& features,
                             PoolTrace* trace) {
  if (features.rows() == 0) throw DataError("pool_project: empty features");
  const int n = static_cast<int>(features.rows());
  const int d = static_cast<int>(features.cols());

  Eigen::VectorXd pooled(d);
  std::vector<int> argmax_rows;
  if (params.config.pooling == Pooling::Max) {
    argmax_rows.assign(d, 0);
    for (int c = 0; c < d; ++c) {
      double best = features(0, c);
      int best_row = 0;
      for (int r = 1; r < n; ++r) {
        if (features(r, c) > best) {  // strict: ties keep the lowest row
          best = features(r, c);
          best_row = r;
        }
      }
      pooled[c] = best;
      argmax_rows[c] = best_row;
    }
  } else {
    pooled = features.colwise().mean();
  }

  if (trace) {
    trace->row_count = n;
    trace->argmax_rows = argmax_rows;
    trace->head_activations.clear();
    trace->head_activations.push_back(pooled);
  }

  Eigen::VectorXd act = pooled;
  for (std::size_t l = 0; l < params.head.size(); ++l) {
    const AffineLayer& layer = params.head[l];
    Eigen::VectorXd z = layer.weight * act + layer.bias;
    act = (l + 1 < params.head.size()) ? z.cwiseMax(0.0).eval() : std::move(z);
    if (trace) trace->head_activations.push_back(act);
  }
  if (!act.allFinite()) {
    throw NumericError("pool_project: non-finite latent");
  }
  return act;
}

EncoderGrads zero_grads(const EncoderParams& params) {
  EncoderGrads grads;
  auto zero_stack = [](const std::vector<AffineLayer>& layers) {
    std::vector<AffineLayer> out;
    out.reserve(layers.size());
    for (const auto& layer : layers) {
      out.push_back({Eigen::MatrixXd::Zero(layer.weight.rows(),
                                           layer.weight.cols()),
                     Eigen::VectorXd::Zero(layer.bias.size())});
    }
    return out;
  };
  grads.trunk = zero_stack(params.trunk);
  grads.head = zero_stack(params.head);
  return grads;
}

void accumulate(EncoderGrads& into, const EncoderGrads& grads) {
  for (std::size_t l = 0; l < into.trunk.size(); ++l) {
    into.trunk[l].weight += grads.trunk[l].weight;
    into.trunk[l].bias += grads.trunk[l].bias;
  }
  for (std::size_t l = 0; l < into.head.size(); ++l) {
    into.head[l].weight += grads.head[l].weight;
    into.head[l].bias += grads.head[l].bias;
  }
}

void apply_gradient_step(EncoderParams& params, const EncoderGrads& grads,
                         double step, double weight_decay) {
  // Decay applies to weights only; biases follow the raw gradient.
  for (std::size_t l = 0; l < params.trunk.size(); ++l) {
    params.trunk[l].weight -=
        step * (grads.trunk[l].weight + weight_decay * params.trunk[l].weight);
    params.trunk[l].bias -= step * grads.trunk[l].bias;
  }
  for (std::size_t l = 0; l < params.head.size(); ++l) {
    params.head[l].weight -=
        step * (grads.head[l].weight + weight_decay * params.head[l].weight);
    params.head[l].bias -= step * grads.head[l].bias;
  }
}

Eigen::MatrixXd pool_project_backward(const EncoderParams& params,
                                      const PoolTrace& trace,
                                      const Eigen::VectorXd& upstream,
                                      EncoderGrads& grads) {
  Eigen::VectorXd g = upstream;
  for (int l = static_cast<int>(params.head.size()) - 1; l >= 0; --l) {
    if (l + 1 < static_cast<int>(params.head.size())) {
      // g currently holds d/d(post-activation); gate by the rectifier.
      const Eigen::VectorXd& post = trace.head_activations[l + 1];
      g = (post.array() > 0.0).select(g, 0.0);
    }
    grads.head[l].weight += g * trace.head_activations[l].transpose();
    grads.head[l].bias += g;
    g = params.head[l].weight.transpose() * g;
  }

  const int d = static_cast<int>(g.size());
  Eigen::MatrixXd feature_grad = Eigen::MatrixXd::Zero(trace.row_count, d);
  if (params.config.pooling == Pooling::Max) {
    for (int c = 0; c < d; ++c) {
      feature_grad(trace.argmax_rows[c], c) += g[c];
    }
  } else {
    feature_grad.rowwise() =
        (g / static_cast<double>(trace.row_count)).transpose();
  }
  return feature_grad;
}

void encode_points_backward(const EncoderParams& params,
                            const TrunkTrace& trace,
                            const Eigen::MatrixXd& feature_grad,
                            EncoderGrads& grads) {
  Eigen::MatrixXd g = feature_grad;
  for (int l = static_cast<int>(params.trunk.size()) - 1; l >= 0; --l) {
    if (l + 1 < static_cast<int>(params.trunk.size())) {
      const Eigen::MatrixXd& post = trace.activations[l + 1];
      g = (post.array() > 0.0).select(g, 0.0);
    }
    grads.trunk[l].weight += g.transpose() * trace.activations[l];
    grads.trunk[l].bias += g.colwise().sum().transpose();
    g = g * params.trunk[l].weight;
  }
}

EncoderGrads backward(const EncoderParams& params, const PointCloud& cloud,
                      const Eigen::VectorXd& upstream) {
  TrunkTrace trunk_trace;
  const Eigen::MatrixXd features = encode_points(params, cloud, &trunk_trace);
  PoolTrace pool_trace;
  pool_project(params, features, &pool_trace);

  EncoderGrads grads = zero_grads(params);
  const Eigen::MatrixXd feature_grad =
      pool_project_backward(params, pool_trace, upstream, grads);
  encode_points_backward(params, trunk_trace, feature_grad, grads);
  return grads;
}

}  // namespace gcl
