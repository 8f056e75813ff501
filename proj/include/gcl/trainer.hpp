#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "gcl/augmentation.hpp"
#include "gcl/encoder.hpp"
#include "gcl/memory_bank.hpp"
#include "gcl/point_cloud.hpp"

namespace gcl {

struct CorpusConfig {
  std::vector<ShapeKind> kinds{ShapeKind::Plane, ShapeKind::Sphere,
                               ShapeKind::Box, ShapeKind::Cylinder};
  int clouds_per_class = 64;
  int points_per_cloud = 512;
  std::uint64_t seed = 1;
};

struct SampleConfig {
  std::optional<int> pre_points;    // subsample before augmenting
  std::optional<int> point_budget;  // subsample folded into apply()
};

struct GuidedAugConfig {
  bool enabled = true;
  int candidates = 16;
  double epsilon = 1e-3;
  double c = 1e-3;
  std::size_t capacity = 35000;
};

struct FeatureMappingConfig {
  bool enabled = true;
  bool invert_jitter = true;
};

struct OptimConfig {
  double learning_rate = 1e-3;
  double weight_decay = 1e-4;
  int cycles = 3;
  int epochs_per_cycle = 10;

  int total_epochs() const { return cycles * epochs_per_cycle; }
  // Cosine annealing restarted at every cycle boundary.
  double rate_at(int epoch) const;
};

struct ProbeConfig {
  int every_epochs = 10;  // 0 disables periodic probing (final epoch only)
  std::uint64_t split_seed = 99;
  double ridge_lambda = 1e-2;
};

struct TrainConfig {
  std::uint64_t seed = 7;
  CorpusConfig corpus;
  SampleConfig sample;
  AugRanges ranges;
  DistanceWeights weights;
  GuidedAugConfig guided;
  FeatureMappingConfig mapping;
  EncoderConfig encoder;
  double temperature = 0.5;
  int batch_size = 16;
  OptimConfig optim;
  ProbeConfig probe;
  int ablation_seeds = 5;

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

struct MetricsRow {
  int epoch = 0;
  double mean_loss = 0.0;
  std::optional<double> probe_accuracy;
  double coverage_min = 0.0;   // over the epoch's selected augmentations
  double coverage_mean = 0.0;
};

std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRow& row);

std::vector<PointCloud> build_corpus(const CorpusConfig& config);

// The augmentation pair drawn for one sample: guided selection when the
// bank is given, plain uniform sampling otherwise. The first view never
// crops in either mode.
AugPair draw_pair(AugMemoryBank* bank, const AugRanges& ranges,
                  int candidates, std::uint64_t seed,
                  const DistanceWeights& weights);

struct PretrainResult {
  EncoderParams params;
  AugMemoryBank bank{1, 1.0, 1.0};
  std::vector<MetricsRow> metrics;
};

// Full pretraining loop. Writes metrics.csv, run_config.json and a
// checkpoint (manifest + parameter blob + bank) into out_dir after every
// epoch. With resume=true the run continues from the checkpoint found in
// out_dir and reproduces the uninterrupted run bit for bit. Identical
// config and seed always produce identical artifacts.
PretrainResult pretrain(const TrainConfig& config, const std::string& out_dir,
                        bool resume = false);

// Pooled trunk features of every corpus cloud (no augmentation), probed
// with a ridge classifier. The encoder stays frozen.
double probe_encoder(const EncoderParams& params,
                     const std::vector<PointCloud>& corpus,
                     const ProbeConfig& probe);

struct AblationRow {
  std::string variant;
  bool mapping_enabled = false;
  bool guided_enabled = false;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
};

// The four-variant matrix {vanilla+crop, +GFM, +GA, +both} over shared
// seeds. Each run lands in out_dir/<variant>/seed<k>; rows also go to
// out_dir/ablation.csv.
std::vector<AblationRow> ablation_run(const TrainConfig& base,
                                      const std::string& out_dir);

std::string ablation_csv_header();
std::string ablation_csv_row(const AblationRow& row);

struct Checkpoint {
  EncoderParams params;
  AugMemoryBank bank{1, 1.0, 1.0};
  int epoch = 0;
  std::uint64_t run_seed = 0;
};

// Manifest JSON plus a flat little-endian float64 blob in layer order
// (trunk then head, each weight row-major then bias) plus the bank JSON.
void save_checkpoint(const std::string& dir, const EncoderParams& params,
                     const AugMemoryBank& bank, int epoch,
                     std::uint64_t run_seed);
Checkpoint load_checkpoint(const std::string& dir);

}  // namespace gcl
