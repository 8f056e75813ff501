#include "gcl/trainer.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>

#include "gcl/contrastive.hpp"
#include "gcl/errors.hpp"
#include "gcl/feature_mapping.hpp"
#include "gcl/linear_probe.hpp"
#include "gcl/rng.hpp"

namespace fs = std::filesystem;

namespace gcl {

namespace {

// Salt tags for the per-run seed streams.
constexpr std::uint64_t kInitTag = 0x11;
constexpr std::uint64_t kShuffleTag = 0x22;
constexpr std::uint64_t kSampleTag = 0x33;
constexpr std::uint64_t kAblateTag = 0x44;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

}  // namespace

double OptimConfig::rate_at(int epoch) const {
  const int pos = epochs_per_cycle > 0 ? epoch % epochs_per_cycle : 0;
  const double t = epochs_per_cycle > 0
                       ? static_cast<double>(pos) / epochs_per_cycle
                       : 0.0;
  return learning_rate * 0.5 * (1.0 + std::cos(M_PI * t));
}

void TrainConfig::validate() const {
  ranges.validate();
  encoder.validate();
  if (corpus.kinds.empty() || corpus.clouds_per_class < 1) {
    throw DataError("config: corpus must have classes and clouds");
  }
  if (corpus.points_per_cloud < 8) {
    throw DataError("config: points_per_cloud must be >= 8");
  }
  if (batch_size < 1) throw DataError("config: batch_size must be >= 1");
  if (!(temperature > 0.0)) {
    throw DataError("config: temperature must be positive");
  }
  if (optim.learning_rate <= 0.0 || optim.weight_decay < 0.0) {
    throw DataError("config: bad optimizer settings");
  }
  if (optim.cycles < 0 || optim.epochs_per_cycle < 1) {
    throw DataError("config: bad cycle schedule");
  }
  if (guided.candidates < 1 || guided.capacity < 1 ||
      guided.epsilon <= 0.0 || guided.c <= 0.0) {
    throw DataError("config: bad guided augmentation settings");
  }
  if (sample.pre_points && *sample.pre_points < 1) {
    throw DataError("config: pre_points must be >= 1");
  }
  if (sample.point_budget && *sample.point_budget < 1) {
    throw DataError("config: point_budget must be >= 1");
  }
  if (probe.every_epochs < 0 || probe.ridge_lambda < 0.0) {
    throw DataError("config: bad probe settings");
  }
  if (ablation_seeds < 1) throw DataError("config: ablation_seeds must be >= 1");
}

nlohmann::json TrainConfig::to_json() const {
  nlohmann::json kinds = nlohmann::json::array();
  for (const auto kind : corpus.kinds) kinds.push_back(shape_name(kind));
  nlohmann::json j{
      {"seed", seed},
      {"corpus",
       {{"kinds", std::move(kinds)},
        {"clouds_per_class", corpus.clouds_per_class},
        {"points_per_cloud", corpus.points_per_cloud},
        {"seed", corpus.seed}}},
      {"sample",
       {{"pre_points",
         sample.pre_points ? nlohmann::json(*sample.pre_points)
                           : nlohmann::json(nullptr)},
        {"point_budget",
         sample.point_budget ? nlohmann::json(*sample.point_budget)
                             : nlohmann::json(nullptr)}}},
      {"augmentation", ranges},
      {"distance_weights",
       {{"rotation", weights.rotation},
        {"translation", weights.translation},
        {"scale", weights.scale}}},
      {"guided_augmentation",
       {{"enabled", guided.enabled},
        {"candidates", guided.candidates},
        {"epsilon", guided.epsilon},
        {"c", guided.c},
        {"capacity", guided.capacity}}},
      {"feature_mapping",
       {{"enabled", mapping.enabled},
        {"invert_jitter", mapping.invert_jitter}}},
      {"encoder",
       {{"trunk_widths", encoder.trunk_widths},
        {"head_widths", encoder.head_widths},
        {"pooling", pooling_name(encoder.pooling)}}},
      {"temperature", temperature},
      {"batch_size", batch_size},
      {"optimizer",
       {{"learning_rate", optim.learning_rate},
        {"weight_decay", optim.weight_decay},
        {"cycles", optim.cycles},
        {"epochs_per_cycle", optim.epochs_per_cycle}}},
      {"probe",
       {{"every_epochs", probe.every_epochs},
        {"split_seed", probe.split_seed},
        {"ridge_lambda", probe.ridge_lambda}}},
      {"ablation_seeds", ablation_seeds},
  };
  return j;
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig config;
  config.seed = j.value("seed", config.seed);
  if (j.contains("corpus")) {
    const auto& o = j.at("corpus");
    if (o.contains("kinds")) {
      config.corpus.kinds.clear();
      for (const auto& name : o.at("kinds")) {
        config.corpus.kinds.push_back(shape_from_name(name.get<std::string>()));
      }
    }
    config.corpus.clouds_per_class =
        o.value("clouds_per_class", config.corpus.clouds_per_class);
    config.corpus.points_per_cloud =
        o.value("points_per_cloud", config.corpus.points_per_cloud);
    config.corpus.seed = o.value("seed", config.corpus.seed);
  }
  if (j.contains("sample")) {
    const auto& o = j.at("sample");
    if (o.contains("pre_points") && !o.at("pre_points").is_null()) {
      config.sample.pre_points = o.at("pre_points").get<int>();
    }
    if (o.contains("point_budget") && !o.at("point_budget").is_null()) {
      config.sample.point_budget = o.at("point_budget").get<int>();
    }
  }
  if (j.contains("augmentation")) {
    config.ranges = j.at("augmentation").get<AugRanges>();
  }
  if (j.contains("distance_weights")) {
    const auto& o = j.at("distance_weights");
    config.weights.rotation = o.value("rotation", config.weights.rotation);
    config.weights.translation =
        o.value("translation", config.weights.translation);
    config.weights.scale = o.value("scale", config.weights.scale);
  }
  if (j.contains("guided_augmentation")) {
    const auto& o = j.at("guided_augmentation");
    config.guided.enabled = o.value("enabled", config.guided.enabled);
    config.guided.candidates = o.value("candidates", config.guided.candidates);
    config.guided.epsilon = o.value("epsilon", config.guided.epsilon);
    config.guided.c = o.value("c", config.guided.c);
    config.guided.capacity = o.value("capacity", config.guided.capacity);
  }
  if (j.contains("feature_mapping")) {
    const auto& o = j.at("feature_mapping");
    config.mapping.enabled = o.value("enabled", config.mapping.enabled);
    config.mapping.invert_jitter =
        o.value("invert_jitter", config.mapping.invert_jitter);
  }
  if (j.contains("encoder")) {
    const auto& o = j.at("encoder");
    config.encoder.trunk_widths =
        o.value("trunk_widths", config.encoder.trunk_widths);
    config.encoder.head_widths =
        o.value("head_widths", config.encoder.head_widths);
    if (o.contains("pooling")) {
      config.encoder.pooling =
          pooling_from_name(o.at("pooling").get<std::string>());
    }
  }
  config.temperature = j.value("temperature", config.temperature);
  config.batch_size = j.value("batch_size", config.batch_size);
  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    config.optim.learning_rate =
        o.value("learning_rate", config.optim.learning_rate);
    config.optim.weight_decay =
        o.value("weight_decay", config.optim.weight_decay);
    config.optim.cycles = o.value("cycles", config.optim.cycles);
    config.optim.epochs_per_cycle =
        o.value("epochs_per_cycle", config.optim.epochs_per_cycle);
  }
  if (j.contains("probe")) {
    const auto& o = j.at("probe");
    config.probe.every_epochs =
        o.value("every_epochs", config.probe.every_epochs);
    config.probe.split_seed = o.value("split_seed", config.probe.split_seed);
    config.probe.ridge_lambda =
        o.value("ridge_lambda", config.probe.ridge_lambda);
  }
  config.ablation_seeds = j.value("ablation_seeds", config.ablation_seeds);
  config.validate();
  return config;
}

std::string metrics_csv_header() {
  return "epoch,mean_loss,probe_accuracy,coverage_min_pairwise,"
         "coverage_mean_nn\n";
}

std::string metrics_csv_row(const MetricsRow& row) {
  std::string line = std::to_string(row.epoch);
  line += ',';
  line += format_double(row.mean_loss);
  line += ',';
  if (row.probe_accuracy) line += format_double(*row.probe_accuracy);
  line += ',';
  line += format_double(row.coverage_min);
  line += ',';
  line += format_double(row.coverage_mean);
  line += '\n';
  return line;
}

std::vector<PointCloud> build_corpus(const CorpusConfig& config) {
  std::vector<PointCloud> corpus;
  corpus.reserve(config.kinds.size() * config.clouds_per_class);
  for (std::size_t ci = 0; ci < config.kinds.size(); ++ci) {
    for (int k = 0; k < config.clouds_per_class; ++k) {
      corpus.push_back(synth_shape(
          config.kinds[ci], config.points_per_cloud,
          derive_seed(config.seed, ci, static_cast<std::uint64_t>(k))));
    }
  }
  return corpus;
}

AugPair draw_pair(AugMemoryBank* bank, const AugRanges& ranges,
                  int candidates, std::uint64_t seed,
                  const DistanceWeights& weights) {
  if (bank) return pair_for_sample(*bank, ranges, candidates, seed, weights);
  // Guided selection off: plain independent uniform draws through the
  // same sampler. The first view still never crops.
  return AugPair{strip_crop(sample_random(ranges, derive_seed(seed, 0))),
                 sample_random(ranges, derive_seed(seed, 1))};
}

namespace {

struct SampleTrace {
  TrunkTrace trunk1, trunk2;
  PoolTrace pool1, pool2;
  StructuralMap map;
  bool mapped = false;
  int view1_rows = 0;
};

Eigen::VectorXd pooled_feature(const EncoderParams& params,
                               const Eigen::MatrixXd& features) {
  PoolTrace trace;
  pool_project(params, features, &trace);
  return trace.head_activations.front();
}

bool probe_feasible(const std::vector<PointCloud>& corpus) {
  std::map<int, int> counts;
  for (const auto& cloud : corpus) {
    if (!cloud.label) return false;
    ++counts[*cloud.label];
  }
  if (counts.size() < 2) return false;
  for (const auto& [cls, count] : counts) {
    if (count < 4) return false;
  }
  return true;
}

}  // namespace

double probe_encoder(const EncoderParams& params,
                     const std::vector<PointCloud>& corpus,
                     const ProbeConfig& probe) {
  std::vector<Eigen::VectorXd> features;
  std::vector<int> labels;
  features.reserve(corpus.size());
  labels.reserve(corpus.size());
  for (const auto& cloud : corpus) {
    if (!cloud.label) throw DataError("probe_encoder: unlabeled cloud");
    features.push_back(pooled_feature(params, encode_points(params, cloud)));
    labels.push_back(*cloud.label);
  }
  return linear_probe(features, labels, probe.split_seed, probe.ridge_lambda);
}

PretrainResult pretrain(const TrainConfig& config, const std::string& out_dir,
                        bool resume) {
  config.validate();
  if (config.batch_size == 1) {
    std::cerr << "warning: batch_size 1 gives a constant zero loss\n";
  }
  fs::create_directories(out_dir);
  const fs::path out(out_dir);

  const std::vector<PointCloud> corpus = build_corpus(config.corpus);
  write_text(out / "run_config.json", config.to_json().dump(2) + "\n");

  EncoderParams params;
  AugMemoryBank bank(config.guided.capacity, config.guided.epsilon,
                     config.guided.c);
  int start_epoch = 0;
  if (resume) {
    Checkpoint checkpoint = load_checkpoint(out_dir);
    params = std::move(checkpoint.params);
    bank = std::move(checkpoint.bank);
    start_epoch = checkpoint.epoch;
  } else {
    params = init_params(config.encoder, derive_seed(config.seed, kInitTag));
    write_text(out / "metrics.csv", metrics_csv_header());
    save_checkpoint(out_dir, params, bank, 0, config.seed);
  }

  const int total_epochs = config.optim.total_epochs();
  const int sample_count = static_cast<int>(corpus.size());
  const bool can_probe = probe_feasible(corpus);
  std::vector<MetricsRow> metrics;

  for (int epoch = start_epoch; epoch < total_epochs; ++epoch) {
    std::vector<int> order(sample_count);
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(derive_seed(config.seed, kShuffleTag,
                                static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.index(i)]);
    }

    std::vector<Augmentation> epoch_augs;
    epoch_augs.reserve(2 * sample_count);
    const double rate = config.optim.rate_at(epoch);
    double loss_sum = 0.0;
    int batch_count = 0;

    for (int start = 0; start < sample_count; start += config.batch_size) {
      const int batch_size =
          std::min(config.batch_size, sample_count - start);
      LatentBatch latents;
      latents.temperature = config.temperature;
      std::vector<SampleTrace> traces(batch_size);

      for (int p = 0; p < batch_size; ++p) {
        const std::uint64_t base =
            derive_seed(config.seed, kSampleTag,
                        static_cast<std::uint64_t>(epoch),
                        static_cast<std::uint64_t>(batch_count),
                        static_cast<std::uint64_t>(p));
        PointCloud cloud = corpus[order[start + p]];
        if (config.sample.pre_points &&
            *config.sample.pre_points < cloud.size()) {
          cloud = random_subsample(cloud, *config.sample.pre_points,
                                   derive_seed(base, 0));
        }
        const AugPair pair =
            draw_pair(config.guided.enabled ? &bank : nullptr, config.ranges,
                      config.guided.candidates, derive_seed(base, 1),
                      config.weights);
        epoch_augs.push_back(pair.first);
        epoch_augs.push_back(pair.second);

        const ApplyResult view1 = apply(pair.first, cloud,
                                        config.sample.point_budget,
                                        derive_seed(base, 2));
        const ApplyResult view2 = apply(pair.second, cloud,
                                        config.sample.point_budget,
                                        derive_seed(base, 3));

        SampleTrace& trace = traces[p];
        const Eigen::MatrixXd f1 =
            encode_points(params, view1.cloud, &trace.trunk1);
        const Eigen::MatrixXd f2 =
            encode_points(params, view2.cloud, &trace.trunk2);
        trace.view1_rows = static_cast<int>(f1.rows());

        Eigen::MatrixXd pooled_input;
        if (config.mapping.enabled) {
          const PointCloud inv1 = invert_apply(view1.record, view1.cloud,
                                               config.mapping.invert_jitter);
          const PointCloud inv2 = invert_apply(view2.record, view2.cloud,
                                               config.mapping.invert_jitter);
          trace.map = structural_map(inv1, inv2);
          trace.mapped = true;
          pooled_input = gather_features(f1, trace.map);
        } else {
          pooled_input = f1;
        }
        latents.view1.push_back(
            pool_project(params, pooled_input, &trace.pool1));
        latents.view2.push_back(pool_project(params, f2, &trace.pool2));
      }

      const double loss = batch_loss(latents);
      if (!std::isfinite(loss)) {
        throw NumericError("pretrain: non-finite loss at epoch " +
                           std::to_string(epoch) + ", batch " +
                           std::to_string(batch_count) + " (seed " +
                           std::to_string(config.seed) + ")");
      }
      const LatentGrads latent_grads = loss_backward(latents);

      EncoderGrads grads = zero_grads(params);
      for (int p = 0; p < batch_size; ++p) {
        SampleTrace& trace = traces[p];
        const Eigen::MatrixXd gathered_grad = pool_project_backward(
            params, trace.pool1, latent_grads.view1[p], grads);
        if (trace.mapped) {
          // Scatter through the gather: many view-2 rows may share one
          // view-1 row, so gradients add.
          Eigen::MatrixXd f1_grad = Eigen::MatrixXd::Zero(
              trace.view1_rows, gathered_grad.cols());
          for (std::size_t j = 0; j < trace.map.indices.size(); ++j) {
            f1_grad.row(trace.map.indices[j]) +=
                gathered_grad.row(static_cast<Eigen::Index>(j));
          }
          encode_points_backward(params, trace.trunk1, f1_grad, grads);
        } else {
          encode_points_backward(params, trace.trunk1, gathered_grad, grads);
        }
        const Eigen::MatrixXd f2_grad = pool_project_backward(
            params, trace.pool2, latent_grads.view2[p], grads);
        encode_points_backward(params, trace.trunk2, f2_grad, grads);
      }
      apply_gradient_step(params, grads, rate, config.optim.weight_decay);
      loss_sum += loss;
      ++batch_count;
    }

    MetricsRow row;
    row.epoch = epoch + 1;
    row.mean_loss = loss_sum / std::max(1, batch_count);
    if (epoch_augs.size() >= 2) {
      const CoverageMetrics cov =
          coverage_metrics(epoch_augs, config.weights, config.ranges);
      row.coverage_min = cov.min_pairwise;
      row.coverage_mean = cov.mean_nn;
    }
    const bool probe_now =
        can_probe &&
        ((config.probe.every_epochs > 0 &&
          (epoch + 1) % config.probe.every_epochs == 0) ||
         epoch + 1 == total_epochs);
    if (probe_now) {
      row.probe_accuracy = probe_encoder(params, corpus, config.probe);
    }
    metrics.push_back(row);

    std::ofstream metrics_out(out / "metrics.csv",
                              std::ios::binary | std::ios::app);
    metrics_out << metrics_csv_row(row);
    metrics_out.close();
    save_checkpoint(out_dir, params, bank, epoch + 1, config.seed);
  }

  return PretrainResult{std::move(params), std::move(bank),
                        std::move(metrics)};
}

std::string ablation_csv_header() {
  return "variant,feature_mapping,guided_augmentation,seed,probe_accuracy\n";
}

std::string ablation_csv_row(const AblationRow& row) {
  std::string line = row.variant;
  line += ',';
  line += row.mapping_enabled ? "on" : "off";
  line += ',';
  line += row.guided_enabled ? "on" : "off";
  line += ',';
  line += std::to_string(row.seed);
  line += ',';
  line += format_double(row.accuracy);
  line += '\n';
  return line;
}

std::vector<AblationRow> ablation_run(const TrainConfig& base,
                                      const std::string& out_dir) {
  base.validate();
  fs::create_directories(out_dir);

  struct Variant {
    const char* name;
    bool mapping;
    bool guided;
  };
  // Crop stays on everywhere; the flags under study are the two modules.
  const Variant variants[] = {{"vanilla", false, false},
                              {"gfm", true, false},
                              {"ga", false, true},
                              {"both", true, true}};

  std::vector<AblationRow> rows;
  for (const Variant& variant : variants) {
    for (int k = 0; k < base.ablation_seeds; ++k) {
      TrainConfig config = base;
      config.mapping.enabled = variant.mapping;
      config.guided.enabled = variant.guided;
      config.seed =
          derive_seed(base.seed, kAblateTag, static_cast<std::uint64_t>(k));
      const fs::path run_dir =
          fs::path(out_dir) / variant.name / ("seed" + std::to_string(k));
      const PretrainResult result = pretrain(config, run_dir.string());
      if (result.metrics.empty() || !result.metrics.back().probe_accuracy) {
        throw DataError("ablation_run: missing final probe accuracy");
      }
      rows.push_back(AblationRow{variant.name, variant.mapping, variant.guided,
                                 config.seed,
                                 *result.metrics.back().probe_accuracy});
    }
  }

  std::string csv = ablation_csv_header();
  for (const auto& row : rows) csv += ablation_csv_row(row);
  write_text(fs::path(out_dir) / "ablation.csv", csv);
  return rows;
}

namespace {

void append_le_double(std::string& blob, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) {
    blob.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
}

double read_le_double(const std::string& blob, std::size_t offset) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= static_cast<std::uint64_t>(
                static_cast<unsigned char>(blob[offset + i]))
            << (8 * i);
  }
  return std::bit_cast<double>(bits);
}

void append_layers(std::string& blob, const std::vector<AffineLayer>& layers) {
  for (const auto& layer : layers) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        append_le_double(blob, layer.weight(r, c));
      }
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) {
      append_le_double(blob, layer.bias[i]);
    }
  }
}

void read_layers(const std::string& blob, std::size_t& offset,
                 std::vector<AffineLayer>& layers) {
  for (auto& layer : layers) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        layer.weight(r, c) = read_le_double(blob, offset);
        offset += 8;
      }
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) {
      layer.bias[i] = read_le_double(blob, offset);
      offset += 8;
    }
  }
}

}  // namespace

void save_checkpoint(const std::string& dir, const EncoderParams& params,
                     const AugMemoryBank& bank, int epoch,
                     std::uint64_t run_seed) {
  fs::create_directories(dir);
  const fs::path base(dir);

  std::string blob;
  blob.reserve(params.parameter_count() * 8);
  append_layers(blob, params.trunk);
  append_layers(blob, params.head);
  write_text(base / "params.bin", blob);

  nlohmann::json manifest{
      {"format_version", 1},
      {"trunk_widths", params.config.trunk_widths},
      {"head_widths", params.config.head_widths},
      {"pooling", pooling_name(params.config.pooling)},
      {"epoch", epoch},
      {"run_seed", run_seed},
      {"parameter_count", params.parameter_count()},
      {"blob", "params.bin"},
      {"bank", "bank.json"},
  };
  write_text(base / "manifest.json", manifest.dump(2) + "\n");
  write_text(base / "bank.json", bank.to_json().dump() + "\n");
}

Checkpoint load_checkpoint(const std::string& dir) {
  const fs::path base(dir);
  std::ifstream manifest_in(base / "manifest.json");
  if (!manifest_in) {
    throw DataError("checkpoint: missing manifest in " + dir);
  }
  nlohmann::json manifest;
  try {
    manifest_in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint: bad manifest: ") + e.what());
  }
  if (manifest.value("format_version", -1) != 1) {
    throw DataError("checkpoint: unsupported format_version " +
                    manifest.value("format_version", nlohmann::json{}).dump());
  }

  Checkpoint checkpoint{
      EncoderParams{}, AugMemoryBank(1, 1.0, 1.0),
      manifest.at("epoch").get<int>(),
      manifest.at("run_seed").get<std::uint64_t>()};

  EncoderConfig config;
  config.trunk_widths = manifest.at("trunk_widths").get<std::vector<int>>();
  config.head_widths = manifest.at("head_widths").get<std::vector<int>>();
  config.pooling =
      pooling_from_name(manifest.at("pooling").get<std::string>());
  config.validate();
  checkpoint.params = init_params(config, 0);  // shape container

  const std::size_t expected = checkpoint.params.parameter_count();
  const std::size_t declared =
      manifest.at("parameter_count").get<std::size_t>();
  if (declared != expected) {
    throw DataError("checkpoint: manifest diff: parameter_count " +
                    std::to_string(declared) + " but widths imply " +
                    std::to_string(expected));
  }

  const fs::path blob_path =
      base / manifest.value("blob", std::string("params.bin"));
  std::ifstream blob_in(blob_path, std::ios::binary);
  if (!blob_in) throw DataError("checkpoint: missing blob " + blob_path.string());
  std::string blob((std::istreambuf_iterator<char>(blob_in)),
                   std::istreambuf_iterator<char>());
  if (blob.size() != expected * 8) {
    throw DataError("checkpoint: corrupt blob: expected " +
                    std::to_string(expected * 8) + " bytes, found " +
                    std::to_string(blob.size()));
  }
  std::size_t offset = 0;
  read_layers(blob, offset, checkpoint.params.trunk);
  read_layers(blob, offset, checkpoint.params.head);

  const fs::path bank_path =
      base / manifest.value("bank", std::string("bank.json"));
  std::ifstream bank_in(bank_path);
  if (!bank_in) throw DataError("checkpoint: missing bank " + bank_path.string());
  nlohmann::json bank_json;
  try {
    bank_in >> bank_json;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint: bad bank: ") + e.what());
  }
  checkpoint.bank = AugMemoryBank::from_json(bank_json);
  return checkpoint;
}

}  // namespace gcl
