#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include "gcl/contrastive.hpp"
#include "gcl/errors.hpp"
#include "gcl/memory_bank.hpp"
#include "gcl/point_cloud.hpp"
#include "gcl/rng.hpp"
#include "gcl/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// exit codes: 0 success, 2 usage, 3 data, 4 numerical
constexpr int kUsageError = 2;
constexpr int kDataError = 3;
constexpr int kNumericError = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string default_out_dir() {
  if (const char* env = std::getenv("GCL_OUT")) return env;
  return ".";
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw gcl::DataError("cannot open " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw gcl::DataError(path + ": " + e.what());
  }
}

gcl::TrainConfig load_config(const std::string& path) {
  if (path.empty()) return gcl::TrainConfig{};
  return gcl::TrainConfig::from_json(load_json_file(path));
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? "."
                                                    : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw gcl::DataError("cannot write " + path.string());
  out << text;
}

struct AugmentArgs {
  std::string in_path;
  std::string aug_path;
  std::string record_path;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::optional<int> budget;
  bool random = false;
  bool invert = false;
};

int run_augment(const AugmentArgs& args) {
  const fs::path out(args.out_dir);
  fs::create_directories(out);
  const gcl::PointCloud cloud = gcl::load_xyz(args.in_path);

  if (args.invert) {
    if (args.record_path.empty()) {
      throw UsageError("--invert requires --record");
    }
    const gcl::AppliedRecord record =
        load_json_file(args.record_path).get<gcl::AppliedRecord>();
    const gcl::PointCloud restored = gcl::invert_apply(record, cloud);
    gcl::save_xyz(restored, (out / "inverted.xyz").string());
    std::cout << "wrote " << (out / "inverted.xyz").string() << "\n";
    return 0;
  }

  gcl::Augmentation aug;
  if (args.random) {
    const gcl::TrainConfig config = load_config(args.config_path);
    aug = gcl::sample_random(config.ranges, args.seed);
  } else if (!args.aug_path.empty()) {
    aug = load_json_file(args.aug_path).get<gcl::Augmentation>();
  } else {
    throw UsageError("augment needs --aug, --random, or --invert");
  }

  const auto [augmented, record] =
      gcl::apply(aug, cloud, args.budget, args.seed);
  gcl::save_xyz(augmented, (out / "augmented.xyz").string());
  write_file(out / "record.json", json(record).dump(2) + "\n");
  std::cout << "wrote " << (out / "augmented.xyz").string() << " and "
            << (out / "record.json").string() << "\n";
  return 0;
}

struct ExploreArgs {
  std::string config_path;
  std::string out_dir;
  std::string method = "guided";
  int trials = 1;
  int n_select = 64;
  int candidates = 16;
  std::uint64_t seed = 0;
};

int run_explore(const ExploreArgs& args) {
  if (args.trials < 1) throw UsageError("--trials must be >= 1");
  if (args.n_select < 2) throw UsageError("--n-select must be >= 2");
  if (args.candidates < 1) throw UsageError("--candidates must be >= 1");
  const gcl::TrainConfig config = load_config(args.config_path);

  std::string csv = "trial,method,min_pairwise,mean_nn\n";
  for (int trial = 0; trial < args.trials; ++trial) {
    const std::uint64_t trial_seed =
        gcl::derive_seed(args.seed, static_cast<std::uint64_t>(trial));
    std::vector<gcl::Augmentation> samples;
    samples.reserve(args.n_select);
    if (args.method == "guided") {
      gcl::AugMemoryBank bank(config.guided.capacity, config.guided.epsilon,
                              config.guided.c);
      for (int i = 0; i < args.n_select; ++i) {
        samples.push_back(gcl::select_novel(
            bank, config.ranges, args.candidates,
            gcl::derive_seed(trial_seed, static_cast<std::uint64_t>(i)),
            config.weights));
      }
    } else {
      for (int i = 0; i < args.n_select; ++i) {
        samples.push_back(gcl::sample_random(
            config.ranges,
            gcl::derive_seed(trial_seed, static_cast<std::uint64_t>(i))));
      }
    }
    const gcl::CoverageMetrics cov =
        gcl::coverage_metrics(samples, config.weights, config.ranges);
    csv += std::to_string(trial) + "," + args.method + "," +
           format_double(cov.min_pairwise) + "," +
           format_double(cov.mean_nn) + "\n";
  }
  const fs::path out = fs::path(args.out_dir) / "coverage.csv";
  write_file(out, csv);
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

struct FeatmapArgs {
  std::string in_path;
  std::string checkpoint_dir;
  std::string out_dir;
  int anchor = 0;
};

int run_featmap(const FeatmapArgs& args) {
  const gcl::PointCloud cloud = gcl::load_xyz(args.in_path);
  const gcl::Checkpoint checkpoint = gcl::load_checkpoint(args.checkpoint_dir);
  if (args.anchor < 0 || args.anchor >= cloud.size()) {
    throw gcl::DataError("featmap: anchor " + std::to_string(args.anchor) +
                         " out of range for " + std::to_string(cloud.size()) +
                         " points");
  }
  const Eigen::MatrixXd features =
      gcl::encode_points(checkpoint.params, cloud);
  const Eigen::VectorXd anchor_row = features.row(args.anchor).transpose();

  std::string csv = "index,x,y,z,cosine_distance\n";
  for (int j = 0; j < cloud.size(); ++j) {
    const double distance =
        1.0 -
        gcl::cosine_similarity(anchor_row, features.row(j).transpose().eval());
    const auto& p = cloud.points[j];
    csv += std::to_string(j) + "," + format_double(p.x()) + "," +
           format_double(p.y()) + "," + format_double(p.z()) + "," +
           format_double(distance) + "\n";
  }
  const fs::path out = fs::path(args.out_dir) / "featmap.csv";
  write_file(out, csv);
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

struct TrainArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool resume = false;
};

gcl::TrainConfig resolve_config(const TrainArgs& args) {
  gcl::TrainConfig config = load_config(args.config_path);
  if (args.seed) config.seed = *args.seed;  // flag beats file
  return config;
}

int run_pretrain(const TrainArgs& args) {
  const gcl::TrainConfig config = resolve_config(args);
  const auto start = std::chrono::steady_clock::now();
  const gcl::PretrainResult result =
      gcl::pretrain(config, args.out_dir, args.resume);
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - start;
  for (const auto& row : result.metrics) {
    std::cout << "epoch " << row.epoch << " mean_loss "
              << format_double(row.mean_loss);
    if (row.probe_accuracy) {
      std::cout << " probe " << format_double(*row.probe_accuracy);
    }
    std::cout << "\n";
  }
  std::cout << "finished " << result.metrics.size() << " epochs in "
            << format_double(elapsed.count()) << " s; artifacts in "
            << args.out_dir << "\n";
  return 0;
}

int run_probe(const TrainArgs& args, const std::string& checkpoint_dir) {
  const gcl::TrainConfig config = resolve_config(args);
  const gcl::Checkpoint checkpoint = gcl::load_checkpoint(checkpoint_dir);
  const std::vector<gcl::PointCloud> corpus = gcl::build_corpus(config.corpus);
  const double accuracy =
      gcl::probe_encoder(checkpoint.params, corpus, config.probe);
  const fs::path out = fs::path(args.out_dir) / "probe.csv";
  write_file(out, "split_seed,accuracy\n" +
                      std::to_string(config.probe.split_seed) + "," +
                      format_double(accuracy) + "\n");
  std::cout << "probe accuracy " << format_double(accuracy) << "\n";
  return 0;
}

int run_ablate(const TrainArgs& args) {
  const gcl::TrainConfig config = resolve_config(args);
  const std::vector<gcl::AblationRow> rows =
      gcl::ablation_run(config, args.out_dir);
  for (const auto& row : rows) {
    std::cout << row.variant << " seed " << row.seed << " accuracy "
              << format_double(row.accuracy) << "\n";
  }
  std::cout << "wrote " << (fs::path(args.out_dir) / "ablation.csv").string()
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"self-supervised point-cloud pretraining with guided "
               "augmentation and feature mapping"};
  app.require_subcommand(1);

  AugmentArgs augment;
  augment.out_dir = default_out_dir();
  CLI::App* augment_cmd =
      app.add_subcommand("augment", "apply or invert an augmentation");
  augment_cmd->add_option("--in", augment.in_path, "input .xyz cloud")
      ->required();
  augment_cmd->add_option("--aug", augment.aug_path, "augmentation json");
  augment_cmd->add_flag("--random", augment.random, "sample the augmentation");
  augment_cmd->add_flag("--invert", augment.invert, "apply a record inverse");
  augment_cmd->add_option("--record", augment.record_path,
                          "record json for --invert");
  augment_cmd->add_option("--budget", augment.budget, "output point budget");
  augment_cmd->add_option("--seed", augment.seed, "rng seed");
  augment_cmd->add_option("--config", augment.config_path,
                          "config json for ranges");
  augment_cmd->add_option("--out", augment.out_dir, "output directory");

  ExploreArgs explore;
  explore.out_dir = default_out_dir();
  CLI::App* explore_cmd = app.add_subcommand(
      "explore", "coverage of guided vs random augmentation sampling");
  explore_cmd->add_option("--trials", explore.trials, "trial count");
  explore_cmd->add_option("--n-select", explore.n_select,
                          "selections per trial");
  explore_cmd->add_option("--candidates", explore.candidates,
                          "candidates per selection");
  explore_cmd
      ->add_option("--method", explore.method, "sampling method")
      ->check(CLI::IsMember({"guided", "random"}));
  explore_cmd->add_option("--seed", explore.seed, "rng seed");
  explore_cmd->add_option("--config", explore.config_path, "config json");
  explore_cmd->add_option("--out", explore.out_dir, "output directory");

  FeatmapArgs featmap;
  featmap.out_dir = default_out_dir();
  CLI::App* featmap_cmd = app.add_subcommand(
      "featmap", "per-point feature distances to an anchor point");
  featmap_cmd->add_option("--in", featmap.in_path, "input .xyz cloud")
      ->required();
  featmap_cmd
      ->add_option("--checkpoint", featmap.checkpoint_dir,
                   "checkpoint directory")
      ->required();
  featmap_cmd->add_option("--anchor", featmap.anchor, "anchor point index");
  featmap_cmd->add_option("--out", featmap.out_dir, "output directory");

  TrainArgs pretrain_args;
  pretrain_args.out_dir = default_out_dir();
  CLI::App* pretrain_cmd =
      app.add_subcommand("pretrain", "run the pretraining loop");
  pretrain_cmd->add_option("--config", pretrain_args.config_path,
                           "config json");
  pretrain_cmd->add_option("--seed", pretrain_args.seed,
                           "seed override (beats the config file)");
  pretrain_cmd->add_flag("--resume", pretrain_args.resume,
                         "continue from the checkpoint in --out");
  pretrain_cmd->add_option("--out", pretrain_args.out_dir, "output directory");

  TrainArgs probe_args;
  probe_args.out_dir = default_out_dir();
  std::string probe_checkpoint;
  CLI::App* probe_cmd =
      app.add_subcommand("probe", "linear probe of a checkpoint");
  probe_cmd->add_option("--config", probe_args.config_path, "config json");
  probe_cmd
      ->add_option("--checkpoint", probe_checkpoint, "checkpoint directory")
      ->required();
  probe_cmd->add_option("--seed", probe_args.seed, "seed override");
  probe_cmd->add_option("--out", probe_args.out_dir, "output directory");

  TrainArgs ablate_args;
  ablate_args.out_dir = default_out_dir();
  CLI::App* ablate_cmd =
      app.add_subcommand("ablate", "run the four-variant ablation matrix");
  ablate_cmd->add_option("--config", ablate_args.config_path, "config json");
  ablate_cmd->add_option("--seed", ablate_args.seed, "seed override");
  ablate_cmd->add_option("--out", ablate_args.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (app.got_subcommand(augment_cmd)) return run_augment(augment);
    if (app.got_subcommand(explore_cmd)) return run_explore(explore);
    if (app.got_subcommand(featmap_cmd)) return run_featmap(featmap);
    if (app.got_subcommand(pretrain_cmd)) return run_pretrain(pretrain_args);
    if (app.got_subcommand(probe_cmd)) {
      return run_probe(probe_args, probe_checkpoint);
    }
    if (app.got_subcommand(ablate_cmd)) return run_ablate(ablate_args);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const gcl::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericError;
  } catch (const gcl::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return 0;
}
