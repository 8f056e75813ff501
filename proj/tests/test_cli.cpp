#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "gcl/augmentation.hpp"
#include "gcl/point_cloud.hpp"
#include "gcl/trainer.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using gcl::test::TempDir;

namespace {

std::string cli_path() {
  const char* path = std::getenv("GCL_CLI");
  REQUIRE_MESSAGE(path != nullptr, "GCL_CLI must point at the binary");
  return path;
}

int run(const std::string& args, const fs::path& capture) {
  const std::string cmd =
      cli_path() + " " + args + " > " + capture.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

gcl::TrainConfig tiny_config() {
  gcl::TrainConfig config;
  config.seed = 7;
  config.corpus.kinds = {gcl::ShapeKind::Plane, gcl::ShapeKind::Sphere};
  config.corpus.clouds_per_class = 6;
  config.corpus.points_per_cloud = 48;
  config.encoder.trunk_widths = {3, 8, 8};
  config.encoder.head_widths = {8, 4};
  config.batch_size = 4;
  config.optim.cycles = 1;
  config.optim.epochs_per_cycle = 2;
  config.guided.candidates = 4;
  config.guided.capacity = 128;
  config.probe.every_epochs = 0;
  config.ablation_seeds = 1;
  return config;
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  TempDir dir("cli_usage");
  CHECK(run("", dir.path() / "log") == 2);
  CHECK(run("frobnicate", dir.path() / "log") == 2);
  CHECK(run("augment --no-such-flag", dir.path() / "log") == 2);
  CHECK(run("explore --method sideways", dir.path() / "log") == 2);
}

TEST_CASE("augment applies, repeats, and inverts") {
  TempDir dir("cli_augment");
  const fs::path in = dir.path() / "in.xyz";
  gcl::save_xyz(gcl::test::random_cloud(32, 5), in.string());

  SUBCASE("identity augmentation reproduces the bytes") {
    gcl::test::write_file(dir.path() / "identity.json",
                          nlohmann::json(gcl::Augmentation{}).dump());
    const fs::path out = dir.path() / "identity";
    CHECK(run("augment --in " + in.string() + " --aug " +
                  (dir.path() / "identity.json").string() + " --out " +
                  out.string(),
              dir.path() / "log") == 0);
    CHECK(gcl::test::read_file(out / "augmented.xyz") ==
          gcl::test::read_file(in));
  }

  SUBCASE("random augmentation is reproducible and invertible") {
    const fs::path out_a = dir.path() / "a";
    const fs::path out_b = dir.path() / "b";
    CHECK(run("augment --in " + in.string() + " --random --seed 7 --out " +
                  out_a.string(),
              dir.path() / "log") == 0);
    CHECK(run("augment --in " + in.string() + " --random --seed 7 --out " +
                  out_b.string(),
              dir.path() / "log") == 0);
    CHECK(gcl::test::read_file(out_a / "augmented.xyz") ==
          gcl::test::read_file(out_b / "augmented.xyz"));
    CHECK(gcl::test::read_file(out_a / "record.json") ==
          gcl::test::read_file(out_b / "record.json"));

    CHECK(run("augment --invert --in " +
                  (out_a / "augmented.xyz").string() + " --record " +
                  (out_a / "record.json").string() + " --out " +
                  (dir.path() / "inv").string(),
              dir.path() / "log") == 0);
    const gcl::PointCloud original = gcl::load_xyz(in.string());
    const gcl::PointCloud restored =
        gcl::load_xyz((dir.path() / "inv" / "inverted.xyz").string());
    const nlohmann::json record = nlohmann::json::parse(
        gcl::test::read_file(out_a / "record.json"));
    const auto surviving =
        record.at("surviving_indices").get<std::vector<int>>();
    REQUIRE(restored.size() == static_cast<int>(surviving.size()));
    for (std::size_t i = 0; i < surviving.size(); ++i) {
      CHECK((restored.points[i] - original.points[surviving[i]])
                .cwiseAbs()
                .maxCoeff() < 1e-7);
    }
  }

  SUBCASE("data errors exit with code 3") {
    CHECK(run("augment --in " + (dir.path() / "missing.xyz").string() +
                  " --random",
              dir.path() / "log") == 3);
    gcl::test::write_file(dir.path() / "bad.json", "{ not json");
    CHECK(run("augment --in " + in.string() + " --aug " +
                  (dir.path() / "bad.json").string(),
              dir.path() / "log") == 3);
    CHECK(run("augment --in " + in.string(), dir.path() / "log") == 2);
  }
}

TEST_CASE("explore emits the coverage csv") {
  TempDir dir("cli_explore");

  SUBCASE("fixed header and one row per trial") {
    CHECK(run("explore --trials 3 --n-select 8 --candidates 4 --method "
              "guided --seed 5 --out " +
                  dir.str(),
              dir.path() / "log") == 0);
    const std::string csv = gcl::test::read_file(dir.path() / "coverage.csv");
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "trial,method,min_pairwise,mean_nn");
    int rows = 0;
    while (std::getline(lines, line)) {
      CHECK(line.find("guided") != std::string::npos);
      ++rows;
    }
    CHECK(rows == 3);
  }

  SUBCASE("degenerate ranges collapse coverage to zero") {
    gcl::TrainConfig config;
    config.ranges.scale_enabled = false;
    config.ranges.rotation_enabled = false;
    config.ranges.translation_enabled = false;
    gcl::test::write_file(dir.path() / "degenerate.json",
                          config.to_json().dump());
    CHECK(run("explore --trials 1 --n-select 2 --method random --config " +
                  (dir.path() / "degenerate.json").string() + " --out " +
                  dir.str(),
              dir.path() / "log") == 0);
    const std::string csv = gcl::test::read_file(dir.path() / "coverage.csv");
    CHECK(csv.find("0,random,0,0") != std::string::npos);
  }
}

TEST_CASE("pretrain, probe, featmap, and ablate wire together") {
  TempDir dir("cli_train");
  gcl::test::write_file(dir.path() / "config.json",
                        tiny_config().to_json().dump(2));
  const std::string config_flag =
      " --config " + (dir.path() / "config.json").string();

  const fs::path run_dir = dir.path() / "run";
  REQUIRE(run("pretrain" + config_flag + " --out " + run_dir.string(),
              dir.path() / "log") == 0);
  CHECK(fs::exists(run_dir / "metrics.csv"));
  CHECK(fs::exists(run_dir / "manifest.json"));
  CHECK(fs::exists(run_dir / "params.bin"));
  CHECK(fs::exists(run_dir / "bank.json"));
  CHECK(fs::exists(run_dir / "run_config.json"));

  SUBCASE("re-running overwrites with identical bytes") {
    const std::string before = gcl::test::read_file(run_dir / "metrics.csv");
    const std::string blob_before =
        gcl::test::read_file(run_dir / "params.bin");
    REQUIRE(run("pretrain" + config_flag + " --out " + run_dir.string(),
                dir.path() / "log") == 0);
    CHECK(gcl::test::read_file(run_dir / "metrics.csv") == before);
    CHECK(gcl::test::read_file(run_dir / "params.bin") == blob_before);
  }

  SUBCASE("probe reports an accuracy in [0, 1]") {
    REQUIRE(run("probe" + config_flag + " --checkpoint " + run_dir.string() +
                    " --out " + (dir.path() / "probe_out").string(),
                dir.path() / "log") == 0);
    const std::string csv =
        gcl::test::read_file(dir.path() / "probe_out" / "probe.csv");
    CHECK(csv.starts_with("split_seed,accuracy\n"));
    const double accuracy =
        std::stod(csv.substr(csv.rfind(',') + 1));
    CHECK(accuracy >= 0.0);
    CHECK(accuracy <= 1.0);
  }

  SUBCASE("featmap anchors at distance zero") {
    const fs::path cloud_path = dir.path() / "shape.xyz";
    gcl::save_xyz(gcl::synth_shape(gcl::ShapeKind::Plane, 64, 3),
                  cloud_path.string());
    REQUIRE(run("featmap --in " + cloud_path.string() + " --checkpoint " +
                    run_dir.string() + " --anchor 5 --out " +
                    (dir.path() / "fm").string(),
                dir.path() / "log") == 0);
    const std::string csv =
        gcl::test::read_file(dir.path() / "fm" / "featmap.csv");
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "index,x,y,z,cosine_distance");
    int rows = 0;
    bool anchor_zero = false;
    while (std::getline(lines, line)) {
      if (line.starts_with("5,")) {
        anchor_zero = line.substr(line.rfind(',') + 1) == "0";
      }
      ++rows;
    }
    CHECK(rows == 64);
    CHECK(anchor_zero);

    CHECK(run("featmap --in " + cloud_path.string() + " --checkpoint " +
                  run_dir.string() + " --anchor 99 --out " +
                  (dir.path() / "fm2").string(),
              dir.path() / "log") == 3);
  }

  SUBCASE("ablate emits the four-variant csv") {
    REQUIRE(run("ablate" + config_flag + " --out " +
                    (dir.path() / "abl").string(),
                dir.path() / "log") == 0);
    const std::string csv =
        gcl::test::read_file(dir.path() / "abl" / "ablation.csv");
    CHECK(csv.starts_with(gcl::ablation_csv_header()));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);  // header + 4 rows
  }
}

TEST_CASE("GCL_OUT provides the default output directory") {
  TempDir dir("cli_env");
  const fs::path in = dir.path() / "in.xyz";
  gcl::save_xyz(gcl::test::random_cloud(16, 2), in.string());
  const std::string cmd = "GCL_OUT=" + dir.str() + " " + cli_path() +
                          " augment --in " + in.string() +
                          " --random --seed 1 > " +
                          (dir.path() / "log").string() + " 2>&1";
  REQUIRE(std::system(cmd.c_str()) != -1);
  CHECK(fs::exists(dir.path() / "augmented.xyz"));
  CHECK(fs::exists(dir.path() / "record.json"));
}
