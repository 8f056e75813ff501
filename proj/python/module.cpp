#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "gcl/contrastive.hpp"
#include "gcl/encoder.hpp"
#include "gcl/errors.hpp"
#include "gcl/feature_mapping.hpp"
#include "gcl/linear_probe.hpp"
#include "gcl/memory_bank.hpp"
#include "gcl/point_cloud.hpp"
#include "gcl/spatial_index.hpp"
#include "gcl/trainer.hpp"

namespace py = pybind11;

namespace {

Eigen::MatrixXd points_matrix(const gcl::PointCloud& cloud) {
  Eigen::MatrixXd m(cloud.size(), 3);
  for (int i = 0; i < cloud.size(); ++i) m.row(i) = cloud.points[i];
  return m;
}

gcl::PointCloud cloud_from_matrix(const Eigen::MatrixXd& points,
                                  std::optional<int> label) {
  if (points.cols() != 3) {
    throw gcl::DataError("points must be an (n, 3) array");
  }
  gcl::PointCloud cloud;
  cloud.points.reserve(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    cloud.points.emplace_back(points(i, 0), points(i, 1), points(i, 2));
  }
  cloud.label = label;
  return cloud;
}

gcl::LatentBatch make_batch(const std::vector<Eigen::VectorXd>& view1,
                            const std::vector<Eigen::VectorXd>& view2,
                            double temperature) {
  gcl::LatentBatch batch;
  batch.view1 = view1;
  batch.view2 = view2;
  batch.temperature = temperature;
  return batch;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "self-supervised point-cloud pretraining with guided "
            "augmentation and guided feature mapping";

  py::register_exception<gcl::DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<gcl::NumericError>(m, "NumericError",
                                            PyExc_ArithmeticError);

  py::class_<gcl::PointCloud>(m, "PointCloud")
      .def(py::init(&cloud_from_matrix), py::arg("points"),
           py::arg("label") = std::nullopt)
      .def_property_readonly("points", &points_matrix)
      .def_readonly("label", &gcl::PointCloud::label)
      .def_readonly("source_indices", &gcl::PointCloud::source_indices)
      .def("__len__", &gcl::PointCloud::size);

  m.def("load_xyz", &gcl::load_xyz, py::arg("path"));
  m.def("save_xyz", &gcl::save_xyz, py::arg("cloud"), py::arg("path"));
  m.def(
      "synth_shape",
      [](const std::string& kind, int n, std::uint64_t seed) {
        return gcl::synth_shape(gcl::shape_from_name(kind), n, seed);
      },
      py::arg("kind"), py::arg("n"), py::arg("seed"));
  m.def("random_subsample", &gcl::random_subsample, py::arg("cloud"),
        py::arg("m"), py::arg("seed"));
  m.def("voxel_downsample", &gcl::voxel_downsample, py::arg("cloud"),
        py::arg("voxel_len"));

  py::class_<gcl::SpatialIndex>(m, "SpatialIndex")
      .def(py::init<const gcl::PointCloud&>(), py::arg("cloud"))
      .def("nearest", &gcl::SpatialIndex::nearest, py::arg("query"))
      .def("__len__", &gcl::SpatialIndex::size);

  py::class_<gcl::CropSpec>(m, "CropSpec")
      .def(py::init<>())
      .def_readwrite("anchor_seed", &gcl::CropSpec::anchor_seed)
      .def_readwrite("fraction", &gcl::CropSpec::fraction);

  py::class_<gcl::JitterSpec>(m, "JitterSpec")
      .def(py::init<>())
      .def_readwrite("sigma", &gcl::JitterSpec::sigma)
      .def_readwrite("seed", &gcl::JitterSpec::seed);

  py::class_<gcl::Augmentation>(m, "Augmentation")
      .def(py::init<>())
      .def_readwrite("crop", &gcl::Augmentation::crop)
      .def_readwrite("scale", &gcl::Augmentation::scale)
      .def_readwrite("rotation", &gcl::Augmentation::rotation)
      .def_readwrite("translation", &gcl::Augmentation::translation)
      .def_readwrite("jitter", &gcl::Augmentation::jitter);

  py::class_<gcl::AugRanges>(m, "AugRanges")
      .def(py::init<>())
      .def_readwrite("crop_enabled", &gcl::AugRanges::crop_enabled)
      .def_readwrite("scale_enabled", &gcl::AugRanges::scale_enabled)
      .def_readwrite("rotation_enabled", &gcl::AugRanges::rotation_enabled)
      .def_readwrite("translation_enabled",
                     &gcl::AugRanges::translation_enabled)
      .def_readwrite("jitter_enabled", &gcl::AugRanges::jitter_enabled)
      .def_readwrite("crop_fraction", &gcl::AugRanges::crop_fraction)
      .def_readwrite("jitter_sigma", &gcl::AugRanges::jitter_sigma);

  py::class_<gcl::AppliedRecord>(m, "AppliedRecord")
      .def_readonly("augmentation", &gcl::AppliedRecord::augmentation)
      .def_readonly("surviving_indices",
                    &gcl::AppliedRecord::surviving_indices)
      .def_readonly("jitter_noise", &gcl::AppliedRecord::jitter_noise);

  m.def("sample_random", &gcl::sample_random, py::arg("ranges"),
        py::arg("seed"));
  m.def(
      "apply",
      [](const gcl::Augmentation& aug, const gcl::PointCloud& cloud,
         std::optional<int> budget, std::uint64_t seed) {
        auto result = gcl::apply(aug, cloud, budget, seed);
        return py::make_tuple(std::move(result.cloud),
                              std::move(result.record));
      },
      py::arg("augmentation"), py::arg("cloud"),
      py::arg("point_budget") = std::nullopt, py::arg("seed") = 0);
  m.def("invert_apply", &gcl::invert_apply, py::arg("record"),
        py::arg("cloud"), py::arg("invert_jitter") = true);
  m.def("strip_crop", &gcl::strip_crop, py::arg("augmentation"));
  m.def("angular_distance", &gcl::angular_distance, py::arg("r1"),
        py::arg("r2"));
  m.def(
      "aug_distance",
      [](const gcl::Augmentation& a, const gcl::Augmentation& b) {
        return gcl::aug_distance(a, b);
      },
      py::arg("a"), py::arg("b"));

  m.def("novelty_kernel", &gcl::novelty_kernel, py::arg("distance"),
        py::arg("epsilon"));

  py::class_<gcl::AugMemoryBank>(m, "MemoryBank")
      .def(py::init<std::size_t, double, double>(), py::arg("capacity"),
           py::arg("epsilon") = 1e-3, py::arg("c") = 1e-3)
      .def("insert", &gcl::AugMemoryBank::insert, py::arg("augmentation"))
      .def("novelty_score",
           [](const gcl::AugMemoryBank& bank, const gcl::Augmentation& aug) {
             return gcl::novelty_score(aug, bank);
           })
      .def("select_novel",
           [](gcl::AugMemoryBank& bank, const gcl::AugRanges& ranges,
              int candidates, std::uint64_t seed) {
             return gcl::select_novel(bank, ranges, candidates, seed);
           },
           py::arg("ranges"), py::arg("candidates"), py::arg("seed"))
      .def("pair_for_sample",
           [](gcl::AugMemoryBank& bank, const gcl::AugRanges& ranges,
              int candidates, std::uint64_t seed) {
             auto pair = gcl::pair_for_sample(bank, ranges, candidates, seed);
             return py::make_tuple(pair.first, pair.second);
           },
           py::arg("ranges"), py::arg("candidates"), py::arg("seed"))
      .def("__len__", &gcl::AugMemoryBank::size)
      .def_property_readonly("capacity", &gcl::AugMemoryBank::capacity);

  m.def(
      "coverage_metrics",
      [](const std::vector<gcl::Augmentation>& samples) {
        const auto cov = gcl::coverage_metrics(samples);
        return py::make_tuple(cov.min_pairwise, cov.mean_nn);
      },
      py::arg("samples"));

  m.def(
      "structural_map",
      [](const gcl::PointCloud& view1, const gcl::PointCloud& view2) {
        return gcl::structural_map(view1, view2).indices;
      },
      py::arg("view1_inverted"), py::arg("view2_inverted"));
  m.def(
      "gather_features",
      [](const Eigen::MatrixXd& features, const std::vector<int>& indices) {
        return gcl::gather_features(features, gcl::StructuralMap{indices});
      },
      py::arg("features"), py::arg("indices"));

  py::class_<gcl::EncoderConfig>(m, "EncoderConfig")
      .def(py::init<>())
      .def_readwrite("trunk_widths", &gcl::EncoderConfig::trunk_widths)
      .def_readwrite("head_widths", &gcl::EncoderConfig::head_widths);

  py::class_<gcl::EncoderParams>(m, "EncoderParams")
      .def_property_readonly("parameter_count",
                             &gcl::EncoderParams::parameter_count);

  m.def("init_params", &gcl::init_params, py::arg("config"), py::arg("seed"));
  m.def(
      "encode_points",
      [](const gcl::EncoderParams& params, const gcl::PointCloud& cloud) {
        return gcl::encode_points(params, cloud);
      },
      py::arg("params"), py::arg("cloud"));
  m.def(
      "pool_project",
      [](const gcl::EncoderParams& params, const Eigen::MatrixXd& features) {
        return gcl::pool_project(params, features);
      },
      py::arg("params"), py::arg("features"));

  m.def("cosine_similarity", &gcl::cosine_similarity, py::arg("u"),
        py::arg("v"));
  m.def(
      "batch_loss",
      [](const std::vector<Eigen::VectorXd>& view1,
         const std::vector<Eigen::VectorXd>& view2, double temperature) {
        return gcl::batch_loss(make_batch(view1, view2, temperature));
      },
      py::arg("view1"), py::arg("view2"), py::arg("temperature") = 0.5);
  m.def(
      "loss_backward",
      [](const std::vector<Eigen::VectorXd>& view1,
         const std::vector<Eigen::VectorXd>& view2, double temperature) {
        const auto grads =
            gcl::loss_backward(make_batch(view1, view2, temperature));
        return py::make_tuple(grads.view1, grads.view2);
      },
      py::arg("view1"), py::arg("view2"), py::arg("temperature") = 0.5);

  m.def("linear_probe", &gcl::linear_probe, py::arg("features"),
        py::arg("labels"), py::arg("split_seed"),
        py::arg("ridge_lambda") = 1e-2);

  m.def(
      "pretrain",
      [](const std::string& config_json, const std::string& out_dir,
         bool resume) {
        const gcl::TrainConfig config =
            gcl::TrainConfig::from_json(nlohmann::json::parse(config_json));
        const gcl::PretrainResult result =
            gcl::pretrain(config, out_dir, resume);
        py::list metrics;
        for (const auto& row : result.metrics) {
          py::dict entry;
          entry["epoch"] = row.epoch;
          entry["mean_loss"] = row.mean_loss;
          entry["probe_accuracy"] = row.probe_accuracy
                                        ? py::object(py::float_(
                                              *row.probe_accuracy))
                                        : py::object(py::none());
          entry["coverage_min_pairwise"] = row.coverage_min;
          entry["coverage_mean_nn"] = row.coverage_mean;
          metrics.append(entry);
        }
        return metrics;
      },
      py::arg("config_json"), py::arg("out_dir"), py::arg("resume") = false);

  m.def(
      "default_config_json",
      []() { return gcl::TrainConfig{}.to_json().dump(2); },
      "resolved default configuration as a json string");
}
