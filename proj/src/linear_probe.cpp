#include "gcl/linear_probe.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <numeric>

#include "gcl/errors.hpp"
#include "gcl/rng.hpp"

namespace gcl {

double linear_probe(const std::vector<Eigen::VectorXd>& features,
                    const std::vector<int>& labels, std::uint64_t split_seed,
                    double ridge_lambda) {
  if (features.size() != labels.size() || features.empty()) {
    throw DataError("linear_probe: features and labels must align");
  }

  std::map<int, std::vector<int>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[labels[i]].push_back(static_cast<int>(i));
  }
  if (by_class.size() < 2) {
    throw DataError("linear_probe: need at least 2 classes");
  }
  for (const auto& [cls, members] : by_class) {
    if (members.size() < 4) {
      throw DataError("linear_probe: class " + std::to_string(cls) +
                      " has fewer than 4 samples");
    }
  }

  // 70/30 stratified split, shuffled per class.
  std::vector<int> train, test;
  Rng rng(split_seed);
  for (auto& [cls, members] : by_class) {
    for (std::size_t i = members.size(); i > 1; --i) {
      std::swap(members[i - 1], members[rng.index(i)]);
    }
    const int n = static_cast<int>(members.size());
    const int n_train = std::clamp(
        static_cast<int>(std::round(0.7 * n)), 1, n - 1);
    train.insert(train.end(), members.begin(), members.begin() + n_train);
    test.insert(test.end(), members.begin() + n_train, members.end());
  }

  // Closed-form one-vs-rest ridge regression on one-hot targets with an
  // unpenalized bias column.
  const Eigen::Index dim = features.front().size();
  std::vector<int> classes;
  classes.reserve(by_class.size());
  for (const auto& [cls, members] : by_class) classes.push_back(cls);

  Eigen::MatrixXd x(train.size(), dim + 1);
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(train.size(), classes.size());
  for (std::size_t r = 0; r < train.size(); ++r) {
    x.row(r).head(dim) = features[train[r]].transpose();
    x(r, dim) = 1.0;
    const auto cls_it =
        std::find(classes.begin(), classes.end(), labels[train[r]]);
    y(r, cls_it - classes.begin()) = 1.0;
  }

  Eigen::MatrixXd gram = x.transpose() * x;
  for (Eigen::Index i = 0; i < dim; ++i) gram(i, i) += ridge_lambda;
  const Eigen::MatrixXd weights = gram.ldlt().solve(x.transpose() * y);

  int correct = 0;
  for (const int idx : test) {
    Eigen::VectorXd sample(dim + 1);
    sample.head(dim) = features[idx];
    sample(dim) = 1.0;
    const Eigen::VectorXd scores = weights.transpose() * sample;
    // Ties resolve to the lowest class id (first maximal entry).
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < scores.size(); ++c) {
      if (scores[c] > scores[best]) best = c;
    }
    if (classes[static_cast<std::size_t>(best)] == labels[idx]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace gcl
