#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace gcl {

// Frozen-feature evaluation: 70/30 stratified split, one-vs-rest ridge
// classifier fit in closed form on the train side, accuracy on the test
// side. Prediction ties resolve to the lowest class id.
double linear_probe(const std::vector<Eigen::VectorXd>& features,
                    const std::vector<int>& labels, std::uint64_t split_seed,
                    double ridge_lambda = 1e-2);

}  // namespace gcl
