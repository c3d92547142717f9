#pragma once

#include <Eigen/Dense>

namespace gpsens {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// One row per input point; columns are input dimensions.
using Points = Eigen::MatrixXd;

struct Dataset {
  Points x;
  Vector y;

  Eigen::Index size() const { return x.rows(); }
  Eigen::Index dim() const { return x.cols(); }
};

// Throws InputError when the dataset is empty, ragged or non-finite.
void validate_dataset(const Dataset& data);

}  // namespace gpsens
