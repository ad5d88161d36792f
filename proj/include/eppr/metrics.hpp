#pragma once

#include <Eigen/Dense>

namespace eppr {

/// Relative prediction error: sum (pred - y)^2 / sum (train_mean - y)^2.
/// Throws undefined_metric when the denominator is zero.
double metric_rpe(const Eigen::VectorXd& predictions, const Eigen::VectorXd& y_test, double y_train_mean);

/// Fraction of rows where 1(pred > 0.5) differs from the 0/1 label.
double metric_mr(const Eigen::VectorXd& predictions, const Eigen::VectorXd& y_test);

}  // namespace eppr
