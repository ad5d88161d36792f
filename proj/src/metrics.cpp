#include "eppr/metrics.hpp"

#include "eppr/error.hpp"

namespace eppr {

double metric_rpe(const Eigen::VectorXd& predictions, const Eigen::VectorXd& y_test, double y_train_mean) {
    if (predictions.size() != y_test.size()) throw Error(ErrorCode::shape, "prediction and response lengths differ");
    if (y_test.size() < 1) throw Error(ErrorCode::undefined_metric, "RPE needs at least one test row");
    const double denom = (y_test.array() - y_train_mean).square().sum();
    if (!(denom > 0.0)) throw Error(ErrorCode::undefined_metric, "RPE denominator is zero");
    return (predictions - y_test).squaredNorm() / denom;
}

double metric_mr(const Eigen::VectorXd& predictions, const Eigen::VectorXd& y_test) {
    if (predictions.size() != y_test.size()) throw Error(ErrorCode::shape, "prediction and response lengths differ");
    if (y_test.size() < 1) throw Error(ErrorCode::undefined_metric, "MR needs at least one test row");
    Eigen::Index wrong = 0;
    for (Eigen::Index i = 0; i < y_test.size(); ++i) {
        const double label = predictions[i] > 0.5 ? 1.0 : 0.0;
        if (label != y_test[i]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(y_test.size());
}

}  // namespace eppr
