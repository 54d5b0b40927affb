#include "aeromix/kriging.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "aeromix/error.hpp"

namespace aeromix {

struct OrdinaryKriging::Impl {
  Eigen::FullPivLU<Eigen::MatrixXd> lu;
  bool constant_field = false;
};

namespace {

// The system is assembled with semivariances divided by the sill: kriging
// weights are invariant to that scaling and the matrix stays balanced
// against the unit constraint row regardless of the variable's physical
// scale. A sample has zero semivariance with itself (the nugget acts
// between distinct points only), which keeps pure-nugget systems
// invertible.
Eigen::MatrixXd build_system(const std::vector<PointValue>& samples,
                             const VariogramModel& model, double jitter) {
  const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
  const double scale = 1.0 / model.sill;
  Eigen::MatrixXd a(n + 1, n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      a(i, j) = i == j ? 0.0
                       : scale * model.semivariance(distance(
                                     samples[static_cast<std::size_t>(i)].location,
                                     samples[static_cast<std::size_t>(j)].location));
    }
    a(i, i) += jitter;
    a(i, n) = 1.0;
    a(n, i) = 1.0;
  }
  a(n, n) = 0.0;
  return a;
}

}  // namespace

OrdinaryKriging::OrdinaryKriging(std::vector<PointValue> samples, VariogramModel model)
    : samples_(std::move(samples)), model_(model), impl_(new Impl) {
  if (samples_.empty()) {
    fail(ErrorClass::ValidationError, "kriging requires at least one sample");
  }
  if (!(model_.range > 0.0) || model_.nugget < 0.0 || model_.sill < model_.nugget) {
    fail(ErrorClass::ValidationError, "invalid variogram model parameters");
  }
  if (model_.sill == 0.0 || samples_.size() == 1) {
    impl_->constant_field = true;
    return;
  }
  impl_->lu.compute(build_system(samples_, model_, 0.0));
  if (!impl_->lu.isInvertible()) {
    // Diagonal jitter of 1e-10 * sill (1e-10 after the sill scaling).
    impl_->lu.compute(build_system(samples_, model_, 1e-10));
    if (!impl_->lu.isInvertible()) {
      fail(ErrorClass::NumericError, "kriging system singular even after jitter");
    }
  }
}

OrdinaryKriging::~OrdinaryKriging() = default;
OrdinaryKriging::OrdinaryKriging(OrdinaryKriging&&) noexcept = default;
OrdinaryKriging& OrdinaryKriging::operator=(OrdinaryKriging&&) noexcept = default;

std::vector<double> OrdinaryKriging::weights(const Location& target) const {
  const std::size_t n = samples_.size();
  if (impl_->constant_field) {
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
  }
  Eigen::VectorXd rhs(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    rhs(static_cast<Eigen::Index>(i)) =
        model_.semivariance(distance(samples_[i].location, target)) / model_.sill;
  }
  rhs(static_cast<Eigen::Index>(n)) = 1.0;
  const Eigen::VectorXd solution = impl_->lu.solve(rhs);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = solution(static_cast<Eigen::Index>(i));
  return w;
}

double OrdinaryKriging::predict(const Location& target) const {
  const std::vector<double> w = weights(target);
  double value = 0.0;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    value += w[i] * samples_[i].value;
  }
  return value;
}

double krige(const std::vector<PointValue>& samples, const VariogramModel& model,
             const Location& target) {
  return OrdinaryKriging(samples, model).predict(target);
}

}  // namespace aeromix
