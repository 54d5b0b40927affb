#include "aeromix/linear.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "aeromix/error.hpp"

namespace aeromix {

LinearModel fit_linear(std::span<const double> x_rowmajor, std::size_t n_rows,
                       std::size_t arity, std::span<const double> y) {
  if (x_rowmajor.size() != n_rows * arity || y.size() != n_rows) {
    fail(ErrorClass::ValidationError, "fit_linear: inconsistent input sizes");
  }
  if (n_rows < arity + 1) {
    fail(ErrorClass::InsufficientData,
         "fit_linear needs n >= arity + 1, got n = " + std::to_string(n_rows) +
             ", arity = " + std::to_string(arity));
  }

  const auto n = static_cast<Eigen::Index>(n_rows);
  const auto p = static_cast<Eigen::Index>(arity);

  Eigen::MatrixXd x(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      x(i, j) = x_rowmajor[static_cast<std::size_t>(i) * arity + static_cast<std::size_t>(j)];
    }
  }
  Eigen::VectorXd yy(n);
  for (Eigen::Index i = 0; i < n; ++i) yy(i) = y[static_cast<std::size_t>(i)];

  // Center and scale; the intercept drops out and conditioning improves.
  const Eigen::RowVectorXd mean_x = x.colwise().mean();
  const double mean_y = yy.mean();
  x.rowwise() -= mean_x;
  yy.array() -= mean_y;
  Eigen::VectorXd scale(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double s = std::sqrt(x.col(j).squaredNorm() / static_cast<double>(n));
    scale(j) = s > 0.0 ? s : 1.0;
    x.col(j) /= scale(j);
  }

  Eigen::MatrixXd normal = x.transpose() * x;
  Eigen::VectorXd rhs = x.transpose() * yy;

  auto solve = [&](const Eigen::MatrixXd& a) {
    return Eigen::LDLT<Eigen::MatrixXd>(a);
  };
  Eigen::LDLT<Eigen::MatrixXd> ldlt = solve(normal);
  const double mean_diag = normal.trace() / static_cast<double>(p);
  bool deficient = ldlt.info() != Eigen::Success;
  if (!deficient) {
    const Eigen::VectorXd d = ldlt.vectorD();
    for (Eigen::Index j = 0; j < p; ++j) {
      if (!(d(j) > 1e-12 * std::max(mean_diag, 1e-300))) {
        deficient = true;
        break;
      }
    }
  }
  if (deficient) {
    Eigen::MatrixXd ridged = normal;
    ridged.diagonal().array() += 1e-8 * std::max(mean_diag, 1e-300);
    ldlt = solve(ridged);
    if (ldlt.info() != Eigen::Success) {
      fail(ErrorClass::NumericError, "fit_linear: normal equations unsolvable");
    }
  }
  const Eigen::VectorXd beta_scaled = ldlt.solve(rhs);

  LinearModel model;
  model.coefficients.resize(arity);
  double bias = mean_y;
  for (Eigen::Index j = 0; j < p; ++j) {
    const double coef = beta_scaled(j) / scale(j);
    model.coefficients[static_cast<std::size_t>(j)] = coef;
    bias -= coef * mean_x(j);
  }
  model.bias = bias;
  return model;
}

LinearModel fit_linear(const TrainingMatrix& matrix) {
  std::vector<double> x;
  x.reserve(matrix.n_rows() * matrix.arity());
  for (std::size_t i = 0; i < matrix.n_rows(); ++i) {
    const auto row = matrix.row(i);
    x.insert(x.end(), row.begin(), row.end());
  }
  return fit_linear(x, matrix.n_rows(), matrix.arity(), matrix.targets());
}

double predict(const LinearModel& model, std::span<const double> features) {
  if (features.size() != model.coefficients.size()) {
    fail(ErrorClass::ValidationError,
         "linear predict: feature arity " + std::to_string(features.size()) +
             " != " + std::to_string(model.coefficients.size()));
  }
  double v = model.bias;
  for (std::size_t i = 0; i < features.size(); ++i) {
    v += model.coefficients[i] * features[i];
  }
  return v;
}

}  // namespace aeromix
