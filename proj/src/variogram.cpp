#include "aeromix/variogram.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "aeromix/error.hpp"
#include "aeromix/kriging.hpp"

namespace aeromix {

const char* to_string(VariogramKind k) {
  switch (k) {
    case VariogramKind::Spherical: return "spherical";
    case VariogramKind::Exponential: return "exponential";
    case VariogramKind::Gaussian: return "gaussian";
  }
  return "?";
}

VariogramKind variogram_kind_from_string(const std::string& s) {
  if (s == "spherical") return VariogramKind::Spherical;
  if (s == "exponential") return VariogramKind::Exponential;
  if (s == "gaussian") return VariogramKind::Gaussian;
  fail(ErrorClass::ParseError, "unknown variogram kind '" + s + "'");
}

namespace {

// Unit shape in [0, 1]: 0 at zero lag, ~1 at the range.
double unit_shape(VariogramKind kind, double lag, double range) {
  if (lag <= 0.0) return 0.0;
  const double t = lag / range;
  switch (kind) {
    case VariogramKind::Spherical:
      return t >= 1.0 ? 1.0 : 1.5 * t - 0.5 * t * t * t;
    case VariogramKind::Exponential:
      return 1.0 - std::exp(-3.0 * t);
    case VariogramKind::Gaussian:
      return 1.0 - std::exp(-3.0 * t * t);
  }
  return 0.0;
}

}  // namespace

double VariogramModel::semivariance(double lag) const {
  return nugget + (sill - nugget) * unit_shape(kind, lag, range);
}

std::vector<VariogramBin> empirical_variogram(const std::vector<PointValue>& samples,
                                              int n_bins) {
  if (n_bins < 1) fail(ErrorClass::ValidationError, "n_bins must be >= 1");
  double max_dist = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      max_dist = std::max(max_dist, distance(samples[i].location, samples[j].location));
    }
  }
  if (max_dist <= 0.0) {
    fail(ErrorClass::DegenerateGeometry, "all samples co-located");
  }

  const double max_lag = 0.5 * max_dist;
  const double width = max_lag / n_bins;
  std::vector<double> sums(static_cast<std::size_t>(n_bins), 0.0);
  std::vector<double> lag_sums(static_cast<std::size_t>(n_bins), 0.0);
  std::vector<std::size_t> counts(static_cast<std::size_t>(n_bins), 0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      const double d = distance(samples[i].location, samples[j].location);
      if (d <= 0.0 || d > max_lag) continue;
      auto bin = static_cast<std::size_t>(d / width);
      if (bin >= static_cast<std::size_t>(n_bins)) bin = static_cast<std::size_t>(n_bins) - 1;
      const double diff = samples[i].value - samples[j].value;
      sums[bin] += 0.5 * diff * diff;
      lag_sums[bin] += d;
      ++counts[bin];
    }
  }

  std::vector<VariogramBin> bins;
  for (std::size_t b = 0; b < static_cast<std::size_t>(n_bins); ++b) {
    if (counts[b] == 0) continue;
    bins.push_back({lag_sums[b] / static_cast<double>(counts[b]),
                    sums[b] / static_cast<double>(counts[b]), counts[b]});
  }
  return bins;
}

namespace {

struct KindFit {
  double nugget = 0.0;
  double psill = 0.0;
  double range = 1.0;
  double sse = 0.0;
};

// For a fixed range the model is linear in (nugget, psill); solve the 2x2
// normal equations and clamp both parameters nonnegative.
KindFit fit_for_range(VariogramKind kind, const std::vector<VariogramBin>& bins,
                      double range) {
  const auto n = static_cast<double>(bins.size());
  double sum_s = 0.0, sum_ss = 0.0, sum_g = 0.0, sum_sg = 0.0;
  for (const auto& bin : bins) {
    const double s = unit_shape(kind, bin.lag, range);
    sum_s += s;
    sum_ss += s * s;
    sum_g += bin.gamma;
    sum_sg += s * bin.gamma;
  }
  const double det = n * sum_ss - sum_s * sum_s;
  KindFit fit;
  fit.range = range;
  if (det > 1e-12 * n * std::max(sum_ss, 1e-300)) {
    fit.psill = (n * sum_sg - sum_s * sum_g) / det;
    fit.nugget = (sum_g - fit.psill * sum_s) / n;
  } else {
    fit.psill = 0.0;
    fit.nugget = sum_g / n;
  }
  if (fit.psill < 0.0) {
    fit.psill = 0.0;
    fit.nugget = sum_g / n;
  }
  if (fit.nugget < 0.0) {
    fit.nugget = 0.0;
    fit.psill = sum_ss > 0.0 ? std::max(0.0, sum_sg / sum_ss) : 0.0;
  }
  fit.sse = 0.0;
  for (const auto& bin : bins) {
    const double s = unit_shape(kind, bin.lag, range);
    const double resid = bin.gamma - fit.nugget - fit.psill * s;
    fit.sse += resid * resid;
  }
  return fit;
}

double loo_rmse(const std::vector<PointValue>& samples, const VariogramModel& model) {
  double sse = 0.0;
  std::vector<PointValue> rest;
  rest.reserve(samples.size() - 1);
  for (std::size_t hold = 0; hold < samples.size(); ++hold) {
    rest.clear();
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (i != hold) rest.push_back(samples[i]);
    }
    const double pred = krige(rest, model, samples[hold].location);
    const double err = pred - samples[hold].value;
    sse += err * err;
  }
  return std::sqrt(sse / static_cast<double>(samples.size()));
}

}  // namespace

VariogramModel fit_variogram(const std::vector<PointValue>& samples,
                             const std::vector<VariogramKind>& kinds) {
  if (samples.size() < 5) {
    fail(ErrorClass::InsufficientData,
         "variogram fit needs >= 5 samples, got " + std::to_string(samples.size()));
  }
  if (kinds.empty()) fail(ErrorClass::ValidationError, "no variogram kinds given");
  std::set<std::pair<double, double>> distinct;
  for (const auto& s : samples) distinct.insert({s.location.east, s.location.north});
  if (distinct.size() < 3) {
    fail(ErrorClass::DegenerateGeometry,
         "variogram fit needs >= 3 distinct sample locations");
  }

  const std::vector<VariogramBin> bins = empirical_variogram(samples);
  double max_lag = 0.0;
  for (const auto& bin : bins) max_lag = std::max(max_lag, bin.lag);
  if (max_lag <= 0.0) max_lag = 1.0;

  VariogramModel best;
  double best_rmse = 0.0;
  bool have_best = false;
  for (const VariogramKind kind : kinds) {
    KindFit fit;
    bool have_fit = false;
    // Range scan up to 1.5x the largest binned lag.
    constexpr int kRangeSteps = 96;
    for (int k = 1; k <= kRangeSteps; ++k) {
      const double range = 1.5 * max_lag * k / kRangeSteps;
      const KindFit candidate = fit_for_range(kind, bins, range);
      if (!have_fit || candidate.sse < fit.sse) {
        fit = candidate;
        have_fit = true;
      }
    }
    VariogramModel model{kind, fit.nugget, fit.nugget + fit.psill, fit.range};
    // A kind whose kriging system cannot be solved on this sample geometry
    // (the gaussian kind is notoriously ill-conditioned on smooth fields)
    // simply drops out of the cross-validation.
    double rmse;
    try {
      rmse = loo_rmse(samples, model);
      const OrdinaryKriging probe(samples, model);  // must also solve on the full set
      (void)probe;
    } catch (const Error&) {
      continue;
    }
    if (!have_best || rmse < best_rmse) {
      best = model;
      best_rmse = rmse;
      have_best = true;
    }
  }
  if (!have_best) {
    fail(ErrorClass::NumericError,
         "no variogram kind yields a solvable kriging system for these samples");
  }
  return best;
}

}  // namespace aeromix
