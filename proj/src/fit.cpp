#include "kxor/fit.hpp"

#include <algorithm>
#include <cmath>

#include "kxor/error.hpp"

namespace kxor {

namespace {

struct Line {
  double intercept = 0.0;
  double slope = 0.0;
};

// Centered closed-form simple regression.
Line least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error("degenerate_fit", "fit needs at least two distinct abscissae");
  const double slope = sxy / sxx;
  return {my - slope * mx, slope};
}

double rmse_of(const FitResult& fit, std::span<const Point> used) {
  double sq = 0.0;
  for (const auto& p : used) sq += std::pow(predict(fit, p.x) - p.y, 2);
  return std::sqrt(sq / static_cast<double>(used.size()));
}

}  // namespace

std::string to_string(FitModel model) {
  switch (model) {
    case FitModel::log:
      return "log";
    case FitModel::exponential:
      return "exponential";
    case FitModel::power:
      return "power";
  }
  return "unknown";
}

FitModel parse_fit_model(const std::string& name) {
  if (name == "log") return FitModel::log;
  if (name == "exponential" || name == "exp") return FitModel::exponential;
  if (name == "power" || name == "poly" || name == "polynomial") return FitModel::power;
  throw Error("invalid_argument", "unknown fit model '" + name + "'");
}

FitResult fit_log(std::span<const Point> points, bool exclude_first) {
  std::vector<Point> sorted(points.begin(), points.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
  FitResult fit;
  fit.model = FitModel::log;
  if (exclude_first && !sorted.empty()) {
    fit.excluded.push_back(sorted.front());
    sorted.erase(sorted.begin());
  }
  std::vector<double> lx, y;
  std::vector<Point> used;
  for (const auto& p : sorted) {
    if (!(p.x > 0.0)) {
      fit.excluded.push_back(p);
      continue;
    }
    lx.push_back(std::log(p.x));
    y.push_back(p.y);
    used.push_back(p);
  }
  if (used.size() < 2) throw Error("degenerate_fit", "log fit needs at least two points with x > 0");
  const Line line = least_squares_line(lx, y);
  fit.coefficients = {line.intercept, line.slope};
  fit.n_points = used.size();
  fit.rmse = rmse_of(fit, used);
  return fit;
}

double extrapolate_depth(const FitResult& log_fit, double target) {
  if (log_fit.model != FitModel::log || log_fit.coefficients.size() != 2) {
    throw Error("invalid_argument", "extrapolate_depth needs a log fit");
  }
  const double a = log_fit.coefficients[0];
  const double c = log_fit.coefficients[1];
  if (!(c > 0.0)) throw Error("no_crossing", "log-fit slope is not positive; target is never reached");
  return std::exp((target - a) / c);
}

FitResult fit_growth(std::span<const Point> points, FitModel model) {
  if (model == FitModel::log) throw Error("invalid_argument", "fit_growth takes exponential or power");
  FitResult fit;
  fit.model = model;
  std::vector<double> tx, ly;
  std::vector<Point> used;
  for (const auto& p : points) {
    const bool ok = p.y > 0.0 && (model == FitModel::exponential || p.x > 0.0);
    if (!ok) {
      fit.excluded.push_back(p);
      continue;
    }
    tx.push_back(model == FitModel::exponential ? p.x : std::log(p.x));
    ly.push_back(std::log(p.y));
    used.push_back(p);
  }
  if (used.size() < 2) throw Error("degenerate_fit", "growth fit needs at least two positive points");
  const Line line = least_squares_line(tx, ly);
  fit.coefficients = {std::exp(line.intercept), line.slope};
  fit.n_points = used.size();
  fit.rmse = rmse_of(fit, used);
  return fit;
}

double predict(const FitResult& fit, double x) {
  const double a = fit.coefficients.at(0);
  const double b = fit.coefficients.at(1);
  switch (fit.model) {
    case FitModel::log:
      return a + b * std::log(x);
    case FitModel::exponential:
      return a * std::exp(b * x);
    case FitModel::power:
      return a * std::pow(x, b);
  }
  return 0.0;
}

std::vector<double> poisson_reference(double mean_index, int max_level) {
  if (mean_index < 0.0 || max_level < 0) throw Error("invalid_argument", "Poisson mean and level cap must be >= 0");
  std::vector<double> pmf(static_cast<std::size_t>(max_level) + 1);
  double term = std::exp(-mean_index);
  for (int j = 0; j <= max_level; ++j) {
    pmf[static_cast<std::size_t>(j)] = term;
    term *= mean_index / (j + 1);
  }
  return pmf;
}

double mean_level_index(std::span<const double> probs) {
  double mu = 0.0;
  for (std::size_t j = 0; j < probs.size(); ++j) mu += static_cast<double>(j) * probs[j];
  return mu;
}

nlohmann::json to_json(const FitResult& fit) {
  nlohmann::json excluded = nlohmann::json::array();
  for (const auto& p : fit.excluded) excluded.push_back({p.x, p.y});
  nlohmann::json doc{{"model", to_string(fit.model)},
                     {"coefficients", fit.coefficients},
                     {"rmse", fit.rmse},
                     {"n_points", fit.n_points},
                     {"excluded", excluded}};
  if (!fit.note.empty()) doc["note"] = fit.note;
  return doc;
}

double Summary::standard_error() const {
  return count > 0 ? std / std::sqrt(static_cast<double>(count)) : 0.0;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

}  // namespace kxor
