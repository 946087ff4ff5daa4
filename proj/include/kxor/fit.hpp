#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace kxor {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

enum class FitModel {
  log,          // y = a + c ln x
  exponential,  // y = A exp(b x)
  power,        // y = A x^b
};

std::string to_string(FitModel model);
/// Accepts "log", "exponential"/"exp", "power"/"poly". Throws Error("invalid_argument").
FitModel parse_fit_model(const std::string& name);

/// Least-squares fit. coefficients are (a, c) for log and (A, b) for the growth
/// models. rmse is measured in the original y domain over the points used.
struct FitResult {
  FitModel model = FitModel::log;
  std::vector<double> coefficients;
  double rmse = 0.0;
  std::size_t n_points = 0;
  std::vector<Point> excluded;
  std::string note;
};

/// Ordinary least squares of y against ln x. With exclude_first the point of
/// smallest x is left out. Needs two usable points with x > 0.
FitResult fit_log(std::span<const Point> points, bool exclude_first = false);

/// Depth at which the log fit reaches `target`: exp((target - a) / c).
/// Throws Error("no_crossing") when c <= 0.
double extrapolate_depth(const FitResult& log_fit, double target);

/// Exponential (ln y vs x) or power (ln y vs ln x) fit in the linearized domain.
FitResult fit_growth(std::span<const Point> points, FitModel model);

/// Model value at x.
double predict(const FitResult& fit, double x);

/// e^-mu mu^j / j! for j = 0..max_level.
std::vector<double> poisson_reference(double mean_index, int max_level);

/// sum_j j * probs[j]
double mean_level_index(std::span<const double> probs);

nlohmann::json to_json(const FitResult& fit);

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for fewer than two values
  std::size_t count = 0;

  double standard_error() const;
};

Summary summarize(std::span<const double> values);

}  // namespace kxor
