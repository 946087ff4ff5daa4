#include "kxor/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kxor {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

struct Simplex {
  std::vector<std::vector<double>> points;
  std::vector<double> values;
};

}  // namespace

NelderMeadResult nelder_mead_minimize(const std::function<double(std::span<const double>)>& objective,
                                      std::span<const double> start, const NelderMeadOptions& options) {
  const std::size_t n = start.size();
  NelderMeadResult result;
  result.x.assign(start.begin(), start.end());

  auto eval = [&](const std::vector<double>& x) {
    ++result.evaluations;
    return objective(x);
  };
  auto budget_left = [&] { return result.evaluations < options.max_evaluations; };

  result.f = eval(result.x);
  if (n == 0) {
    result.converged = true;
    return result;
  }

  double step = options.initial_step;
  for (int restart = 0; restart <= options.max_restarts && budget_left(); ++restart) {
    const double f_before = result.f;

    Simplex sx;
    sx.points.push_back(result.x);
    sx.values.push_back(result.f);
    for (std::size_t i = 0; i < n && budget_left(); ++i) {
      auto p = result.x;
      p[i] += step;
      sx.values.push_back(eval(p));
      sx.points.push_back(std::move(p));
    }
    if (sx.points.size() != n + 1) break;

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);
    bool converged = false;
    while (budget_left()) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sx.values[a] < sx.values[b]; });
      const std::size_t best = order.front();
      const std::size_t worst = order.back();
      const std::size_t second_worst = order[n - 1];

      double spread = sx.values[worst] - sx.values[best];
      double size = 0.0;
      for (std::size_t v = 0; v <= n; ++v) {
        for (std::size_t d = 0; d < n; ++d) size = std::max(size, std::abs(sx.points[v][d] - sx.points[best][d]));
      }
      if (spread <= options.f_tolerance && size <= options.x_tolerance) {
        converged = true;
        break;
      }

      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t v = 0; v <= n; ++v) {
        if (v == worst) continue;
        for (std::size_t d = 0; d < n; ++d) centroid[d] += sx.points[v][d];
      }
      for (auto& c : centroid) c /= static_cast<double>(n);

      for (std::size_t d = 0; d < n; ++d) trial[d] = centroid[d] + kReflect * (centroid[d] - sx.points[worst][d]);
      const double f_reflect = eval(trial);

      if (f_reflect < sx.values[best]) {
        for (std::size_t d = 0; d < n; ++d) trial2[d] = centroid[d] + kExpand * (trial[d] - centroid[d]);
        const double f_expand = budget_left() ? eval(trial2) : f_reflect + 1.0;
        if (f_expand < f_reflect) {
          sx.points[worst] = trial2;
          sx.values[worst] = f_expand;
        } else {
          sx.points[worst] = trial;
          sx.values[worst] = f_reflect;
        }
        continue;
      }
      if (f_reflect < sx.values[second_worst]) {
        sx.points[worst] = trial;
        sx.values[worst] = f_reflect;
        continue;
      }

      // Contract toward the better of the reflected point and the worst vertex.
      const bool outside = f_reflect < sx.values[worst];
      const auto& anchor = outside ? trial : sx.points[worst];
      const double f_anchor = outside ? f_reflect : sx.values[worst];
      for (std::size_t d = 0; d < n; ++d) trial2[d] = centroid[d] + kContract * (anchor[d] - centroid[d]);
      if (!budget_left()) break;
      const double f_contract = eval(trial2);
      if (f_contract < f_anchor) {
        sx.points[worst] = trial2;
        sx.values[worst] = f_contract;
        continue;
      }

      for (std::size_t v = 0; v <= n && budget_left(); ++v) {
        if (v == best) continue;
        for (std::size_t d = 0; d < n; ++d) {
          sx.points[v][d] = sx.points[best][d] + kShrink * (sx.points[v][d] - sx.points[best][d]);
        }
        sx.values[v] = eval(sx.points[v]);
      }
    }

    const auto best_it = std::min_element(sx.values.begin(), sx.values.end());
    const auto best = static_cast<std::size_t>(best_it - sx.values.begin());
    if (sx.values[best] < result.f) {
      result.f = sx.values[best];
      result.x = sx.points[best];
    }
    result.converged = converged;
    if (!converged) break;
    if (restart > 0 && f_before - result.f < options.f_tolerance) break;
    step = std::max(step * 0.5, 10.0 * options.x_tolerance);
  }
  return result;
}

}  // namespace kxor
