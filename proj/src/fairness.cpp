#include "kex/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kex {

GroupUtilities group_utilities(const BandVector& queue, const BandVector& alphas) {
  GroupUtilities g;
  for (std::size_t j = 0; j < kBandCount; ++j) {
    double q = queue[j];
    if (!std::isfinite(q) || q < 0.0) throw std::invalid_argument("queue counts must be finite and non-negative");
    if (q < 1.0) {
      q = 1.0;
      g.floored = true;
    }
    g.u[j] = alphas[j] / q;
  }
  return g;
}

double power_mean(std::span<const double> u, std::span<const double> alphas, double rho) {
  if (u.size() != alphas.size() || u.empty()) throw std::invalid_argument("power_mean: size mismatch");
  if (std::isnan(rho)) throw std::invalid_argument("power_mean: rho is NaN");
  for (double x : u) {
    if (!std::isfinite(x)) throw std::domain_error("power_mean: utility is not finite");
    if (x <= 0.0 && rho <= 0.0) throw std::domain_error("power_mean: utilities must be positive for rho <= 0");
  }
  if (rho == -std::numeric_limits<double>::infinity()) return *std::ranges::min_element(u);
  if (rho == std::numeric_limits<double>::infinity()) return *std::ranges::max_element(u);

  double weight = 0.0;
  for (double a : alphas) weight += a;
  if (rho == 0.0) {
    double log_sum = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) log_sum += alphas[j] * std::log(u[j]);
    return std::exp(log_sum / weight);
  }

  // Factor out the term that dominates u^rho so large |rho| neither
  // overflows nor underflows.
  const double pivot = rho > 0.0 ? *std::ranges::max_element(u) : *std::ranges::min_element(u);
  if (pivot == 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) sum += alphas[j] * std::pow(u[j] / pivot, rho);
  return pivot * std::pow(sum / weight, 1.0 / rho);
}

WelfareScores welfare_scores(const GroupUtilities& g, const BandVector& alphas) {
  return {power_mean(g.u, alphas, kUtilitarian), power_mean(g.u, alphas, kNash),
          power_mean(g.u, alphas, kEgalitarian)};
}

double scaled_measure(double score, double baseline) {
  if (!(baseline > 0.0)) throw std::domain_error("scaled measure needs a positive baseline score");
  return score / baseline;
}

WelfareScores scaled_measures(const WelfareScores& score, const WelfareScores& baseline) {
  return {scaled_measure(score.utilitarian, baseline.utilitarian), scaled_measure(score.nash, baseline.nash),
          scaled_measure(score.egalitarian, baseline.egalitarian)};
}

}  // namespace kex
