#pragma once

#include <array>
#include <limits>
#include <span>

#include "kex/model.hpp"

namespace kex {

using BandVector = std::array<double, kBandCount>;

/// Population shares of the five cPRA groups.
inline constexpr BandVector kGroupAlphas{0.24, 0.29, 0.24, 0.10, 0.13};

struct GroupUtilities {
  BandVector u{};
  /// Set when some queue count was below 1 and had to be raised to 1.
  bool floored = false;
};

/// u_j = alpha_j / q_j. Counts below 1 (in particular empty groups) are
/// floored at 1 and reported through `floored`. Throws on negative or
/// non-finite counts.
GroupUtilities group_utilities(const BandVector& queue, const BandVector& alphas = kGroupAlphas);

inline constexpr double kUtilitarian = 1.0;
inline constexpr double kNash = 0.0;
inline constexpr double kEgalitarian = -std::numeric_limits<double>::infinity();

/// Weighted power mean (sum_j alpha_j u_j^rho)^(1/rho); rho = 0 is the
/// weighted geometric mean and rho = -inf / +inf give the exact min / max.
/// Throws std::domain_error on a non-positive utility when rho <= 0.
double power_mean(std::span<const double> u, std::span<const double> alphas, double rho);

struct WelfareScores {
  double utilitarian = 0.0;
  double nash = 0.0;
  double egalitarian = 0.0;

  bool operator==(const WelfareScores&) const = default;
};

WelfareScores welfare_scores(const GroupUtilities& g, const BandVector& alphas = kGroupAlphas);

/// score / baseline. Throws std::domain_error unless baseline > 0.
double scaled_measure(double score, double baseline);

WelfareScores scaled_measures(const WelfareScores& score, const WelfareScores& baseline);

}  // namespace kex
