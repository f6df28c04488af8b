#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <variant>

#include "kex/model.hpp"

namespace kex {

/// Learned node weights for the 80 pair types plus the altruist penalty.
struct WeightTable {
  std::array<double, kPairTypeCount> pair_weight{};
  double ndad_penalty = 0.0;

  static WeightTable ones(double ndad_penalty = 0.0);
  double operator[](const PairType& t) const { return pair_weight[index_of(t)]; }
  bool operator==(const WeightTable&) const = default;
};

struct Myopic {};
struct KpdPoints {};
struct Learned {
  WeightTable table;
};

/// A weighting rule plus the penalty W added once to every chain.
struct Scheme {
  std::variant<Myopic, KpdPoints, Learned> rule;
  double ndad_penalty = 0.0;

  static Scheme myopic(double w = 0.0) { return {Myopic{}, w}; }
  static Scheme kpd(double w = 0.0) { return {KpdPoints{}, w}; }
  static Scheme learned(WeightTable table) {
    const double w = table.ndad_penalty;
    return {Learned{std::move(table)}, w};
  }
  std::string name() const;
};

/// Canadian KPD point values for the attributes the simulation models.
namespace kpd_points {
inline constexpr double kAnyTransplant = 100.0;
inline constexpr double kHighlySensitized = 125.0;
inline constexpr double kHighlySensitizedCpra = 0.80;
inline constexpr double kAboMatchOtoO = 75.0;
inline constexpr double kAboMatchSame = 5.0;
}  // namespace kpd_points

/// Score of the transplant on arc donor -> patient. Learned schemes credit the
/// patient node's type weight to the arc that delivers it.
double arc_weight(const Scheme& scheme, BloodType donor_blood, const PairNode& patient);

/// Candidate scores live on a 2^-24 grid so that any sum of them is exact in
/// double precision, independent of summation order.
inline constexpr double kScoreQuantum = 1.0 / 16777216.0;
double quantize_score(double score) noexcept;

/// Sum of arc weights along the candidate (including a cycle's closing arc),
/// plus the penalty for chains, rounded to the score grid.
double candidate_weight(const Scheme& scheme, const ExchangeGraph& graph, const Candidate& cand);

/// Weight file: one `donor patient band weight` line per pair type in index
/// order, then `W <value>`. Values use shortest round-trip formatting.
void write_weight_table(std::ostream& out, const WeightTable& table);
WeightTable read_weight_table(std::istream& in);
void save_weight_table(const std::string& path, const WeightTable& table);
WeightTable load_weight_table(const std::string& path);

}  // namespace kex
