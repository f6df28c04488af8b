#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kex/simulation.hpp"
#include "kex/weights.hpp"

namespace kex {

enum class RuleFamily { Lin, Exp, ExpLiteral };

/// Lin(a): f(x) = 1 + x/a. Exp(a): f(x) = (a+1) - a e^{-x}, increasing and
/// bounded by a+1. ExpLiteral(a): f(x) = (a+1) - a e^{x}, the decreasing form
/// as printed in the source, kept for comparison runs.
struct UpdateRule {
  RuleFamily family = RuleFamily::Lin;
  double a = 1.0;

  double operator()(double x) const;
  std::string name() const;   // "Lin(1)", "Exp(3)", "ExpLiteral(3)"
};

/// Parses "lin:2", "exp:3" or "exp-literal:3" (case-insensitive family).
UpdateRule parse_update_rule(const std::string& text);

using TypeVector = std::array<double, kPairTypeCount>;

/// f(que/pop) per entry, divided by the minimum so the smallest weight is
/// exactly 1. Throws std::domain_error on a non-finite ratio or a non-positive
/// raw minimum.
std::vector<double> scaled_weights(const UpdateRule& rule, std::span<const double> que, std::span<const double> pop);

/// The same over all 80 pair types. The altruist penalty is left at 0.
WeightTable update_weights(const UpdateRule& rule, const TypeVector& que, const TypeVector& pop);

/// Queue proportions per pair type from the counts pooled over the last
/// `window` snapshots (1 = final snapshot only). All zero when the queue is
/// empty.
TypeVector queue_proportions(const ReplicationResult& r, int window = 1);

TypeVector population_proportions(const PoolConfig& cfg);

struct LearningConfig {
  int outer_iterations = 50;
  SimulationSetup setup;          // scheme is ignored; W is ndad_penalty
  double ndad_penalty = 0.0;
  std::uint64_t seed = 1;
  int queue_window = 1;

  void validate() const;
};

class LearningFailure : public std::runtime_error {
 public:
  LearningFailure(int iteration, const std::string& what);
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

/// Called after every outer iteration with its 1-based index, the run it
/// measured and the weights that run produced.
using LearningHook = std::function<void(int, const ReplicationResult&, const WeightTable&)>;

/// Starts from all-ones weights, runs one simulation per outer iteration
/// with the current weights and replaces them with the update computed from
/// that run's queue. Iteration t uses seed derive_seed(seed, t).
WeightTable run_learning(const LearningConfig& cfg, const UpdateRule& rule, const LearningHook& hook = {});

}  // namespace kex
