#include "kex/learn.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "kex/text.hpp"

namespace kex {

double UpdateRule::operator()(double x) const {
  switch (family) {
    case RuleFamily::Lin:
      return 1.0 + x / a;
    case RuleFamily::Exp:
      return (a + 1.0) - a * std::exp(-x);
    case RuleFamily::ExpLiteral:
      return (a + 1.0) - a * std::exp(x);
  }
  throw std::logic_error("unknown rule family");
}

std::string UpdateRule::name() const {
  const char* f = family == RuleFamily::Lin ? "Lin" : family == RuleFamily::Exp ? "Exp" : "ExpLiteral";
  return std::string(f) + "(" + format_exact(a) + ")";
}

UpdateRule parse_update_rule(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("update rule must look like lin:1 or exp:3");
  std::string family = text.substr(0, colon);
  std::ranges::transform(family, family.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  UpdateRule rule;
  if (family == "lin") rule.family = RuleFamily::Lin;
  else if (family == "exp") rule.family = RuleFamily::Exp;
  else if (family == "exp-literal") rule.family = RuleFamily::ExpLiteral;
  else throw std::invalid_argument("unknown update rule family '" + family + "'");
  rule.a = parse_double(text.substr(colon + 1));
  if (!(rule.a > 0.0) || !std::isfinite(rule.a)) throw std::invalid_argument("update rule parameter must be positive");
  return rule;
}

std::vector<double> scaled_weights(const UpdateRule& rule, std::span<const double> que, std::span<const double> pop) {
  if (que.size() != pop.size() || que.empty()) throw std::invalid_argument("que and pop must have the same size");
  std::vector<double> raw(que.size());
  for (std::size_t i = 0; i < que.size(); ++i) {
    if (!(pop[i] > 0.0)) throw std::domain_error("population proportion must be positive");
    const double x = que[i] / pop[i];
    if (!std::isfinite(x)) throw std::domain_error("queue ratio is not finite");
    raw[i] = rule(x);
    if (!std::isfinite(raw[i])) throw std::domain_error("raw weight is not finite");
  }
  const double lo = *std::ranges::min_element(raw);
  if (!(lo > 0.0)) throw std::domain_error("minimum raw weight is not positive; cannot scale to 1");
  for (double& w : raw) w /= lo;   // lo / lo is exactly 1 in IEEE arithmetic
  return raw;
}

WeightTable update_weights(const UpdateRule& rule, const TypeVector& que, const TypeVector& pop) {
  const auto w = scaled_weights(rule, que, pop);
  WeightTable t;
  std::ranges::copy(w, t.pair_weight.begin());
  t.ndad_penalty = 0.0;
  return t;
}

TypeVector queue_proportions(const ReplicationResult& r, int window) {
  if (window < 1) throw std::invalid_argument("queue window must be at least 1");
  TypeVector q{};
  const std::size_t n = r.snapshots.size();
  const std::size_t from = n > static_cast<std::size_t>(window) ? n - static_cast<std::size_t>(window) : 0;
  double total = 0.0;
  for (std::size_t s = from; s < n; ++s)
    for (std::size_t i = 0; i < kPairTypeCount; ++i) {
      q[i] += r.snapshots[s].by_type[i];
      total += r.snapshots[s].by_type[i];
    }
  if (total > 0.0)
    for (double& x : q) x /= total;
  return q;
}

TypeVector population_proportions(const PoolConfig& cfg) {
  TypeVector p{};
  for (std::size_t i = 0; i < kPairTypeCount; ++i) p[i] = population_proportion(cfg, pair_type_from_index(i));
  return p;
}

void LearningConfig::validate() const {
  if (outer_iterations < 1) throw std::invalid_argument("outer_iterations must be at least 1");
  if (queue_window < 1) throw std::invalid_argument("queue window must be at least 1");
  if (!std::isfinite(ndad_penalty)) throw std::invalid_argument("altruist penalty must be finite");
  setup.pool.validate();
  setup.limits.validate();
}

LearningFailure::LearningFailure(int iteration, const std::string& what)
    : std::runtime_error("learning iteration " + std::to_string(iteration) + ": " + what), iteration_(iteration) {}

WeightTable run_learning(const LearningConfig& cfg, const UpdateRule& rule, const LearningHook& hook) {
  cfg.validate();
  const TypeVector pop = population_proportions(cfg.setup.pool);
  WeightTable w = WeightTable::ones(cfg.ndad_penalty);
  for (int t = 1; t <= cfg.outer_iterations; ++t) {
    SimulationSetup setup = cfg.setup;
    setup.scheme = Scheme::learned(w);
    ReplicationResult run;
    try {
      run = simulate(setup, derive_seed(cfg.seed, static_cast<std::uint64_t>(t)));
    } catch (const std::exception& e) {
      throw LearningFailure(t, e.what());
    }
    w = update_weights(rule, queue_proportions(run, cfg.queue_window), pop);
    w.ndad_penalty = cfg.ndad_penalty;
    if (hook) hook(t, run, w);
  }
  return w;
}

}  // namespace kex
