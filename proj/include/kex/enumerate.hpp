#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "kex/model.hpp"
#include "kex/weights.hpp"

namespace kex {

struct EnumerationLimits {
  int max_cycle = 3;   // C: pairs per cycle, 0 disables cycles
  int max_chain = 3;   // P: patients per chain, 0 disables chains
  std::size_t candidate_budget = 5'000'000;

  void validate() const;
};

class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(std::size_t reached);
  std::size_t reached() const noexcept { return reached_; }

 private:
  std::size_t reached_;
};

/// Every simple cycle over pairs with 2..max_cycle nodes, starting at its
/// minimum id, in lexicographic node order. Weights are left at 0.
std::vector<Candidate> enumerate_cycles(const ExchangeGraph& graph, int max_cycle,
                                        std::size_t budget = EnumerationLimits{}.candidate_budget);

/// Every simple path from an altruist through 1..max_chain patients. All
/// prefixes are emitted. Weights are left at 0.
std::vector<Candidate> enumerate_chains(const ExchangeGraph& graph, int max_chain,
                                        std::size_t budget = EnumerationLimits{}.candidate_budget);

/// Cycles then chains in canonical order, weighted by `scheme`. The budget
/// applies to the combined count.
std::vector<Candidate> enumerate_candidates(const ExchangeGraph& graph, const EnumerationLimits& limits,
                                            const Scheme& scheme);

}  // namespace kex
