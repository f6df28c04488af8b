#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "kex/model.hpp"

namespace kex {

/// Weighted set-packing instance: pick node-disjoint candidates.
struct PackingInstance {
  std::vector<Candidate> candidates;
  /// Nodes the candidates may use. Empty means "whatever the candidates name".
  std::vector<NodeId> universe;
};

struct SolveOptions {
  std::chrono::milliseconds timeout{60'000};
  std::uint64_t node_budget = 500'000'000;
};

struct SolveStats {
  std::size_t candidates_in = 0;
  std::size_t candidates_after_fixing = 0;
  std::size_t components = 0;
  std::uint64_t search_nodes = 0;
  std::uint64_t tie_break_nodes = 0;   // part of search_nodes spent settling ties
  double root_bound = 0.0;   // Lagrangian bound, in weight units
};

/// Raised when the search cannot prove optimality within its limits. No
/// partial answer is ever returned.
class SolveFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact maximum-weight node-disjoint selection.
///
/// Weights are compared on the 2^-24 score grid. Among selections of equal
/// weight the one with more transplants wins; remaining ties go to the
/// lexicographically smallest sorted list of candidate indices. The returned
/// candidates are in index order and the objective is their weight sum.
///
/// Method: weight and transplant count are folded into one exact integer
/// value per candidate. Negative candidates are dropped and the rest split
/// into connected components. Each component gets an LP relaxation (dense
/// revised simplex over the node rows) whose duals give a Lagrangian bound;
/// branch and bound with rounding, diving and reduced-cost fixing finds the
/// optimum value. The tie-break is then settled by walking candidates in
/// index order and keeping each one whenever the optimum is still reachable
/// with it.
Selection solve(const PackingInstance& inst, const SolveOptions& options = {}, SolveStats* stats = nullptr);

inline constexpr std::size_t kBruteForceNodeLimit = 14;
inline constexpr std::size_t kBruteForceCandidateLimit = 2000;

/// Exhaustive reference with the same tie-breaking as solve(): visits every
/// node-disjoint subset of the candidates. Refuses instances naming more than
/// kBruteForceNodeLimit nodes or holding more than kBruteForceCandidateLimit
/// candidates.
Selection brute_force(const PackingInstance& inst);

/// Line-based instance file:
///   N M K
///   <id> pair <donor> <patient> <cpra>      (N lines)
///   <id> ndad <donor> - -                   (M lines)
///   <cycle|chain> <weight> <id>...          (K lines)
/// Numbers use shortest round-trip formatting, so read(write(x)) == x.
struct InstanceFile {
  std::vector<PairNode> pairs;
  std::vector<NdadNode> ndads;
  std::vector<Candidate> candidates;

  PackingInstance packing() const;
  bool operator==(const InstanceFile&) const;
};

void write_instance(std::ostream& out, const InstanceFile& inst);
InstanceFile read_instance(std::istream& in);

}  // namespace kex
