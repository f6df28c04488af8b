#include "kex/enumerate.hpp"

#include <algorithm>
#include <string>

namespace kex {

BudgetExceeded::BudgetExceeded(std::size_t reached)
    : std::runtime_error("candidate budget exceeded after " + std::to_string(reached) + " candidates"),
      reached_(reached) {}

void EnumerationLimits::validate() const {
  if (max_cycle == 1 || max_cycle < 0) throw std::invalid_argument("max cycle length must be 0 or at least 2");
  if (max_chain < 0) throw std::invalid_argument("max chain length must be non-negative");
  if (candidate_budget == 0) throw std::invalid_argument("candidate budget must be positive");
}

namespace {

class PathSearch {
 public:
  PathSearch(const ExchangeGraph& graph, std::vector<Candidate>& out, std::size_t budget)
      : graph_(graph), out_(out), budget_(budget) {}

  void cycles_from(NodeId start, int max_len) {
    path_.assign(1, start);
    extend_cycle(start, max_len);
  }

  void chains_from(NodeId ndad, int max_patients) {
    if (max_patients <= 0) return;
    path_.assign(1, ndad);
    extend_chain(max_patients);
  }

 private:
  bool on_path(NodeId id) const { return std::ranges::find(path_, id) != path_.end(); }

  void emit(CandidateKind kind) {
    if (out_.size() >= budget_) throw BudgetExceeded(out_.size() + 1);
    out_.push_back(Candidate{kind, path_, 0.0});
  }

  // Successors are visited in ascending id order, so cycles come out in
  // lexicographic order with every prefix ahead of its extensions.
  void extend_cycle(NodeId start, int max_len) {
    const NodeId last = path_.back();
    for (NodeId next : graph_.successors(last)) {
      if (next == start) {
        if (path_.size() >= 2) emit(CandidateKind::Cycle);
        continue;
      }
      if (next < start || static_cast<int>(path_.size()) >= max_len || on_path(next)) continue;
      path_.push_back(next);
      extend_cycle(start, max_len);
      path_.pop_back();
    }
  }

  void extend_chain(int max_patients) {
    const NodeId last = path_.back();
    for (NodeId next : graph_.successors(last)) {
      if (on_path(next)) continue;
      path_.push_back(next);
      emit(CandidateKind::Chain);
      if (static_cast<int>(path_.size()) - 1 < max_patients) extend_chain(max_patients);
      path_.pop_back();
    }
  }

  const ExchangeGraph& graph_;
  std::vector<Candidate>& out_;
  std::size_t budget_;
  std::vector<NodeId> path_;
};

}  // namespace

std::vector<Candidate> enumerate_cycles(const ExchangeGraph& graph, int max_cycle, std::size_t budget) {
  if (max_cycle < 2) throw std::invalid_argument("max cycle length must be at least 2");
  std::vector<Candidate> out;
  PathSearch search(graph, out, budget);
  for (const PairNode& p : graph.pairs()) search.cycles_from(p.id, max_cycle);
  return out;
}

std::vector<Candidate> enumerate_chains(const ExchangeGraph& graph, int max_chain, std::size_t budget) {
  if (max_chain < 0) throw std::invalid_argument("max chain length must be non-negative");
  std::vector<Candidate> out;
  PathSearch search(graph, out, budget);
  for (const NdadNode& n : graph.ndads()) search.chains_from(n.id, max_chain);
  return out;
}

std::vector<Candidate> enumerate_candidates(const ExchangeGraph& graph, const EnumerationLimits& limits,
                                            const Scheme& scheme) {
  limits.validate();
  std::vector<Candidate> all;
  PathSearch search(graph, all, limits.candidate_budget);
  if (limits.max_cycle >= 2)
    for (const PairNode& p : graph.pairs()) search.cycles_from(p.id, limits.max_cycle);
  if (limits.max_chain > 0)
    for (const NdadNode& n : graph.ndads()) search.chains_from(n.id, limits.max_chain);
  for (Candidate& c : all) c.weight = candidate_weight(scheme, graph, c);
  return all;
}

}  // namespace kex
