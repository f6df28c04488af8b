#pragma once

#include <cstdint>
#include <vector>

#include "kex/model.hpp"
#include "kex/rng.hpp"

namespace fixtures {

inline kex::NodeId id(std::uint32_t v) { return kex::NodeId{v}; }

inline kex::PairNode pair(std::uint32_t v, kex::BloodType donor = kex::BloodType::O,
                          kex::BloodType patient = kex::BloodType::O, double cpra = 0.0) {
  return kex::PairNode{id(v), donor, patient, cpra, 0};
}

inline kex::NdadNode ndad(std::uint32_t v, kex::BloodType donor = kex::BloodType::O) {
  return kex::NdadNode{id(v), donor, 0};
}

inline kex::Candidate cycle(std::vector<std::uint32_t> ids, double w) {
  kex::Candidate c{kex::CandidateKind::Cycle, {}, w};
  for (auto v : ids) c.nodes.push_back(id(v));
  return c;
}

inline kex::Candidate chain(std::vector<std::uint32_t> ids, double w) {
  kex::Candidate c{kex::CandidateKind::Chain, {}, w};
  for (auto v : ids) c.nodes.push_back(id(v));
  return c;
}

/// Complete digraph on pairs 0..n-1 (all type O/O, cpra 0).
inline kex::ExchangeGraph complete_pairs(std::uint32_t n) {
  std::vector<kex::PairNode> pairs;
  std::vector<kex::ExchangeGraph::Arc> arcs;
  for (std::uint32_t i = 0; i < n; ++i) pairs.push_back(pair(i));
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < n; ++j)
      if (i != j) arcs.emplace_back(id(i), id(j));
  return kex::ExchangeGraph(pairs, {}, arcs);
}

/// Random graph: `pairs` pairs then `ndads` altruists, each ordered arc
/// present with probability `density` (altruists never receive arcs).
inline kex::ExchangeGraph random_graph(kex::Stream& rng, std::uint32_t pairs, std::uint32_t ndads, double density) {
  std::vector<kex::PairNode> ps;
  std::vector<kex::NdadNode> ns;
  std::vector<kex::ExchangeGraph::Arc> arcs;
  for (std::uint32_t i = 0; i < pairs; ++i) {
    auto p = pair(i, kex::kBloodTypes[rng.next_u64() % 4], kex::kBloodTypes[rng.next_u64() % 4], rng.uniform());
    ps.push_back(p);
  }
  for (std::uint32_t k = 0; k < ndads; ++k) ns.push_back(ndad(pairs + k, kex::kBloodTypes[rng.next_u64() % 4]));
  for (std::uint32_t t = 0; t < pairs + ndads; ++t)
    for (std::uint32_t h = 0; h < pairs; ++h)
      if (t != h && rng.uniform() < density) arcs.emplace_back(id(t), id(h));
  return kex::ExchangeGraph(ps, ns, arcs);
}

}  // namespace fixtures
