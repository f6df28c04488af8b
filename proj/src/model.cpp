#include "kex/model.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace kex {

std::string_view to_string(BloodType b) noexcept {
  switch (b) {
    case BloodType::O: return "O";
    case BloodType::A: return "A";
    case BloodType::B: return "B";
    case BloodType::AB: return "AB";
  }
  return "?";
}

std::optional<BloodType> parse_blood_type(std::string_view text) noexcept {
  for (BloodType b : kBloodTypes)
    if (to_string(b) == text) return b;
  return std::nullopt;
}

int band_of(double cpra) {
  if (!(cpra >= 0.0 && cpra <= 1.0)) throw std::invalid_argument("cpra outside [0, 1]: " + std::to_string(cpra));
  for (const CpraBand& b : kCpraBands)
    if (cpra <= b.upper) return b.index;
  return kCpraBands.back().index;
}

const CpraBand& band(int index) {
  if (index < 1 || index > static_cast<int>(kBandCount)) throw std::out_of_range("cpra band index out of range");
  return kCpraBands[static_cast<std::size_t>(index - 1)];
}

PairType pair_type_from_index(std::size_t index) {
  if (index >= kPairTypeCount) throw std::out_of_range("pair type index out of range");
  const std::size_t band_idx = index % kBandCount;
  const std::size_t bloods = index / kBandCount;
  return PairType{kBloodTypes[bloods / 4], kBloodTypes[bloods % 4], static_cast<int>(band_idx) + 1};
}

PairType pair_type_of(const PairNode& node) { return PairType{node.donor_blood, node.patient_blood, band_of(node.cpra)}; }

// ---------------------------------------------------------------------------

ExchangeGraph::ExchangeGraph(std::vector<PairNode> pairs, std::vector<NdadNode> ndads, std::vector<Arc> arcs)
    : pairs_(std::move(pairs)), ndads_(std::move(ndads)), arcs_(std::move(arcs)) {
  std::ranges::sort(pairs_, {}, &PairNode::id);
  std::ranges::sort(ndads_, {}, &NdadNode::id);
  std::ranges::sort(arcs_);

  slot_.reserve(pairs_.size() + ndads_.size());
  for (std::uint32_t i = 0; i < pairs_.size(); ++i) {
    const PairNode& p = pairs_[i];
    if (!(p.cpra >= 0.0 && p.cpra <= 1.0)) throw std::invalid_argument("pair cpra outside [0, 1]");
    if (!slot_.emplace(raw(p.id), Slot{true, i, 0, 0}).second)
      throw std::invalid_argument("duplicate node id " + std::to_string(raw(p.id)));
  }
  for (std::uint32_t i = 0; i < ndads_.size(); ++i)
    if (!slot_.emplace(raw(ndads_[i].id), Slot{false, i, 0, 0}).second)
      throw std::invalid_argument("duplicate node id " + std::to_string(raw(ndads_[i].id)));

  heads_.reserve(arcs_.size());
  for (std::size_t k = 0; k < arcs_.size(); ++k) {
    const auto [tail, head] = arcs_[k];
    if (tail == head) throw std::invalid_argument("self arc on node " + std::to_string(raw(tail)));
    if (k > 0 && arcs_[k - 1] == arcs_[k]) throw std::invalid_argument("duplicate arc");
    auto t = slot_.find(raw(tail));
    auto h = slot_.find(raw(head));
    if (t == slot_.end() || h == slot_.end()) throw std::invalid_argument("arc references an unknown node");
    if (!h->second.is_pair) throw std::invalid_argument("arc into altruistic donor " + std::to_string(raw(head)));
    if (k == 0 || arcs_[k - 1].first != tail) t->second.out_begin = static_cast<std::uint32_t>(k);
    t->second.out_end = static_cast<std::uint32_t>(k + 1);
    heads_.push_back(head);
  }
}

const ExchangeGraph::Slot& ExchangeGraph::slot(NodeId id) const {
  auto it = slot_.find(raw(id));
  if (it == slot_.end()) throw std::out_of_range("node " + std::to_string(raw(id)) + " not in graph");
  return it->second;
}

bool ExchangeGraph::is_pair(NodeId id) const { return slot(id).is_pair; }
bool ExchangeGraph::is_ndad(NodeId id) const { return !slot(id).is_pair; }

const PairNode& ExchangeGraph::pair(NodeId id) const {
  const Slot& s = slot(id);
  if (!s.is_pair) throw std::invalid_argument("node " + std::to_string(raw(id)) + " is not a pair");
  return pairs_[s.index];
}

const NdadNode& ExchangeGraph::ndad(NodeId id) const {
  const Slot& s = slot(id);
  if (s.is_pair) throw std::invalid_argument("node " + std::to_string(raw(id)) + " is not an altruistic donor");
  return ndads_[s.index];
}

BloodType ExchangeGraph::donor_blood(NodeId id) const {
  const Slot& s = slot(id);
  return s.is_pair ? pairs_[s.index].donor_blood : ndads_[s.index].donor_blood;
}

std::span<const NodeId> ExchangeGraph::successors(NodeId tail) const {
  const Slot& s = slot(tail);
  return {heads_.data() + s.out_begin, s.out_end - s.out_begin};
}

bool ExchangeGraph::has_arc(NodeId tail, NodeId head) const {
  auto it = slot_.find(raw(tail));
  if (it == slot_.end()) return false;
  const auto succ = successors(tail);
  return std::ranges::binary_search(succ, head);
}

// ---------------------------------------------------------------------------

std::string_view to_string(CandidateKind k) noexcept { return k == CandidateKind::Cycle ? "cycle" : "chain"; }

bool canonical_less(const Candidate& a, const Candidate& b) noexcept {
  if (a.kind != b.kind) return a.kind < b.kind;
  return std::ranges::lexicographical_compare(a.nodes, b.nodes);
}

std::size_t Selection::transplants() const noexcept {
  std::size_t n = 0;
  for (const Candidate& c : candidates) n += c.transplants();
  return n;
}

bool is_feasible_candidate(const ExchangeGraph& graph, const Candidate& cand, int max_cycle, int max_chain) {
  const auto& nodes = cand.nodes;
  for (NodeId id : nodes)
    if (!graph.contains(id)) return false;
  {
    std::unordered_set<std::uint32_t> seen;
    for (NodeId id : nodes)
      if (!seen.insert(raw(id)).second) return false;
  }
  if (cand.kind == CandidateKind::Cycle) {
    const auto len = static_cast<int>(nodes.size());
    if (len < 2 || len > max_cycle) return false;
    for (NodeId id : nodes)
      if (!graph.is_pair(id)) return false;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (!graph.has_arc(nodes[i], nodes[(i + 1) % nodes.size()])) return false;
    return true;
  }
  const auto patients = static_cast<int>(nodes.size()) - 1;
  if (patients < 1 || patients > max_chain) return false;
  if (!graph.is_ndad(nodes.front())) return false;
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (!graph.is_pair(nodes[i])) return false;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
    if (!graph.has_arc(nodes[i], nodes[i + 1])) return false;
  return true;
}

bool validate_selection(const ExchangeGraph& graph, const Selection& sel, int max_cycle, int max_chain) {
  std::unordered_set<std::uint32_t> used;
  for (const Candidate& c : sel.candidates) {
    if (!is_feasible_candidate(graph, c, max_cycle, max_chain)) return false;
    for (NodeId id : c.nodes)
      if (!used.insert(raw(id)).second) return false;
  }
  return true;
}

}  // namespace kex
