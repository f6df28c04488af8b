#include "kex/pool.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace kex {

namespace {

void check_distribution(std::span<const double> probs, const char* what) {
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument(std::string(what) + " has a negative or non-finite entry");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument(std::string(what) + " does not sum to 1");
}

}  // namespace

void PoolConfig::validate() const {
  if (!(pair_rate >= 0.0) || !std::isfinite(pair_rate)) throw std::invalid_argument("pair_rate must be non-negative");
  if (!(ndad_rate >= 0.0) || !std::isfinite(ndad_rate)) throw std::invalid_argument("ndad_rate must be non-negative");
  if (periods < 0) throw std::invalid_argument("periods must be non-negative");
  check_distribution(blood_dist, "blood_dist");
  check_distribution(band_dist, "band_dist");
}

NodeId IdAllocator::next_pair() {
  keys_.push_back(pair_ordinal_++ * 2);
  return NodeId{static_cast<std::uint32_t>(keys_.size() - 1)};
}

NodeId IdAllocator::next_ndad() {
  keys_.push_back(ndad_ordinal_++ * 2 + 1);
  return NodeId{static_cast<std::uint32_t>(keys_.size() - 1)};
}

std::uint64_t IdAllocator::draw_key(NodeId id) const noexcept {
  const auto r = raw(id);
  // Nodes not issued by this allocator (hand-built pools) key on their id.
  return r < keys_.size() ? keys_[r] : (std::uint64_t{1} << 40) + r;
}

Arrivals arrivals(const PoolConfig& cfg, int period, ArrivalStreams& streams, IdAllocator& ids) {
  if (period < 0) throw std::invalid_argument("period must be non-negative");
  Arrivals out;
  const std::uint32_t n_pairs = streams.pairs.poisson(cfg.pair_rate);
  const std::uint32_t n_ndads = streams.ndads.poisson(cfg.ndad_rate);

  out.pairs.reserve(n_pairs);
  for (std::uint32_t i = 0; i < n_pairs; ++i) {
    PairNode p;
    p.id = ids.next_pair();
    p.donor_blood = kBloodTypes[streams.pairs.categorical(cfg.blood_dist)];
    p.patient_blood = kBloodTypes[streams.pairs.categorical(cfg.blood_dist)];
    const CpraBand& b = kCpraBands[streams.pairs.categorical(cfg.band_dist)];
    p.cpra = streams.pairs.uniform(b.lower, b.upper);
    p.arrival_period = period;
    out.pairs.push_back(p);
  }
  out.ndads.reserve(n_ndads);
  for (std::uint32_t i = 0; i < n_ndads; ++i) {
    NdadNode n;
    n.id = ids.next_ndad();
    n.donor_blood = kBloodTypes[streams.ndads.categorical(cfg.blood_dist)];
    n.arrival_period = period;
    out.ndads.push_back(n);
  }
  return out;
}

double population_proportion(const PoolConfig& cfg, const PairType& t) {
  return cfg.blood_dist[index_of(t.donor_blood)] * cfg.blood_dist[index_of(t.patient_blood)] *
         cfg.band_dist[static_cast<std::size_t>(t.band - 1)];
}

int QueueComposition::pairs() const noexcept { return std::accumulate(by_band.begin(), by_band.end(), 0); }

void Pool::admit(const Arrivals& batch) {
  for (const PairNode& p : batch.pairs) {
    if (!ledger_.emplace(raw(p.id), WaitRecord{true, p.arrival_period, std::nullopt}).second)
      throw std::logic_error("node id " + std::to_string(raw(p.id)) + " admitted twice");
    pairs_.push_back(p);
  }
  for (const NdadNode& n : batch.ndads) {
    if (!ledger_.emplace(raw(n.id), WaitRecord{false, n.arrival_period, std::nullopt}).second)
      throw std::logic_error("node id " + std::to_string(raw(n.id)) + " admitted twice");
    ndads_.push_back(n);
  }
  std::ranges::sort(pairs_, {}, &PairNode::id);
  std::ranges::sort(ndads_, {}, &NdadNode::id);
}

void Pool::remove_matched(const Selection& sel, int period) {
  std::unordered_set<std::uint32_t> matched;
  for (const Candidate& c : sel.candidates)
    for (NodeId id : c.nodes) {
      auto it = ledger_.find(raw(id));
      if (it == ledger_.end() || it->second.match_period)
        throw std::logic_error("selection uses node " + std::to_string(raw(id)) + " which is not waiting");
      if (!matched.insert(raw(id)).second)
        throw std::logic_error("selection uses node " + std::to_string(raw(id)) + " twice");
    }
  for (std::uint32_t id : matched) {
    WaitRecord& rec = ledger_.at(id);
    if (period < rec.arrival_period) throw std::logic_error("match period precedes arrival");
    rec.match_period = period;
  }
  std::erase_if(pairs_, [&](const PairNode& p) { return matched.contains(raw(p.id)); });
  std::erase_if(ndads_, [&](const NdadNode& n) { return matched.contains(raw(n.id)); });
}

QueueComposition queue_composition(const Pool& pool) {
  QueueComposition q;
  for (const PairNode& p : pool.pairs()) {
    const PairType t = pair_type_of(p);
    ++q.by_type[index_of(t)];
    ++q.by_band[static_cast<std::size_t>(t.band - 1)];
  }
  q.ndads = static_cast<int>(pool.ndads().size());
  return q;
}

}  // namespace kex
