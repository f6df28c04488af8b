#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_map>

#include "kex/model.hpp"
#include "kex/pool.hpp"
#include "kex/rng.hpp"

namespace kex {

/// ABO rule: O donates to everyone, AB receives from everyone, and equal
/// groups are compatible.
constexpr bool blood_compatible(BloodType donor, BloodType patient) noexcept {
  return donor == BloodType::O || patient == BloodType::AB || donor == patient;
}

struct DonorRef {
  NodeId id{};
  BloodType blood = BloodType::O;
};

constexpr DonorRef donor_of(const PairNode& p) noexcept { return {p.id, p.donor_blood}; }
constexpr DonorRef donor_of(const NdadNode& n) noexcept { return {n.id, n.donor_blood}; }

/// Memoized crossmatch verdicts keyed by (donor id, patient id). A verdict is
/// written once and never changes.
class CompatibilityCache {
 public:
  std::optional<bool> find(NodeId donor, NodeId patient) const {
    auto it = decided_.find(key(donor, patient));
    if (it == decided_.end()) return std::nullopt;
    return it->second;
  }
  void store(NodeId donor, NodeId patient, bool verdict) { decided_.emplace(key(donor, patient), verdict); }
  std::size_t size() const noexcept { return decided_.size(); }

 private:
  static std::uint64_t key(NodeId donor, NodeId patient) noexcept {
    return (std::uint64_t{raw(donor)} << 32) | raw(patient);
  }
  std::unordered_map<std::uint64_t, bool> decided_;
};

/// Arc verdict for a donor and a patient. Blood-incompatible encounters are
/// rejected outright; otherwise the arc survives with probability 1 - cpra,
/// drawn once and memoized.
template <UniformSource R>
bool sample_arc(R& rng, const DonorRef& donor, const PairNode& patient, CompatibilityCache& cache) {
  if (donor.id == patient.id) throw std::invalid_argument("donor and patient must be distinct nodes");
  if (!blood_compatible(donor.blood, patient.patient_blood)) return false;
  if (auto known = cache.find(donor.id, patient.id)) return *known;
  const bool verdict = rng.uniform() >= patient.cpra;
  cache.store(donor.id, patient.id, verdict);
  return verdict;
}

/// Builds the exchange graph over every waiting node. Each new encounter is
/// decided by a keyed stream derived from `crossmatch_seed` and the two
/// nodes' draw keys, then memoized in `cache`.
ExchangeGraph build_graph(const Pool& pool, CompatibilityCache& cache, std::uint64_t crossmatch_seed);

}  // namespace kex
