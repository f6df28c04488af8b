#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "kex/model.hpp"
#include "kex/rng.hpp"

namespace kex {

struct PoolConfig {
  double pair_rate = 37.0;
  double ndad_rate = 4.5625;
  /// Indexed by BloodType (O, A, B, AB). Printed in the source data as
  /// P(A, B, AB, O) = (0.46, 0.42, 0.09, 0.03).
  std::array<double, 4> blood_dist{0.03, 0.46, 0.42, 0.09};
  std::array<double, kBandCount> band_dist{0.24, 0.29, 0.24, 0.10, 0.13};
  int periods = 50;

  /// Throws std::invalid_argument when a rate is negative or a distribution
  /// does not sum to 1 within 1e-12.
  void validate() const;
};

/// Hands out node ids in arrival order (pairs and altruists share one
/// counter) and remembers each node's class-local ordinal. The ordinal keys
/// crossmatch draws, so pair-to-pair verdicts stay identical when only the
/// altruist arrival rate changes between paired runs.
class IdAllocator {
 public:
  NodeId next_pair();
  NodeId next_ndad();
  std::uint64_t draw_key(NodeId id) const noexcept;
  std::uint32_t issued() const noexcept { return static_cast<std::uint32_t>(keys_.size()); }

 private:
  std::vector<std::uint64_t> keys_;
  std::uint64_t pair_ordinal_ = 0;
  std::uint64_t ndad_ordinal_ = 0;
};

/// Independent streams for pair and altruist arrivals, so that changing one
/// rate leaves the other class's arrival sequence untouched.
struct ArrivalStreams {
  Stream pairs;
  Stream ndads;
  explicit ArrivalStreams(std::uint64_t seed) : pairs(derive_seed(seed, 1)), ndads(derive_seed(seed, 2)) {}
};

struct Arrivals {
  std::vector<PairNode> pairs;
  std::vector<NdadNode> ndads;
};

/// Draws one period's arrivals. Pair ids are issued before altruist ids.
Arrivals arrivals(const PoolConfig& cfg, int period, ArrivalStreams& streams, IdAllocator& ids);

/// Probability of pair type `t` in the arriving population.
double population_proportion(const PoolConfig& cfg, const PairType& t);

struct WaitRecord {
  bool is_patient = true;
  int arrival_period = 0;
  std::optional<int> match_period;
  bool operator==(const WaitRecord&) const = default;
};

using WaitLedger = std::map<std::uint32_t, WaitRecord>;

struct QueueComposition {
  std::array<int, kPairTypeCount> by_type{};
  std::array<int, kBandCount> by_band{};
  int ndads = 0;

  int pairs() const noexcept;
  bool operator==(const QueueComposition&) const = default;
};

/// Waiting pool of one replication. Nodes are kept in id order.
class Pool {
 public:
  void admit(const Arrivals& batch);
  /// Removes every node used by `sel` and records match periods. Throws
  /// std::logic_error if the selection names a node that is not waiting.
  void remove_matched(const Selection& sel, int period);

  const std::vector<PairNode>& pairs() const noexcept { return pairs_; }
  const std::vector<NdadNode>& ndads() const noexcept { return ndads_; }
  const WaitLedger& ledger() const noexcept { return ledger_; }
  bool empty() const noexcept { return pairs_.empty() && ndads_.empty(); }
  std::size_t size() const noexcept { return pairs_.size() + ndads_.size(); }

  IdAllocator& ids() noexcept { return ids_; }
  const IdAllocator& ids() const noexcept { return ids_; }

 private:
  std::vector<PairNode> pairs_;
  std::vector<NdadNode> ndads_;
  WaitLedger ledger_;
  IdAllocator ids_;
};

QueueComposition queue_composition(const Pool& pool);

}  // namespace kex
