#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "kex/enumerate.hpp"
#include "kex/fairness.hpp"
#include "kex/model.hpp"
#include "kex/pool.hpp"
#include "kex/solver.hpp"
#include "kex/weights.hpp"

namespace kex {

inline constexpr int kMonthsPerPeriod = 4;

struct SimulationSetup {
  PoolConfig pool;
  EnumerationLimits limits;
  Scheme scheme = Scheme::myopic();
  SolveOptions solve;
};

/// What one matching round saw and decided; handed to the period hook after
/// the solve and before matched nodes leave the pool.
struct PeriodRecord {
  int period = 0;
  const ExchangeGraph& graph;
  const std::vector<Candidate>& candidates;
  const Selection& selection;
};

using PeriodHook = std::function<void(const PeriodRecord&)>;

/// Outcome of one replication.
struct ReplicationResult {
  int patients_arrived = 0;
  int ndads_arrived = 0;
  int matches = 0;                 // matched patients
  int ndads_used = 0;
  int paths = 0;
  std::array<int, 4> paths_by_length{};   // 1-5, 6-10, 11-15, 16-20 patients
  std::array<int, 6> cycles_by_length{};  // index = pairs in the cycle (2..5)
  int patients_in_paths = 0;
  double wait_recipients = 0.0;    // months, mean over matched patients
  double wait_all = 0.0;           // months, mean over all arrived patients
  QueueComposition final_queue;
  std::vector<QueueComposition> snapshots;   // end of every period

  int participants() const noexcept { return patients_arrived + ndads_arrived; }
  int patients_waiting() const noexcept { return patients_arrived - matches; }
  double match_pct() const noexcept;
  double altruist_usage_pct() const noexcept;
  double path_match_pct() const noexcept;
  BandVector queue_by_band() const noexcept;
};

/// Runs `setup.pool.periods` rounds from an empty pool. Every random draw
/// comes from `seed`: arrivals and crossmatches use separate child streams,
/// so runs that differ only in the decision layer see identical arrivals.
ReplicationResult simulate(const SimulationSetup& setup, std::uint64_t seed, const PeriodHook& hook = {});

/// Bucket index for a chain with `patients` patients (1-5 -> 0, ... 16-20 -> 3).
std::size_t path_bucket(int patients);

}  // namespace kex
