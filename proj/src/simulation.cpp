#include "kex/simulation.hpp"

#include <algorithm>
#include <stdexcept>

#include "kex/compat.hpp"

namespace kex {

double ReplicationResult::match_pct() const noexcept {
  return patients_arrived == 0 ? 0.0 : 100.0 * matches / patients_arrived;
}

double ReplicationResult::altruist_usage_pct() const noexcept {
  return ndads_arrived == 0 ? 0.0 : 100.0 * ndads_used / ndads_arrived;
}

double ReplicationResult::path_match_pct() const noexcept {
  return matches == 0 ? 0.0 : 100.0 * patients_in_paths / matches;
}

BandVector ReplicationResult::queue_by_band() const noexcept {
  BandVector q{};
  for (std::size_t j = 0; j < kBandCount; ++j) q[j] = final_queue.by_band[j];
  return q;
}

std::size_t path_bucket(int patients) {
  if (patients < 1) throw std::invalid_argument("a path has at least one patient");
  return std::min<std::size_t>(static_cast<std::size_t>((patients - 1) / 5), 3);
}

ReplicationResult simulate(const SimulationSetup& setup, std::uint64_t seed, const PeriodHook& hook) {
  setup.pool.validate();
  setup.limits.validate();
  if (setup.pool.periods < 0) throw std::invalid_argument("periods must be non-negative");

  ArrivalStreams streams(derive_seed(seed, 10));
  const std::uint64_t crossmatch_seed = derive_seed(seed, 20);
  Pool pool;
  CompatibilityCache cache;
  ReplicationResult r;

  for (int t = 0; t < setup.pool.periods; ++t) {
    const Arrivals batch = arrivals(setup.pool, t, streams, pool.ids());
    r.patients_arrived += static_cast<int>(batch.pairs.size());
    r.ndads_arrived += static_cast<int>(batch.ndads.size());
    pool.admit(batch);

    const ExchangeGraph graph = build_graph(pool, cache, crossmatch_seed);
    const std::vector<Candidate> candidates = enumerate_candidates(graph, setup.limits, setup.scheme);
    const Selection sel = solve(PackingInstance{candidates, {}}, setup.solve);
    if (hook) hook(PeriodRecord{t, graph, candidates, sel});

    for (const Candidate& c : sel.candidates) {
      const int n = static_cast<int>(c.transplants());
      r.matches += n;
      if (c.kind == CandidateKind::Chain) {
        ++r.ndads_used;
        ++r.paths;
        r.patients_in_paths += n;
        ++r.paths_by_length[path_bucket(n)];
      } else {
        ++r.cycles_by_length.at(static_cast<std::size_t>(n));
      }
    }
    pool.remove_matched(sel, t);
    r.snapshots.push_back(queue_composition(pool));
  }
  r.final_queue = r.snapshots.empty() ? QueueComposition{} : r.snapshots.back();

  long long recipient_periods = 0;
  long long all_periods = 0;
  for (const auto& [id, rec] : pool.ledger()) {
    if (!rec.is_patient) continue;
    const int end = rec.match_period.value_or(setup.pool.periods);
    all_periods += end - rec.arrival_period;
    if (rec.match_period) recipient_periods += end - rec.arrival_period;
  }
  if (r.matches > 0) r.wait_recipients = static_cast<double>(kMonthsPerPeriod * recipient_periods) / r.matches;
  if (r.patients_arrived > 0) r.wait_all = static_cast<double>(kMonthsPerPeriod * all_periods) / r.patients_arrived;
  return r;
}

}  // namespace kex
