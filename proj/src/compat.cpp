#include "kex/compat.hpp"

#include <vector>

namespace kex {

ExchangeGraph build_graph(const Pool& pool, CompatibilityCache& cache, std::uint64_t crossmatch_seed) {
  const IdAllocator& ids = pool.ids();
  std::vector<ExchangeGraph::Arc> arcs;

  auto connect = [&](const DonorRef& donor) {
    const std::uint64_t donor_key = ids.draw_key(donor.id);
    for (const PairNode& patient : pool.pairs()) {
      if (patient.id == donor.id) continue;  // own donor is incompatible by construction
      KeyedStream draw(derive_seed(crossmatch_seed, donor_key, ids.draw_key(patient.id)));
      if (sample_arc(draw, donor, patient, cache)) arcs.emplace_back(donor.id, patient.id);
    }
  };
  for (const PairNode& p : pool.pairs()) connect(donor_of(p));
  for (const NdadNode& n : pool.ndads()) connect(donor_of(n));

  return ExchangeGraph(pool.pairs(), pool.ndads(), std::move(arcs));
}

}  // namespace kex
