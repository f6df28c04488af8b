#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "kex/compat.hpp"
#include "kex/pool.hpp"

using namespace kex;
using fixtures::id;

namespace {

Pool pool_of(std::vector<PairNode> pairs, std::vector<NdadNode> ndads = {}) {
  Pool p;
  p.admit(Arrivals{std::move(pairs), std::move(ndads)});
  return p;
}

}  // namespace

TEST_SUITE("compat") {
  TEST_CASE("ABO rule examples") {
    CHECK(blood_compatible(BloodType::O, BloodType::A));
    CHECK_FALSE(blood_compatible(BloodType::AB, BloodType::O));
    CHECK(blood_compatible(BloodType::B, BloodType::B));
    CHECK_FALSE(blood_compatible(BloodType::A, BloodType::B));
    for (BloodType p : kBloodTypes) CHECK(blood_compatible(BloodType::O, p));
    for (BloodType d : kBloodTypes) CHECK(blood_compatible(d, BloodType::AB));
  }

  TEST_CASE("cpra 0 always accepts and cpra 1 always rejects") {
    Stream rng(1);
    CompatibilityCache cache;
    const DonorRef donor{id(1u << 30), BloodType::O};
    for (std::uint32_t i = 0; i < 1000; ++i) {
      CHECK(sample_arc(rng, donor, fixtures::pair(i, BloodType::A, BloodType::A, 0.0), cache));
      CHECK_FALSE(sample_arc(rng, donor, fixtures::pair(2000 + i, BloodType::A, BloodType::A, 1.0), cache));
    }
  }

  TEST_CASE("acceptance at cpra 0.5 is 0.5 within 0.01") {
    Stream rng(7);
    CompatibilityCache cache;
    const DonorRef donor{id(1u << 30), BloodType::O};
    const int n = 100000;
    int accepted = 0;
    for (int i = 0; i < n; ++i)
      accepted += sample_arc(rng, donor, fixtures::pair(static_cast<std::uint32_t>(i), BloodType::B, BloodType::B, 0.5), cache);
    CHECK(std::abs(accepted / double(n) - 0.5) < 0.01);
  }

  TEST_CASE("blood-incompatible encounters never draw and never produce arcs") {
    Stream rng(2);
    CompatibilityCache cache;
    CHECK_FALSE(sample_arc(rng, DonorRef{id(1), BloodType::A}, fixtures::pair(2, BloodType::A, BloodType::B, 0.0), cache));
    CHECK(cache.size() == 0);
  }

  TEST_CASE("verdicts are memoized") {
    Stream rng(3);
    CompatibilityCache cache;
    const DonorRef donor{id(1), BloodType::O};
    const PairNode patient = fixtures::pair(2, BloodType::A, BloodType::A, 0.5);
    const bool first = sample_arc(rng, donor, patient, cache);
    for (int i = 0; i < 50; ++i) CHECK(sample_arc(rng, donor, patient, cache) == first);
  }

  TEST_CASE("graph examples") {
    CompatibilityCache cache;
    const auto lone = build_graph(pool_of({}, {fixtures::ndad(0)}), cache, 1);
    CHECK(lone.node_count() == 1);
    CHECK(lone.arcs().empty());

    const auto two = build_graph(pool_of({fixtures::pair(0, BloodType::A, BloodType::B),
                                          fixtures::pair(1, BloodType::B, BloodType::A)}),
                                 cache, 1);
    CHECK(two.arcs().size() == 2);
    CHECK(two.has_arc(id(0), id(1)));
    CHECK(two.has_arc(id(1), id(0)));

    CompatibilityCache c2;
    const auto g = build_graph(pool_of({fixtures::pair(0, BloodType::AB, BloodType::O),
                                        fixtures::pair(1, BloodType::O, BloodType::AB)}),
                               c2, 1);
    // Donor of 0 is AB: gives to patient 1 (AB). Donor of 1 is O: gives to patient 0 (O).
    CHECK(g.arcs().size() == 2);
    CHECK(g.has_arc(id(0), id(1)));
    CHECK(g.has_arc(id(1), id(0)));
  }

  TEST_CASE("rebuilding over the same nodes gives the same arcs and no arc breaks the ABO rule") {
    PoolConfig cfg;
    cfg.pair_rate = 20;
    cfg.ndad_rate = 3;
    Pool pool;
    ArrivalStreams streams(5);
    for (int t = 0; t < 3; ++t) pool.admit(arrivals(cfg, t, streams, pool.ids()));
    CompatibilityCache cache;
    const auto first = build_graph(pool, cache, 99);
    const auto again = build_graph(pool, cache, 99);
    CHECK(first.arcs() == again.arcs());
    CompatibilityCache fresh;
    CHECK(build_graph(pool, fresh, 99).arcs() == first.arcs());
    for (const auto& [tail, head] : first.arcs()) {
      CHECK(blood_compatible(first.donor_blood(tail), first.pair(head).patient_blood));
      CHECK(tail != head);
    }
  }

  TEST_CASE("surviving nodes keep their arcs when others leave") {
    PoolConfig cfg;
    cfg.pair_rate = 15;
    cfg.ndad_rate = 2;
    Pool pool;
    ArrivalStreams streams(8);
    pool.admit(arrivals(cfg, 0, streams, pool.ids()));
    CompatibilityCache cache;
    const auto before = build_graph(pool, cache, 4);
    REQUIRE(before.pairs().size() >= 3);
    // remove one 2-cycle if the graph has any
    Selection sel;
    for (const auto& [tail, head] : before.arcs())
      if (before.is_pair(tail) && before.has_arc(head, tail)) {
        sel.candidates.push_back(fixtures::cycle({std::min(raw(tail), raw(head)), std::max(raw(tail), raw(head))}, 2));
        break;
      }
    pool.remove_matched(sel, 0);
    const auto after = build_graph(pool, cache, 4);
    for (const auto& arc : after.arcs()) CHECK(before.has_arc(arc.first, arc.second));
    for (const auto& [tail, head] : before.arcs())
      if (after.contains(tail) && after.contains(head)) CHECK(after.has_arc(tail, head));
  }
}
