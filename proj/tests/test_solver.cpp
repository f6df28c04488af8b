#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "fixtures.hpp"
#include "kex/enumerate.hpp"
#include "kex/solver.hpp"

using namespace kex;
using fixtures::chain;
using fixtures::cycle;

namespace {

std::size_t chains_in(const Selection& s) {
  return static_cast<std::size_t>(std::count_if(s.candidates.begin(), s.candidates.end(),
                                                [](const Candidate& c) { return c.kind == CandidateKind::Chain; }));
}

Scheme random_scheme(Stream& rng, double W) {
  switch (rng.next_u64() % 3) {
    case 0: return Scheme::myopic(W);
    case 1: return Scheme::kpd(W * 75.0);
    default: {
      WeightTable t;
      for (auto& w : t.pair_weight) w = 1.0 + std::floor(4.0 * rng.uniform());
      t.ndad_penalty = W;
      return Scheme::learned(t);
    }
  }
}

// Random graph on at most 12 nodes.
PackingInstance small_instance(Stream& rng, int C, int P, const Scheme& s) {
  const auto ndads = static_cast<std::uint32_t>(rng.next_u64() % 3);
  const auto pairs = 3 + static_cast<std::uint32_t>(rng.next_u64() % (10 - ndads));
  const auto g = fixtures::random_graph(rng, pairs, ndads, 0.15 + 0.35 * rng.uniform());
  return PackingInstance{enumerate_candidates(g, EnumerationLimits{C, P}, s), {}};
}

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("single 2-cycle is selected") {
    const auto sel = solve(PackingInstance{{cycle({0, 1}, 2)}, {}});
    REQUIRE(sel.candidates.size() == 1);
    CHECK(sel.objective == 2.0);
  }

  TEST_CASE("a negative chain is never selected") {
    const auto sel = solve(PackingInstance{{chain({5, 0}, -1)}, {}});
    CHECK(sel.candidates.empty());
    CHECK(sel.objective == 0.0);
    CHECK(solve(PackingInstance{}) == Selection{});
  }

  TEST_CASE("the 3-cycle beats either overlapping 2-cycle") {
    const PackingInstance inst{{cycle({0, 1}, 2), cycle({1, 2}, 2), cycle({0, 1, 2}, 3)}, {}};
    const auto sel = solve(inst);
    REQUIRE(sel.candidates.size() == 1);
    CHECK(sel.candidates[0].nodes.size() == 3);
    CHECK(sel.objective == 3.0);
    CHECK(brute_force(inst) == sel);
  }

  TEST_CASE("ties go to more transplants, then to the smallest index set") {
    // equal weight: the 3-transplant chain wins over the 2-cycle
    const PackingInstance more{{cycle({0, 1}, 2), chain({9, 0, 1, 2}, 2)}, {}};
    CHECK(solve(more).candidates == std::vector<Candidate>{more.candidates[1]});
    // same weight and transplants: lower index wins
    const PackingInstance lex{{cycle({0, 1}, 2), cycle({1, 2}, 2)}, {}};
    CHECK(solve(lex).candidates == std::vector<Candidate>{lex.candidates[0]});
    CHECK(brute_force(more) == solve(more));
    CHECK(brute_force(lex) == solve(lex));
  }

  TEST_CASE("brute force refuses large instances and handles trivial ones") {
    CHECK(brute_force(PackingInstance{}) == Selection{});
    const PackingInstance one{{cycle({0, 1}, 2)}, {}};
    CHECK(brute_force(one).candidates == one.candidates);
    PackingInstance big;
    for (std::uint32_t i = 0; 2 * i <= kBruteForceNodeLimit; ++i) big.candidates.push_back(cycle({2 * i, 2 * i + 1}, 2));
    CHECK_THROWS(brute_force(big));
    big.candidates.pop_back();
    CHECK_NOTHROW(brute_force(big));
  }

  TEST_CASE("solve matches brute force exactly on random instances") {
    Stream rng(41);
    const double Ws[] = {0.0, -2.0, -15.0};
    for (int rep = 0; rep < 300; ++rep) {
      const int C = 2 + static_cast<int>(rng.next_u64() % 2);
      const int P = static_cast<int>(rng.next_u64() % 4);
      const Scheme s = random_scheme(rng, Ws[rep % 3]);
      const auto inst = small_instance(rng, C, P, s);
      const auto fast = solve(inst);
      const auto slow = brute_force(inst);
      CHECK(fast.objective == slow.objective);
      CHECK(fast == slow);
    }
  }

  TEST_CASE("selections are feasible") {
    Stream rng(42);
    for (int rep = 0; rep < 30; ++rep) {
      const auto g = fixtures::random_graph(rng, 30, 4, 0.12);
      const EnumerationLimits lim{3, 4};
      const auto sel = solve(PackingInstance{enumerate_candidates(g, lim, Scheme::myopic(-2)), {}});
      CHECK(validate_selection(g, sel, lim.max_cycle, lim.max_chain));
      double sum = 0;
      for (const auto& c : sel.candidates) sum += c.weight;
      CHECK(sum == sel.objective);
    }
  }

  TEST_CASE("raising a cap never lowers the optimum") {
    Stream rng(43);
    for (int rep = 0; rep < 40; ++rep) {
      const auto g = fixtures::random_graph(rng, 18, 3, 0.15);
      const Scheme s = random_scheme(rng, -2.0);
      auto opt = [&](int C, int P) { return solve(PackingInstance{enumerate_candidates(g, {C, P}, s), {}}).objective; };
      CHECK(opt(3, 2) >= opt(2, 2));
      CHECK(opt(3, 3) >= opt(3, 2));
      CHECK(opt(3, 5) >= opt(3, 3));
    }
  }

  TEST_CASE("positive rescaling keeps the selected index set") {
    Stream rng(44);
    for (int rep = 0; rep < 40; ++rep) {
      auto inst = small_instance(rng, 3, 3, Scheme::myopic(-2));
      const auto base = solve(inst);
      for (double k : {3.0, 0.5, 1024.0}) {
        PackingInstance scaled = inst;
        for (auto& c : scaled.candidates) c.weight *= k;
        const auto sel = solve(scaled);
        REQUIRE(sel.candidates.size() == base.candidates.size());
        for (std::size_t i = 0; i < sel.candidates.size(); ++i) CHECK(sel.candidates[i].nodes == base.candidates[i].nodes);
      }
    }
  }

  TEST_CASE("a harsher altruist penalty never adds chains") {
    Stream rng(45);
    for (int rep = 0; rep < 40; ++rep) {
      const auto g = fixtures::random_graph(rng, 14, 3, 0.2);
      std::size_t prev = SIZE_MAX;
      for (double W : {0.0, -1.0, -2.0, -3.0, -15.0}) {
        const auto sel = solve(PackingInstance{enumerate_candidates(g, {3, 3}, Scheme::myopic(W)), {}});
        CHECK(chains_in(sel) <= prev);
        prev = chains_in(sel);
      }
    }
  }

  TEST_CASE("timeouts fail loudly") {
    Stream rng(46);
    const auto g = fixtures::random_graph(rng, 60, 6, 0.3);
    const PackingInstance inst{enumerate_candidates(g, {3, 3}, Scheme::myopic()), {}};
    CHECK_THROWS_AS(solve(inst, SolveOptions{std::chrono::milliseconds(0)}), SolveFailure);
  }

  TEST_CASE("instance files round-trip bit for bit") {
    Stream rng(47);
    const auto g = fixtures::random_graph(rng, 10, 2, 0.3);
    InstanceFile f{g.pairs(), g.ndads(), enumerate_candidates(g, {3, 3}, Scheme::kpd(-150))};
    f.pairs[0].cpra = 0.1 + 0.2;  // not representable in short decimal
    std::stringstream ss;
    write_instance(ss, f);
    const auto back = read_instance(ss);
    CHECK(back == f);
    std::stringstream again;
    write_instance(again, back);
    std::stringstream first;
    write_instance(first, f);
    CHECK(again.str() == first.str());
    std::istringstream bad("1 0 1\n0 pair O A 0.5\ncycle 2 0 7\n");
    CHECK_THROWS(read_instance(bad));
  }
}
