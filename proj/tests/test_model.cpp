#include <doctest.h>

#include <set>

#include "fixtures.hpp"
#include "kex/model.hpp"

using namespace kex;
using fixtures::chain;
using fixtures::cycle;
using fixtures::id;

TEST_SUITE("model") {
  TEST_CASE("blood types are ordered O < A < B < AB and round-trip through text") {
    CHECK(BloodType::O < BloodType::A);
    CHECK(BloodType::A < BloodType::B);
    CHECK(BloodType::B < BloodType::AB);
    for (BloodType b : kBloodTypes) CHECK(parse_blood_type(to_string(b)) == b);
    CHECK_FALSE(parse_blood_type("C").has_value());
  }

  TEST_CASE("cPRA bands match the published intervals and weights") {
    const double lower[] = {0.0, 0.01, 0.51, 0.95, 0.97};
    const double upper[] = {0.0, 0.50, 0.94, 0.96, 1.0};
    const double alpha[] = {0.24, 0.29, 0.24, 0.10, 0.13};
    double sum = 0;
    for (int i = 0; i < 5; ++i) {
      CHECK(band(i + 1).lower == lower[i]);
      CHECK(band(i + 1).upper == upper[i]);
      CHECK(band(i + 1).alpha == alpha[i]);
      sum += band(i + 1).alpha;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("pair_type_of examples") {
    CHECK(pair_type_of(fixtures::pair(1, BloodType::O, BloodType::A, 0.0)) == PairType{BloodType::O, BloodType::A, 1});
    CHECK(pair_type_of(fixtures::pair(1, BloodType::A, BloodType::AB, 0.955)) ==
          PairType{BloodType::A, BloodType::AB, 4});
    CHECK(pair_type_of(fixtures::pair(1, BloodType::B, BloodType::O, 0.30)) == PairType{BloodType::B, BloodType::O, 2});
  }

  TEST_CASE("band_of is total on [0, 1] with the gap rule") {
    CHECK(band_of(0.0) == 1);
    CHECK(band_of(0.005) == 2);
    CHECK(band_of(0.01) == 2);
    CHECK(band_of(0.50) == 2);
    CHECK(band_of(0.505) == 3);
    CHECK(band_of(0.94) == 3);
    CHECK(band_of(0.945) == 4);
    CHECK(band_of(0.96) == 4);
    CHECK(band_of(0.965) == 5);
    CHECK(band_of(1.0) == 5);
    for (int k = 0; k <= 10000; ++k) {
      const int b = band_of(k / 10000.0);
      CHECK((b >= 1 && b <= 5));
    }
    CHECK_THROWS(band_of(-0.1));
    CHECK_THROWS(band_of(1.1));
  }

  TEST_CASE("there are 80 pair types and the index is a bijection") {
    std::set<PairType> seen;
    for (std::size_t i = 0; i < kPairTypeCount; ++i) {
      const PairType t = pair_type_from_index(i);
      CHECK(index_of(t) == i);
      seen.insert(t);
    }
    CHECK(seen.size() == 80);
  }

  TEST_CASE("graph construction rejects structural violations") {
    using fixtures::ndad;
    using fixtures::pair;
    CHECK_THROWS(ExchangeGraph({pair(1), pair(1)}, {}, {}));
    CHECK_THROWS(ExchangeGraph({pair(1)}, {}, {{id(1), id(1)}}));
    CHECK_THROWS(ExchangeGraph({pair(1), pair(2)}, {}, {{id(1), id(2)}, {id(1), id(2)}}));
    CHECK_THROWS(ExchangeGraph({pair(1)}, {ndad(2)}, {{id(1), id(2)}}));
    CHECK_THROWS(ExchangeGraph({pair(1)}, {}, {{id(1), id(9)}}));
    const ExchangeGraph g({pair(2), pair(1)}, {ndad(3)}, {{id(3), id(1)}, {id(1), id(2)}, {id(2), id(1)}});
    CHECK(g.node_count() == 3);
    CHECK(g.has_arc(id(3), id(1)));
    CHECK_FALSE(g.has_arc(id(1), id(3)));
    CHECK(g.is_ndad(id(3)));
    CHECK(g.successors(id(1)).size() == 1);
  }

  TEST_CASE("validate_selection examples") {
    const ExchangeGraph g = fixtures::complete_pairs(4);
    CHECK(validate_selection(g, Selection{}, 3, 3));
    Selection overlap{{cycle({0, 1}, 2), cycle({1, 2}, 2)}, 4};
    CHECK_FALSE(validate_selection(g, overlap, 3, 3));
    Selection ok{{cycle({0, 1}, 2), cycle({2, 3}, 2)}, 4};
    CHECK(validate_selection(g, ok, 3, 3));
    CHECK_FALSE(validate_selection(g, Selection{{cycle({0, 1, 2}, 3)}, 3}, 2, 3));
  }

  TEST_CASE("a chain of 6 patients violates P = 5") {
    std::vector<PairNode> pairs;
    std::vector<ExchangeGraph::Arc> arcs{{id(100), id(0)}};
    for (std::uint32_t i = 0; i < 6; ++i) pairs.push_back(fixtures::pair(i));
    for (std::uint32_t i = 0; i + 1 < 6; ++i) arcs.emplace_back(id(i), id(i + 1));
    const ExchangeGraph g(pairs, {fixtures::ndad(100)}, arcs);
    const Candidate c = chain({100, 0, 1, 2, 3, 4, 5}, 6);
    CHECK(c.transplants() == 6);
    CHECK_FALSE(validate_selection(g, Selection{{c}, 6}, 3, 5));
    CHECK(validate_selection(g, Selection{{c}, 6}, 3, 6));
  }

  TEST_CASE("candidate structure checks") {
    const ExchangeGraph g({fixtures::pair(1), fixtures::pair(2)}, {fixtures::ndad(3)}, {{id(3), id(1)}, {id(1), id(2)}});
    CHECK(is_feasible_candidate(g, chain({3, 1, 2}, 0), 3, 2));
    CHECK_FALSE(is_feasible_candidate(g, chain({3, 2}, 0), 3, 2));       // no arc 3 -> 2
    CHECK_FALSE(is_feasible_candidate(g, cycle({1, 2}, 0), 3, 2));       // no closing arc
    CHECK_FALSE(is_feasible_candidate(g, chain({1, 2}, 0), 3, 2));       // chain must start at an altruist
  }
}
