#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kex/harness.hpp"

using namespace kex;

namespace {

ExperimentConfig desk() {
  ExperimentConfig cfg;
  cfg.pool.pair_rate = 12;
  cfg.pool.ndad_rate = 1.5;
  cfg.pool.periods = 10;
  cfg.limits = EnumerationLimits{3, 4};
  cfg.replications = 3;
  cfg.seed = 9;
  cfg.W = -2.0;
  cfg.threads = 2;
  cfg.baseline = BaselineMode::None;
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("zero periods give an all-zero report") {
    auto cfg = desk();
    cfg.pool.periods = 0;
    const auto r = run_experiment(cfg);
    CHECK(r.complete);
    CHECK(r.mean == Metrics{});
    CHECK_FALSE(r.welfare_of_mean_queue.has_value());
    for (const auto& s : r.replications) CHECK(s.metrics == Metrics{});
  }

  TEST_CASE("same config and seed give the same report") {
    auto cfg = desk();
    const auto a = run_experiment(cfg);
    cfg.threads = 1;
    const auto b = run_experiment(cfg);
    CHECK(a == b);
    cfg.seed = 10;
    CHECK_FALSE(run_experiment(cfg) == a);
  }

  TEST_CASE("per-replication bookkeeping") {
    auto cfg = desk();
    cfg.replications = 4;
    cfg.pool.periods = 15;
    for (const auto& s : run_experiment(cfg).replications) {
      const Metrics& m = s.metrics;
      REQUIRE_FALSE(s.error.has_value());
      CHECK(m.patients == m.matches + m.patients_waiting);
      CHECK(m.ndads == m.ndads_used + m.ndads_waiting);
      double q = 0;
      for (double b : m.queue_by_band) q += b;
      CHECK(q == m.patients_waiting);
      CHECK(m.match_pct == doctest::Approx(100.0 * m.matches / m.patients));
      CHECK(m.altruist_usage_pct >= 0.0);
      CHECK(m.altruist_usage_pct <= 100.0);
      CHECK(m.paths <= m.ndads);
      CHECK(m.paths == m.ndads_used);
      double cycle_patients = 0;
      for (std::size_t i = 0; i < 4; ++i) cycle_patients += (i + 2) * m.cycles_by_length[i];
      CHECK(cycle_patients + m.patients_in_paths == m.matches);
      if (m.matches > 0) {
        const double cycle_pct = 100.0 * cycle_patients / m.matches;
        CHECK(m.path_match_pct + cycle_pct == doctest::Approx(100.0));
      }
      CHECK(m.wait_recipients >= 0.0);
    }
  }

  TEST_CASE("paired seeds: the decision layer does not change arrivals") {
    auto a = desk();
    auto b = desk();
    b.W = -15.0;
    b.scheme = SchemeKind::Kpd;
    const auto ra = run_experiment(a);
    const auto rb = run_experiment(b);
    for (std::size_t i = 0; i < ra.replications.size(); ++i) {
      CHECK(ra.replications[i].metrics.patients == rb.replications[i].metrics.patients);
      CHECK(ra.replications[i].metrics.ndads == rb.replications[i].metrics.ndads);
    }
  }

  TEST_CASE("single-value sweep equals run_experiment") {
    auto cfg = desk();
    cfg.axis = SweepAxis::W;
    cfg.values = {-2.0};
    const auto rows = sweep(cfg);
    REQUIRE(rows.size() == 1);
    auto plain = desk();
    CHECK(rows[0] == run_experiment(plain));
  }

  TEST_CASE("sweeps set the axis value on each row") {
    auto cfg = desk();
    cfg.replications = 2;
    cfg.axis = SweepAxis::C;
    cfg.values = {2, 3};
    const auto rows = sweep(cfg);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].C == 2);
    CHECK(rows[1].C == 3);
    cfg.values = {2.5};
    CHECK_THROWS(sweep(cfg));
    cfg.axis = SweepAxis::NdadRate;
    cfg.values = {1.0, 2.0};
    const auto rate = sweep(cfg);
    CHECK_FALSE(rate[0].matches_per_altruist.has_value());
    CHECK(rate[1].matches_per_altruist.has_value());
    CHECK(rate[1].donors_per_altruist.has_value());
  }

  TEST_CASE("KPD baseline yields scaled measures of one for KPD itself") {
    auto cfg = desk();
    cfg.scheme = SchemeKind::Kpd;
    cfg.W = 0.0;
    cfg.baseline = BaselineMode::Kpd;
    const auto r = run_experiment(cfg);
    REQUIRE(r.measures.has_value());
    CHECK(r.measures->utilitarian == 1.0);
    CHECK(r.measures->nash == 1.0);
    CHECK(r.measures->egalitarian == 1.0);
  }

  TEST_CASE("JSON round trip") {
    auto cfg = desk();
    cfg.baseline = BaselineMode::Kpd;
    const std::vector<RunReport> reports{run_experiment(cfg)};
    CHECK(reports_from_json(reports_to_json(reports)) == reports);
    CHECK(reports_from_json(reports_to_json({})).empty());
  }

  TEST_CASE("CSV mirrors") {
    const auto& names = table_names();
    CHECK(names.size() == 9);
    for (const auto& n : names) {
      const auto csv = table_csv({}, n);
      CHECK(std::count(csv.begin(), csv.end(), '\n') == 1);
    }
    CHECK(table_csv({}, "main") == "Alg,W,#Matches,%Match,WaitRecip,Wait,EgalFairness\n");
    CHECK_THROWS(table_csv({}, "nonsense"));
    const auto r = run_experiment(desk());
    const auto row = table_csv({r}, "main");
    CHECK(std::count(row.begin(), row.end(), '\n') == 2);
  }

  TEST_CASE("reports are written to disk byte-identically") {
    const auto dir = std::filesystem::temp_directory_path() / "kex_harness_test";
    std::filesystem::remove_all(dir);
    const auto r = run_experiment(desk());
    emit_report({r}, ReportFormat::Both, dir / "a");
    emit_report({run_experiment(desk())}, ReportFormat::Both, dir / "b");
    for (const auto& n : table_names()) {
      const auto a = slurp(dir / "a" / (n + ".csv"));
      CHECK_FALSE(a.empty());
      CHECK(a == slurp(dir / "b" / (n + ".csv")));
    }
    CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"));
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("config parsing") {
    ExperimentConfig cfg;
    apply_config_json(cfg, R"({"scheme": "kpd", "W": -150, "C": 4, "P": 6, "pair_rate": 20,
                               "replications": 7, "seed": 3, "sweep": {"axis": "P", "values": [2, 5]},
                               "baseline": "explicit", "baseline_scores": [0.1, 0.2, 0.3]})");
    CHECK(cfg.scheme == SchemeKind::Kpd);
    CHECK(cfg.W == -150.0);
    CHECK(cfg.limits.max_cycle == 4);
    CHECK(cfg.limits.max_chain == 6);
    CHECK(cfg.pool.pair_rate == 20.0);
    CHECK(cfg.pool.ndad_rate == 4.5625);
    CHECK(cfg.replications == 7);
    CHECK(cfg.axis == SweepAxis::P);
    CHECK(cfg.values == std::vector<double>{2, 5});
    CHECK(cfg.baseline == BaselineMode::Explicit);
    CHECK(cfg.baseline_scores == WelfareScores{0.1, 0.2, 0.3});
    CHECK_THROWS(apply_config_json(cfg, R"({"colour": 1})"));
    CHECK_THROWS(apply_config_json(cfg, "{"));
    CHECK_THROWS(apply_config_json(cfg, R"({"C": "three"})"));
  }

  TEST_CASE("validation") {
    auto cfg = desk();
    cfg.replications = 0;
    CHECK_THROWS(cfg.validate());
    cfg = desk();
    cfg.limits.max_cycle = 6;
    CHECK_THROWS(cfg.validate());
    cfg = desk();
    cfg.limits.max_chain = 21;
    CHECK_THROWS(cfg.validate());
    cfg = desk();
    cfg.scheme = SchemeKind::Learned;
    CHECK_THROWS(cfg.validate());
    CHECK(parse_sweep_axis("ndad-rate") == SweepAxis::NdadRate);
    CHECK_THROWS(parse_scheme_kind("greedy"));
  }
}
