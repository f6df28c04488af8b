// kexsim: command-line front end for the kidney exchange simulator.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kex/harness.hpp"
#include "kex/learn.hpp"
#include "kex/solver.hpp"
#include "kex/text.hpp"

namespace {

/// Flags shared by the experiment-style subcommands. Every field is
/// optional so that only flags actually given override the config file.
struct CommonFlags {
  std::string config;
  std::optional<std::string> scheme;
  std::optional<std::string> weights_file;
  std::optional<double> W;
  std::optional<int> C;
  std::optional<int> P;
  std::optional<double> pair_rate;
  std::optional<double> ndad_rate;
  std::optional<int> periods;
  std::optional<int> reps;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<double> timeout;
  std::optional<std::string> baseline;
  std::string format = "csv";

  void attach(CLI::App* app, bool experiment) {
    app->add_option("--config", config, "JSON config file; flags override it");
    app->add_option("--scheme", scheme, "myopic | kpd | learned");
    app->add_option("--weights-file", weights_file, "weight table for --scheme learned");
    app->add_option("--W", W, "altruist penalty added to every chain");
    app->add_option("--C", C, "maximum pairs per cycle (2..5)");
    app->add_option("--P", P, "maximum patients per chain (0..20)");
    app->add_option("--pair-rate", pair_rate, "mean pair arrivals per period");
    app->add_option("--ndad-rate", ndad_rate, "mean altruist arrivals per period");
    app->add_option("--periods", periods, "matching periods per run");
    app->add_option("--seed", seed, "base seed");
    app->add_option("--threads", threads, "worker threads (0 = all cores)");
    app->add_option("--timeout", timeout, "solver time limit per round, seconds");
    if (experiment) {
      app->add_option("--reps", reps, "replications");
      app->add_option("--out", out, "output directory");
      app->add_option("--format", format, "csv | json | both")->check(CLI::IsMember({"csv", "json", "both"}));
      app->add_option("--baseline", baseline, "reference for scaled fairness: none | kpd | explicit");
    }
  }

  kex::ExperimentConfig build() const {
    kex::ExperimentConfig cfg;
    if (!config.empty()) kex::apply_config_file(cfg, config);
    if (scheme) cfg.scheme = kex::parse_scheme_kind(*scheme);
    if (weights_file) cfg.weights_file = *weights_file;
    if (W) cfg.W = *W;
    if (C) cfg.limits.max_cycle = *C;
    if (P) cfg.limits.max_chain = *P;
    if (pair_rate) cfg.pool.pair_rate = *pair_rate;
    if (ndad_rate) cfg.pool.ndad_rate = *ndad_rate;
    if (periods) cfg.pool.periods = *periods;
    if (reps) cfg.replications = *reps;
    if (seed) cfg.seed = *seed;
    if (out) cfg.out_dir = *out;
    if (threads) cfg.threads = *threads;
    if (timeout) cfg.timeout_seconds = *timeout;
    if (baseline) cfg.baseline = kex::parse_baseline_mode(*baseline);
    return cfg;
  }
};

void print_summary(const std::vector<kex::RunReport>& reports) {
  std::cout << kex::table_csv(reports, "main");
  for (const auto& r : reports)
    for (const auto& w : r.warnings) std::cerr << "warning [" << r.label << "]: " << w << '\n';
}

int finish(const std::vector<kex::RunReport>& reports, const kex::ExperimentConfig& cfg, const std::string& format) {
  kex::emit_report(reports, kex::parse_report_format(format), cfg.out_dir);
  print_summary(reports);
  for (const auto& r : reports)
    if (!r.complete) return 2;
  return 0;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto tok = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!tok.empty()) out.push_back(kex::parse_double(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

void print_scores(const char* what, const kex::WelfareScores& s, int decimals) {
  std::printf("%-12s utilitarian %s  nash %s  egalitarian %s\n", what,
              kex::format_fixed(s.utilitarian, decimals).c_str(), kex::format_fixed(s.nash, decimals).c_str(),
              kex::format_fixed(s.egalitarian, decimals).c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic kidney exchange simulator"};
  app.require_subcommand(1);

  CommonFlags sim_flags;
  auto* sim = app.add_subcommand("simulate", "run replications of one configuration");
  sim_flags.attach(sim, true);

  CommonFlags sweep_flags;
  std::string axis;
  std::string values;
  auto* sw = app.add_subcommand("sweep", "run one configuration per value of W, C, P or the altruist rate");
  sweep_flags.attach(sw, true);
  sw->add_option("--axis", axis, "W | C | P | ndad-rate");
  sw->add_option("--values", values, "comma-separated values, ascending");

  CommonFlags learn_flags;
  std::string rule_text = "lin:1";
  int iterations = 50;
  int window = 1;
  std::string weights_out = "weights.txt";
  auto* learn = app.add_subcommand("learn", "learn pair-type weights by repeated simulation");
  learn_flags.attach(learn, false);
  learn->add_option("--rule", rule_text, "lin:<a> | exp:<a> | exp-literal:<a>");
  learn->add_option("--iterations", iterations, "outer iterations");
  learn->add_option("--window", window, "periods averaged for queue proportions (1 = final snapshot)");
  learn->add_option("--out", weights_out, "weight file to write");

  std::vector<double> queue;
  std::vector<double> baseline_queue;
  auto* fair = app.add_subcommand("fairness", "welfare scores of end-of-run queue lengths per cPRA group");
  fair->add_option("--queue", queue, "five queue lengths G1..G5")->expected(5)->required();
  fair->add_option("--baseline-queue", baseline_queue, "five queue lengths of the reference algorithm")->expected(5);

  CommonFlags export_flags;
  int period = 0;
  int rep = 0;
  std::string instance_out = "-";
  auto* exp = app.add_subcommand("export-instance", "write the packing instance of one matching round");
  export_flags.attach(exp, false);
  exp->add_option("--period", period, "matching period to export (0-based)");
  exp->add_option("--rep", rep, "replication index");
  exp->add_option("--out", instance_out, "instance file, - for stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      const auto cfg = sim_flags.build();
      return finish({kex::run_experiment(cfg)}, cfg, sim_flags.format);
    }
    if (*sw) {
      auto cfg = sweep_flags.build();
      if (!axis.empty()) cfg.axis = kex::parse_sweep_axis(axis);
      if (!values.empty()) cfg.values = parse_list(values);
      if (cfg.axis == kex::SweepAxis::None) throw std::invalid_argument("sweep needs --axis (or a sweep entry in --config)");
      return finish(kex::sweep(cfg), cfg, sweep_flags.format);
    }
    if (*learn) {
      const auto cfg = learn_flags.build();
      cfg.limits.validate();
      kex::LearningConfig lc;
      lc.outer_iterations = iterations;
      lc.setup.pool = cfg.pool;
      lc.setup.limits = cfg.limits;
      lc.setup.solve.timeout = std::chrono::milliseconds(static_cast<long long>(cfg.timeout_seconds * 1000.0));
      lc.ndad_penalty = cfg.W.value_or(0.0);
      lc.seed = cfg.seed;
      lc.queue_window = window;
      const kex::UpdateRule rule = kex::parse_update_rule(rule_text);
      const auto table = kex::run_learning(lc, rule, [](int t, const kex::ReplicationResult& r, const kex::WeightTable&) {
        std::fprintf(stderr, "iteration %d: %%match %s\n", t, kex::format_fixed(r.match_pct(), 2).c_str());
      });
      kex::save_weight_table(weights_out, table);
      std::printf("%s weights written to %s\n", rule.name().c_str(), weights_out.c_str());
      return 0;
    }
    if (*fair) {
      kex::BandVector q{};
      std::copy(queue.begin(), queue.end(), q.begin());
      const auto g = kex::group_utilities(q);
      if (g.floored) std::fprintf(stderr, "warning: a group count below 1 was floored at 1\n");
      const auto scores = kex::welfare_scores(g);
      print_scores("scores", scores, 5);
      if (!baseline_queue.empty()) {
        kex::BandVector b{};
        std::copy(baseline_queue.begin(), baseline_queue.end(), b.begin());
        const auto base = kex::welfare_scores(kex::group_utilities(b));
        print_scores("baseline", base, 5);
        print_scores("measures", kex::scaled_measures(scores, base), 2);
      }
      return 0;
    }
    if (*exp) {
      const auto cfg = export_flags.build();
      cfg.validate();
      if (period < 0 || period >= cfg.pool.periods) throw std::invalid_argument("--period outside the run");
      kex::SimulationSetup setup;
      setup.pool = cfg.pool;
      setup.limits = cfg.limits;
      setup.scheme = cfg.make_scheme();
      setup.solve.timeout = std::chrono::milliseconds(static_cast<long long>(cfg.timeout_seconds * 1000.0));
      setup.pool.periods = period + 1;
      kex::InstanceFile file;
      kex::simulate(setup, kex::replication_seed(cfg.seed, rep), [&](const kex::PeriodRecord& rec) {
        if (rec.period != period) return;
        file.pairs = rec.graph.pairs();
        file.ndads = rec.graph.ndads();
        file.candidates = rec.candidates;
      });
      if (instance_out == "-") {
        kex::write_instance(std::cout, file);
      } else {
        std::ofstream out(instance_out);
        if (!out) throw std::runtime_error("cannot open " + instance_out);
        kex::write_instance(out, file);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "kexsim: %s\n", e.what());
    return 1;
  }
  return 0;
}
