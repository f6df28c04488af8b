#include "kex/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "kex/text.hpp"

namespace kex {

using nlohmann::json;

std::string to_string(SchemeKind k) {
  switch (k) {
    case SchemeKind::Myopic: return "myopic";
    case SchemeKind::Kpd: return "kpd";
    case SchemeKind::Learned: return "learned";
  }
  return "?";
}

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::None: return "none";
    case SweepAxis::W: return "W";
    case SweepAxis::C: return "C";
    case SweepAxis::P: return "P";
    case SweepAxis::NdadRate: return "ndad-rate";
  }
  return "?";
}

std::string to_string(BaselineMode b) {
  switch (b) {
    case BaselineMode::None: return "none";
    case BaselineMode::Kpd: return "kpd";
    case BaselineMode::Explicit: return "explicit";
  }
  return "?";
}

SchemeKind parse_scheme_kind(const std::string& s) {
  if (s == "myopic") return SchemeKind::Myopic;
  if (s == "kpd") return SchemeKind::Kpd;
  if (s == "learned") return SchemeKind::Learned;
  throw std::invalid_argument("unknown scheme '" + s + "' (myopic, kpd, learned)");
}

SweepAxis parse_sweep_axis(const std::string& s) {
  if (s == "none") return SweepAxis::None;
  if (s == "W" || s == "w") return SweepAxis::W;
  if (s == "C" || s == "c") return SweepAxis::C;
  if (s == "P" || s == "p") return SweepAxis::P;
  if (s == "ndad-rate" || s == "lambda" || s == "lambda_A") return SweepAxis::NdadRate;
  throw std::invalid_argument("unknown sweep axis '" + s + "' (W, C, P, ndad-rate)");
}

BaselineMode parse_baseline_mode(const std::string& s) {
  if (s == "none") return BaselineMode::None;
  if (s == "kpd") return BaselineMode::Kpd;
  if (s == "explicit") return BaselineMode::Explicit;
  throw std::invalid_argument("unknown baseline mode '" + s + "' (none, kpd, explicit)");
}

ReportFormat parse_report_format(const std::string& s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  if (s == "both") return ReportFormat::Both;
  throw std::invalid_argument("unknown format '" + s + "' (csv, json, both)");
}

// ---------------------------------------------------------------------------

void ExperimentConfig::validate() const {
  if (replications < 1) throw std::invalid_argument("replications must be at least 1");
  if (threads < 0) throw std::invalid_argument("threads must be non-negative");
  if (!(timeout_seconds > 0.0)) throw std::invalid_argument("timeout must be positive");
  if (scheme == SchemeKind::Learned && weights_file.empty())
    throw std::invalid_argument("the learned scheme needs a weights file");
  if (W && !std::isfinite(*W)) throw std::invalid_argument("W must be finite");
  if (axis != SweepAxis::None && values.empty()) throw std::invalid_argument("a sweep needs at least one value");
  if (!std::ranges::is_sorted(values)) throw std::invalid_argument("sweep values must be sorted");
  if (baseline == BaselineMode::Explicit &&
      !(baseline_scores.utilitarian > 0 && baseline_scores.nash > 0 && baseline_scores.egalitarian > 0))
    throw std::invalid_argument("explicit baseline scores must be positive");
  limits.validate();
  if (limits.max_cycle > 5) throw std::invalid_argument("C must be at most 5");
  if (limits.max_chain > 20) throw std::invalid_argument("P must be at most 20");
  pool.validate();
  if (pool.periods < 0) throw std::invalid_argument("periods must be non-negative");
}

Scheme ExperimentConfig::make_scheme() const {
  switch (scheme) {
    case SchemeKind::Myopic: return Scheme::myopic(W.value_or(0.0));
    case SchemeKind::Kpd: return Scheme::kpd(W.value_or(0.0));
    case SchemeKind::Learned: {
      WeightTable t = load_weight_table(weights_file);
      if (W) t.ndad_penalty = *W;
      return Scheme::learned(std::move(t));
    }
  }
  throw std::logic_error("unknown scheme kind");
}

std::string ExperimentConfig::row_label() const {
  if (!label.empty()) return label;
  if (scheme == SchemeKind::Learned) return std::filesystem::path(weights_file).stem().string();
  return to_string(scheme);
}

double ExperimentConfig::penalty() const { return make_scheme().ndad_penalty; }

namespace {

template <class T>
void take(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void apply_fields(ExperimentConfig& cfg, const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  static const std::vector<std::string> known{
      "label",  "scheme",   "weights_file",   "W",          "C",        "P",         "candidate_budget",
      "pair_rate", "ndad_rate", "blood_dist", "band_dist",  "periods",  "replications", "seed",
      "threads", "timeout_seconds", "sweep", "baseline", "baseline_scores", "out_dir"};
  for (const auto& [key, value] : j.items())
    if (std::ranges::find(known, key) == known.end()) throw std::invalid_argument("unknown config key '" + key + "'");

  take(j, "label", cfg.label);
  if (j.contains("scheme")) cfg.scheme = parse_scheme_kind(j.at("scheme").get<std::string>());
  take(j, "weights_file", cfg.weights_file);
  if (j.contains("W")) cfg.W = j.at("W").get<double>();
  take(j, "C", cfg.limits.max_cycle);
  take(j, "P", cfg.limits.max_chain);
  take(j, "candidate_budget", cfg.limits.candidate_budget);
  take(j, "pair_rate", cfg.pool.pair_rate);
  take(j, "ndad_rate", cfg.pool.ndad_rate);
  take(j, "blood_dist", cfg.pool.blood_dist);
  take(j, "band_dist", cfg.pool.band_dist);
  take(j, "periods", cfg.pool.periods);
  take(j, "replications", cfg.replications);
  take(j, "seed", cfg.seed);
  take(j, "threads", cfg.threads);
  take(j, "timeout_seconds", cfg.timeout_seconds);
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    cfg.axis = parse_sweep_axis(s.at("axis").get<std::string>());
    cfg.values = s.at("values").get<std::vector<double>>();
  }
  if (j.contains("baseline")) cfg.baseline = parse_baseline_mode(j.at("baseline").get<std::string>());
  if (j.contains("baseline_scores")) {
    const auto v = j.at("baseline_scores").get<std::array<double, 3>>();
    cfg.baseline_scores = {v[0], v[1], v[2]};
  }
  take(j, "out_dir", cfg.out_dir);
}

}  // namespace

void apply_config_json(ExperimentConfig& cfg, const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    apply_fields(cfg, j);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad config value: ") + e.what());
  }
}

void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  apply_config_json(cfg, ss.str());
}

// ---------------------------------------------------------------------------

Metrics metrics_of(const ReplicationResult& r, bool* floored) {
  Metrics m;
  m.patients = r.patients_arrived;
  m.ndads = r.ndads_arrived;
  m.participants = r.participants();
  m.matches = r.matches;
  m.match_pct = r.match_pct();
  m.wait_recipients = r.wait_recipients;
  m.wait_all = r.wait_all;
  m.ndads_used = r.ndads_used;
  m.altruist_usage_pct = r.altruist_usage_pct();
  m.paths = r.paths;
  for (std::size_t i = 0; i < 4; ++i) {
    m.paths_by_length[i] = r.paths_by_length[i];
    m.cycles_by_length[i] = r.cycles_by_length[i + 2];
  }
  m.patients_in_paths = r.patients_in_paths;
  m.path_match_pct = r.path_match_pct();
  m.queue_by_band = r.queue_by_band();
  m.patients_waiting = r.patients_waiting();
  m.ndads_waiting = r.final_queue.ndads;
  if (r.patients_arrived > 0) {
    const GroupUtilities g = group_utilities(m.queue_by_band);
    if (floored) *floored = g.floored;
    m.welfare = welfare_scores(g);
  }
  return m;
}

std::uint64_t replication_seed(std::uint64_t base, int index) {
  return derive_seed(base, static_cast<std::uint64_t>(index));
}

namespace {

/// Field-wise mean; welfare is averaged only when every replication has it.
Metrics mean_of(const std::vector<const Metrics*>& ms) {
  Metrics out;
  if (ms.empty()) return out;
  const double n = static_cast<double>(ms.size());
  bool all_welfare = true;
  WelfareScores w;
  for (const Metrics* m : ms) {
    out.patients += m->patients;
    out.ndads += m->ndads;
    out.participants += m->participants;
    out.matches += m->matches;
    out.match_pct += m->match_pct;
    out.wait_recipients += m->wait_recipients;
    out.wait_all += m->wait_all;
    out.ndads_used += m->ndads_used;
    out.altruist_usage_pct += m->altruist_usage_pct;
    out.paths += m->paths;
    for (std::size_t i = 0; i < 4; ++i) {
      out.paths_by_length[i] += m->paths_by_length[i];
      out.cycles_by_length[i] += m->cycles_by_length[i];
    }
    out.patients_in_paths += m->patients_in_paths;
    out.path_match_pct += m->path_match_pct;
    for (std::size_t j = 0; j < kBandCount; ++j) out.queue_by_band[j] += m->queue_by_band[j];
    out.patients_waiting += m->patients_waiting;
    out.ndads_waiting += m->ndads_waiting;
    if (m->welfare) {
      w.utilitarian += m->welfare->utilitarian;
      w.nash += m->welfare->nash;
      w.egalitarian += m->welfare->egalitarian;
    } else {
      all_welfare = false;
    }
  }
  for (double* f : {&out.patients, &out.ndads, &out.participants, &out.matches, &out.match_pct, &out.wait_recipients,
                    &out.wait_all, &out.ndads_used, &out.altruist_usage_pct, &out.paths, &out.patients_in_paths,
                    &out.path_match_pct, &out.patients_waiting, &out.ndads_waiting})
    *f /= n;
  for (std::size_t i = 0; i < 4; ++i) {
    out.paths_by_length[i] /= n;
    out.cycles_by_length[i] /= n;
  }
  for (double& q : out.queue_by_band) q /= n;
  if (all_welfare) out.welfare = WelfareScores{w.utilitarian / n, w.nash / n, w.egalitarian / n};
  return out;
}

struct RawRun {
  std::vector<ReplicationSummary> reps;
  std::vector<char> floored;
};

RawRun run_replications(const ExperimentConfig& cfg, const Scheme& scheme) {
  SimulationSetup setup;
  setup.pool = cfg.pool;
  setup.limits = cfg.limits;
  setup.scheme = scheme;
  setup.solve.timeout = std::chrono::milliseconds(static_cast<long long>(cfg.timeout_seconds * 1000.0));

  RawRun out;
  out.reps.resize(static_cast<std::size_t>(cfg.replications));
  out.floored.assign(out.reps.size(), 0);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < cfg.replications; i = next++) {
      ReplicationSummary& s = out.reps[static_cast<std::size_t>(i)];
      s.index = i;
      s.seed = replication_seed(cfg.seed, i);
      try {
        bool floored = false;
        s.metrics = metrics_of(simulate(setup, s.seed), &floored);
        out.floored[static_cast<std::size_t>(i)] = floored;
      } catch (const std::exception& e) {
        s.error = e.what();
      }
    }
  };
  unsigned threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::thread::hardware_concurrency();
  threads = std::clamp(threads, 1u, static_cast<unsigned>(cfg.replications));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return out;
}

RunReport aggregate(const ExperimentConfig& cfg, const Scheme& scheme, RawRun raw) {
  RunReport r;
  r.label = cfg.row_label();
  r.scheme = to_string(cfg.scheme);
  r.W = scheme.ndad_penalty;
  r.C = cfg.limits.max_cycle;
  r.P = cfg.limits.max_chain;
  r.pair_rate = cfg.pool.pair_rate;
  r.ndad_rate = cfg.pool.ndad_rate;
  r.periods = cfg.pool.periods;
  r.seed = cfg.seed;
  r.replications = std::move(raw.reps);

  std::vector<const Metrics*> ok;
  int floored = 0;
  for (std::size_t i = 0; i < r.replications.size(); ++i) {
    const auto& s = r.replications[i];
    if (s.error) {
      r.complete = false;
      r.warnings.push_back("replication " + std::to_string(s.index) + " aborted: " + *s.error);
    } else {
      ok.push_back(&s.metrics);
      floored += raw.floored[i];
    }
  }
  if (floored > 0)
    r.warnings.push_back(std::to_string(floored) +
                         " replication(s) had an empty cPRA group; its count was floored at 1 for fairness");
  r.mean = mean_of(ok);
  if (!ok.empty() && r.mean.patients > 0) {
    const GroupUtilities g = group_utilities(r.mean.queue_by_band);
    if (g.floored) r.warnings.push_back("mean queue has a cPRA group below 1; floored at 1 for fairness");
    r.welfare_of_mean_queue = welfare_scores(g);
  }
  return r;
}

void attach_baseline(RunReport& r, const std::optional<WelfareScores>& baseline) {
  r.baseline = baseline;
  if (!baseline) return;
  if (!(baseline->utilitarian > 0 && baseline->nash > 0 && baseline->egalitarian > 0)) {
    r.warnings.push_back("baseline scores are not positive; scaled measures omitted");
    return;
  }
  if (r.welfare_of_mean_queue) r.measures = scaled_measures(*r.welfare_of_mean_queue, *baseline);
  if (r.mean.welfare) r.measures_of_mean = scaled_measures(*r.mean.welfare, *baseline);
}

/// Scores of the KPD (W = 0) run with the same pool, caps and seeds.
std::optional<WelfareScores> kpd_baseline(const ExperimentConfig& cfg, const RunReport* same) {
  if (same) return same->welfare_of_mean_queue;
  ExperimentConfig base = cfg;
  base.scheme = SchemeKind::Kpd;
  base.W = 0.0;
  base.weights_file.clear();
  const Scheme scheme = base.make_scheme();
  return aggregate(base, scheme, run_replications(base, scheme)).welfare_of_mean_queue;
}

bool is_kpd_reference(const ExperimentConfig& cfg) {
  return cfg.scheme == SchemeKind::Kpd && cfg.W.value_or(0.0) == 0.0;
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Scheme scheme = cfg.make_scheme();
  RunReport r = aggregate(cfg, scheme, run_replications(cfg, scheme));
  switch (cfg.baseline) {
    case BaselineMode::None: break;
    case BaselineMode::Explicit: attach_baseline(r, cfg.baseline_scores); break;
    case BaselineMode::Kpd: attach_baseline(r, kpd_baseline(cfg, is_kpd_reference(cfg) ? &r : nullptr)); break;
  }
  return r;
}

std::vector<RunReport> sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.axis == SweepAxis::None) return {run_experiment(cfg)};

  std::vector<RunReport> out;
  std::optional<std::optional<WelfareScores>> shared_baseline;   // W sweeps reuse one KPD run
  for (double v : cfg.values) {
    ExperimentConfig row = cfg;
    row.axis = SweepAxis::None;
    row.values.clear();
    switch (cfg.axis) {
      case SweepAxis::W: row.W = v; break;
      case SweepAxis::C: row.limits.max_cycle = static_cast<int>(v); break;
      case SweepAxis::P: row.limits.max_chain = static_cast<int>(v); break;
      case SweepAxis::NdadRate: row.pool.ndad_rate = v; break;
      case SweepAxis::None: break;
    }
    if ((cfg.axis == SweepAxis::C || cfg.axis == SweepAxis::P) && std::nearbyint(v) != v)
      throw std::invalid_argument("C and P sweep values must be integers");

    if (cfg.axis == SweepAxis::W && cfg.baseline == BaselineMode::Kpd) {
      row.baseline = BaselineMode::None;
      RunReport r = run_experiment(row);
      if (!shared_baseline) shared_baseline = kpd_baseline(row, is_kpd_reference(row) ? &r : nullptr);
      attach_baseline(r, *shared_baseline);
      out.push_back(std::move(r));
    } else {
      out.push_back(run_experiment(row));
    }
  }

  if (cfg.axis == SweepAxis::NdadRate) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      const Metrics& m = out[i].mean;
      if (m.ndads > 0) out[i].donors_per_altruist = m.paths / m.ndads;
      if (i > 0) {
        const double d_ndads = m.ndads - out[i - 1].mean.ndads;
        if (d_ndads != 0.0) out[i].matches_per_altruist = (m.matches - out[i - 1].mean.matches) / d_ndads;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

using Row = std::vector<std::string>;

std::string f2(double v) { return format_fixed(v, 2); }
std::string f5(double v) { return format_fixed(v, 5); }
std::string opt2(const std::optional<double>& v) { return v ? f2(*v) : "-"; }

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render(const Row& header, const std::vector<Row>& rows) {
  std::string out;
  auto line = [&](const Row& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += csv_cell(r[i]);
    }
    out += '\n';
  };
  line(header);
  for (const Row& r : rows) line(r);
  return out;
}

std::optional<double> egal_measure(const RunReport& r) {
  if (!r.measures) return std::nullopt;
  return r.measures->egalitarian;
}

}  // namespace

const std::vector<std::string>& table_names() {
  static const std::vector<std::string> names{"main",  "paths",  "cycles",   "altruist_weights", "prices",
                                              "altruist_rate", "queues", "fairness", "replications"};
  return names;
}

std::string table_csv(const std::vector<RunReport>& reports, const std::string& table) {
  std::vector<Row> rows;
  if (table == "main") {
    for (const auto& r : reports)
      rows.push_back({r.label, f2(r.W), f2(r.mean.matches), f2(r.mean.match_pct), f2(r.mean.wait_recipients),
                      f2(r.mean.wait_all), opt2(egal_measure(r))});
    return render({"Alg", "W", "#Matches", "%Match", "WaitRecip", "Wait", "EgalFairness"}, rows);
  }
  if (table == "paths") {
    for (const auto& r : reports) {
      const auto& m = r.mean;
      rows.push_back({std::to_string(r.P), f2(m.matches), f2(m.match_pct), f2(m.altruist_usage_pct),
                      f2(m.paths_by_length[0]), f2(m.paths_by_length[1]), f2(m.paths_by_length[2]),
                      f2(m.paths_by_length[3]), f2(m.path_match_pct)});
    }
    return render({"P", "#Matches", "%Match", "AltruistUsage", "Paths1-5", "Paths6-10", "Paths11-15", "Paths16-20",
                   "%PathMatches"},
                  rows);
  }
  if (table == "cycles") {
    for (const auto& r : reports) {
      const auto& m = r.mean;
      rows.push_back({std::to_string(r.C), f2(m.matches), f2(m.match_pct), f2(m.cycles_by_length[0]),
                      f2(m.cycles_by_length[1]), f2(m.cycles_by_length[2]), f2(m.cycles_by_length[3]), f2(m.paths),
                      f2(m.patients_in_paths), f2(m.path_match_pct)});
    }
    return render({"C", "#Matches", "%Match", "Cycle2", "Cycle3", "Cycle4", "Cycle5", "#Paths", "#PatientsInPaths",
                   "%PathMatches"},
                  rows);
  }
  if (table == "altruist_weights") {
    for (const auto& r : reports) rows.push_back({f2(r.W), f2(r.mean.altruist_usage_pct), f2(r.mean.match_pct)});
    return render({"W", "AltruistUsage", "%Match"}, rows);
  }
  if (table == "prices") {
    for (const auto& r : reports)
      rows.push_back({r.label, f2(r.W), f2(r.mean.match_pct), f2(r.mean.wait_recipients), f2(r.mean.wait_all),
                      opt2(egal_measure(r))});
    return render({"Alg", "W", "%Match", "WaitRecip", "Wait", "EgalFairness"}, rows);
  }
  if (table == "altruist_rate") {
    for (const auto& r : reports)
      rows.push_back({f2(r.ndad_rate), f2(r.mean.match_pct), opt2(r.matches_per_altruist), f2(r.mean.ndads),
                      f2(r.mean.paths), opt2(r.donors_per_altruist)});
    return render({"LambdaA", "%Match", "Matches/Altruist", "#Altruists", "#Paths", "Donors/Altruist"}, rows);
  }
  if (table == "queues") {
    for (const auto& r : reports) {
      Row row{r.label};
      for (double q : r.mean.queue_by_band) row.push_back(f2(q));
      rows.push_back(std::move(row));
    }
    return render({"Model", "G1", "G2", "G3", "G4", "G5"}, rows);
  }
  if (table == "fairness") {
    // Scores of the mean end-of-run queue, the form the published table uses.
    for (const auto& r : reports) {
      Row row{r.label};
      const auto& s = r.welfare_of_mean_queue;
      for (double v : {s ? s->utilitarian : 0.0, s ? s->nash : 0.0, s ? s->egalitarian : 0.0})
        row.push_back(s ? f5(v) : "-");
      const auto& m = r.measures;
      for (double v : {m ? m->utilitarian : 0.0, m ? m->nash : 0.0, m ? m->egalitarian : 0.0})
        row.push_back(m ? f2(v) : "-");
      rows.push_back(std::move(row));
    }
    return render({"Model", "Utilitarian", "Nash", "Egalitarian", "UtilitarianMeasure", "NashMeasure",
                   "EgalitarianMeasure"},
                  rows);
  }
  if (table == "replications") {
    for (const auto& r : reports)
      for (const auto& s : r.replications) {
        const auto& m = s.metrics;
        rows.push_back({r.label, f2(r.W), std::to_string(r.C), std::to_string(r.P), f2(r.ndad_rate),
                        std::to_string(s.index), std::to_string(s.seed), s.error ? "aborted" : "ok", f2(m.patients),
                        f2(m.ndads), f2(m.matches), f2(m.match_pct), f2(m.wait_recipients), f2(m.wait_all),
                        f2(m.altruist_usage_pct), f2(m.paths), f2(m.patients_in_paths)});
      }
    return render({"Alg", "W", "C", "P", "LambdaA", "Rep", "Seed", "Status", "Patients", "Altruists", "#Matches",
                   "%Match", "WaitRecip", "Wait", "AltruistUsage", "#Paths", "#PatientsInPaths"},
                  rows);
  }
  throw std::invalid_argument("unknown table '" + table + "'");
}

// ---------------------------------------------------------------------------

namespace {

json welfare_json(const std::optional<WelfareScores>& w) {
  if (!w) return nullptr;
  return json{{"utilitarian", w->utilitarian}, {"nash", w->nash}, {"egalitarian", w->egalitarian}};
}

std::optional<WelfareScores> welfare_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return WelfareScores{j.at("utilitarian").get<double>(), j.at("nash").get<double>(), j.at("egalitarian").get<double>()};
}

template <class T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> opt_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

json metrics_json(const Metrics& m) {
  return json{{"patients", m.patients},
              {"ndads", m.ndads},
              {"participants", m.participants},
              {"matches", m.matches},
              {"match_pct", m.match_pct},
              {"wait_recipients", m.wait_recipients},
              {"wait_all", m.wait_all},
              {"ndads_used", m.ndads_used},
              {"altruist_usage_pct", m.altruist_usage_pct},
              {"paths", m.paths},
              {"paths_by_length", m.paths_by_length},
              {"cycles_by_length", m.cycles_by_length},
              {"patients_in_paths", m.patients_in_paths},
              {"path_match_pct", m.path_match_pct},
              {"queue_by_band", m.queue_by_band},
              {"patients_waiting", m.patients_waiting},
              {"ndads_waiting", m.ndads_waiting},
              {"welfare", welfare_json(m.welfare)}};
}

Metrics metrics_from(const json& j) {
  Metrics m;
  m.patients = j.at("patients").get<double>();
  m.ndads = j.at("ndads").get<double>();
  m.participants = j.at("participants").get<double>();
  m.matches = j.at("matches").get<double>();
  m.match_pct = j.at("match_pct").get<double>();
  m.wait_recipients = j.at("wait_recipients").get<double>();
  m.wait_all = j.at("wait_all").get<double>();
  m.ndads_used = j.at("ndads_used").get<double>();
  m.altruist_usage_pct = j.at("altruist_usage_pct").get<double>();
  m.paths = j.at("paths").get<double>();
  m.paths_by_length = j.at("paths_by_length").get<std::array<double, 4>>();
  m.cycles_by_length = j.at("cycles_by_length").get<std::array<double, 4>>();
  m.patients_in_paths = j.at("patients_in_paths").get<double>();
  m.path_match_pct = j.at("path_match_pct").get<double>();
  m.queue_by_band = j.at("queue_by_band").get<BandVector>();
  m.patients_waiting = j.at("patients_waiting").get<double>();
  m.ndads_waiting = j.at("ndads_waiting").get<double>();
  m.welfare = welfare_from(j.at("welfare"));
  return m;
}

}  // namespace

std::string reports_to_json(const std::vector<RunReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) {
    json reps = json::array();
    for (const auto& s : r.replications)
      reps.push_back({{"index", s.index}, {"seed", s.seed}, {"error", opt_json(s.error)},
                      {"metrics", metrics_json(s.metrics)}});
    arr.push_back({{"label", r.label},
                   {"scheme", r.scheme},
                   {"W", r.W},
                   {"C", r.C},
                   {"P", r.P},
                   {"pair_rate", r.pair_rate},
                   {"ndad_rate", r.ndad_rate},
                   {"periods", r.periods},
                   {"seed", r.seed},
                   {"complete", r.complete},
                   {"mean", metrics_json(r.mean)},
                   {"welfare_of_mean_queue", welfare_json(r.welfare_of_mean_queue)},
                   {"baseline", welfare_json(r.baseline)},
                   {"measures", welfare_json(r.measures)},
                   {"measures_of_mean", welfare_json(r.measures_of_mean)},
                   {"matches_per_altruist", opt_json(r.matches_per_altruist)},
                   {"donors_per_altruist", opt_json(r.donors_per_altruist)},
                   {"warnings", r.warnings},
                   {"replications", reps}});
  }
  return json{{"reports", arr}}.dump(2) + "\n";
}

std::vector<RunReport> reports_from_json(const std::string& text) {
  try {
    const json root = json::parse(text);
    std::vector<RunReport> out;
    for (const json& j : root.at("reports")) {
      RunReport r;
      r.label = j.at("label").get<std::string>();
      r.scheme = j.at("scheme").get<std::string>();
      r.W = j.at("W").get<double>();
      r.C = j.at("C").get<int>();
      r.P = j.at("P").get<int>();
      r.pair_rate = j.at("pair_rate").get<double>();
      r.ndad_rate = j.at("ndad_rate").get<double>();
      r.periods = j.at("periods").get<int>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.complete = j.at("complete").get<bool>();
      r.mean = metrics_from(j.at("mean"));
      r.welfare_of_mean_queue = welfare_from(j.at("welfare_of_mean_queue"));
      r.baseline = welfare_from(j.at("baseline"));
      r.measures = welfare_from(j.at("measures"));
      r.measures_of_mean = welfare_from(j.at("measures_of_mean"));
      r.matches_per_altruist = opt_from<double>(j.at("matches_per_altruist"));
      r.donors_per_altruist = opt_from<double>(j.at("donors_per_altruist"));
      r.warnings = j.at("warnings").get<std::vector<std::string>>();
      for (const json& s : j.at("replications")) {
        ReplicationSummary rs;
        rs.index = s.at("index").get<int>();
        rs.seed = s.at("seed").get<std::uint64_t>();
        rs.error = opt_from<std::string>(s.at("error"));
        rs.metrics = metrics_from(s.at("metrics"));
        r.replications.push_back(std::move(rs));
      }
      out.push_back(std::move(r));
    }
    return out;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed report JSON: ") + e.what());
  }
}

void emit_report(const std::vector<RunReport>& reports, ReportFormat format, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed: " + file.string());
  };
  if (format != ReportFormat::Json)
    for (const auto& name : table_names()) write(dir / (name + ".csv"), table_csv(reports, name));
  if (format != ReportFormat::Csv) write(dir / "report.json", reports_to_json(reports));
}

}  // namespace kex
