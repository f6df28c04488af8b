#include "kex/weights.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "kex/text.hpp"

namespace kex {

WeightTable WeightTable::ones(double ndad_penalty) {
  WeightTable t;
  t.pair_weight.fill(1.0);
  t.ndad_penalty = ndad_penalty;
  return t;
}

std::string Scheme::name() const {
  struct Namer {
    std::string operator()(const Myopic&) const { return "myopic"; }
    std::string operator()(const KpdPoints&) const { return "kpd"; }
    std::string operator()(const Learned&) const { return "learned"; }
  };
  return std::visit(Namer{}, rule);
}

double arc_weight(const Scheme& scheme, BloodType donor_blood, const PairNode& patient) {
  struct Scorer {
    BloodType donor;
    const PairNode& patient;
    double operator()(const Myopic&) const { return 1.0; }
    double operator()(const Learned& l) const { return l.table[pair_type_of(patient)]; }
    double operator()(const KpdPoints&) const {
      namespace kp = kpd_points;
      double points = kp::kAnyTransplant;
      if (patient.cpra >= kp::kHighlySensitizedCpra) points += kp::kHighlySensitized;
      if (donor == patient.patient_blood)
        points += donor == BloodType::O ? kp::kAboMatchOtoO : kp::kAboMatchSame;
      return points;
    }
  };
  return std::visit(Scorer{donor_blood, patient}, scheme.rule);
}

double quantize_score(double score) noexcept { return std::nearbyint(score / kScoreQuantum) * kScoreQuantum; }

double candidate_weight(const Scheme& scheme, const ExchangeGraph& graph, const Candidate& cand) {
  const auto& nodes = cand.nodes;
  double total = 0.0;
  if (cand.kind == CandidateKind::Cycle) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const NodeId donor = nodes[i];
      const NodeId patient = nodes[(i + 1) % nodes.size()];
      total += arc_weight(scheme, graph.donor_blood(donor), graph.pair(patient));
    }
  } else {
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
      total += arc_weight(scheme, graph.donor_blood(nodes[i]), graph.pair(nodes[i + 1]));
    total += scheme.ndad_penalty;
  }
  return quantize_score(total);
}

void write_weight_table(std::ostream& out, const WeightTable& table) {
  for (std::size_t i = 0; i < kPairTypeCount; ++i) {
    const PairType t = pair_type_from_index(i);
    out << to_string(t.donor_blood) << ' ' << to_string(t.patient_blood) << ' ' << t.band << ' '
        << format_exact(table.pair_weight[i]) << '\n';
  }
  out << "W " << format_exact(table.ndad_penalty) << '\n';
}

WeightTable read_weight_table(std::istream& in) {
  WeightTable table;
  std::array<bool, kPairTypeCount> seen{};
  bool have_w = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty() || tok.front().starts_with('#')) continue;
    const std::string where = "weight file line " + std::to_string(line_no) + ": ";
    if (tok.front() == "W") {
      if (tok.size() != 2) throw std::invalid_argument(where + "expected 'W <value>'");
      table.ndad_penalty = parse_double(tok[1]);
      have_w = true;
      continue;
    }
    if (tok.size() != 4) throw std::invalid_argument(where + "expected 'donor patient band weight'");
    const auto donor = parse_blood_type(tok[0]);
    const auto patient = parse_blood_type(tok[1]);
    const long long b = parse_int(tok[2]);
    if (!donor || !patient || b < 1 || b > static_cast<long long>(kBandCount))
      throw std::invalid_argument(where + "bad pair type");
    const std::size_t idx = index_of(PairType{*donor, *patient, static_cast<int>(b)});
    if (seen[idx]) throw std::invalid_argument(where + "duplicate pair type");
    seen[idx] = true;
    table.pair_weight[idx] = parse_double(tok[3]);
  }
  for (bool s : seen)
    if (!s) throw std::invalid_argument("weight file is missing pair types");
  if (!have_w) throw std::invalid_argument("weight file is missing the 'W' line");
  return table;
}

void save_weight_table(const std::string& path, const WeightTable& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_weight_table(out, table);
  if (!out) throw std::runtime_error("write failed: " + path);
}

WeightTable load_weight_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_weight_table(in);
}

}  // namespace kex
