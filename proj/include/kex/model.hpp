#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace kex {

// ---------------------------------------------------------------------------
// Blood groups and cPRA bands

/// Declaration order is the serialization order: O < A < B < AB.
enum class BloodType : std::uint8_t { O = 0, A = 1, B = 2, AB = 3 };

inline constexpr std::array<BloodType, 4> kBloodTypes{BloodType::O, BloodType::A, BloodType::B, BloodType::AB};

constexpr std::size_t index_of(BloodType b) noexcept { return static_cast<std::size_t>(b); }
std::string_view to_string(BloodType b) noexcept;
std::optional<BloodType> parse_blood_type(std::string_view text) noexcept;

struct CpraBand {
  int index;     // 1..5
  double lower;
  double upper;
  double alpha;  // population share of the band
};

inline constexpr std::array<CpraBand, 5> kCpraBands{{
    {1, 0.00, 0.00, 0.24},
    {2, 0.01, 0.50, 0.29},
    {3, 0.51, 0.94, 0.24},
    {4, 0.95, 0.96, 0.10},
    {5, 0.97, 1.00, 0.13},
}};

inline constexpr std::size_t kBandCount = kCpraBands.size();

/// Band of a cPRA value: the lowest band whose upper bound is >= cpra. On the
/// band intervals this is closed-interval membership; values in the gaps
/// between bands go to the next band up. Throws for cpra outside [0, 1].
int band_of(double cpra);

const CpraBand& band(int index);

// ---------------------------------------------------------------------------
// Nodes

enum class NodeId : std::uint32_t {};

constexpr std::uint32_t raw(NodeId id) noexcept { return static_cast<std::uint32_t>(id); }

struct PairNode {
  NodeId id{};
  BloodType donor_blood = BloodType::O;
  BloodType patient_blood = BloodType::O;
  double cpra = 0.0;
  int arrival_period = 0;
};

/// Non-directed altruistic donor. Never the head of an arc.
struct NdadNode {
  NodeId id{};
  BloodType donor_blood = BloodType::O;
  int arrival_period = 0;
};

struct PairType {
  BloodType donor_blood = BloodType::O;
  BloodType patient_blood = BloodType::O;
  int band = 1;

  auto operator<=>(const PairType&) const = default;
};

inline constexpr std::size_t kPairTypeCount = 80;

/// Dense index in [0, 80): donor-major, then patient, then band.
constexpr std::size_t index_of(const PairType& t) noexcept {
  return (index_of(t.donor_blood) * 4 + index_of(t.patient_blood)) * kBandCount + static_cast<std::size_t>(t.band - 1);
}

PairType pair_type_from_index(std::size_t index);
PairType pair_type_of(const PairNode& node);

// ---------------------------------------------------------------------------
// Graph

/// Exchange graph for one matching period. Node and arc vectors are kept
/// sorted by id; construction validates the structural invariants and throws
/// std::invalid_argument on violation.
class ExchangeGraph {
 public:
  using Arc = std::pair<NodeId, NodeId>;

  ExchangeGraph() = default;
  ExchangeGraph(std::vector<PairNode> pairs, std::vector<NdadNode> ndads, std::vector<Arc> arcs);

  const std::vector<PairNode>& pairs() const noexcept { return pairs_; }
  const std::vector<NdadNode>& ndads() const noexcept { return ndads_; }
  const std::vector<Arc>& arcs() const noexcept { return arcs_; }
  std::size_t node_count() const noexcept { return pairs_.size() + ndads_.size(); }

  bool contains(NodeId id) const noexcept { return slot_.contains(raw(id)); }
  bool is_pair(NodeId id) const;
  bool is_ndad(NodeId id) const;
  const PairNode& pair(NodeId id) const;
  const NdadNode& ndad(NodeId id) const;
  BloodType donor_blood(NodeId id) const;

  bool has_arc(NodeId tail, NodeId head) const;
  /// Heads reachable from `tail`, ascending by id.
  std::span<const NodeId> successors(NodeId tail) const;

 private:
  struct Slot {
    bool is_pair;
    std::uint32_t index;  // into pairs_ or ndads_
    std::uint32_t out_begin;
    std::uint32_t out_end;
  };

  const Slot& slot(NodeId id) const;

  std::vector<PairNode> pairs_;
  std::vector<NdadNode> ndads_;
  std::vector<Arc> arcs_;            // sorted (tail, head)
  std::vector<NodeId> heads_;        // heads in arc order, sliced per tail
  std::unordered_map<std::uint32_t, Slot> slot_;
};

// ---------------------------------------------------------------------------
// Candidates and selections

enum class CandidateKind : std::uint8_t { Cycle = 0, Chain = 1 };

std::string_view to_string(CandidateKind k) noexcept;

/// One feasible cycle or chain. A cycle lists its pairs starting at the
/// smallest id; a chain lists the altruist first, then the patients in order.
struct Candidate {
  CandidateKind kind = CandidateKind::Cycle;
  std::vector<NodeId> nodes;
  double weight = 0.0;

  std::size_t transplants() const noexcept {
    return kind == CandidateKind::Cycle ? nodes.size() : (nodes.empty() ? 0 : nodes.size() - 1);
  }

  bool operator==(const Candidate&) const = default;
};

/// Canonical candidate order: cycles before chains, then by node sequence.
bool canonical_less(const Candidate& a, const Candidate& b) noexcept;

struct Selection {
  std::vector<Candidate> candidates;
  double objective = 0.0;

  std::size_t transplants() const noexcept;
  bool operator==(const Selection&) const = default;
};

/// Structural check of a single candidate against the graph and caps.
bool is_feasible_candidate(const ExchangeGraph& graph, const Candidate& cand, int max_cycle, int max_chain);

/// True iff every candidate is structurally feasible under the caps and the
/// candidates are pairwise node-disjoint.
bool validate_selection(const ExchangeGraph& graph, const Selection& sel, int max_cycle, int max_chain);

}  // namespace kex
