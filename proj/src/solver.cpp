#include "kex/solver.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "kex/text.hpp"
#include "kex/weights.hpp"

namespace kex {

namespace {

__extension__ typedef __int128 Value;
using Clock = std::chrono::steady_clock;

constexpr Value kNoCeiling = std::numeric_limits<Value>::max() / 4;

std::int64_t to_quanta(double weight) {
  if (!std::isfinite(weight)) throw std::invalid_argument("candidate weight is not finite");
  const double q = std::nearbyint(weight / kScoreQuantum);
  if (std::abs(q) > 0x1p62) throw std::invalid_argument("candidate weight out of range");
  return static_cast<std::int64_t>(q);
}

Selection assemble(const PackingInstance& inst, std::vector<std::size_t> chosen) {
  std::ranges::sort(chosen);
  Selection sel;
  for (std::size_t i : chosen) {
    sel.candidates.push_back(inst.candidates[i]);
    sel.objective += inst.candidates[i].weight;
  }
  return sel;
}

Value gcd128(Value a, Value b) {
  while (b != 0) {
    const Value t = a % b;
    a = b;
    b = t;
  }
  return a;
}

/// Candidates reduced to local node indices and a single exact integer value.
/// Before normalisation value = (quanta / g) * (T + 1) + transplants, where T bounds
/// the transplants of any selection, so comparing values compares (weight,
/// transplants) lexicographically. Values are then divided by their common
/// divisor, which keeps bounds integral in the coarsest unit possible.
struct Packing {
  std::vector<std::size_t> original;   // ascending original indices
  std::vector<std::vector<std::uint32_t>> nodes;
  std::vector<Value> value;
  std::vector<double> approx;
  std::uint32_t node_count = 0;
  double unit = 1.0;   // weight represented by one value unit, ignoring transplants
};

Packing prepare(const PackingInstance& inst) {
  std::unordered_set<std::uint32_t> universe;
  for (NodeId id : inst.universe) universe.insert(raw(id));

  std::unordered_map<std::uint32_t, std::uint32_t> local;
  std::vector<std::int64_t> quanta(inst.candidates.size());
  for (std::size_t i = 0; i < inst.candidates.size(); ++i) {
    const Candidate& c = inst.candidates[i];
    if (c.nodes.empty()) throw std::invalid_argument("candidate " + std::to_string(i) + " has no nodes");
    quanta[i] = to_quanta(c.weight);
    std::unordered_set<std::uint32_t> own;
    for (NodeId id : c.nodes) {
      if (!universe.empty() && !universe.contains(raw(id)))
        throw std::invalid_argument("candidate " + std::to_string(i) + " uses node outside the universe");
      if (!own.insert(raw(id)).second) throw std::invalid_argument("candidate " + std::to_string(i) + " repeats a node");
      local.emplace(raw(id), static_cast<std::uint32_t>(local.size()));
    }
  }

  std::int64_t gq = 0;
  for (std::int64_t q : quanta)
    if (q > 0) gq = std::gcd(gq, q);
  if (gq == 0) gq = 1;

  Packing p;
  p.node_count = static_cast<std::uint32_t>(local.size());
  const Value scale = static_cast<Value>(p.node_count) + 1;
  for (std::size_t i = 0; i < inst.candidates.size(); ++i) {
    if (quanta[i] < 0) continue;
    const Candidate& c = inst.candidates[i];
    std::vector<std::uint32_t> nodes;
    nodes.reserve(c.nodes.size());
    for (NodeId id : c.nodes) nodes.push_back(local.at(raw(id)));
    p.original.push_back(i);
    p.nodes.push_back(std::move(nodes));
    p.value.push_back(static_cast<Value>(quanta[i] / gq) * scale + static_cast<Value>(c.transplants()));
  }
  Value g = 0;
  for (Value v : p.value) g = gcd128(g, v);
  if (g == 0) g = 1;
  for (Value& v : p.value) {
    v /= g;
    p.approx.push_back(static_cast<double>(v));
  }
  p.unit = static_cast<double>(g) * static_cast<double>(gq) / static_cast<double>(scale) * kScoreQuantum;
  return p;
}

// Duals are rounded up onto a grid of 2^-kDualBits value units so that
// bounds can be evaluated exactly in integers.
constexpr int kDualBits = 20;
constexpr Value kDualOne = Value{1} << kDualBits;

Value floor_div(Value a, Value b) {
  const Value q = a / b;
  return (a % b != 0 && a < 0) ? q - 1 : q;
}

class Deadline {
 public:
  explicit Deadline(const SolveOptions& opt) : limit_(Clock::now() + opt.timeout), budget_(opt.node_budget) {}
  void tick(std::uint64_t& counter) {
    ++counter;
    if (counter > budget_) throw SolveFailure("solver node budget exhausted after " + std::to_string(counter) + " nodes");
    check();
  }
  void check() {
    if (++calls_ % 64 == 0 && Clock::now() > limit_) throw SolveFailure("solver timed out");
  }

 private:
  Clock::time_point limit_;
  std::uint64_t budget_;
  std::uint64_t calls_ = 0;
};

/// Splits `members` (ascending indices into p) into node-connected
/// components, each ascending; components are ordered by smallest member.
std::vector<std::vector<std::uint32_t>> components(const Packing& p, std::span<const std::uint32_t> members) {
  std::vector<std::uint32_t> parent(p.node_count);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::uint32_t m : members)
    for (std::size_t i = 1; i < p.nodes[m].size(); ++i) {
      const auto a = find(p.nodes[m][0]);
      const auto b = find(p.nodes[m][i]);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::unordered_map<std::uint32_t, std::size_t> slot;
  std::vector<std::vector<std::uint32_t>> out;
  for (std::uint32_t m : members) {
    const auto root = find(p.nodes[m][0]);
    auto [it, fresh] = slot.emplace(root, out.size());
    if (fresh) out.emplace_back();
    out[it->second].push_back(m);
  }
  return out;
}

struct LpResult {
  std::vector<double> x;         // per column
  std::vector<double> reduced;   // value minus dual cost, per column (approximate)
  std::vector<Value> exact;      // the same on the dual grid, exact
  Value bound = 0;               // Lagrangian bound on the dual grid, exact

  /// Largest value any packing of the columns can reach.
  Value upper() const { return floor_div(bound, kDualOne); }
  /// The same for packings that contain column j.
  Value upper_with(std::size_t j) const { return floor_div(bound - std::max(Value{0}, -exact[j]), kDualOne); }
  double weight_bound() const { return static_cast<double>(bound) / static_cast<double>(kDualOne); }
};

/// LP relaxation of the packing restricted to `cols`, solved by a dense
/// revised simplex over the node rows. Only the duals matter for
/// correctness: the bound returned is the Lagrangian value of the clipped
/// duals, which is a valid upper bound whatever the simplex did.
class LpSolver {
 public:
  LpSolver(const Packing& p, Deadline& deadline) : p_(p), deadline_(deadline), row_of_(p.node_count, -1) {}

  LpResult solve(std::span<const std::uint32_t> cols) {
    rows_.clear();
    for (std::uint32_t c : cols)
      for (std::uint32_t v : p_.nodes[c])
        if (row_of_[v] < 0) {
          row_of_[v] = static_cast<std::int32_t>(rows_.size());
          rows_.push_back(v);
        }
    const std::size_t m = rows_.size();
    const std::size_t n = cols.size();

    double scale = 1.0;
    for (std::uint32_t c : cols) scale = std::max(scale, p_.approx[c]);
    std::vector<double> cost(n);
    for (std::size_t j = 0; j < n; ++j) cost[j] = p_.approx[cols[j]] / scale;

    // Basis: head[i] is a structural column (< n) or slack n + r.
    std::vector<std::size_t> head(m);
    std::vector<char> basic(n + m, 0);
    for (std::size_t r = 0; r < m; ++r) {
      head[r] = n + r;
      basic[n + r] = 1;
    }
    std::vector<double> rhs(m);
    for (std::size_t r = 0; r < m; ++r) rhs[r] = 1.0 + 1e-7 * static_cast<double>((r * 7919) % 1000) / 1000.0;
    std::vector<double> binv(m * m, 0.0);
    for (std::size_t r = 0; r < m; ++r) binv[r * m + r] = 1.0;
    std::vector<double> xb = rhs;
    std::vector<double> y(m), alpha(m);

    auto column_rows = [&](std::size_t j, auto&& fn) {
      if (j < n)
        for (std::uint32_t v : p_.nodes[cols[j]]) fn(static_cast<std::size_t>(row_of_[v]));
      else
        fn(j - n);
    };
    auto refactor = [&] {
      // Gauss-Jordan on B with partial pivoting.
      std::vector<double> bmat(m * m, 0.0);
      for (std::size_t i = 0; i < m; ++i) column_rows(head[i], [&](std::size_t r) { bmat[r * m + i] = 1.0; });
      std::fill(binv.begin(), binv.end(), 0.0);
      for (std::size_t r = 0; r < m; ++r) binv[r * m + r] = 1.0;
      for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < m; ++r)
          if (std::abs(bmat[r * m + col]) > std::abs(bmat[piv * m + col])) piv = r;
        if (std::abs(bmat[piv * m + col]) < 1e-12) return false;
        if (piv != col)
          for (std::size_t k = 0; k < m; ++k) {
            std::swap(bmat[piv * m + k], bmat[col * m + k]);
            std::swap(binv[piv * m + k], binv[col * m + k]);
          }
        const double d = bmat[col * m + col];
        for (std::size_t k = 0; k < m; ++k) {
          bmat[col * m + k] /= d;
          binv[col * m + k] /= d;
        }
        for (std::size_t r = 0; r < m; ++r) {
          if (r == col) continue;
          const double f = bmat[r * m + col];
          if (f == 0.0) continue;
          for (std::size_t k = 0; k < m; ++k) {
            bmat[r * m + k] -= f * bmat[col * m + k];
            binv[r * m + k] -= f * binv[col * m + k];
          }
        }
      }
      for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t r = 0; r < m; ++r) s += binv[i * m + r] * rhs[r];
        xb[i] = std::max(0.0, s);
      }
      return true;
    };

    const std::size_t max_iter = 20 * (m + 10) + n / 4;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
      deadline_.check();
      if (iter > 0 && iter % 64 == 0 && !refactor()) break;
      std::fill(y.begin(), y.end(), 0.0);
      for (std::size_t i = 0; i < m; ++i) {
        const double cb = head[i] < n ? cost[head[i]] : 0.0;
        if (cb == 0.0) continue;
        for (std::size_t r = 0; r < m; ++r) y[r] += cb * binv[i * m + r];
      }
      std::size_t enter = n + m;
      double best = 1e-9;
      for (std::size_t j = 0; j < n; ++j) {
        if (basic[j]) continue;
        double d = cost[j];
        for (std::uint32_t v : p_.nodes[cols[j]]) d -= y[static_cast<std::size_t>(row_of_[v])];
        if (d > best) {
          best = d;
          enter = j;
        }
      }
      for (std::size_t r = 0; r < m; ++r)
        if (!basic[n + r] && -y[r] > best) {
          best = -y[r];
          enter = n + r;
        }
      if (enter == n + m) break;

      std::fill(alpha.begin(), alpha.end(), 0.0);
      column_rows(enter, [&](std::size_t r) {
        for (std::size_t i = 0; i < m; ++i) alpha[i] += binv[i * m + r];
      });
      // Harris ratio test.
      double theta = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i)
        if (alpha[i] > 1e-9) theta = std::min(theta, (xb[i] + 1e-9) / alpha[i]);
      if (!std::isfinite(theta)) break;
      std::size_t leave = m;
      for (std::size_t i = 0; i < m; ++i)
        if (alpha[i] > 1e-9 && xb[i] / alpha[i] <= theta && (leave == m || alpha[i] > alpha[leave])) leave = i;
      if (leave == m) break;

      const double step = std::max(0.0, xb[leave] / alpha[leave]);
      for (std::size_t i = 0; i < m; ++i) xb[i] = std::max(0.0, xb[i] - step * alpha[i]);
      xb[leave] = step;
      const double piv = alpha[leave];
      double* prow = &binv[leave * m];
      for (std::size_t k = 0; k < m; ++k) prow[k] /= piv;
      for (std::size_t i = 0; i < m; ++i) {
        if (i == leave || alpha[i] == 0.0) continue;
        const double f = alpha[i];
        double* row = &binv[i * m];
        for (std::size_t k = 0; k < m; ++k) row[k] -= f * prow[k];
      }
      basic[head[leave]] = 0;
      head[leave] = enter;
      basic[enter] = 1;
    }

    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double cb = head[i] < n ? cost[head[i]] : 0.0;
      if (cb == 0.0) continue;
      for (std::size_t r = 0; r < m; ++r) y[r] += cb * binv[i * m + r];
    }

    LpResult res;
    res.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      if (head[i] < n) res.x[head[i]] = std::clamp(xb[i], 0.0, 1.0);
    // Any non-negative duals give a valid bound, so rounding them up onto
    // the grid costs nothing in correctness.
    res.reduced.resize(n);
    res.exact.resize(n);
    std::vector<Value> yq(m);
    for (std::size_t r = 0; r < m; ++r) {
      const double v = std::ceil(std::max(0.0, y[r]) * scale * static_cast<double>(kDualOne));
      yq[r] = static_cast<Value>(std::min(v, 0x1p100));
      y[r] = std::max(0.0, y[r]) * scale;
      res.bound += yq[r];
    }
    for (std::size_t j = 0; j < n; ++j) {
      double d = p_.approx[cols[j]];
      Value e = p_.value[cols[j]] * kDualOne;
      for (std::uint32_t v : p_.nodes[cols[j]]) {
        d -= y[static_cast<std::size_t>(row_of_[v])];
        e -= yq[static_cast<std::size_t>(row_of_[v])];
      }
      res.reduced[j] = d;
      res.exact[j] = e;
      if (e > 0) res.bound += e;
    }
    for (std::uint32_t v : rows_) row_of_[v] = -1;
    return res;
  }

 private:
  const Packing& p_;
  Deadline& deadline_;
  std::vector<std::int32_t> row_of_;
  std::vector<std::uint32_t> rows_;
};

struct Found {
  std::vector<std::uint32_t> cols;
  Value value = 0;
};

/// LP-based branch and bound. Branching picks a node and tries each
/// candidate covering it, then leaving it uncovered.
class Search {
 public:
  Search(const Packing& p, Deadline& deadline, std::uint64_t& nodes)
      : p_(p), deadline_(deadline), nodes_(nodes), lp_(p, deadline), mark_(p.node_count, 0) {}

  LpResult relax(std::span<const std::uint32_t> cols) { return lp_.solve(cols); }

  /// Best packing of `cols` with value > floor, or nothing. Stops as soon as
  /// a packing reaches `ceiling`.
  std::optional<Found> improve(const std::vector<std::uint32_t>& cols, Value floor, Value ceiling, int depth = 0) {
    deadline_.tick(nodes_);
    if (cols.empty()) return floor < 0 ? std::optional<Found>(Found{}) : std::nullopt;
    const LpResult lp = lp_.solve(cols);
    const Value upper = lp.upper();
    if (upper <= floor) return std::nullopt;
    ceiling = std::min(ceiling, upper);

    std::optional<Found> best;
    Value lower = floor;
    {
      Found h = round(cols, lp);
      if (depth == 0 && h.value < ceiling) {
        Found d = dive(cols, lp);
        if (d.value > h.value) h = std::move(d);
      }
      if (h.value > lower) {
        lower = h.value;
        best = std::move(h);
        if (lower >= ceiling) return best;
      }
    }

    // Reduced-cost fixing against the current lower bound.
    std::vector<std::uint32_t> kept;
    std::vector<double> kx;
    for (std::size_t j = 0; j < cols.size(); ++j)
      if (lp.upper_with(j) > lower) {
        kept.push_back(cols[j]);
        kx.push_back(lp.x[j]);
      }
    if (kept.empty()) return best;

    // Branch on the node whose LP coverage is most fractional.
    std::unordered_map<std::uint32_t, double> cover;
    std::unordered_map<std::uint32_t, std::uint32_t> degree;
    for (std::size_t j = 0; j < kept.size(); ++j)
      for (std::uint32_t v : p_.nodes[kept[j]]) {
        cover[v] += kx[j];
        ++degree[v];
      }
    std::uint32_t branch_node = p_.nodes[kept.front()].front();
    double best_score = -1.0;
    for (std::size_t j = 0; j < kept.size(); ++j)
      for (std::uint32_t v : p_.nodes[kept[j]]) {
        const double s = std::min(cover[v], 1.0);
        const double score = std::min(s, 1.0 - s) * 1e6 + 1.0 / (1.0 + degree[v]);
        if (score > best_score || (score == best_score && v < branch_node)) {
          best_score = score;
          branch_node = v;
        }
      }

    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < kept.size(); ++j)
      if (std::ranges::find(p_.nodes[kept[j]], branch_node) != p_.nodes[kept[j]].end()) order.push_back(j);
    std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return kx[a] > kx[b]; });

    for (std::size_t j : order) {
      const std::uint32_t c = kept[j];
      const Value v = p_.value[c];
      for (std::uint32_t u : p_.nodes[c]) mark_[u] = 1;
      std::vector<std::uint32_t> sub;
      for (std::uint32_t k : kept)
        if (k != c && disjoint(k)) sub.push_back(k);
      for (std::uint32_t u : p_.nodes[c]) mark_[u] = 0;
      auto r = improve(sub, lower - v, ceiling - v, depth + 1);
      if (r) {
        r->cols.push_back(c);
        r->value += v;
        lower = r->value;
        best = std::move(r);
        if (lower >= ceiling) return best;
      }
    }
    std::vector<std::uint32_t> sub;
    for (std::uint32_t k : kept)
      if (std::ranges::find(p_.nodes[k], branch_node) == p_.nodes[k].end()) sub.push_back(k);
    if (auto r = improve(sub, lower, ceiling, depth + 1)) best = std::move(r);
    return best;
  }

 private:
  bool disjoint(std::uint32_t c) const {
    for (std::uint32_t u : p_.nodes[c])
      if (mark_[u]) return false;
    return true;
  }

  /// LP diving: commit to every column the LP sets to one (or the largest
  /// one when none is), drop what conflicts, re-solve and repeat.
  Found dive(const std::vector<std::uint32_t>& cols, LpResult lp) {
    Found f;
    std::vector<std::uint32_t> cur = cols;
    while (!cur.empty()) {
      std::vector<std::size_t> order(cur.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return lp.x[a] > lp.x[b]; });
      std::size_t taken = 0;
      for (std::size_t j : order) {
        if (taken > 0 && lp.x[j] < 1.0 - 1e-6) break;
        if (!disjoint(cur[j])) continue;
        for (std::uint32_t u : p_.nodes[cur[j]]) mark_[u] = 1;
        f.cols.push_back(cur[j]);
        f.value += p_.value[cur[j]];
        ++taken;
      }
      std::vector<std::uint32_t> next;
      for (std::uint32_t c : cur)
        if (disjoint(c)) next.push_back(c);
      cur = std::move(next);
      if (!cur.empty()) lp = lp_.solve(cur);
    }
    for (std::uint32_t c : f.cols)
      for (std::uint32_t u : p_.nodes[c]) mark_[u] = 0;
    return f;
  }

  /// Greedy packing in order of LP value, then reduced cost, then index.
  Found round(const std::vector<std::uint32_t>& cols, const LpResult& lp) {
    std::vector<std::size_t> order(cols.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) {
      if (lp.x[a] != lp.x[b]) return lp.x[a] > lp.x[b];
      return lp.reduced[a] > lp.reduced[b];
    });
    Found f;
    for (std::size_t j : order) {
      if (!disjoint(cols[j])) continue;
      for (std::uint32_t u : p_.nodes[cols[j]]) mark_[u] = 1;
      f.cols.push_back(cols[j]);
      f.value += p_.value[cols[j]];
    }
    for (std::uint32_t c : f.cols)
      for (std::uint32_t u : p_.nodes[c]) mark_[u] = 0;
    return f;
  }

  const Packing& p_;
  Deadline& deadline_;
  std::uint64_t& nodes_;
  LpSolver lp_;
  std::vector<char> mark_;
};

/// Lexicographically smallest optimal packing of one component, given any
/// optimal packing `witness` of value `target`. Candidates are decided in
/// index order: each is taken if some optimal packing extends the choices so
/// far with it, which the witness answers for free whenever it contains it.
std::vector<std::uint32_t> lex_smallest(const Packing& p, Search& search, const std::vector<std::uint32_t>& comp,
                                        std::vector<std::uint32_t> witness, Value target) {
  std::vector<char> covered(p.node_count, 0);
  std::unordered_set<std::uint32_t> in_witness(witness.begin(), witness.end());
  std::vector<std::uint32_t> chosen;
  Value have = 0;

  auto free = [&](std::uint32_t c) {
    for (std::uint32_t u : p.nodes[c])
      if (covered[u]) return false;
    return true;
  };

  // Duals of the LP over the still-open candidates give a quick rejection
  // test; they are refreshed after every acceptance.
  std::unordered_map<std::uint32_t, Value> reach;   // bound with the candidate taken
  auto refresh = [&](std::size_t from) {
    std::vector<std::uint32_t> open;
    for (std::size_t k = from; k < comp.size(); ++k)
      if (free(comp[k])) open.push_back(comp[k]);
    const LpResult lp = search.relax(open);
    reach.clear();
    for (std::size_t j = 0; j < open.size(); ++j) reach[open[j]] = lp.upper_with(j);
  };
  auto accept = [&](std::uint32_t c) {
    chosen.push_back(c);
    have += p.value[c];
    for (std::uint32_t u : p.nodes[c]) covered[u] = 1;
  };

  refresh(0);
  for (std::size_t k = 0; k < comp.size(); ++k) {
    const std::uint32_t c = comp[k];
    if (!free(c)) continue;
    if (in_witness.contains(c)) {
      accept(c);
      refresh(k + 1);
      continue;
    }
    if (have + reach.at(c) < target) continue;
    const Value need = target - have - p.value[c];
    std::vector<std::uint32_t> rest;
    for (std::uint32_t u : p.nodes[c]) covered[u] = 1;
    for (std::size_t j = k + 1; j < comp.size(); ++j)
      if (free(comp[j])) rest.push_back(comp[j]);
    for (std::uint32_t u : p.nodes[c]) covered[u] = 0;
    auto r = search.improve(rest, need - 1, need);
    if (!r) continue;
    accept(c);
    witness = std::move(r->cols);
    in_witness.clear();
    in_witness.insert(witness.begin(), witness.end());
    refresh(k + 1);
  }
  if (have != target) throw SolveFailure("internal error: tie-break reconstruction lost the optimum");
  return chosen;
}

}  // namespace

Selection solve(const PackingInstance& inst, const SolveOptions& options, SolveStats* stats) {
  const Packing p = prepare(inst);
  Deadline deadline(options);
  SolveStats local_stats;
  local_stats.candidates_in = inst.candidates.size();
  Search search(p, deadline, local_stats.search_nodes);

  std::vector<std::uint32_t> all(p.original.size());
  std::iota(all.begin(), all.end(), 0u);

  std::vector<std::size_t> chosen;
  for (const auto& comp : components(p, all)) {
    ++local_stats.components;
    const LpResult root = search.relax(comp);
    local_stats.root_bound += root.weight_bound();
    auto best = search.improve(comp, -1, kNoCeiling);
    if (!best) throw SolveFailure("internal error: no packing found");
    std::vector<std::uint32_t> kept;
    for (std::size_t j = 0; j < comp.size(); ++j)
      if (root.upper_with(j) >= best->value) kept.push_back(comp[j]);
    local_stats.candidates_after_fixing += kept.size();
    const std::uint64_t before = local_stats.search_nodes;
    const auto settled = lex_smallest(p, search, kept, best->cols, best->value);
    local_stats.tie_break_nodes += local_stats.search_nodes - before;
    for (std::uint32_t k : settled) chosen.push_back(p.original[k]);
  }

  if (stats) {
    local_stats.root_bound *= p.unit;
    *stats = local_stats;
  }
  return assemble(inst, std::move(chosen));
}

// ---------------------------------------------------------------------------

namespace {

class Exhaustive {
 public:
  explicit Exhaustive(const PackingInstance& inst) : inst_(inst) {
    for (const Candidate& c : inst.candidates) {
      quanta_.push_back(to_quanta(c.weight));
      std::vector<std::uint32_t> ids;
      for (NodeId id : c.nodes) ids.push_back(raw(id));
      ids_.push_back(std::move(ids));
    }
  }

  std::vector<std::size_t> run() {
    visit(0);
    return best_;
  }

 private:
  bool better(std::int64_t w, std::size_t t) const {
    return !have_ || w > best_w_ || (w == best_w_ && t > best_t_);
  }

  // Include-first recursion in index order enumerates every packing, and
  // among equal (weight, transplants) the first one seen is lexicographically
  // smallest, so only strict improvements replace the incumbent.
  void visit(std::size_t i) {
    if (i == inst_.candidates.size()) {
      if (better(w_, t_)) {
        have_ = true;
        best_w_ = w_;
        best_t_ = t_;
        best_ = current_;
      }
      return;
    }
    bool free = true;
    for (std::uint32_t id : ids_[i])
      if (used_.contains(id)) free = false;
    if (free) {
      for (std::uint32_t id : ids_[i]) used_.insert(id);
      current_.push_back(i);
      w_ += quanta_[i];
      t_ += inst_.candidates[i].transplants();
      visit(i + 1);
      t_ -= inst_.candidates[i].transplants();
      w_ -= quanta_[i];
      current_.pop_back();
      for (std::uint32_t id : ids_[i]) used_.erase(id);
    }
    visit(i + 1);
  }

  const PackingInstance& inst_;
  std::vector<std::int64_t> quanta_;
  std::vector<std::vector<std::uint32_t>> ids_;
  std::unordered_set<std::uint32_t> used_;
  std::vector<std::size_t> current_;
  std::int64_t w_ = 0;
  std::size_t t_ = 0;
  bool have_ = false;
  std::int64_t best_w_ = 0;
  std::size_t best_t_ = 0;
  std::vector<std::size_t> best_;
};

}  // namespace

Selection brute_force(const PackingInstance& inst) {
  if (inst.candidates.size() > kBruteForceCandidateLimit)
    throw std::invalid_argument("brute force refuses " + std::to_string(inst.candidates.size()) +
                                " candidates (limit " + std::to_string(kBruteForceCandidateLimit) + ")");
  std::unordered_set<std::uint32_t> nodes;
  for (const Candidate& c : inst.candidates)
    for (NodeId id : c.nodes) nodes.insert(raw(id));
  if (nodes.size() > kBruteForceNodeLimit)
    throw std::invalid_argument("brute force refuses " + std::to_string(nodes.size()) + " nodes (limit " +
                                std::to_string(kBruteForceNodeLimit) + ")");
  return assemble(inst, Exhaustive(inst).run());
}

// ---------------------------------------------------------------------------

PackingInstance InstanceFile::packing() const {
  PackingInstance inst;
  inst.candidates = candidates;
  for (const PairNode& p : pairs) inst.universe.push_back(p.id);
  for (const NdadNode& n : ndads) inst.universe.push_back(n.id);
  return inst;
}

bool InstanceFile::operator==(const InstanceFile& o) const {
  auto same_pair = [](const PairNode& a, const PairNode& b) {
    return a.id == b.id && a.donor_blood == b.donor_blood && a.patient_blood == b.patient_blood && a.cpra == b.cpra;
  };
  auto same_ndad = [](const NdadNode& a, const NdadNode& b) { return a.id == b.id && a.donor_blood == b.donor_blood; };
  return std::ranges::equal(pairs, o.pairs, same_pair) && std::ranges::equal(ndads, o.ndads, same_ndad) &&
         candidates == o.candidates;
}

void write_instance(std::ostream& out, const InstanceFile& inst) {
  out << inst.pairs.size() << ' ' << inst.ndads.size() << ' ' << inst.candidates.size() << '\n';
  for (const PairNode& p : inst.pairs)
    out << raw(p.id) << " pair " << to_string(p.donor_blood) << ' ' << to_string(p.patient_blood) << ' '
        << format_exact(p.cpra) << '\n';
  for (const NdadNode& n : inst.ndads) out << raw(n.id) << " ndad " << to_string(n.donor_blood) << " - -\n";
  for (const Candidate& c : inst.candidates) {
    out << to_string(c.kind) << ' ' << format_exact(c.weight);
    for (NodeId id : c.nodes) out << ' ' << raw(id);
    out << '\n';
  }
}

InstanceFile read_instance(std::istream& in) {
  std::string line;
  int line_no = 0;
  auto next = [&]() -> std::vector<std::string_view> {
    while (std::getline(in, line)) {
      ++line_no;
      auto tok = split_ws(line);
      if (!tok.empty()) return tok;
    }
    throw std::invalid_argument("instance file truncated after line " + std::to_string(line_no));
  };
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument("instance file line " + std::to_string(line_no) + ": " + what);
  };
  auto blood = [&](std::string_view t) {
    auto b = parse_blood_type(t);
    if (!b) fail("bad blood type '" + std::string(t) + "'");
    return *b;
  };
  auto node_id = [&](std::string_view t) {
    const long long v = parse_int(t);
    if (v < 0 || v > std::numeric_limits<std::uint32_t>::max()) fail("bad node id");
    return NodeId{static_cast<std::uint32_t>(v)};
  };

  InstanceFile inst;
  std::unordered_set<std::uint32_t> declared;
  auto header = next();
  if (header.size() != 3) fail("expected header 'N M K'");
  const long long n = parse_int(header[0]), m = parse_int(header[1]), k = parse_int(header[2]);
  if (n < 0 || m < 0 || k < 0) fail("negative count in header");
  for (long long i = 0; i < n; ++i) {
    auto t = next();
    if (t.size() != 5 || t[1] != "pair") fail("expected '<id> pair <donor> <patient> <cpra>'");
    inst.pairs.push_back(PairNode{node_id(t[0]), blood(t[2]), blood(t[3]), parse_double(t[4]), 0});
    if (!declared.insert(raw(inst.pairs.back().id)).second) fail("duplicate node id");
  }
  for (long long i = 0; i < m; ++i) {
    auto t = next();
    if (t.size() != 5 || t[1] != "ndad" || t[3] != "-" || t[4] != "-") fail("expected '<id> ndad <donor> - -'");
    inst.ndads.push_back(NdadNode{node_id(t[0]), blood(t[2]), 0});
    if (!declared.insert(raw(inst.ndads.back().id)).second) fail("duplicate node id");
  }
  for (long long i = 0; i < k; ++i) {
    auto t = next();
    if (t.size() < 3) fail("expected '<kind> <weight> <id>...'");
    Candidate c;
    if (t[0] == "cycle") c.kind = CandidateKind::Cycle;
    else if (t[0] == "chain") c.kind = CandidateKind::Chain;
    else fail("unknown candidate kind '" + std::string(t[0]) + "'");
    c.weight = parse_double(t[1]);
    for (std::size_t j = 2; j < t.size(); ++j) {
      c.nodes.push_back(node_id(t[j]));
      if (!declared.contains(raw(c.nodes.back()))) fail("candidate names an undeclared node");
    }
    inst.candidates.push_back(std::move(c));
  }
  return inst;
}

}  // namespace kex
