#include "bratteli/soe.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "bratteli/error.hpp"
#include "bratteli/snf.hpp"

namespace bratteli {

namespace {

constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();

CountMatrix root_column(const OrderedBratteliDiagram& d) { return incidence_matrix(d, 1); }

std::optional<IntertwiningFailure> compare(const CountMatrix& actual, const CountMatrix& expected,
                                           std::size_t level, const std::string& identity) {
  for (std::size_t i = 0; i < expected.rows(); ++i)
    for (std::size_t j = 0; j < expected.cols(); ++j)
      if (actual(i, j) != expected(i, j)) return IntertwiningFailure{level, identity, i, j, expected(i, j), actual(i, j)};
  return std::nullopt;
}

void require_shape(const CountMatrix& m, std::size_t rows, std::size_t cols, const std::string& name) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream os;
    os << name << " has shape " << m.rows() << "x" << m.cols() << ", expected " << rows << "x" << cols;
    throw Error(ErrorCode::intertwining_invalid, os.str());
  }
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      if (m(i, j) < 0) throw Error(ErrorCode::intertwining_invalid, name + " has a negative entry");
}

std::vector<std::size_t> vertices_of(const OrderedBratteliDiagram& d, const FinitePath& p) {
  std::vector<std::size_t> out;
  for (std::size_t j = 1; j <= p.depth(); ++j) out.push_back(d.edge(j, p.edge(j)).range);
  return out;
}

bool has_edge(const OrderedBratteliDiagram& d, std::size_t level, std::size_t from, std::size_t to) {
  for (std::size_t i : d.outgoing(level - 1, from))
    if (d.edge(level, i).range == to) return true;
  return false;
}

}  // namespace

Intertwining constant_intertwining(const CountMatrix& p, const CountMatrix& q, std::size_t levels) {
  if (levels < 1) throw Error(ErrorCode::invalid_argument, "intertwining needs at least one level");
  return {std::vector<CountMatrix>(levels, p), std::vector<CountMatrix>(levels - 1, q)};
}

std::string IntertwiningFailure::message() const {
  std::ostringstream os;
  os << "level " << level << ": " << identity << " fails at entry (" << row << "," << col << "): product is "
     << actual << ", incidence is " << expected;
  return os.str();
}

std::optional<IntertwiningFailure> check_intertwining(const OrderedBratteliDiagram& b1,
                                                      const OrderedBratteliDiagram& b2, const Intertwining& w) {
  const std::size_t levels = w.p.size();
  if (levels == 0) throw Error(ErrorCode::intertwining_invalid, "intertwining has no P matrices");
  if (w.q.size() + 1 != levels && w.q.size() != levels)
    throw Error(ErrorCode::intertwining_invalid, "need as many Q matrices as P matrices, or one fewer");
  if (b2.num_levels() < levels || b1.num_levels() < w.q.size() + 1 || b1.num_levels() < levels)
    throw Error(ErrorCode::intertwining_invalid, "intertwining is longer than the diagrams");
  for (std::size_t n = 1; n <= levels; ++n)
    require_shape(w.p[n - 1], b2.vertex_count(n), b1.vertex_count(n), "P_" + std::to_string(n));
  for (std::size_t n = 1; n <= w.q.size(); ++n)
    require_shape(w.q[n - 1], b1.vertex_count(n + 1), b2.vertex_count(n), "Q_" + std::to_string(n));

  if (auto f = compare(multiply_checked(w.p[0], root_column(b1)), root_column(b2), 1, "P1*M1_1=M2_1")) return f;
  for (std::size_t n = 1; n <= w.q.size(); ++n) {
    if (auto f = compare(multiply_checked(w.q[n - 1], w.p[n - 1]), incidence_matrix(b1, n + 1), n, "Q*P=M1"))
      return f;
    if (n + 1 <= levels)
      if (auto f = compare(multiply_checked(w.p[n], w.q[n - 1]), incidence_matrix(b2, n + 1), n, "P*Q=M2"))
        return f;
  }
  return std::nullopt;
}

InterleavedDiagram assemble_interleaved(const OrderedBratteliDiagram& b1, const OrderedBratteliDiagram& b2,
                                        const Intertwining& w) {
  b1.require_valid();
  b2.require_valid();
  // Level 1 is B1's own root edges; P_n fills level 2n and Q_n level 2n+1.
  const std::size_t levels = 1 + w.p.size() + w.q.size();
  if (w.p.empty() || (w.q.size() + 1 != w.p.size() && w.q.size() != w.p.size()))
    throw Error(ErrorCode::intertwining_invalid, "intertwining needs |Q| = |P| - 1 or |Q| = |P|");
  if ((levels + 1) / 2 > b1.num_levels() || levels / 2 > b2.num_levels())
    throw Error(ErrorCode::intertwining_invalid, "intertwining does not fit the diagrams");
  std::vector<std::size_t> counts{1};
  std::vector<std::vector<Edge>> edges(levels);
  for (std::size_t m = 1; m <= levels; ++m) {
    const bool odd = m % 2 == 1;
    const std::size_t n = (m + 1) / 2;
    counts.push_back(odd ? b1.vertex_count(n) : b2.vertex_count(n));
    auto& level = edges[m - 1];
    if (m == 1) {
      level.assign(b1.edges(1).begin(), b1.edges(1).end());
    } else if (!odd) {
      const CountMatrix& p = w.p.at(n - 1);
      require_shape(p, b2.vertex_count(n), b1.vertex_count(n), "P_" + std::to_string(n));
      for (std::size_t y = 0; y < p.rows(); ++y)
        for (std::size_t x = 0; x < p.cols(); ++x)
          for (std::int64_t c = 0; c < p(y, x); ++c) level.push_back({x, y});
    } else {
      const CountMatrix& q = w.q.at(n - 2);
      require_shape(q, b1.vertex_count(n), b2.vertex_count(n - 1), "Q_" + std::to_string(n - 1));
      for (std::size_t x = 0; x < q.rows(); ++x)
        for (std::size_t y = 0; y < q.cols(); ++y)
          for (std::int64_t c = 0; c < q(x, y); ++c) level.push_back({y, x});
    }
  }
  OrderedBratteliDiagram d(std::move(counts), std::move(edges));
  return {b1, b2, w, std::move(d)};
}

InterleavedDiagram build_interleaved(const OrderedBratteliDiagram& b1, const OrderedBratteliDiagram& b2,
                                     const Intertwining& w) {
  if (auto f = check_intertwining(b1, b2, w)) throw Error(ErrorCode::intertwining_invalid, f->message());
  InterleavedDiagram b = assemble_interleaved(b1, b2, w);
  b.diagram.require_valid();
  // Telescoping to odd (even) levels must reproduce B1 (B2) exactly.
  const auto& d = b.diagram;
  if (!(incidence_matrix(d, 1) == incidence_matrix(b1, 1)))
    throw Error(ErrorCode::intertwining_invalid, "level 1 of the interleaved diagram differs from B1");
  for (std::size_t m = 2; m <= d.num_levels(); ++m) {
    CountMatrix two = multiply_checked(incidence_matrix(d, m), incidence_matrix(d, m - 1));
    const bool odd = m % 2 == 1;
    const CountMatrix expected = odd ? incidence_matrix(b1, (m + 1) / 2) : incidence_matrix(b2, m / 2);
    if (!(two == expected))
      throw Error(ErrorCode::intertwining_invalid, "interleaved levels " + std::to_string(m - 1) + "-" +
                                                       std::to_string(m) + " do not telescope to " +
                                                       (odd ? "B1" : "B2"));
  }
  return b;
}

namespace {

std::vector<std::size_t> step_cuts(std::size_t first, std::size_t limit) {
  std::vector<std::size_t> cuts;
  for (std::size_t c = first; c <= limit; c += 3) cuts.push_back(c);
  return cuts;
}

OrderedBratteliDiagram telescope_steps(const OrderedBratteliDiagram& d, std::size_t first) {
  std::vector<std::size_t> cuts = step_cuts(first, d.num_levels());
  if (cuts.empty()) return OrderedBratteliDiagram();
  return telescope(truncate(d, cuts.back()), cuts).diagram;
}

}  // namespace

InterleavedReport check_interleaved_properties(const InterleavedDiagram& b) {
  InterleavedReport report;
  const OrderedBratteliDiagram bt = telescope_steps(b.diagram, 1);
  const OrderedBratteliDiagram b1t = telescope_steps(b.b1, 1);
  const OrderedBratteliDiagram b2t = telescope_steps(b.b2, 2);
  const std::size_t top = bt.num_levels();

  auto extremal = [&](std::size_t j, Extremity kind) -> std::optional<std::vector<bool>> {
    if (j == 0 || j > top) return std::nullopt;
    const OrderedBratteliDiagram& side = j % 2 == 1 ? b1t : b2t;
    const std::size_t m = (j + 1) / 2;
    if (m >= side.num_levels()) return std::nullopt;
    return extremal_sources(side, m, kind);
  };

  for (Extremity kind : {Extremity::min, Extremity::max}) {
    for (std::size_t j = 1; j <= top; ++j) {
      auto here = extremal(j, kind);
      if (!here) continue;
      if (auto next = extremal(j + 1, kind)) {
        ++report.levels_checked;
        for (std::size_t v = 0; v < here->size(); ++v) {
          if (!(*here)[v]) continue;
          std::set<std::size_t> hits;
          for (std::size_t i : bt.outgoing(j, v)) {
            std::size_t w = bt.edge(j + 1, i).range;
            if ((*next)[w]) hits.insert(w);
          }
          if (hits.empty()) report.failures.push_back({"i", kind, j, v, 0});
        }
      }
      if (j >= 2)
        if (auto prev = extremal(j - 1, kind)) {
          ++report.levels_checked;
          for (std::size_t v = 0; v < here->size(); ++v) {
            if (!(*here)[v]) continue;
            std::set<std::size_t> hits;
            auto [lo, hi] = bt.incoming(j, v);
            for (std::size_t i = lo; i < hi; ++i) {
              std::size_t u = bt.edge(j, i).source;
              if ((*prev)[u]) hits.insert(u);
            }
            if (hits.size() != 1) report.failures.push_back({"ii", kind, j, v, hits.size()});
          }
        }
    }
  }
  return report;
}

namespace {

std::vector<PairedPath> pair_kind(const InterleavedDiagram& b, std::size_t depth, Extremity kind) {
  const auto& d = b.diagram;
  PathSpace s1(b.b1), s2(b.b2);
  ExtremalPathSet e1 = s1.extremal_paths(depth, kind);
  ExtremalPathSet e2 = s2.extremal_paths(depth, kind);
  const std::string word(to_string(kind));
  if (!e1.stabilized || !e2.stabilized)
    throw Error(ErrorCode::unstabilized,
                word + " paths of " + (!e1.stabilized ? "B1" : "B2") + " have not stabilized at depth " +
                    std::to_string(depth));
  if (e1.paths.size() != e2.paths.size())
    throw Error(ErrorCode::pairing_failed, "B1 has " + std::to_string(e1.paths.size()) + " " + word +
                                               " paths, B2 has " + std::to_string(e2.paths.size()));
  std::vector<std::vector<std::size_t>> v1, v2;
  for (const auto& p : e1.paths) v1.push_back(vertices_of(b.b1, p));
  for (const auto& q : e2.paths) v2.push_back(vertices_of(b.b2, q));
  auto level_set = [&](const std::vector<std::vector<std::size_t>>& vs, std::size_t n) {
    std::set<std::size_t> out;
    for (const auto& v : vs) out.insert(v[n - 1]);
    return out;
  };

  // From each B2 path, the unique B1-extremal predecessor at every level.
  std::vector<std::size_t> q_to_p(e2.paths.size(), kUnset);
  for (std::size_t qi = 0; qi < e2.paths.size(); ++qi) {
    std::vector<std::size_t> xs;
    for (std::size_t n = 1; n <= depth; ++n) {
      std::vector<std::size_t> found;
      for (std::size_t x : level_set(v1, n))
        if (has_edge(d, 2 * n, x, v2[qi][n - 1])) found.push_back(x);
      if (found.size() != 1)
        throw Error(ErrorCode::pairing_failed, "B2 " + word + " path " + e2.paths[qi].to_string() + " has " +
                                                   std::to_string(found.size()) +
                                                   " extremal B1 predecessors at level " + std::to_string(n));
      xs.push_back(found.front());
    }
    for (std::size_t pi = 0; pi < e1.paths.size(); ++pi)
      if (v1[pi] == xs) {
        if (q_to_p[qi] != kUnset) throw Error(ErrorCode::pairing_failed, "ambiguous " + word + " pairing");
        q_to_p[qi] = pi;
      }
    if (q_to_p[qi] == kUnset)
      throw Error(ErrorCode::pairing_failed, "B2 " + word + " path " + e2.paths[qi].to_string() +
                                                 " has no matching B1 path");
  }
  std::vector<std::size_t> p_to_q(e1.paths.size(), kUnset);
  for (std::size_t qi = 0; qi < q_to_p.size(); ++qi) {
    if (p_to_q[q_to_p[qi]] != kUnset)
      throw Error(ErrorCode::pairing_failed, "two B2 " + word + " paths pair with one B1 path");
    p_to_q[q_to_p[qi]] = qi;
  }
  // Same matching seen from B1: each level-(n+1) vertex has exactly one
  // B2-extremal predecessor, which must be the partner's level-n vertex.
  for (std::size_t pi = 0; pi < e1.paths.size(); ++pi) {
    for (std::size_t n = 1; n < depth; ++n) {
      std::vector<std::size_t> found;
      for (std::size_t y : level_set(v2, n))
        if (has_edge(d, 2 * n + 1, y, v1[pi][n])) found.push_back(y);
      if (found.size() != 1 || found.front() != v2[p_to_q[pi]][n - 1])
        throw Error(ErrorCode::pairing_failed, "B1 " + word + " path " + e1.paths[pi].to_string() +
                                                   " does not determine its partner at level " + std::to_string(n));
    }
  }

  std::vector<PairedPath> out;
  for (std::size_t pi = 0; pi < e1.paths.size(); ++pi) {
    PairedPath pp{e1.paths[pi], e2.paths[p_to_q[pi]], {}};
    for (std::size_t n = 1; n <= depth; ++n) {
      pp.route.push_back(v1[pi][n - 1]);
      pp.route.push_back(v2[p_to_q[pi]][n - 1]);
    }
    for (std::size_t m = 2; m <= pp.route.size(); ++m)
      if (!has_edge(d, m, pp.route[m - 2], pp.route[m - 1]))
        throw Error(ErrorCode::pairing_failed, "paired " + word + " paths are not joined at interleaved level " +
                                                   std::to_string(m));
    out.push_back(std::move(pp));
  }
  return out;
}

}  // namespace

ExtremalPairing pair_extremal_paths(const InterleavedDiagram& b, std::size_t depth) {
  if (depth < 1) throw Error(ErrorCode::invalid_argument, "pairing depth must be at least 1");
  if (2 * depth > b.diagram.num_levels() || depth > b.b1.num_levels() || depth > b.b2.num_levels())
    throw Error(ErrorCode::needs_depth, "interleaved diagram is too short for pairing depth " + std::to_string(depth));
  return {depth, pair_kind(b, depth, Extremity::min), pair_kind(b, depth, Extremity::max)};
}

namespace {

// Two-step paths (a at level `level`, b at level+1) grouped by (s(a), r(b)),
// ordered by intermediate vertex, then a, then b.
std::map<std::pair<std::size_t, std::size_t>, std::vector<std::pair<std::size_t, std::size_t>>> two_step_paths(
    const OrderedBratteliDiagram& d, std::size_t level) {
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::pair<std::size_t, std::size_t>>> out;
  for (std::size_t y = 0; y < d.vertex_count(level); ++y) {
    auto [lo, hi] = d.incoming(level, y);
    for (std::size_t a = lo; a < hi; ++a)
      for (std::size_t bi : d.outgoing(level, y))
        out[{d.edge(level, a).source, d.edge(level + 1, bi).range}].push_back({a, bi});
  }
  return out;
}

}  // namespace

OrbitMapRealization::OrbitMapRealization(const InterleavedDiagram& b, const ExtremalPairing& pairing)
    : b1_(b.b1), b2_(b.b2), b_(b.diagram), bspace_(b.diagram) {
  const std::size_t l1 = std::min(b.b1_levels(), b.b1.num_levels());
  const std::size_t l2 = std::min(b.b2_levels(), b.b2.num_levels());
  const auto& d1 = b1_.diagram();
  const auto& d2 = b2_.diagram();
  seg1_.resize(l1);
  seg2_.resize(l2);
  inv1_.resize(l1);
  inv2_.resize(l2);
  for (std::size_t n = 1; n <= l1; ++n) seg1_[n - 1].assign(d1.edge_count(n), {kUnset, kUnset});
  for (std::size_t n = 1; n <= l2; ++n) seg2_[n - 1].assign(d2.edge_count(n), {kUnset, kUnset});
  for (std::size_t e = 0; e < d1.edge_count(1); ++e) {
    seg1_[0][e] = {e, kUnset};
    inv1_[0][{e, kUnset}] = e;
  }

  // Reserve the extremal routes: minimal routes take the first interleaved
  // edge between consecutive vertices, maximal routes the last one that keeps
  // the edge assignments injective.
  for (Extremity kind : {Extremity::min, Extremity::max}) {
    const auto& paths = kind == Extremity::min ? pairing.min : pairing.max;
    for (const PairedPath& pp : paths) {
      const std::size_t len = pp.route.size();
      if (pp.b1.depth() > l1 || pp.b2.depth() > l2)
        throw Error(ErrorCode::needs_depth, "pairing is deeper than the interleaved diagram");
      std::vector<std::size_t> f(len + 1, kUnset);
      f[1] = pp.b1.edge(1);
      // Owner of the segment that ends at interleaved level m.
      auto owner = [&](std::size_t m) -> std::pair<bool, std::size_t> {
        return m % 2 == 1 ? std::pair{true, (m + 1) / 2} : std::pair{false, m / 2};
      };
      auto admissible = [&](std::size_t m, std::size_t cand) {
        auto [on_b1, n] = owner(m);
        Segment seg{f[m - 1], cand};
        std::size_t edge = on_b1 ? pp.b1.edge(n) : pp.b2.edge(n);
        const Segment& current = on_b1 ? seg1_[n - 1][edge] : seg2_[n - 1][edge];
        if (current.first != kUnset) return current == seg;
        const auto& inv = on_b1 ? inv1_[n - 1] : inv2_[n - 1];
        return inv.find(seg) == inv.end();
      };
      std::function<bool(std::size_t)> search = [&](std::size_t m) {
        if (m > len) return true;
        std::vector<std::size_t> cands;
        for (std::size_t i : b_.outgoing(m - 1, pp.route[m - 2]))
          if (b_.edge(m, i).range == pp.route[m - 1]) cands.push_back(i);
        if (kind == Extremity::max) std::reverse(cands.begin(), cands.end());
        for (std::size_t c : cands) {
          if (!admissible(m, c)) continue;
          f[m] = c;
          if (search(m + 1)) return true;
        }
        return false;
      };
      if (!search(2))
        throw Error(ErrorCode::pairing_failed, std::string("no injective route for ") + std::string(to_string(kind)) +
                                                   " path " + pp.b1.to_string());
      for (std::size_t m = 2; m <= len; ++m) {
        auto [on_b1, n] = owner(m);
        Segment seg{f[m - 1], f[m]};
        std::size_t edge = on_b1 ? pp.b1.edge(n) : pp.b2.edge(n);
        (on_b1 ? seg1_ : seg2_)[n - 1][edge] = seg;
        (on_b1 ? inv1_ : inv2_)[n - 1][seg] = edge;
      }
    }
  }

  // Extend by matching the remaining edges and two-step paths of every
  // (source, range) block in index order.
  auto fill = [&](const OrderedBratteliDiagram& side, std::size_t n, std::size_t b_level,
                  std::vector<Segment>& segs, std::map<Segment, std::size_t>& inv, const char* name) {
    auto blocks = two_step_paths(b_, b_level);
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> free_edges;
    for (std::size_t e = 0; e < side.edge_count(n); ++e)
      if (segs[e].first == kUnset) free_edges[{side.edge(n, e).source, side.edge(n, e).range}].push_back(e);
    for (auto& [key, paths] : blocks) {
      std::vector<Segment> open;
      for (const auto& s : paths)
        if (!inv.count(s)) open.push_back(s);
      auto& edges = free_edges[key];
      if (open.size() != edges.size()) {
        std::ostringstream os;
        os << name << " level " << n << " block (" << key.first << "," << key.second << "): " << edges.size()
           << " edges vs " << open.size() << " interleaved paths";
        throw Error(ErrorCode::count_mismatch, os.str());
      }
      for (std::size_t i = 0; i < edges.size(); ++i) {
        segs[edges[i]] = open[i];
        inv[open[i]] = edges[i];
      }
      edges.clear();
    }
    for (const auto& [key, edges] : free_edges)
      if (!edges.empty())
        throw Error(ErrorCode::count_mismatch, std::string(name) + " level " + std::to_string(n) +
                                                   " has edges without interleaved paths");
  };
  for (std::size_t n = 2; n <= l1; ++n) fill(d1, n, 2 * n - 2, seg1_[n - 1], inv1_[n - 1], "B1");
  for (std::size_t n = 1; n <= l2; ++n) fill(d2, n, 2 * n - 1, seg2_[n - 1], inv2_[n - 1], "B2");
}

std::pair<std::size_t, std::size_t> OrbitMapRealization::b1_segment(std::size_t level, std::size_t edge) const {
  return seg1_.at(level - 1).at(edge);
}

std::pair<std::size_t, std::size_t> OrbitMapRealization::b2_segment(std::size_t level, std::size_t edge) const {
  return seg2_.at(level - 1).at(edge);
}

std::vector<std::size_t> OrbitMapRealization::lift_b1(const FinitePath& p) const {
  const std::size_t depth = p.depth();
  if (depth > seg1_.size())
    throw Error(ErrorCode::needs_depth, "orbit map is realized only to B1 depth " + std::to_string(seg1_.size()));
  std::vector<std::size_t> f;
  if (depth == 0) return f;
  f.push_back(p.edge(1));
  for (std::size_t n = 2; n <= depth; ++n) {
    f.push_back(seg1_[n - 1][p.edge(n)].first);
    f.push_back(seg1_[n - 1][p.edge(n)].second);
  }
  return f;
}

std::vector<std::size_t> OrbitMapRealization::lift_b2(const FinitePath& q) const {
  const std::size_t depth = q.depth();
  if (depth > seg2_.size())
    throw Error(ErrorCode::needs_depth, "orbit map is realized only to B2 depth " + std::to_string(seg2_.size()));
  std::vector<std::size_t> f;
  for (std::size_t n = 1; n <= depth; ++n) {
    f.push_back(seg2_[n - 1][q.edge(n)].first);
    f.push_back(seg2_[n - 1][q.edge(n)].second);
  }
  return f;
}

FinitePath OrbitMapRealization::forward(const FinitePath& p) const {
  if (p.depth() == 0) return FinitePath();
  if (p.depth() - 1 > seg2_.size()) throw Error(ErrorCode::needs_depth, "orbit map is not realized that deep");
  std::vector<std::size_t> f = lift_b1(p);  // f[m-1] is the edge at interleaved level m
  std::vector<std::size_t> q;
  for (std::size_t n = 1; 2 * n <= f.size(); ++n) q.push_back(inv2_[n - 1].at({f[2 * n - 2], f[2 * n - 1]}));
  return FinitePath(b2_.diagram(), std::move(q));
}

FinitePath OrbitMapRealization::backward(const FinitePath& q) const {
  if (q.depth() == 0) return FinitePath();
  if (q.depth() > seg1_.size()) throw Error(ErrorCode::needs_depth, "orbit map is not realized that deep");
  std::vector<std::size_t> f = lift_b2(q);
  std::vector<std::size_t> p{f[0]};
  for (std::size_t n = 2; 2 * n - 1 <= f.size(); ++n) p.push_back(inv1_[n - 1].at({f[2 * n - 3], f[2 * n - 2]}));
  return FinitePath(b1_.diagram(), std::move(p));
}

OrbitMapRealization realize_orbit_map(const InterleavedDiagram& b, const ExtremalPairing& pairing) {
  return OrbitMapRealization(b, pairing);
}

CylinderBijection check_cylinder_bijection(const OrbitMapRealization& f, std::size_t depth) {
  CylinderBijection out{depth, false, {}};
  if (depth > f.b1_depth() || depth > f.b2_depth()) {
    out.detail = "realization is shallower than depth " + std::to_string(depth);
    return out;
  }
  const PathSpace& bs = f.interleaved();
  for (std::size_t n = 1; n <= depth; ++n) {
    // F1 and F2 must be bijections onto the interleaved paths of depth 2n-1 and 2n.
    std::set<std::vector<std::size_t>> lifts1, lifts2;
    for (const auto& p : f.b1().all_paths(n)) {
      lifts1.insert(f.lift_b1(p));
      FinitePath q = f.forward(p);
      if (n >= 2 && !(f.backward(q) == p.prefix(f.b1().diagram(), n - 1))) {
        out.detail = "F^-1(F(" + p.to_string() + ")) is not a prefix of it";
        return out;
      }
    }
    for (const auto& q : f.b2().all_paths(n)) {
      lifts2.insert(f.lift_b2(q));
      if (!(f.forward(f.backward(q)) == q.prefix(f.b2().diagram(), n - 1))) {
        out.detail = "F(F^-1(" + q.to_string() + ")) is not a prefix of it";
        return out;
      }
    }
    if (lifts1.size() != f.b1().total_paths(n) || lifts1.size() != bs.total_paths(2 * n - 1)) {
      out.detail = "B1 depth-" + std::to_string(n) + " cylinders do not match interleaved depth-" +
                   std::to_string(2 * n - 1) + " cylinders one to one";
      return out;
    }
    if (2 * n <= bs.diagram().num_levels() &&
        (lifts2.size() != f.b2().total_paths(n) || lifts2.size() != bs.total_paths(2 * n))) {
      out.detail = "B2 depth-" + std::to_string(n) + " cylinders do not match interleaved depth-" +
                   std::to_string(2 * n) + " cylinders one to one";
      return out;
    }
  }
  out.ok = true;
  return out;
}

namespace {

bool confirm_by_iteration(const PathSpace& space, const FinitePath& from, const FinitePath& to, std::int64_t n,
                          std::int64_t limit) {
  if (n > limit || n < -limit) return false;
  FinitePath at = from;
  for (std::int64_t i = 0; i < (n < 0 ? -n : n); ++i) at = n > 0 ? space.successor(at) : space.predecessor(at);
  return at == to;
}

std::size_t first_non_max(const OrderedBratteliDiagram& d, const FinitePath& p) {
  std::size_t j = 1;
  while (j <= p.depth() && d.is_max_edge(j, p.edge(j))) ++j;
  return j;
}

}  // namespace

CocycleValue cocycle(const OrbitMapRealization& f, const FinitePath& p, CocycleDirection direction,
                     std::int64_t iteration_limit) {
  const bool fwd = direction == CocycleDirection::forward;
  const PathSpace& here = fwd ? f.b1() : f.b2();
  const PathSpace& there = fwd ? f.b2() : f.b1();
  const std::size_t j = first_non_max(here.diagram(), p);
  if (j > p.depth()) throw Error(ErrorCode::maximal_path, "cocycle undefined on maximal path " + p.to_string());
  if (p.depth() < j + 1)
    throw Error(ErrorCode::needs_depth, "path " + p.to_string() + " needs depth " + std::to_string(j + 1) +
                                            " to fix the cocycle");
  FinitePath next = here.successor(p);
  FinitePath a = fwd ? f.forward(p) : f.backward(p);
  FinitePath b = fwd ? f.forward(next) : f.backward(next);
  if (a.terminal_vertex() != b.terminal_vertex())
    throw Error(ErrorCode::needs_depth, "images of " + p.to_string() + " and its successor are not cofinal yet");
  CocycleValue v;
  v.n = there.orbit_shift(a, b);
  v.verified = confirm_by_iteration(there, a, b, v.n, iteration_limit);
  return v;
}

ContinuityReport check_cocycle_continuity(const OrbitMapRealization& f, std::size_t depth,
                                          std::int64_t iteration_limit) {
  ContinuityReport report;
  report.depth = depth;
  for (CocycleDirection dir : {CocycleDirection::forward, CocycleDirection::backward}) {
    const bool fwd = dir == CocycleDirection::forward;
    const PathSpace& space = fwd ? f.b1() : f.b2();
    const auto& d = space.diagram();
    const std::size_t eval = depth + 1;
    if (fwd ? eval > f.b1_depth() : (eval > f.b2_depth() || eval > f.b1_depth()))
      throw Error(ErrorCode::needs_depth, "realization must reach depth " + std::to_string(eval));
    std::vector<FinitePath> paths = space.all_paths(eval);
    std::vector<std::optional<std::int64_t>> values(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i) {
      std::size_t j = first_non_max(d, paths[i]);
      if (j + 1 > eval) continue;
      CocycleValue v = cocycle(f, paths[i], dir, iteration_limit);
      ++report.values_computed;
      if (!v.verified) ++report.unverified;
      values[i] = v.n;
    }
    for (std::size_t k = 1; k <= depth; ++k) {
      std::map<std::vector<std::size_t>, std::pair<std::int64_t, std::size_t>> seen;
      for (std::size_t i = 0; i < paths.size(); ++i) {
        std::size_t j = first_non_max(d, paths[i]);
        if (j > k) continue;  // cylinder lies on the maximal tail
        std::vector<std::size_t> key(paths[i].edges().begin(), paths[i].edges().begin() + k);
        auto [it, fresh] = seen.emplace(std::move(key), std::pair{*values[i], i});
        if (fresh) {
          ++report.cylinders_checked;
          if (fwd && k == 2 && report.samples.size() < 8)
            report.samples.emplace_back(paths[i].prefix(d, k), *values[i]);
        } else if (it->second.first != *values[i]) {
          report.failures.push_back({dir, paths[i].prefix(d, k), it->second.first, *values[i]});
        }
      }
    }
  }
  return report;
}

namespace {

bool stationary_part(const OrderedBratteliDiagram& d, CountMatrix& m) {
  if (d.num_levels() < 2) return false;
  m = incidence_matrix(d, 2);
  for (std::size_t n = 3; n <= d.num_levels(); ++n)
    if (!(incidence_matrix(d, n) == m)) return false;
  return true;
}

}  // namespace

SearchResult search_stationary_intertwining(const OrderedBratteliDiagram& b1, const OrderedBratteliDiagram& b2,
                                            const SearchOptions& options) {
  CountMatrix m1, m2;
  if (!stationary_part(b1, m1) || !stationary_part(b2, m2))
    throw Error(ErrorCode::invalid_argument, "intertwining search needs stationary diagrams with at least 2 levels");
  const std::size_t k = m1.rows();
  if (m2.rows() != k || (k != 1 && k != 2))
    throw Error(ErrorCode::invalid_argument, "intertwining search supports 1x1 and 2x2 stationary diagrams");
  if (options.entry_cap < 0) throw Error(ErrorCode::invalid_argument, "entry cap must be non-negative");
  const std::size_t levels = std::min(b1.num_levels(), b2.num_levels());
  const std::int64_t cap = options.entry_cap;

  std::vector<CountMatrix> ps;
  if (k == 1) {
    for (std::int64_t a = 0; a <= cap; ++a) ps.push_back(CountMatrix(1, 1, a));
  } else {
    for (std::int64_t a = 0; a <= cap; ++a)
      for (std::int64_t b = 0; b <= cap; ++b)
        for (std::int64_t c = 0; c <= cap; ++c)
          for (std::int64_t e = 0; e <= cap; ++e) ps.push_back(CountMatrix::from_rows({{a, b}, {c, e}}));
  }
  std::mt19937_64 rng(options.seed);
  std::shuffle(ps.begin(), ps.end(), rng);

  SearchResult result;
  auto try_pair = [&](const CountMatrix& p, const CountMatrix& q) {
    ++result.candidates;
    Intertwining w = constant_intertwining(p, q, levels);
    auto failure = check_intertwining(b1, b2, w);
    if (!failure) {
      if (!result.found) result.found = w;
      return;
    }
    result.rejected.push_back({p, q, failure, failure->message()});
  };
  for (const CountMatrix& p : ps) {
    if (k == 1) {
      for (std::int64_t q = 0; q <= cap; ++q) try_pair(p, CountMatrix(1, 1, q));
      continue;
    }
    // Q is forced by Q P = M1 when P is invertible.
    const std::int64_t det = p(0, 0) * p(1, 1) - p(0, 1) * p(1, 0);
    if (det == 0) {
      ++result.candidates;
      result.rejected.push_back({p, CountMatrix(), std::nullopt, "P is singular, Q*P=M1 has no solution"});
      continue;
    }
    const CountMatrix adj = CountMatrix::from_rows({{p(1, 1), -p(0, 1)}, {-p(1, 0), p(0, 0)}});
    const CountMatrix num = multiply_checked(m1, adj);
    CountMatrix q(2, 2, 0);
    bool ok = true;
    for (std::size_t i = 0; i < 2 && ok; ++i)
      for (std::size_t j = 0; j < 2 && ok; ++j) {
        if (num(i, j) % det != 0) ok = false;
        else q(i, j) = num(i, j) / det;
        if (ok && (q(i, j) < 0 || q(i, j) > cap)) ok = false;
      }
    if (!ok) {
      ++result.candidates;
      result.rejected.push_back({p, CountMatrix(), std::nullopt, "Q*P=M1 has no non-negative integer solution within the cap"});
      continue;
    }
    try_pair(p, q);
  }
  return result;
}

}  // namespace bratteli
