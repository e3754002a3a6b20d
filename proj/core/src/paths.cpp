#include "bratteli/paths.hpp"

#include <algorithm>
#include <sstream>

#include "bratteli/error.hpp"

namespace bratteli {

namespace {

std::uint64_t add_checked(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) throw Error(ErrorCode::overflow, "path count exceeds 64 bits");
  return out;
}

}  // namespace

FinitePath::FinitePath(const OrderedBratteliDiagram& d, std::vector<std::size_t> edges) : edges_(std::move(edges)) {
  if (edges_.size() > d.num_levels())
    throw Error(ErrorCode::invalid_argument, "path of depth " + std::to_string(edges_.size()) +
                                                 " exceeds num_levels " + std::to_string(d.num_levels()));
  std::size_t at = 0;
  for (std::size_t j = 1; j <= edges_.size(); ++j) {
    std::size_t idx = edges_[j - 1];
    if (idx >= d.edge_count(j))
      throw Error(ErrorCode::invalid_argument,
                  "edge index " + std::to_string(idx) + " out of range at level " + std::to_string(j));
    const Edge& e = d.edge(j, idx);
    if (e.source != at)
      throw Error(ErrorCode::invalid_argument, "edges do not compose at level " + std::to_string(j));
    at = e.range;
  }
  terminal_ = at;
}

FinitePath FinitePath::prefix(const OrderedBratteliDiagram& d, std::size_t depth) const {
  if (depth > edges_.size()) throw Error(ErrorCode::invalid_argument, "prefix longer than path");
  return FinitePath(d, std::vector<std::size_t>(edges_.begin(), edges_.begin() + depth));
}

std::string FinitePath::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(edges_[i]);
  }
  return out;
}

FinitePath parse_path(const OrderedBratteliDiagram& d, const std::string& text) {
  std::vector<std::size_t> edges;
  if (!text.empty()) {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty() || item.find_first_not_of("0123456789 ") != std::string::npos)
        throw Error(ErrorCode::parse_error, "bad path component '" + item + "' in \"" + text + "\"");
      edges.push_back(std::stoul(item));
    }
    if (text.back() == ',') throw Error(ErrorCode::parse_error, "trailing comma in path \"" + text + "\"");
  }
  return FinitePath(d, std::move(edges));
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::unknown: return "unknown";
  }
  return "unknown";
}

PathSpace::PathSpace(OrderedBratteliDiagram d) : d_(std::move(d)) {
  d_.require_valid();
  const std::size_t top = d_.num_levels();
  counts_.assign(top + 1, {});
  offset_before_.assign(top, {});
  counts_[0] = {1};
  for (std::size_t n = 1; n <= top; ++n) {
    counts_[n].assign(d_.vertex_count(n), 0);
    auto& off = offset_before_[n - 1];
    off.assign(d_.edge_count(n), 0);
    for (std::size_t v = 0; v < d_.vertex_count(n); ++v) {
      auto [b, e] = d_.incoming(n, v);
      std::uint64_t acc = 0;
      for (std::size_t i = b; i < e; ++i) {
        off[i] = acc;
        acc = add_checked(acc, counts_[n - 1][d_.edge(n, i).source]);
      }
      counts_[n][v] = acc;
    }
  }
  for (auto* table : {&min_extendable_, &max_extendable_}) {
    bool is_min = table == &min_extendable_;
    table->assign(top + 1, {});
    (*table)[top].assign(d_.vertex_count(top), true);
    for (std::size_t n = top; n-- > 0;) {
      (*table)[n].assign(d_.vertex_count(n), false);
      for (std::size_t i = 0; i < d_.edge_count(n + 1); ++i) {
        bool ext = is_min ? d_.is_min_edge(n + 1, i) : d_.is_max_edge(n + 1, i);
        const Edge& e = d_.edge(n + 1, i);
        if (ext && (*table)[n + 1][e.range]) (*table)[n][e.source] = true;
      }
    }
  }
}

std::uint64_t PathSpace::total_paths(std::size_t level) const {
  std::uint64_t total = 0;
  for (auto c : counts_.at(level)) total = add_checked(total, c);
  return total;
}

FinitePath PathSpace::min_path_to(std::size_t level, std::size_t vertex) const {
  if (level > d_.num_levels()) throw Error(ErrorCode::level_out_of_range, "level beyond num_levels");
  std::vector<std::size_t> edges(level);
  std::size_t v = vertex;
  for (std::size_t j = level; j >= 1; --j) {
    edges[j - 1] = d_.min_edge_into(j, v);
    v = d_.edge(j, edges[j - 1]).source;
  }
  return FinitePath(FinitePath::Trusted{}, std::move(edges), vertex);
}

FinitePath PathSpace::max_path_to(std::size_t level, std::size_t vertex) const {
  if (level > d_.num_levels()) throw Error(ErrorCode::level_out_of_range, "level beyond num_levels");
  std::vector<std::size_t> edges(level);
  std::size_t v = vertex;
  for (std::size_t j = level; j >= 1; --j) {
    edges[j - 1] = d_.max_edge_into(j, v);
    v = d_.edge(j, edges[j - 1]).source;
  }
  return FinitePath(FinitePath::Trusted{}, std::move(edges), vertex);
}

bool PathSpace::is_min_path(const FinitePath& p) const {
  for (std::size_t j = 1; j <= p.depth(); ++j)
    if (!d_.is_min_edge(j, p.edge(j))) return false;
  return true;
}

bool PathSpace::is_max_path(const FinitePath& p) const {
  for (std::size_t j = 1; j <= p.depth(); ++j)
    if (!d_.is_max_edge(j, p.edge(j))) return false;
  return true;
}

std::uint64_t PathSpace::rank(const FinitePath& p) const {
  std::uint64_t r = 0;
  for (std::size_t j = 1; j <= p.depth(); ++j) r += offset_before_[j - 1][p.edge(j)];
  return r;
}

FinitePath PathSpace::unrank(std::size_t level, std::size_t vertex, std::uint64_t r) const {
  if (level > d_.num_levels()) throw Error(ErrorCode::level_out_of_range, "level beyond num_levels");
  if (vertex >= d_.vertex_count(level)) throw Error(ErrorCode::invalid_argument, "vertex out of range");
  if (r >= counts_[level][vertex])
    throw Error(ErrorCode::invalid_argument, "rank " + std::to_string(r) + " >= number of paths " +
                                                 std::to_string(counts_[level][vertex]));
  std::vector<std::size_t> edges(level);
  std::size_t v = vertex;
  for (std::size_t j = level; j >= 1; --j) {
    auto [b, e] = d_.incoming(j, v);
    const auto& off = offset_before_[j - 1];
    std::size_t lo = b, hi = e;  // last i in [b,e) with off[i] <= r
    while (hi - lo > 1) {
      std::size_t mid = lo + (hi - lo) / 2;
      if (off[mid] <= r) lo = mid;
      else hi = mid;
    }
    edges[j - 1] = lo;
    r -= off[lo];
    v = d_.edge(j, lo).source;
  }
  return FinitePath(FinitePath::Trusted{}, std::move(edges), vertex);
}

FinitePath PathSpace::successor(const FinitePath& p) const {
  std::size_t j = 1;
  while (j <= p.depth() && d_.is_max_edge(j, p.edge(j))) ++j;
  if (j > p.depth()) throw Error(ErrorCode::maximal_path, "path " + p.to_string() + " is maximal");
  std::vector<std::size_t> edges = p.edges();
  edges[j - 1] += 1;
  std::size_t v = d_.edge(j, edges[j - 1]).source;
  for (std::size_t i = j - 1; i >= 1; --i) {
    edges[i - 1] = d_.min_edge_into(i, v);
    v = d_.edge(i, edges[i - 1]).source;
  }
  return FinitePath(FinitePath::Trusted{}, std::move(edges), p.terminal_vertex());
}

FinitePath PathSpace::predecessor(const FinitePath& p) const {
  std::uint64_t r = rank(p);
  if (r == 0) throw Error(ErrorCode::minimal_path, "path " + p.to_string() + " is minimal");
  return unrank(p.depth(), p.terminal_vertex(), r - 1);
}

FinitePath PathSpace::full_successor(const FinitePath& p, const MaxMinPairing& pairing) const {
  if (!is_max_path(p)) return successor(p);
  if (is_min_path(p)) return p;
  auto it = pairing.find(p);
  if (it == pairing.end())
    throw Error(ErrorCode::missing_pairing, "no paired minimal path for maximal path " + p.to_string());
  return it->second;
}

std::int64_t PathSpace::orbit_shift(const FinitePath& e, const FinitePath& f) const {
  if (e.depth() != f.depth())
    throw Error(ErrorCode::invalid_argument, "orbit shift needs paths of equal depth");
  if (e.terminal_vertex() != f.terminal_vertex())
    throw Error(ErrorCode::invalid_argument, "paths end at different vertices (" +
                                                 std::to_string(e.terminal_vertex()) + " vs " +
                                                 std::to_string(f.terminal_vertex()) + ")");
  return static_cast<std::int64_t>(rank(f)) - static_cast<std::int64_t>(rank(e));
}

namespace {

void collect_extremal(const OrderedBratteliDiagram& d, const std::vector<std::vector<bool>>& extendable,
                      Extremity kind, std::size_t depth, std::size_t level, std::size_t vertex,
                      std::vector<std::size_t>& prefix, std::vector<FinitePath>& out) {
  if (level == depth) {
    out.emplace_back(d, prefix);
    return;
  }
  for (std::size_t i : d.outgoing(level, vertex)) {
    bool ext = kind == Extremity::min ? d.is_min_edge(level + 1, i) : d.is_max_edge(level + 1, i);
    const Edge& e = d.edge(level + 1, i);
    if (!ext || !extendable[level + 1][e.range]) continue;
    prefix.push_back(i);
    collect_extremal(d, extendable, kind, depth, level + 1, e.range, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

ExtremalPathSet PathSpace::extremal_paths(std::size_t depth, Extremity kind) const {
  if (depth > d_.num_levels()) throw Error(ErrorCode::level_out_of_range, "depth beyond num_levels");
  const auto& ext = kind == Extremity::min ? min_extendable_ : max_extendable_;
  auto collect = [&](std::size_t k) {
    std::vector<FinitePath> out;
    std::vector<std::size_t> prefix;
    collect_extremal(d_, ext, kind, k, 0, 0, prefix, out);
    std::sort(out.begin(), out.end(), [](const FinitePath& a, const FinitePath& b) {
      if (a.terminal_vertex() != b.terminal_vertex()) return a.terminal_vertex() < b.terminal_vertex();
      return a < b;
    });
    return out;
  };
  ExtremalPathSet set{kind, depth, collect(depth), false};
  // Compare with the next level when there is one, otherwise with the previous.
  if (d_.num_levels() >= 1) {
    std::size_t lo = depth < d_.num_levels() ? depth : depth - 1;
    std::vector<FinitePath> shallow = lo == depth ? set.paths : collect(lo);
    std::vector<FinitePath> deep = lo == depth ? collect(lo + 1) : set.paths;
    if (shallow.size() == deep.size()) {
      std::map<FinitePath, int> extensions;
      for (const auto& p : deep) ++extensions[p.prefix(d_, lo)];
      set.stabilized = std::all_of(shallow.begin(), shallow.end(), [&](const FinitePath& p) {
        auto it = extensions.find(p);
        return it != extensions.end() && it->second == 1;
      });
    }
  }
  return set;
}

PerfectOrderingResult PathSpace::check_perfect_ordering(std::size_t depth) const {
  if (depth < 1 || depth > d_.num_levels())
    throw Error(ErrorCode::level_out_of_range, "perfect-ordering depth must lie in 1..num_levels");
  PerfectOrderingResult result;
  result.depth = depth;
  ExtremalPathSet mins = extremal_paths(depth, Extremity::min);
  ExtremalPathSet maxs = extremal_paths(depth, Extremity::max);
  if (!mins.stabilized || !maxs.stabilized) {
    result.reason = "extremal path sets have not stabilized at depth " + std::to_string(depth);
    return result;
  }
  if (mins.paths.size() != maxs.paths.size()) {
    result.verdict = Verdict::fail;
    result.reason = std::to_string(maxs.paths.size()) + " maximal paths but " + std::to_string(mins.paths.size()) +
                    " minimal paths: no bijective successor extension exists";
    return result;
  }
  // Link a maximal path x to a minimal path y when x, stopped one level early,
  // can step into y's terminal vertex (and group labels agree, when present).
  std::map<FinitePath, int> min_hits;
  for (const auto& x : maxs.paths) {
    FinitePath head = x.prefix(d_, depth - 1);
    std::vector<const FinitePath*> linked;
    for (const auto& y : mins.paths) {
      bool reach = false;
      for (std::size_t i : d_.outgoing(depth - 1, head.terminal_vertex()))
        if (d_.edge(depth, i).range == y.terminal_vertex()) reach = true;
      if (reach && d_.group_labels() &&
          d_.group_label(depth, x.terminal_vertex()) != d_.group_label(depth, y.terminal_vertex()))
        reach = false;
      if (reach) linked.push_back(&y);
    }
    if (linked.size() != 1) {
      result.reason = "maximal path " + x.to_string() + " links to " + std::to_string(linked.size()) +
                      " minimal paths at depth " + std::to_string(depth);
      result.pairing.clear();
      return result;
    }
    ++min_hits[*linked.front()];
    result.pairing.emplace(x, *linked.front());
  }
  for (const auto& [y, hits] : min_hits)
    if (hits != 1) {
      result.reason = "minimal path " + y.to_string() + " is linked from several maximal paths";
      result.pairing.clear();
      return result;
    }
  FemReport fem = check_fem_properties(d_, std::min<std::size_t>(4, d_.num_levels()));
  if (!fem.ok()) {
    result.reason = "structural checks fail (property (" + std::string(1, fem.failures.front().property) +
                    ")), the linkage is not certified";
    result.pairing.clear();
    return result;
  }
  result.verdict = Verdict::pass;
  result.reason = "extremal sets stabilized with a unique linkage";
  return result;
}

std::vector<FinitePath> PathSpace::all_paths(std::size_t depth) const {
  if (depth > d_.num_levels()) throw Error(ErrorCode::level_out_of_range, "depth beyond num_levels");
  std::vector<FinitePath> out;
  for (std::size_t v = 0; v < d_.vertex_count(depth); ++v)
    for (std::uint64_t r = 0; r < counts_[depth][v]; ++r) out.push_back(unrank(depth, v, r));
  return out;
}

MaxMinPairing pairing_from_labels(const PathSpace& space, std::size_t depth) {
  const auto& d = space.diagram();
  if (!d.group_labels()) throw Error(ErrorCode::missing_pairing, "diagram has no group labels");
  if (depth == 0) throw Error(ErrorCode::invalid_argument, "pairing depth must be at least 1");
  ExtremalPathSet mins = space.extremal_paths(depth, Extremity::min);
  ExtremalPathSet maxs = space.extremal_paths(depth, Extremity::max);
  MaxMinPairing pairing;
  for (const auto& x : maxs.paths) {
    const FinitePath* match = nullptr;
    for (const auto& y : mins.paths)
      if (d.group_label(depth, y.terminal_vertex()) == d.group_label(depth, x.terminal_vertex())) {
        if (match)
          throw Error(ErrorCode::pairing_failed, "several minimal paths share the group label of " + x.to_string());
        match = &y;
      }
    if (!match) throw Error(ErrorCode::pairing_failed, "no minimal path shares the group label of " + x.to_string());
    pairing.emplace(x, *match);
  }
  return pairing;
}

}  // namespace bratteli
