#include "bratteli/diagram.hpp"

#include <algorithm>
#include <sstream>

#include "bratteli/error.hpp"

namespace bratteli {

OrderedBratteliDiagram::OrderedBratteliDiagram(std::vector<std::size_t> vertex_counts,
                                               std::vector<std::vector<Edge>> edges,
                                               std::optional<GroupLabels> group_labels)
    : vertex_counts_(std::move(vertex_counts)), edges_(std::move(edges)), labels_(std::move(group_labels)) {
  if (vertex_counts_.empty()) throw Error(ErrorCode::malformed_diagram, "vertex_counts is empty");
  if (vertex_counts_[0] != 1)
    throw Error(ErrorCode::malformed_diagram, "level 0 must contain exactly one vertex (the root)");
  const std::size_t n_levels = vertex_counts_.size() - 1;
  if (edges_.size() != n_levels) {
    std::ostringstream os;
    os << "expected edge lists for " << n_levels << " levels, got " << edges_.size();
    throw Error(ErrorCode::malformed_diagram, os.str());
  }
  for (std::size_t n = 1; n <= n_levels; ++n) {
    const auto& level = edges_[n - 1];
    for (std::size_t i = 0; i < level.size(); ++i) {
      const Edge& e = level[i];
      if (e.source >= vertex_counts_[n - 1] || e.range >= vertex_counts_[n]) {
        std::ostringstream os;
        os << "level " << n << " edge " << i << ": s=" << e.source << ", r=" << e.range
           << " outside vertex counts (" << vertex_counts_[n - 1] << ", " << vertex_counts_[n] << ")";
        throw Error(ErrorCode::malformed_diagram, os.str());
      }
    }
  }
  if (labels_) {
    if (labels_->size() != n_levels)
      throw Error(ErrorCode::malformed_diagram, "group_labels must have one list per level 1..N");
    for (std::size_t n = 1; n <= n_levels; ++n)
      if ((*labels_)[n - 1].size() != vertex_counts_[n]) {
        std::ostringstream os;
        os << "group_labels at level " << n << " has " << (*labels_)[n - 1].size() << " entries, expected "
           << vertex_counts_[n];
        throw Error(ErrorCode::malformed_diagram, os.str());
      }
  }
  for (auto& level : edges_)
    std::stable_sort(level.begin(), level.end(), [](const Edge& a, const Edge& b) { return a.range < b.range; });
  index();
}

void OrderedBratteliDiagram::index() {
  const std::size_t n_levels = num_levels();
  in_offset_.assign(n_levels, {});
  out_offset_.assign(n_levels, {});
  out_edges_.assign(n_levels, {});
  report_ = {};
  for (std::size_t n = 1; n <= n_levels; ++n) {
    const auto& level = edges_[n - 1];
    auto& off = in_offset_[n - 1];
    off.assign(vertex_counts_[n] + 1, 0);
    for (const Edge& e : level) ++off[e.range + 1];
    for (std::size_t v = 0; v < vertex_counts_[n]; ++v) off[v + 1] += off[v];

    auto& oo = out_offset_[n - 1];
    oo.assign(vertex_counts_[n - 1] + 1, 0);
    for (const Edge& e : level) ++oo[e.source + 1];
    for (std::size_t v = 0; v < vertex_counts_[n - 1]; ++v) oo[v + 1] += oo[v];
    auto& oe = out_edges_[n - 1];
    oe.assign(level.size(), 0);
    std::vector<std::size_t> fill(oo.begin(), oo.end() - 1);
    for (std::size_t i = 0; i < level.size(); ++i) oe[fill[level[i].source]++] = i;
  }

  for (std::size_t n = 0; n <= n_levels; ++n) {
    if (vertex_counts_[n] == 0)
      report_.violations.push_back({n, std::nullopt, std::nullopt, "nonempty_level",
                                    "level " + std::to_string(n) + " has no vertices"});
  }
  for (std::size_t n = 1; n <= n_levels; ++n) {
    for (std::size_t v = 0; v < vertex_counts_[n]; ++v)
      if (in_offset_[n - 1][v] == in_offset_[n - 1][v + 1])
        report_.violations.push_back({n, v, std::nullopt, "range_surjective",
                                      "vertex " + std::to_string(v) + " at level " + std::to_string(n) +
                                          " has no incoming edge"});
    for (std::size_t v = 0; v < vertex_counts_[n - 1]; ++v)
      if (out_offset_[n - 1][v] == out_offset_[n - 1][v + 1])
        report_.violations.push_back({n - 1, v, std::nullopt, "source_surjective",
                                      "vertex " + std::to_string(v) + " at level " + std::to_string(n - 1) +
                                          " has no outgoing edge"});
  }
}

std::span<const Edge> OrderedBratteliDiagram::edges(std::size_t level) const {
  if (level == 0 || level > num_levels())
    throw Error(ErrorCode::level_out_of_range, "edge level " + std::to_string(level) + " outside 1.." +
                                                   std::to_string(num_levels()));
  return edges_[level - 1];
}

std::pair<std::size_t, std::size_t> OrderedBratteliDiagram::incoming(std::size_t level, std::size_t vertex) const {
  const auto& off = in_offset_.at(level - 1);
  return {off.at(vertex), off.at(vertex + 1)};
}

std::span<const std::size_t> OrderedBratteliDiagram::outgoing(std::size_t level, std::size_t vertex) const {
  if (level >= num_levels()) return {};
  const auto& oo = out_offset_[level];
  const auto& oe = out_edges_[level];
  return std::span<const std::size_t>(oe).subspan(oo.at(vertex), oo.at(vertex + 1) - oo.at(vertex));
}

std::size_t OrderedBratteliDiagram::order_position(std::size_t level, std::size_t index) const {
  return index - in_offset_[level - 1][edge(level, index).range];
}

bool OrderedBratteliDiagram::is_min_edge(std::size_t level, std::size_t index) const {
  return order_position(level, index) == 0;
}

bool OrderedBratteliDiagram::is_max_edge(std::size_t level, std::size_t index) const {
  return index + 1 == in_offset_[level - 1][edge(level, index).range + 1];
}

std::size_t OrderedBratteliDiagram::min_edge_into(std::size_t level, std::size_t vertex) const {
  auto [b, e] = incoming(level, vertex);
  if (b == e) throw Error(ErrorCode::malformed_diagram, "vertex without incoming edge");
  return b;
}

std::size_t OrderedBratteliDiagram::max_edge_into(std::size_t level, std::size_t vertex) const {
  auto [b, e] = incoming(level, vertex);
  if (b == e) throw Error(ErrorCode::malformed_diagram, "vertex without incoming edge");
  return e - 1;
}

std::optional<int> OrderedBratteliDiagram::group_label(std::size_t level, std::size_t vertex) const {
  if (!labels_ || level == 0) return std::nullopt;
  return (*labels_)[level - 1].at(vertex);
}

void OrderedBratteliDiagram::require_valid() const {
  if (valid()) return;
  const Violation& v = report_.violations.front();
  throw Error(ErrorCode::malformed_diagram, "diagram violates " + v.axiom + ": " + v.message);
}

ValidationReport validate_diagram(const OrderedBratteliDiagram& d) { return d.validation(); }

CountMatrix incidence_matrix(const OrderedBratteliDiagram& d, std::size_t level) {
  if (level == 0 || level > d.num_levels())
    throw Error(ErrorCode::level_out_of_range, "incidence level " + std::to_string(level) + " outside 1.." +
                                                   std::to_string(d.num_levels()));
  CountMatrix m(d.vertex_count(level), d.vertex_count(level - 1), 0);
  for (const Edge& e : d.edges(level)) ++m(e.range, e.source);
  return m;
}

OrderedBratteliDiagram truncate(const OrderedBratteliDiagram& d, std::size_t levels) {
  if (levels > d.num_levels())
    throw Error(ErrorCode::level_out_of_range, "cannot truncate to more levels than present");
  std::vector<std::size_t> counts(d.vertex_counts().begin(), d.vertex_counts().begin() + levels + 1);
  std::vector<std::vector<Edge>> edges;
  for (std::size_t n = 1; n <= levels; ++n) edges.emplace_back(d.edges(n).begin(), d.edges(n).end());
  std::optional<GroupLabels> labels;
  if (d.group_labels()) labels = GroupLabels(d.group_labels()->begin(), d.group_labels()->begin() + levels);
  return OrderedBratteliDiagram(std::move(counts), std::move(edges), std::move(labels));
}

TelescopeMap::TelescopeMap(const OrderedBratteliDiagram& original, std::vector<std::size_t> cuts,
                           std::vector<std::vector<std::vector<std::size_t>>> segments)
    : cuts_(std::move(cuts)), segments_(std::move(segments)) {
  for (std::size_t n = 1; n < cuts_.size(); ++n) {
    const std::size_t from = cuts_[n - 1], to = cuts_[n];
    std::vector<std::size_t> counts(original.vertex_count(from), 1);
    std::vector<std::vector<std::size_t>> level_offsets;
    for (std::size_t l = from + 1; l <= to; ++l) {
      std::vector<std::size_t> off(original.edge_count(l), 0), next(original.vertex_count(l), 0);
      for (std::size_t w = 0; w < next.size(); ++w) {
        auto [b, e] = original.incoming(l, w);
        for (std::size_t i = b; i < e; ++i) {
          off[i] = next[w];
          next[w] += counts[original.edge(l, i).source];
        }
      }
      level_offsets.push_back(std::move(off));
      counts = std::move(next);
    }
    std::vector<std::size_t> start(counts.size(), 0);
    for (std::size_t w = 1; w < counts.size(); ++w) start[w] = start[w - 1] + counts[w - 1];
    std::vector<std::size_t> ranges(original.edge_count(to));
    for (std::size_t i = 0; i < ranges.size(); ++i) ranges[i] = original.edge(to, i).range;
    offsets_.push_back(std::move(level_offsets));
    block_start_.push_back(std::move(start));
    last_range_.push_back(std::move(ranges));
  }
}

const std::vector<std::size_t>& TelescopeMap::segment(std::size_t new_level, std::size_t index) const {
  return segments_.at(new_level - 1).at(index);
}

std::size_t TelescopeMap::edge_for(std::size_t new_level, std::span<const std::size_t> segment) const {
  if (new_level == 0 || new_level > num_levels())
    throw Error(ErrorCode::level_out_of_range, "telescoped level " + std::to_string(new_level) + " out of range");
  const auto& offs = offsets_[new_level - 1];
  const auto& ranges = last_range_[new_level - 1];
  bool ok = segment.size() == offs.size() && !segment.empty() && segment.back() < ranges.size();
  std::size_t idx = 0;
  for (std::size_t k = 0; ok && k < segment.size(); ++k) {
    if (segment[k] >= offs[k].size()) ok = false;
    else idx += offs[k][segment[k]];
  }
  if (ok) {
    idx += block_start_[new_level - 1][ranges[segment.back()]];
    const auto& segs = segments_[new_level - 1];
    ok = idx < segs.size() && std::equal(segment.begin(), segment.end(), segs[idx].begin(), segs[idx].end());
  }
  if (!ok) throw Error(ErrorCode::invalid_argument, "segment is not a path between cut levels");
  return idx;
}

std::vector<std::size_t> TelescopeMap::forward(std::span<const std::size_t> original) const {
  auto pos = std::find(cuts_.begin(), cuts_.end(), original.size());
  if (pos == cuts_.end())
    throw Error(ErrorCode::invalid_argument,
                "path depth " + std::to_string(original.size()) + " is not a cut level");
  std::size_t levels = static_cast<std::size_t>(pos - cuts_.begin());
  std::vector<std::size_t> out;
  out.reserve(levels);
  for (std::size_t n = 1; n <= levels; ++n)
    out.push_back(edge_for(n, original.subspan(cuts_[n - 1], cuts_[n] - cuts_[n - 1])));
  return out;
}

std::vector<std::size_t> TelescopeMap::backward(std::span<const std::size_t> telescoped) const {
  if (telescoped.size() > num_levels()) throw Error(ErrorCode::invalid_argument, "telescoped path too deep");
  std::vector<std::size_t> out;
  for (std::size_t n = 1; n <= telescoped.size(); ++n) {
    const auto& seg = segment(n, telescoped[n - 1]);
    out.insert(out.end(), seg.begin(), seg.end());
  }
  return out;
}

namespace {

// All paths from level `from` to level `to` ending at `vertex`, in reverse-lex
// order: the deepest edge varies slowest.
void paths_into(const OrderedBratteliDiagram& d, std::size_t from, std::size_t to, std::size_t vertex,
                std::vector<std::size_t>& suffix, std::vector<std::vector<std::size_t>>& out,
                std::vector<std::size_t>& sources) {
  if (to == from) {
    out.emplace_back(suffix.rbegin(), suffix.rend());
    sources.push_back(vertex);
    return;
  }
  auto [b, e] = d.incoming(to, vertex);
  for (std::size_t i = b; i < e; ++i) {
    suffix.push_back(i);
    paths_into(d, from, to - 1, d.edge(to, i).source, suffix, out, sources);
    suffix.pop_back();
  }
}

}  // namespace

TelescopedDiagram telescope(const OrderedBratteliDiagram& d, const std::vector<std::size_t>& cuts) {
  if (cuts.empty()) throw Error(ErrorCode::invalid_argument, "telescope: no cut levels given");
  std::size_t prev = 0;
  for (std::size_t c : cuts) {
    if (c <= prev)
      throw Error(ErrorCode::invalid_argument, "telescope: cut levels must be strictly increasing and start after 0");
    prev = c;
  }
  if (cuts.back() != d.num_levels())
    throw Error(ErrorCode::invalid_argument, "telescope: last cut must equal num_levels (" +
                                                 std::to_string(d.num_levels()) + ")");
  std::vector<std::size_t> all_cuts{0};
  all_cuts.insert(all_cuts.end(), cuts.begin(), cuts.end());

  std::vector<std::size_t> counts{1};
  std::vector<std::vector<Edge>> edges;
  std::vector<std::vector<std::vector<std::size_t>>> segments;
  std::optional<GroupLabels> labels;
  if (d.group_labels()) labels.emplace();
  for (std::size_t n = 1; n < all_cuts.size(); ++n) {
    const std::size_t from = all_cuts[n - 1], to = all_cuts[n];
    counts.push_back(d.vertex_count(to));
    std::vector<Edge> level;
    std::vector<std::vector<std::size_t>> segs;
    for (std::size_t w = 0; w < d.vertex_count(to); ++w) {
      std::vector<std::size_t> suffix, sources;
      std::vector<std::vector<std::size_t>> paths;
      paths_into(d, from, to, w, suffix, paths, sources);
      for (std::size_t i = 0; i < paths.size(); ++i) {
        level.push_back({sources[i], w});
        segs.push_back(std::move(paths[i]));
      }
    }
    edges.push_back(std::move(level));
    segments.push_back(std::move(segs));
    if (labels) labels->push_back((*d.group_labels())[to - 1]);
  }
  return {OrderedBratteliDiagram(std::move(counts), std::move(edges), std::move(labels)),
          TelescopeMap(d, std::move(all_cuts), std::move(segments))};
}

std::string_view to_string(Extremity e) { return e == Extremity::min ? "min" : "max"; }

bool FemReport::has_failure(char property) const {
  return std::any_of(failures.begin(), failures.end(), [&](const FemFailure& f) { return f.property == property; });
}

std::vector<bool> extremal_sources(const OrderedBratteliDiagram& d, std::size_t level, Extremity kind) {
  std::vector<bool> out(d.vertex_count(level), false);
  if (level >= d.num_levels()) return out;
  for (std::size_t w = 0; w < d.vertex_count(level + 1); ++w) {
    auto [b, e] = d.incoming(level + 1, w);
    if (b == e) continue;
    std::size_t idx = kind == Extremity::min ? b : e - 1;
    out[d.edge(level + 1, idx).source] = true;
  }
  return out;
}

namespace {

using VertexSet = std::vector<bool>;

VertexSet forward_step(const OrderedBratteliDiagram& d, std::size_t level, const VertexSet& s) {
  VertexSet out(d.vertex_count(level + 1), false);
  for (const Edge& e : d.edges(level + 1))
    if (s[e.source]) out[e.range] = true;
  return out;
}

VertexSet backward_step(const OrderedBratteliDiagram& d, std::size_t level, const VertexSet& s) {
  VertexSet out(d.vertex_count(level - 1), false);
  for (const Edge& e : d.edges(level))
    if (s[e.range]) out[e.source] = true;
  return out;
}

void check_kind(const OrderedBratteliDiagram& d, std::size_t m_max, Extremity kind, FemReport& report) {
  const std::size_t top = d.num_levels();
  const char* word = kind == Extremity::min ? "minimal" : "maximal";
  std::vector<VertexSet> ext(top);
  for (std::size_t n = 0; n < top; ++n) ext[n] = extremal_sources(d, n, kind);

  for (std::size_t n = 0; n < top; ++n) {
    for (std::size_t v = 0; v < d.vertex_count(n); ++v) {
      if (!ext[n][v]) continue;
      if (n + 2 <= top) {
        bool found = false;
        for (std::size_t i : d.outgoing(n, v)) {
          bool extremal = kind == Extremity::min ? d.is_min_edge(n + 1, i) : d.is_max_edge(n + 1, i);
          if (extremal && ext[n + 1][d.edge(n + 1, i).range]) found = true;
        }
        if (!found)
          report.failures.push_back({'b', kind, n, v, 0,
                                     std::string("no ") + word + " edge from this vertex into the next " +
                                         word + " source set"});
      }
      VertexSet single(d.vertex_count(n), false);
      single[v] = true;
      VertexSet r = forward_step(d, n, single);
      for (std::size_t w = 0; w < r.size(); ++w) {
        if (!r[w]) continue;
        std::size_t idx = kind == Extremity::min ? d.min_edge_into(n + 1, w) : d.max_edge_into(n + 1, w);
        if (d.edge(n + 1, idx).source != v) {
          report.failures.push_back({'c', kind, n, v, 1,
                                     std::string("the ") + word + " edge into level-" + std::to_string(n + 1) +
                                         " vertex " + std::to_string(w) + " starts at vertex " +
                                         std::to_string(d.edge(n + 1, idx).source)});
          break;
        }
      }
      VertexSet rm = single;
      for (std::size_t m = 1; m <= m_max && n + m <= top; ++m) {
        rm = forward_step(d, n + m - 1, rm);
        VertexSet back = rm;
        for (std::size_t k = n + m; k > n; --k) back = backward_step(d, k, back);
        VertexSet again = back;
        for (std::size_t k = n; k < n + m; ++k) again = forward_step(d, k, again);
        if (again != rm) {
          report.failures.push_back({'d', kind, n, v, m, "R^m(v) differs from R^m S^m R^m(v)"});
        }
      }
    }
  }
}

}  // namespace

FemReport check_fem_properties(const OrderedBratteliDiagram& d, std::size_t m_max) {
  d.require_valid();
  FemReport report;
  check_kind(d, m_max, Extremity::min, report);
  check_kind(d, m_max, Extremity::max, report);
  return report;
}

std::string to_dot(const OrderedBratteliDiagram& d) {
  std::ostringstream os;
  os << "digraph bratteli {\n  rankdir=TB;\n";
  for (std::size_t n = 0; n <= d.num_levels(); ++n) {
    os << "  { rank=same;";
    for (std::size_t v = 0; v < d.vertex_count(n); ++v) os << " \"" << n << ":" << v << "\";";
    os << " }\n";
  }
  for (std::size_t n = 1; n <= d.num_levels(); ++n)
    for (std::size_t i = 0; i < d.edge_count(n); ++i) {
      const Edge& e = d.edge(n, i);
      os << "  \"" << n - 1 << ":" << e.source << "\" -> \"" << n << ":" << e.range << "\" [label=\""
         << d.order_position(n, i) << "\"];\n";
    }
  os << "}\n";
  return os.str();
}

}  // namespace bratteli
