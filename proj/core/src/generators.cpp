#include "bratteli/generators.hpp"

#include <map>
#include <set>
#include <string>

#include "bratteli/error.hpp"

namespace bratteli {

OrderedBratteliDiagram odometer(std::size_t base, std::size_t levels) {
  if (base < 2) throw Error(ErrorCode::invalid_argument, "odometer base must be at least 2");
  if (levels < 1) throw Error(ErrorCode::invalid_argument, "odometer needs at least one level");
  std::vector<std::size_t> counts(levels + 1, 1);
  std::vector<std::vector<Edge>> edges(levels, std::vector<Edge>(base, Edge{0, 0}));
  return OrderedBratteliDiagram(std::move(counts), std::move(edges));
}

OrderedBratteliDiagram stationary_adic(const CountMatrix& m, OrderRule rule, std::size_t levels) {
  if (levels < 1) throw Error(ErrorCode::invalid_argument, "stationary diagram needs at least one level");
  if (m.rows() == 0 || m.rows() != m.cols()) throw Error(ErrorCode::invalid_argument, "matrix must be square and nonempty");
  const std::size_t k = m.rows();
  std::vector<std::int64_t> row_sum(k, 0), col_sum(k, 0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      if (m(i, j) < 0) throw Error(ErrorCode::invalid_argument, "matrix entries must be non-negative");
      row_sum[i] += m(i, j);
      col_sum[j] += m(i, j);
    }
  for (std::size_t i = 0; i < k; ++i) {
    if (row_sum[i] == 0) throw Error(ErrorCode::invalid_argument, "matrix row " + std::to_string(i) + " is zero");
    if (col_sum[i] == 0) throw Error(ErrorCode::invalid_argument, "matrix column " + std::to_string(i) + " is zero");
  }
  std::vector<std::size_t> counts(levels + 1, k);
  counts[0] = 1;
  std::vector<std::vector<Edge>> edges(levels);
  for (std::size_t w = 0; w < k; ++w)
    for (std::int64_t c = 0; c < row_sum[w]; ++c) edges[0].push_back({0, w});
  for (std::size_t n = 2; n <= levels; ++n)
    for (std::size_t w = 0; w < k; ++w)
      for (std::size_t step = 0; step < k; ++step) {
        std::size_t v = rule == OrderRule::by_source ? step : k - 1 - step;
        for (std::int64_t c = 0; c < m(w, v); ++c) edges[n - 1].push_back({v, w});
      }
  return OrderedBratteliDiagram(std::move(counts), std::move(edges));
}

OrderedBratteliDiagram disjoint_union(const std::vector<OrderedBratteliDiagram>& parts) {
  if (parts.empty()) throw Error(ErrorCode::invalid_argument, "disjoint union of nothing");
  const std::size_t levels = parts.front().num_levels();
  for (const auto& p : parts)
    if (p.num_levels() != levels)
      throw Error(ErrorCode::invalid_argument, "disjoint union needs components with equal num_levels");
  std::vector<std::size_t> counts(levels + 1, 0);
  counts[0] = 1;
  std::vector<std::vector<Edge>> edges(levels);
  GroupLabels labels(levels);
  std::vector<std::size_t> offset(levels + 1, 0);
  for (std::size_t c = 0; c < parts.size(); ++c) {
    const auto& p = parts[c];
    for (std::size_t n = 1; n <= levels; ++n) {
      for (const Edge& e : p.edges(n))
        edges[n - 1].push_back({n == 1 ? 0 : e.source + offset[n - 1], e.range + offset[n]});
    }
    for (std::size_t n = 1; n <= levels; ++n) {
      counts[n] += p.vertex_count(n);
      labels[n - 1].insert(labels[n - 1].end(), p.vertex_count(n), static_cast<int>(c));
    }
    for (std::size_t n = 1; n <= levels; ++n) offset[n] += p.vertex_count(n);
  }
  return OrderedBratteliDiagram(std::move(counts), std::move(edges), std::move(labels));
}

CycleSystem finite_cycle_system(const std::vector<std::size_t>& lengths, std::size_t levels) {
  if (lengths.empty()) throw Error(ErrorCode::invalid_argument, "need at least one cycle");
  if (levels < 1) throw Error(ErrorCode::invalid_argument, "need at least one level");
  FinitePermutationSystem s;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (lengths[i] == 0) throw Error(ErrorCode::invalid_argument, "cycle lengths must be positive");
    std::size_t start = s.n_points;
    for (std::size_t j = 0; j < lengths[i]; ++j) {
      s.perm.push_back(j + 1 < lengths[i] ? start + j + 1 : start);
      s.fiber.push_back(static_cast<int>(i));
    }
    s.n_points += lengths[i];
  }
  const std::size_t c = lengths.size();
  std::vector<std::size_t> counts(levels + 1, c);
  counts[0] = 1;
  std::vector<std::vector<Edge>> edges(levels);
  for (std::size_t i = 0; i < c; ++i)
    for (std::size_t j = 0; j < lengths[i]; ++j) edges[0].push_back({0, i});
  for (std::size_t n = 2; n <= levels; ++n)
    for (std::size_t i = 0; i < c; ++i) edges[n - 1].push_back({i, i});
  GroupLabels labels(levels);
  for (auto& level : labels)
    for (std::size_t i = 0; i < c; ++i) level.push_back(static_cast<int>(i));
  return {std::move(s), OrderedBratteliDiagram(std::move(counts), std::move(edges), std::move(labels))};
}

void validate_tower_system(const TowerSystem& s) {
  if (s.heights.empty()) throw Error(ErrorCode::invalid_argument, "tower system has no groups");
  if (s.top_group.size() != s.heights.size())
    throw Error(ErrorCode::invalid_argument, "top_group must list every group");
  std::vector<std::size_t> landing(s.heights.size(), 0);
  for (std::size_t t = 0; t < s.heights.size(); ++t) {
    if (s.heights[t].empty()) throw Error(ErrorCode::invalid_argument, "group " + std::to_string(t) + " has no bases");
    if (s.top_group[t].size() != s.heights[t].size())
      throw Error(ErrorCode::invalid_argument, "top_group of group " + std::to_string(t) + " has the wrong length");
    for (std::size_t k = 0; k < s.heights[t].size(); ++k) {
      if (s.heights[t][k] < 1) throw Error(ErrorCode::invalid_argument, "tower heights must be at least 1");
      std::size_t target = s.top_group[t][k];
      if (target >= s.heights.size()) throw Error(ErrorCode::invalid_argument, "top_group names a missing group");
      if (target != t)
        throw Error(ErrorCode::invalid_argument, "top of tower (" + std::to_string(t) + "," + std::to_string(k) +
                                                     ") leaves its group");
      ++landing[target];
    }
  }
  for (std::size_t t = 0; t < s.heights.size(); ++t)
    if (landing[t] != s.heights[t].size())
      throw Error(ErrorCode::invalid_argument, "tops landing in group " + std::to_string(t) +
                                                   " do not match its bases");
}

void validate_refinement(const TowerSystem& coarse, const TowerSystem& fine, const TowerRefinement& r) {
  auto fail = [](char letter, const std::string& what) {
    throw Error(ErrorCode::refinement_invalid, std::string("(") + letter + ") " + what);
  };
  auto tower = [](std::size_t t, std::size_t k) {
    return "(" + std::to_string(t) + "," + std::to_string(k) + ")";
  };
  if (fine.heights.size() != coarse.heights.size())
    fail('c', "finer system has " + std::to_string(fine.heights.size()) + " groups, coarser has " +
                  std::to_string(coarse.heights.size()));
  if (r.records.size() != fine.heights.size()) fail('c', "records must cover every finer group");
  std::set<std::pair<std::size_t, std::size_t>> met;
  for (std::size_t t = 0; t < fine.heights.size(); ++t) {
    if (r.records[t].size() != fine.heights[t].size())
      fail('c', "records must cover every base of finer group " + std::to_string(t));
    std::optional<std::pair<std::size_t, std::size_t>> first_base, last_top;
    for (std::size_t k = 0; k < fine.heights[t].size(); ++k) {
      const auto& recs = r.records[t][k];
      if (recs.empty()) fail('e', "finer tower " + tower(t, k) + " traverses nothing");
      std::int64_t expected = 0;
      for (const auto& rec : recs) {
        if (rec.group >= coarse.heights.size() || rec.base >= coarse.heights[rec.group].size())
          fail('f', "finer tower " + tower(t, k) + " names a missing coarser tower " + tower(rec.group, rec.base));
        if (rec.group != t)
          fail('c', "finer tower " + tower(t, k) + " enters coarser group " + std::to_string(rec.group));
        if (rec.offset != expected)
          fail('e', "finer tower " + tower(t, k) + " enters " + tower(rec.group, rec.base) + " at height " +
                        std::to_string(rec.offset) + ", expected " + std::to_string(expected));
        expected += coarse.heights[rec.group][rec.base];
        met.insert({rec.group, rec.base});
      }
      if (expected != fine.heights[t][k])
        fail('e', "height of finer tower " + tower(t, k) + " is " + std::to_string(fine.heights[t][k]) +
                      " but the traversed coarser heights add up to " + std::to_string(expected));
      std::pair<std::size_t, std::size_t> b{recs.front().group, recs.front().base};
      std::pair<std::size_t, std::size_t> e{recs.back().group, recs.back().base};
      if (first_base && *first_base != b)
        fail('d', "bases of finer group " + std::to_string(t) + " start in different coarser bases");
      if (last_top && *last_top != e)
        fail('e', "tops of finer group " + std::to_string(t) + " end in different coarser towers");
      first_base = b;
      last_top = e;
    }
  }
  for (std::size_t t = 0; t < coarse.heights.size(); ++t)
    for (std::size_t k = 0; k < coarse.heights[t].size(); ++k)
      if (!met.count({t, k})) fail('f', "coarser tower " + tower(t, k) + " is never traversed");
}

OrderedBratteliDiagram towers_to_diagram(const TowerSequence& seq) {
  if (seq.systems.empty()) throw Error(ErrorCode::invalid_argument, "tower sequence is empty");
  if (seq.refinements.size() + 1 != seq.systems.size())
    throw Error(ErrorCode::invalid_argument, "need one refinement between consecutive tower systems");
  for (const auto& s : seq.systems) validate_tower_system(s);
  for (std::size_t i = 0; i < seq.refinements.size(); ++i)
    validate_refinement(seq.systems[i], seq.systems[i + 1], seq.refinements[i]);

  auto vertex_index = [](const TowerSystem& s) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> idx;
    for (std::size_t t = 0; t < s.heights.size(); ++t)
      for (std::size_t k = 0; k < s.heights[t].size(); ++k) idx.emplace(std::pair{t, k}, idx.size());
    return idx;
  };
  const std::size_t levels = seq.systems.size();
  std::vector<std::size_t> counts{1};
  std::vector<std::vector<Edge>> edges(levels);
  GroupLabels labels(levels);
  for (std::size_t n = 0; n < levels; ++n) {
    const TowerSystem& s = seq.systems[n];
    auto idx = vertex_index(s);
    counts.push_back(idx.size());
    for (std::size_t t = 0; t < s.heights.size(); ++t)
      for (std::size_t k = 0; k < s.heights[t].size(); ++k) labels[n].push_back(static_cast<int>(t));
    if (n == 0) {
      for (const auto& [tk, v] : idx)
        for (std::int64_t j = 0; j < s.heights[tk.first][tk.second]; ++j) edges[0].push_back({0, v});
      continue;
    }
    auto prev = vertex_index(seq.systems[n - 1]);
    const auto& recs = seq.refinements[n - 1].records;
    for (const auto& [tk, v] : idx)
      for (const auto& rec : recs[tk.first][tk.second]) edges[n].push_back({prev.at({rec.group, rec.base}), v});
  }
  return OrderedBratteliDiagram(std::move(counts), std::move(edges), std::move(labels));
}

TowerSequence odometer_towers(std::size_t base, std::size_t levels) {
  if (base < 2 || levels < 1) throw Error(ErrorCode::invalid_argument, "odometer towers need base >= 2, levels >= 1");
  TowerSequence seq;
  std::int64_t h = 1;
  for (std::size_t n = 0; n < levels; ++n) {
    std::int64_t prev = h;
    h *= static_cast<std::int64_t>(base);
    seq.systems.push_back({{{h}}, {{0}}});
    if (n > 0) {
      TowerRefinement r;
      r.records = {{{}}};
      for (std::size_t j = 0; j < base; ++j)
        r.records[0][0].push_back({0, 0, static_cast<std::int64_t>(j) * prev});
      seq.refinements.push_back(std::move(r));
    }
  }
  return seq;
}

}  // namespace bratteli
