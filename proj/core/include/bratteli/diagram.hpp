#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bratteli/matrix.hpp"

namespace bratteli {

struct Edge {
  std::size_t source = 0;  // vertex at level n-1
  std::size_t range = 0;   // vertex at level n
  friend bool operator==(const Edge&, const Edge&) = default;
};

using GroupLabels = std::vector<std::vector<int>>;  // [level-1][vertex], levels 1..N

struct Violation {
  std::size_t level = 0;
  std::optional<std::size_t> vertex;
  std::optional<std::size_t> edge;
  std::string axiom;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Finite truncation of an ordered Bratteli diagram with levels 0..N.  Level 0
// holds the single root.  Edges of level n go from level n-1 to level n and are
// kept sorted by range (stable), so the edges entering a vertex form one
// contiguous block whose list order is the edge order.
class OrderedBratteliDiagram {
 public:
  OrderedBratteliDiagram() : vertex_counts_{1} { index(); }
  // Throws Error(malformed_diagram) if an edge or label refers outside its level.
  OrderedBratteliDiagram(std::vector<std::size_t> vertex_counts,
                         std::vector<std::vector<Edge>> edges,
                         std::optional<GroupLabels> group_labels = std::nullopt);

  std::size_t num_levels() const { return vertex_counts_.size() - 1; }
  std::size_t vertex_count(std::size_t level) const { return vertex_counts_.at(level); }
  const std::vector<std::size_t>& vertex_counts() const { return vertex_counts_; }

  std::span<const Edge> edges(std::size_t level) const;
  const Edge& edge(std::size_t level, std::size_t index) const { return edges(level)[index]; }
  std::size_t edge_count(std::size_t level) const { return edges(level).size(); }

  // Edge indices [first, last) of level `level` ending at `vertex`.
  std::pair<std::size_t, std::size_t> incoming(std::size_t level, std::size_t vertex) const;
  // Edge indices of level `level + 1` starting at `vertex` (a level-`level` vertex).
  std::span<const std::size_t> outgoing(std::size_t level, std::size_t vertex) const;

  std::size_t order_position(std::size_t level, std::size_t index) const;
  bool is_min_edge(std::size_t level, std::size_t index) const;
  bool is_max_edge(std::size_t level, std::size_t index) const;
  std::size_t min_edge_into(std::size_t level, std::size_t vertex) const;
  std::size_t max_edge_into(std::size_t level, std::size_t vertex) const;

  const std::optional<GroupLabels>& group_labels() const { return labels_; }
  std::optional<int> group_label(std::size_t level, std::size_t vertex) const;

  // Bratteli axioms are checked once at construction.
  bool valid() const { return report_.ok(); }
  const ValidationReport& validation() const { return report_; }
  // Throws Error(malformed_diagram) naming the first violation.
  void require_valid() const;

  friend bool operator==(const OrderedBratteliDiagram& a, const OrderedBratteliDiagram& b) {
    return a.vertex_counts_ == b.vertex_counts_ && a.edges_ == b.edges_ && a.labels_ == b.labels_;
  }

 private:
  void index();

  std::vector<std::size_t> vertex_counts_;
  std::vector<std::vector<Edge>> edges_;  // edges_[n-1] is level n
  std::optional<GroupLabels> labels_;
  std::vector<std::vector<std::size_t>> in_offset_;    // [n-1][v], size |V_n|+1
  std::vector<std::vector<std::size_t>> out_offset_;   // [n][v], size |V_n|+1, into out_edges_
  std::vector<std::vector<std::size_t>> out_edges_;    // [n] edges of level n+1 grouped by source
  ValidationReport report_;
};

ValidationReport validate_diagram(const OrderedBratteliDiagram& d);

// Rows indexed by level-n vertices, columns by level-(n-1) vertices.
CountMatrix incidence_matrix(const OrderedBratteliDiagram& d, std::size_t level);

// Keep levels 0..levels.
OrderedBratteliDiagram truncate(const OrderedBratteliDiagram& d, std::size_t levels);

// Correspondence between edges of a telescoped diagram and paths of the
// original.  cut(0) = 0 and cut(n) is the original level of new level n.
class TelescopeMap {
 public:
  TelescopeMap() = default;
  // segments[n-1] lists the original paths forming the new edges of level n,
  // grouped by range and reverse-lexicographic within a range.
  TelescopeMap(const OrderedBratteliDiagram& original, std::vector<std::size_t> cuts,
               std::vector<std::vector<std::vector<std::size_t>>> segments);

  std::size_t num_levels() const { return cuts_.size() - 1; }
  std::size_t cut(std::size_t new_level) const { return cuts_.at(new_level); }
  const std::vector<std::size_t>& cuts() const { return cuts_; }

  // Original edges (levels cut(n-1)+1..cut(n)) making up new edge `index` of level n.
  const std::vector<std::size_t>& segment(std::size_t new_level, std::size_t index) const;
  std::size_t edge_for(std::size_t new_level, std::span<const std::size_t> segment) const;

  // Original path from the root whose length is a cut point -> telescoped path.
  std::vector<std::size_t> forward(std::span<const std::size_t> original) const;
  std::vector<std::size_t> backward(std::span<const std::size_t> telescoped) const;

 private:
  std::vector<std::size_t> cuts_{0};
  std::vector<std::vector<std::vector<std::size_t>>> segments_;
  // A segment's new edge index is start of its range block plus the sum of
  // per-edge offsets, counting paths from the previous cut level.
  std::vector<std::vector<std::vector<std::size_t>>> offsets_;  // [n-1][k][edge]
  std::vector<std::vector<std::size_t>> block_start_;           // [n-1][vertex at cut(n)]
  std::vector<std::vector<std::size_t>> last_range_;            // [n-1][edge at level cut(n)]
};

struct TelescopedDiagram {
  OrderedBratteliDiagram diagram;
  TelescopeMap map;
};

// cuts strictly increasing, first > 0, last == d.num_levels().  New edges are
// the paths between consecutive cut levels, ordered reverse-lexicographically.
TelescopedDiagram telescope(const OrderedBratteliDiagram& d, const std::vector<std::size_t>& cuts);

enum class Extremity { min, max };
std::string_view to_string(Extremity e);

struct FemFailure {
  char property = 'b';  // 'b', 'c' or 'd'
  Extremity kind = Extremity::min;
  std::size_t level = 0;
  std::size_t vertex = 0;
  std::size_t m = 0;
  std::string message;
};

struct FemReport {
  std::vector<FemFailure> failures;
  bool ok() const { return failures.empty(); }
  bool has_failure(char property) const;
};

// Structural conditions on the vertex sets V_min / V_max of every level.
FemReport check_fem_properties(const OrderedBratteliDiagram& d, std::size_t m_max);

// Vertices of level n that are sources of a minimal (maximal) edge of level n+1.
std::vector<bool> extremal_sources(const OrderedBratteliDiagram& d, std::size_t level, Extremity kind);

std::string to_dot(const OrderedBratteliDiagram& d);

}  // namespace bratteli
