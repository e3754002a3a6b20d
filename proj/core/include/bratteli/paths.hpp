#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bratteli/diagram.hpp"

namespace bratteli {

// A path from the root through levels 1..depth; also names the cylinder set of
// all infinite paths starting with these edges.
class FinitePath {
 public:
  FinitePath() = default;
  // Throws Error(invalid_argument) if the edges do not compose.
  FinitePath(const OrderedBratteliDiagram& d, std::vector<std::size_t> edges);

  std::size_t depth() const { return edges_.size(); }
  const std::vector<std::size_t>& edges() const { return edges_; }
  // Edge of level `level` (1-based).
  std::size_t edge(std::size_t level) const { return edges_.at(level - 1); }
  std::size_t terminal_vertex() const { return terminal_; }

  FinitePath prefix(const OrderedBratteliDiagram& d, std::size_t depth) const;
  std::string to_string() const;

  friend bool operator==(const FinitePath& a, const FinitePath& b) { return a.edges_ == b.edges_; }
  friend auto operator<=>(const FinitePath& a, const FinitePath& b) { return a.edges_ <=> b.edges_; }

 private:
  friend class PathSpace;
  struct Trusted {};
  // For edges already known to compose.
  FinitePath(Trusted, std::vector<std::size_t> edges, std::size_t terminal)
      : edges_(std::move(edges)), terminal_(terminal) {}

  std::vector<std::size_t> edges_;
  std::size_t terminal_ = 0;
};

// Parses "e1,e2,...,ek" (empty string = root path).
FinitePath parse_path(const OrderedBratteliDiagram& d, const std::string& text);

struct ExtremalPathSet {
  Extremity kind = Extremity::min;
  std::size_t depth = 0;
  std::vector<FinitePath> paths;
  bool stabilized = false;
};

// Max path at some depth -> min path at the same depth.
using MaxMinPairing = std::map<FinitePath, FinitePath>;

enum class Verdict { pass, fail, unknown };
std::string_view to_string(Verdict v);

struct PerfectOrderingResult {
  Verdict verdict = Verdict::unknown;
  std::size_t depth = 0;
  MaxMinPairing pairing;
  std::string reason;
};

// Path arithmetic on one diagram.  Holds the diagram together with a table of
// path counts per vertex, built once.
class PathSpace {
 public:
  // Requires a valid diagram; counts are checked for uint64 overflow.
  explicit PathSpace(OrderedBratteliDiagram d);

  const OrderedBratteliDiagram& diagram() const { return d_; }

  // Number of paths from the root to `vertex` at `level`.
  std::uint64_t path_count(std::size_t level, std::size_t vertex) const { return counts_.at(level).at(vertex); }
  std::uint64_t total_paths(std::size_t level) const;

  FinitePath min_path_to(std::size_t level, std::size_t vertex) const;
  FinitePath max_path_to(std::size_t level, std::size_t vertex) const;
  bool is_min_path(const FinitePath& p) const;
  bool is_max_path(const FinitePath& p) const;

  // Position of p among the paths ending at its terminal vertex, in the order
  // where the deepest differing edge decides.
  std::uint64_t rank(const FinitePath& p) const;
  FinitePath unrank(std::size_t level, std::size_t vertex, std::uint64_t r) const;

  // Throws Error(maximal_path) on an all-maximal path.
  FinitePath successor(const FinitePath& p) const;
  // Throws Error(minimal_path) on an all-minimal path.
  FinitePath predecessor(const FinitePath& p) const;
  // Successor extended to maximal paths through `pairing`; a path that is
  // both all-maximal and all-minimal is fixed.
  FinitePath full_successor(const FinitePath& p, const MaxMinPairing& pairing) const;

  // n with successor^n(e) = f for two paths of equal depth through the same
  // terminal vertex.
  std::int64_t orbit_shift(const FinitePath& e, const FinitePath& f) const;

  ExtremalPathSet extremal_paths(std::size_t depth, Extremity kind) const;
  PerfectOrderingResult check_perfect_ordering(std::size_t depth) const;

  // Every path of the given depth, grouped by terminal vertex then rank.
  std::vector<FinitePath> all_paths(std::size_t depth) const;

 private:
  OrderedBratteliDiagram d_;
  std::vector<std::vector<std::uint64_t>> counts_;         // [level][vertex]
  std::vector<std::vector<std::uint64_t>> offset_before_;  // [level-1][edge]
  std::vector<std::vector<bool>> min_extendable_, max_extendable_;  // [level][vertex]
};

// Pairing induced by group labels: each all-maximal path is sent to the
// all-minimal path whose terminal vertex has the same label.
MaxMinPairing pairing_from_labels(const PathSpace& space, std::size_t depth);

}  // namespace bratteli
