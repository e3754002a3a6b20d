#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bratteli/diagram.hpp"
#include "bratteli/paths.hpp"

namespace bratteli {

// Alternating maps between the level groups of two diagrams:
//   P_n : Z^{B1_n} -> Z^{B2_n}      (|B2_n| x |B1_n|)
//   Q_n : Z^{B2_n} -> Z^{B1_{n+1}}  (|B1_{n+1}| x |B2_n|)
// with P_1 M1_1 = M2_1, Q_n P_n = M1_{n+1} and P_{n+1} Q_n = M2_{n+1}.
struct Intertwining {
  std::vector<CountMatrix> p;
  std::vector<CountMatrix> q;
};

// Stationary intertwining with `levels` copies of P and levels-1 copies of Q.
Intertwining constant_intertwining(const CountMatrix& p, const CountMatrix& q, std::size_t levels);

struct IntertwiningFailure {
  std::size_t level = 0;
  std::string identity;  // "P1*M1_1=M2_1", "Q*P=M1" or "P*Q=M2"
  std::size_t row = 0;
  std::size_t col = 0;
  std::int64_t expected = 0;
  std::int64_t actual = 0;
  std::string message() const;
};

// First violated identity, or nothing when all products match.
std::optional<IntertwiningFailure> check_intertwining(const OrderedBratteliDiagram& b1,
                                                      const OrderedBratteliDiagram& b2, const Intertwining& w);

// The unordered diagram whose level 2n-1 is B1_n and level 2n is B2_n, with
// edge multiplicities from P and Q (level 1 copies B1's root edges).
struct InterleavedDiagram {
  OrderedBratteliDiagram b1;
  OrderedBratteliDiagram b2;
  Intertwining w;
  OrderedBratteliDiagram diagram;

  std::size_t b1_levels() const { return (diagram.num_levels() + 1) / 2; }
  std::size_t b2_levels() const { return diagram.num_levels() / 2; }
};

// Builds without checking the product identities.
InterleavedDiagram assemble_interleaved(const OrderedBratteliDiagram& b1, const OrderedBratteliDiagram& b2,
                                        const Intertwining& w);
// Throws Error(intertwining_invalid) naming the level and entry of the first
// failed identity.
InterleavedDiagram build_interleaved(const OrderedBratteliDiagram& b1, const OrderedBratteliDiagram& b2,
                                     const Intertwining& w);

struct InterleavedFailure {
  std::string property;  // "i" or "ii"
  Extremity kind = Extremity::min;
  std::size_t level = 0;  // level of the (3n-2)-telescoped diagram
  std::size_t vertex = 0;
  std::size_t count = 0;  // extremal neighbours found
};

struct InterleavedReport {
  std::size_t levels_checked = 0;
  std::vector<InterleavedFailure> failures;
  bool ok() const { return failures.empty(); }
};

// Telescopes the interleaved diagram by the levels 1,4,7,... and checks, for
// extremal vertices of every level, that (i) some extremal vertex of the next
// level is reachable and (ii) exactly one extremal vertex of the previous level
// reaches it.  Extremal vertex sets come from B1 telescoped by 1,4,7,... and B2
// telescoped by 2,5,8,...
InterleavedReport check_interleaved_properties(const InterleavedDiagram& b);

struct PairedPath {
  FinitePath b1;
  FinitePath b2;
  std::vector<std::size_t> route;  // vertex of the interleaved diagram at levels 1..2*depth
};

struct ExtremalPairing {
  std::size_t depth = 0;
  std::vector<PairedPath> min;
  std::vector<PairedPath> max;
};

// Matches extremal paths of B1 and B2 at `depth` through the interleaved
// diagram.  Throws Error(unstabilized) if either side has not stabilized and
// Error(pairing_failed) if the matching is not a unique bijection.
ExtremalPairing pair_extremal_paths(const InterleavedDiagram& b, std::size_t depth);

// Edge-level bijections between B1 (resp. B2) edges and two-step paths of the
// interleaved diagram, giving F = F2^{-1} o F1 on finite paths.
class OrbitMapRealization {
 public:
  OrbitMapRealization(const InterleavedDiagram& b, const ExtremalPairing& pairing);

  const PathSpace& b1() const { return b1_; }
  const PathSpace& b2() const { return b2_; }
  std::size_t b1_depth() const { return seg1_.size(); }
  std::size_t b2_depth() const { return seg2_.size(); }

  // B1 path of depth n -> B2 path of depth n-1.
  FinitePath forward(const FinitePath& p) const;
  // B2 path of depth n -> B1 path of depth n.
  FinitePath backward(const FinitePath& q) const;

  // Interleaved-diagram edges covering a B1 (B2) edge; the second entry of a
  // level-1 B1 edge is unused.
  std::pair<std::size_t, std::size_t> b1_segment(std::size_t level, std::size_t edge) const;
  std::pair<std::size_t, std::size_t> b2_segment(std::size_t level, std::size_t edge) const;

  // Interleaved path (edges of levels 1..2n-1, resp. 1..2n) covering a B1
  // (resp. B2) path of depth n.
  std::vector<std::size_t> lift_b1(const FinitePath& p) const;
  std::vector<std::size_t> lift_b2(const FinitePath& q) const;
  const PathSpace& interleaved() const { return bspace_; }

 private:
  using Segment = std::pair<std::size_t, std::size_t>;
  PathSpace b1_, b2_;
  OrderedBratteliDiagram b_;
  PathSpace bspace_;
  std::vector<std::vector<Segment>> seg1_, seg2_;          // [level-1][edge]
  std::vector<std::map<Segment, std::size_t>> inv1_, inv2_;
};

OrbitMapRealization realize_orbit_map(const InterleavedDiagram& b, const ExtremalPairing& pairing);

struct CylinderBijection {
  std::size_t depth = 0;
  bool ok = false;
  std::string detail;
};

// For n = 1..depth: B1 (B2) cylinders of depth n correspond one to one with
// interleaved cylinders of depth 2n-1 (2n), and F, F^{-1} invert each other on
// prefixes.
CylinderBijection check_cylinder_bijection(const OrbitMapRealization& f, std::size_t depth);

enum class CocycleDirection { forward, backward };

struct CocycleValue {
  std::int64_t n = 0;
  bool verified = false;  // confirmed by |n| successor/predecessor steps
};

// forward: p is a B1 path; h2^n(F(p)) = F(h1(p)).
// backward: p is a B2 path; h1^n(F^{-1}(p)) = F^{-1}(h2(p)).
// Throws Error(maximal_path) for a maximal p and Error(needs_depth) when p is
// too short to fix the value.
// Values with |n| above `iteration_limit` are returned unverified.
CocycleValue cocycle(const OrbitMapRealization& f, const FinitePath& p, CocycleDirection direction,
                     std::int64_t iteration_limit = 10000);

struct ContinuityFailure {
  CocycleDirection direction = CocycleDirection::forward;
  FinitePath cylinder;
  std::int64_t first = 0;
  std::int64_t other = 0;
};

struct ContinuityReport {
  std::size_t depth = 0;
  std::size_t cylinders_checked = 0;
  std::size_t values_computed = 0;
  std::size_t unverified = 0;
  std::vector<ContinuityFailure> failures;
  std::vector<std::pair<FinitePath, std::int64_t>> samples;  // a few forward values
  bool ok() const { return failures.empty() && unverified == 0; }
};

// Evaluates both cocycles on every path one level deeper than `depth` and
// checks they are constant on each cylinder of depth <= `depth` that avoids the
// maximal tail.
ContinuityReport check_cocycle_continuity(const OrbitMapRealization& f, std::size_t depth,
                                          std::int64_t iteration_limit = 10000);

struct SearchOptions {
  std::int64_t entry_cap = 12;
  std::uint64_t seed = 0;
};

struct RejectedCandidate {
  CountMatrix p;
  CountMatrix q;
  std::optional<IntertwiningFailure> failure;  // empty when no Q solves Q P = M1
  std::string reason;
};

struct SearchResult {
  std::optional<Intertwining> found;
  std::size_t candidates = 0;
  std::vector<RejectedCandidate> rejected;
};

// Bounded search for a stationary intertwining between diagrams whose
// incidence is constant from level 2 on, with 1x1 or 2x2 matrices.
SearchResult search_stationary_intertwining(const OrderedBratteliDiagram& b1, const OrderedBratteliDiagram& b2,
                                            const SearchOptions& options);

}  // namespace bratteli
