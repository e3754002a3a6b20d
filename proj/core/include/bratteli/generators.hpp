#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bratteli/diagram.hpp"
#include "bratteli/ktheory.hpp"

namespace bratteli {

// One vertex per level with `base` parallel edges.
OrderedBratteliDiagram odometer(std::size_t base, std::size_t levels);

enum class OrderRule { by_source, reverse_source };

// Constant incidence `m` (rows: range vertices, columns: source vertices).  The
// root sends row-sum many edges to each level-1 vertex, so [[d]] gives the
// d-odometer.
OrderedBratteliDiagram stationary_adic(const CountMatrix& m, OrderRule rule, std::size_t levels);

// Components share the root; group labels are component indices.
OrderedBratteliDiagram disjoint_union(const std::vector<OrderedBratteliDiagram>& parts);

struct CycleSystem {
  FinitePermutationSystem system;
  OrderedBratteliDiagram diagram;
};

// Disjoint cycles of the given lengths, and the diagram with one tower per
// cycle: lengths[i] edges from the root, then a single edge per level.
CycleSystem finite_cycle_system(const std::vector<std::size_t>& lengths, std::size_t levels = 4);

// Combinatorial Kakutani-Rokhlin data.  Groups t with bases k of height
// heights[t][k]; top_group[t][k] is the group the top of tower (t,k) returns to.
struct TowerSystem {
  std::vector<std::vector<std::int64_t>> heights;
  std::vector<std::vector<std::size_t>> top_group;
};

// A finer tower (t',k') climbs through coarser towers in order; each record
// says which coarser tower it enters and at which height of the finer tower.
struct TraversalRecord {
  std::size_t group = 0;
  std::size_t base = 0;
  std::int64_t offset = 0;
};

struct TowerRefinement {
  std::vector<std::vector<std::vector<TraversalRecord>>> records;  // [t'][k']
};

// systems[0] is the first nontrivial partition; refinements[i] refines
// systems[i] into systems[i+1].
struct TowerSequence {
  std::vector<TowerSystem> systems;
  std::vector<TowerRefinement> refinements;
};

// Throws Error(invalid_argument) on a malformed tower system.
void validate_tower_system(const TowerSystem& s);
// Throws Error(refinement_invalid) naming the violated condition.
void validate_refinement(const TowerSystem& coarse, const TowerSystem& fine, const TowerRefinement& r);

// Vertices (n,t,k) in lexicographic order; one edge per traversal record,
// ordered by offset.  Level 1 has J_{t,k} edges from the root.
OrderedBratteliDiagram towers_to_diagram(const TowerSequence& seq);

// Odometer tower sequence: a single tower of height base^n at level n.
TowerSequence odometer_towers(std::size_t base, std::size_t levels);

}  // namespace bratteli
