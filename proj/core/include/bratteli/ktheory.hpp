#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "bratteli/diagram.hpp"
#include "bratteli/snf.hpp"

namespace bratteli {

// Z^{V_1} -> Z^{V_2} -> ... with a distinguished unit at level 1.  When the
// diagram's incidence is constant from level 2 on, `tail` repeats that map past
// the last level.
struct DimensionGroupPresentation {
  std::vector<std::size_t> sizes;  // sizes[n-1] = |V_n|
  std::vector<BigMatrix> maps;     // maps[n-1]: level n -> level n+1
  BigVector unit;                  // level 1
  std::optional<BigMatrix> tail;

  std::size_t num_levels() const { return sizes.size(); }
  // Largest level an element can be pushed to (unbounded with a tail).
  bool bounded() const { return !tail.has_value(); }
  const BigMatrix& map_from(std::size_t level) const;
  std::size_t size_at(std::size_t level) const;
  BigVector unit_at(std::size_t level) const;
};

// An element of the limit group given by its coordinates at one level, in the
// basis of single tower floors (minimal projections).
struct DimGroupElement {
  std::size_t level = 1;
  BigVector vector;
  friend bool operator==(const DimGroupElement&, const DimGroupElement&) = default;
};

// Throws Error(presentation_mismatch) on a dimension mismatch.
DimensionGroupPresentation k0_presentation(const OrderedBratteliDiagram& d,
                                           std::optional<BigVector> heights = std::nullopt);

DimGroupElement make_element(const DimensionGroupPresentation& pres, std::size_t level, BigVector vector);
// Function taking value values[v] on the whole tower v at `level`.
DimGroupElement from_tower_values(const DimensionGroupPresentation& pres, std::size_t level,
                                  const BigVector& values);

BigVector push_forward(const DimensionGroupPresentation& pres, const DimGroupElement& g, std::size_t to_level);

enum class Equality { equal, not_equal, unknown };
enum class Positivity { positive, not_positive, unknown };
std::string_view to_string(Equality e);
std::string_view to_string(Positivity p);

Equality element_equal(const DimensionGroupPresentation& pres, const DimGroupElement& a, const DimGroupElement& b,
                       std::size_t depth_budget);
Positivity element_positive(const DimensionGroupPresentation& pres, const DimGroupElement& g,
                            std::size_t depth_budget);

struct K1Rank {
  std::size_t rank = 0;
  bool certified = false;
};

K1Rank k1_rank(const OrderedBratteliDiagram& d, std::size_t depth);

// Group of the presentation when every map from level 1 on (including the
// tail) is square and unimodular; then K0 is free of that rank.
std::optional<std::size_t> stable_free_rank(const DimensionGroupPresentation& pres);

struct FinitePermutationSystem {
  std::size_t n_points = 0;
  std::vector<std::size_t> perm;
  std::vector<int> fiber;
};

// Throws Error(invalid_system) unless perm is a bijection whose restriction to
// every fiber is a single cycle.
void validate_system(const FinitePermutationSystem& s);

struct UnitImage {
  BigVector free;     // coordinates in the free part of the SNF basis
  BigVector torsion;  // residues modulo each elementary divisor > 1
  BigInt content;     // gcd of the free coordinates (basis independent)
};

struct KOracleResult {
  std::size_t k0_rank = 0;
  BigVector k0_torsion;
  std::size_t k1_rank = 0;
  UnitImage unit_image;
};

// K0 = coker(I - P^T), K1 = ker(I - P^T) for the permutation matrix P.
KOracleResult k_oracle_finite_system(const FinitePermutationSystem& s);

BigMatrix permutation_matrix(const FinitePermutationSystem& s);

}  // namespace bratteli
