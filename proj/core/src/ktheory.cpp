#include "bratteli/ktheory.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "bratteli/error.hpp"
#include "bratteli/paths.hpp"

namespace bratteli {

const BigMatrix& DimensionGroupPresentation::map_from(std::size_t level) const {
  if (level >= 1 && level < sizes.size()) return maps[level - 1];
  if (level >= sizes.size() && tail) return *tail;
  throw Error(ErrorCode::level_out_of_range, "no map out of level " + std::to_string(level));
}

std::size_t DimensionGroupPresentation::size_at(std::size_t level) const {
  if (level == 0) throw Error(ErrorCode::level_out_of_range, "levels start at 1");
  if (level <= sizes.size()) return sizes[level - 1];
  if (tail) return tail->rows();
  throw Error(ErrorCode::level_out_of_range, "level " + std::to_string(level) + " beyond the presentation");
}

BigVector DimensionGroupPresentation::unit_at(std::size_t level) const {
  BigVector v = unit;
  for (std::size_t n = 1; n < level; ++n) v = multiply(map_from(n), v);
  return v;
}

DimensionGroupPresentation k0_presentation(const OrderedBratteliDiagram& d, std::optional<BigVector> heights) {
  d.require_valid();
  if (d.num_levels() == 0) throw Error(ErrorCode::invalid_argument, "diagram has no levels");
  DimensionGroupPresentation p;
  for (std::size_t n = 1; n <= d.num_levels(); ++n) p.sizes.push_back(d.vertex_count(n));
  for (std::size_t n = 2; n <= d.num_levels(); ++n) p.maps.push_back(to_big(incidence_matrix(d, n)));
  if (heights) {
    if (heights->size() != d.vertex_count(1))
      throw Error(ErrorCode::presentation_mismatch, "heights have " + std::to_string(heights->size()) +
                                                        " entries but level 1 has " +
                                                        std::to_string(d.vertex_count(1)) + " vertices");
    for (const auto& h : *heights)
      if (h <= 0) throw Error(ErrorCode::invalid_argument, "heights must be strictly positive");
    p.unit = *heights;
  } else {
    CountMatrix first = incidence_matrix(d, 1);
    for (std::size_t v = 0; v < first.rows(); ++v) p.unit.push_back(big(first(v, 0)));
  }
  if (p.maps.size() >= 2 &&
      std::all_of(p.maps.begin(), p.maps.end(), [&](const BigMatrix& m) { return m == p.maps.front(); }))
    p.tail = p.maps.front();
  return p;
}

DimGroupElement make_element(const DimensionGroupPresentation& pres, std::size_t level, BigVector vector) {
  if (vector.size() != pres.size_at(level))
    throw Error(ErrorCode::presentation_mismatch, "element has " + std::to_string(vector.size()) +
                                                      " coordinates but level " + std::to_string(level) + " has " +
                                                      std::to_string(pres.size_at(level)));
  return {level, std::move(vector)};
}

DimGroupElement from_tower_values(const DimensionGroupPresentation& pres, std::size_t level,
                                  const BigVector& values) {
  BigVector h = pres.unit_at(level);
  if (values.size() != h.size())
    throw Error(ErrorCode::presentation_mismatch, "tower values do not match the level size");
  BigVector v(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) v[i] = values[i] * h[i];
  return {level, std::move(v)};
}

BigVector push_forward(const DimensionGroupPresentation& pres, const DimGroupElement& g, std::size_t to_level) {
  if (g.vector.size() != pres.size_at(g.level))
    throw Error(ErrorCode::presentation_mismatch, "element does not belong to this presentation");
  if (to_level < g.level) throw Error(ErrorCode::invalid_argument, "cannot push an element backwards");
  BigVector v = g.vector;
  for (std::size_t n = g.level; n < to_level; ++n) v = multiply(pres.map_from(n), v);
  return v;
}

std::string_view to_string(Equality e) {
  switch (e) {
    case Equality::equal: return "equal";
    case Equality::not_equal: return "not_equal";
    case Equality::unknown: return "unknown";
  }
  return "unknown";
}

std::string_view to_string(Positivity p) {
  switch (p) {
    case Positivity::positive: return "positive";
    case Positivity::not_positive: return "not_positive";
    case Positivity::unknown: return "unknown";
  }
  return "unknown";
}

namespace {

bool injective(const BigMatrix& m) { return smith_normal_form(m).rank() == m.cols(); }

std::size_t last_level(const DimensionGroupPresentation& pres, std::size_t from, std::size_t budget) {
  std::size_t target = from + budget;
  if (pres.bounded()) target = std::min(target, pres.num_levels());
  return std::max(target, from);
}

}  // namespace

Equality element_equal(const DimensionGroupPresentation& pres, const DimGroupElement& a, const DimGroupElement& b,
                       std::size_t depth_budget) {
  std::size_t level = std::max(a.level, b.level);
  BigVector va = push_forward(pres, a, level);
  BigVector vb = push_forward(pres, b, level);
  std::size_t last = last_level(pres, level, depth_budget);
  for (;;) {
    if (va == vb) return Equality::equal;
    if (level == last) break;
    va = multiply(pres.map_from(level), va);
    vb = multiply(pres.map_from(level), vb);
    ++level;
  }
  // The difference survives for good when every later map is injective.
  for (std::size_t n = level; n < pres.num_levels(); ++n)
    if (!injective(pres.map_from(n))) return Equality::unknown;
  if (pres.tail && !injective(*pres.tail)) return Equality::unknown;
  return Equality::not_equal;
}

Positivity element_positive(const DimensionGroupPresentation& pres, const DimGroupElement& g,
                            std::size_t depth_budget) {
  std::size_t level = g.level;
  BigVector v = push_forward(pres, g, level);
  std::size_t last = last_level(pres, level, depth_budget);
  std::vector<BigVector> seen;  // primitive directions met beyond the presentation
  for (;;) {
    bool nonneg = std::all_of(v.begin(), v.end(), [](const BigInt& x) { return x >= 0; });
    if (nonneg) return Positivity::positive;
    // Incidence maps of valid diagrams have no zero column, so a nonzero
    // nonpositive vector stays nonzero and nonpositive forever.
    bool nonpos = std::all_of(v.begin(), v.end(), [](const BigInt& x) { return x <= 0; });
    if (nonpos) return Positivity::not_positive;
    if (pres.tail && level >= pres.num_levels()) {
      // Under the repeating map a recurring direction means the sign pattern
      // cycles without ever becoming nonnegative.
      BigInt c = gcd_of(v);
      BigVector dir = v;
      for (auto& x : dir) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), c.get_mpz_t());
      if (std::find(seen.begin(), seen.end(), dir) != seen.end()) return Positivity::not_positive;
      seen.push_back(std::move(dir));
    }
    if (level == last) return Positivity::unknown;
    v = multiply(pres.map_from(level), v);
    ++level;
  }
}

K1Rank k1_rank(const OrderedBratteliDiagram& d, std::size_t depth) {
  PathSpace space(d);
  ExtremalPathSet mins = space.extremal_paths(depth, Extremity::min);
  return {mins.paths.size(), mins.stabilized};
}

std::optional<std::size_t> stable_free_rank(const DimensionGroupPresentation& pres) {
  auto unimodular = [](const BigMatrix& m) {
    if (m.rows() != m.cols()) return false;
    return abs(determinant(m)) == 1;
  };
  for (const auto& m : pres.maps)
    if (!unimodular(m)) return std::nullopt;
  if (pres.tail && !unimodular(*pres.tail)) return std::nullopt;
  return pres.sizes.front();
}

void validate_system(const FinitePermutationSystem& s) {
  if (s.n_points == 0) throw Error(ErrorCode::invalid_system, "system has no points");
  if (s.perm.size() != s.n_points || s.fiber.size() != s.n_points)
    throw Error(ErrorCode::invalid_system, "perm and fiber must have n entries");
  std::vector<bool> hit(s.n_points, false);
  for (std::size_t x : s.perm) {
    if (x >= s.n_points || hit[x]) throw Error(ErrorCode::invalid_system, "perm is not a bijection");
    hit[x] = true;
  }
  std::vector<bool> visited(s.n_points, false);
  std::map<int, std::size_t> cycles_per_fiber;
  for (std::size_t start = 0; start < s.n_points; ++start) {
    if (visited[start]) continue;
    std::size_t x = start;
    do {
      visited[x] = true;
      if (s.fiber[s.perm[x]] != s.fiber[x])
        throw Error(ErrorCode::invalid_system, "fiber labels are not invariant under perm");
      x = s.perm[x];
    } while (x != start);
    if (++cycles_per_fiber[s.fiber[start]] > 1)
      throw Error(ErrorCode::invalid_system,
                  "fiber " + std::to_string(s.fiber[start]) + " contains more than one cycle");
  }
}

BigMatrix permutation_matrix(const FinitePermutationSystem& s) {
  BigMatrix p(s.n_points, s.n_points, BigInt(0));
  for (std::size_t i = 0; i < s.n_points; ++i) p(i, s.perm[i]) = 1;
  return p;
}

KOracleResult k_oracle_finite_system(const FinitePermutationSystem& s) {
  validate_system(s);
  const std::size_t n = s.n_points;
  BigMatrix a = BigMatrix::identity(n);
  BigMatrix pt = permutation_matrix(s).transpose();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) -= pt(i, j);
  SnfResult snf = smith_normal_form(a);

  KOracleResult out;
  const std::size_t r = snf.rank();
  out.k0_rank = n - r;
  out.k1_rank = n - r;
  for (const auto& x : snf.diagonal)
    if (x > 1) out.k0_torsion.push_back(x);
  BigVector ones(n, BigInt(1));
  BigVector coords = multiply(snf.left, ones);
  for (std::size_t i = 0; i < n; ++i) {
    const BigInt di = i < snf.diagonal.size() ? snf.diagonal[i] : BigInt(0);
    if (di == 0) {
      out.unit_image.free.push_back(coords[i]);
    } else if (di > 1) {
      BigInt res;
      mpz_fdiv_r(res.get_mpz_t(), coords[i].get_mpz_t(), di.get_mpz_t());
      out.unit_image.torsion.push_back(res);
    }
  }
  out.unit_image.content = gcd_of(out.unit_image.free);
  return out;
}

}  // namespace bratteli
