#include <random>

#include "doctest.h"
#include "support/oracles.hpp"

using namespace bratteli;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::count_mismatch;
}

OrderedBratteliDiagram paired_binary(std::size_t levels) {
  std::vector<std::size_t> cuts;
  for (std::size_t k = 0; k < levels; ++k) cuts.push_back(2 * k + 1);
  return telescope(odometer(2, 2 * levels - 1), cuts).diagram;
}

struct Pipeline {
  InterleavedDiagram b;
  ExtremalPairing pairing;
  OrbitMapRealization f;
};

Pipeline run_pipeline(const OrderedBratteliDiagram& b1, const OrderedBratteliDiagram& b2, const CountMatrix& p,
                      const CountMatrix& q, std::size_t pair_depth) {
  InterleavedDiagram b = build_interleaved(b1, b2, constant_intertwining(p, q, b1.num_levels()));
  REQUIRE(check_interleaved_properties(b).ok());
  ExtremalPairing pairing = pair_extremal_paths(b, pair_depth);
  OrbitMapRealization f = realize_orbit_map(b, pairing);
  return {b, pairing, f};
}

// Fiber-swapping pair: B1 = (2-odometer by pairs) + 3-odometer, B2 = 3-odometer + 4-odometer.
struct FiberPair {
  OrderedBratteliDiagram b1, b2;
  CountMatrix p, q;
};

FiberPair fiber_pair(std::size_t levels) {
  OrderedBratteliDiagram b1 = disjoint_union({paired_binary(levels), odometer(3, levels)});
  OrderedBratteliDiagram b2 = disjoint_union({odometer(3, levels), odometer(4, levels)});
  return {b1, b2, CountMatrix::from_rows({{0, 1}, {2, 0}}), CountMatrix::from_rows({{0, 2}, {3, 0}})};
}

}  // namespace

TEST_CASE("intertwining identities") {
  auto b1 = paired_binary(5);
  auto b2 = odometer(4, 5);
  CHECK_FALSE(check_intertwining(b1, b2, constant_intertwining(CountMatrix(1, 1, 2), CountMatrix(1, 1, 2), 5)));

  auto f = check_intertwining(b1, b2, constant_intertwining(CountMatrix(1, 1, 2), CountMatrix(1, 1, 1), 5));
  REQUIRE(f);
  CHECK(f->identity == "Q*P=M1");
  CHECK(f->level == 1);
  CHECK(f->expected == 4);
  CHECK(f->actual == 2);

  auto g = check_intertwining(odometer(2, 4), odometer(3, 4), constant_intertwining(CountMatrix(1, 1, 1), CountMatrix(1, 1, 1), 4));
  REQUIRE(g);
  CHECK(g->identity == "P1*M1_1=M2_1");

  CHECK(code_of([&] { build_interleaved(odometer(2, 4), odometer(3, 4), constant_intertwining(CountMatrix(1, 1, 1), CountMatrix(1, 1, 1), 4)); }) ==
        ErrorCode::intertwining_invalid);
  CHECK(code_of([&] { check_intertwining(b1, b2, constant_intertwining(CountMatrix(1, 1, -2), CountMatrix(1, 1, -2), 5)); }) ==
        ErrorCode::intertwining_invalid);
  CHECK(code_of([&] { check_intertwining(b1, b2, constant_intertwining(CountMatrix(2, 2, 1), CountMatrix(1, 1, 2), 5)); }) ==
        ErrorCode::intertwining_invalid);
}

TEST_CASE("property: perturbed intertwinings are rejected") {
  auto fp = fiber_pair(5);
  Intertwining good = constant_intertwining(fp.p, fp.q, 5);
  REQUIRE_FALSE(check_intertwining(fp.b1, fp.b2, good));
  std::mt19937 rng(41);
  std::uniform_int_distribution<int> coin(0, 1), idx(0, 1), level(0, 3), delta(1, 2);
  for (int trial = 0; trial < 200; ++trial) {
    Intertwining w = good;
    auto& m = coin(rng) ? w.p[level(rng)] : w.q[level(rng)];
    m(idx(rng), idx(rng)) += delta(rng);
    CHECK(check_intertwining(fp.b1, fp.b2, w).has_value());
  }
}

TEST_CASE("interleaved diagram levels") {
  auto b1 = paired_binary(4);
  auto b2 = odometer(4, 4);
  auto b = build_interleaved(b1, b2, constant_intertwining(CountMatrix(1, 1, 2), CountMatrix(1, 1, 2), 4));
  CHECK(b.diagram.num_levels() == 8);
  CHECK(b.b1_levels() == 4);
  CHECK(b.b2_levels() == 4);
  CHECK(b.diagram.edge_count(1) == 2);
  for (std::size_t n = 2; n <= 8; ++n) CHECK(b.diagram.edge_count(n) == 2);
  // Odd levels reproduce B1 and even levels B2 after telescoping.
  auto odd = telescope(truncate(b.diagram, 7), {1, 3, 5, 7}).diagram;
  for (std::size_t n = 1; n <= 4; ++n) CHECK(incidence_matrix(odd, n) == incidence_matrix(b1, n));
  auto even = telescope(b.diagram, {2, 4, 6, 8}).diagram;
  for (std::size_t n = 1; n <= 4; ++n) CHECK(incidence_matrix(even, n) == incidence_matrix(b2, n));
}

TEST_CASE("properties (i) and (ii)") {
  SUBCASE("fiber-swapping union pair passes") {
    auto fp = fiber_pair(6);
    auto b = build_interleaved(fp.b1, fp.b2, constant_intertwining(fp.p, fp.q, 6));
    auto r = check_interleaved_properties(b);
    CHECK(r.ok());
    CHECK(r.levels_checked > 0);
  }
  SUBCASE("mixing both fibers into one vertex breaks uniqueness") {
    auto b1 = disjoint_union({odometer(2, 6), odometer(2, 6)});
    auto b2 = odometer(4, 6);
    auto b = assemble_interleaved(b1, b2, constant_intertwining(CountMatrix::from_rows({{1, 1}}),
                                                                 CountMatrix::from_rows({{1}, {1}}), 6));
    auto r = check_interleaved_properties(b);
    CHECK_FALSE(r.ok());
    bool saw_ii = false;
    for (const auto& f : r.failures)
      if (f.property == "ii" && f.count == 2) saw_ii = true;
    CHECK(saw_ii);
  }
}

TEST_CASE("extremal pairing") {
  SUBCASE("odometers pair their unique extremal paths") {
    auto pl = run_pipeline(paired_binary(6), odometer(4, 6), CountMatrix(1, 1, 2), CountMatrix(1, 1, 2), 3);
    REQUIRE(pl.pairing.min.size() == 1);
    CHECK(pl.pairing.min[0].b1.to_string() == "0,0,0");
    CHECK(pl.pairing.min[0].b2.to_string() == "0,0,0");
    REQUIRE(pl.pairing.max.size() == 1);
    CHECK(pl.pairing.max[0].b1.to_string() == "1,3,3");
    CHECK(pl.pairing.max[0].b2.to_string() == "3,3,3");
  }
  SUBCASE("union fibers are matched through the swap") {
    auto fp = fiber_pair(6);
    auto pl = run_pipeline(fp.b1, fp.b2, fp.p, fp.q, 3);
    REQUIRE(pl.pairing.min.size() == 2);
    for (const auto& pp : pl.pairing.min) {
      auto l1 = fp.b1.group_label(3, pp.b1.terminal_vertex());
      auto l2 = fp.b2.group_label(3, pp.b2.terminal_vertex());
      CHECK(*l2 == 1 - *l1);
    }
  }
  SUBCASE("growing extremal sets are refused") {
    auto b = build_interleaved(paired_binary(3), odometer(4, 3),
                               constant_intertwining(CountMatrix(1, 1, 2), CountMatrix(1, 1, 2), 3));
    CHECK(code_of([&] { pair_extremal_paths(b, 9); }) != ErrorCode::count_mismatch);
  }
}

TEST_CASE("orbit map on the binary/quaternary pair") {
  auto pl = run_pipeline(paired_binary(8), odometer(4, 8), CountMatrix(1, 1, 2), CountMatrix(1, 1, 2), 3);
  const auto& f = pl.f;
  CHECK(check_cylinder_bijection(f, 6).ok);
  for (std::size_t n = 2; n <= 7; ++n) {
    CHECK(f.forward(f.b1().min_path_to(n, 0)) == f.b2().min_path_to(n - 1, 0));
    CHECK(f.forward(f.b1().max_path_to(n, 0)) == f.b2().max_path_to(n - 1, 0));
    CHECK(f.backward(f.b2().min_path_to(n, 0)) == f.b1().min_path_to(n, 0));
  }
  // Each B1 edge covers a distinct two-step route.
  std::set<std::pair<std::size_t, std::size_t>> segs;
  for (std::size_t i = 0; i < f.b1().diagram().edge_count(3); ++i) segs.insert(f.b1_segment(3, i));
  CHECK(segs.size() == f.b1().diagram().edge_count(3));

  SUBCASE("orbit segments stay in one orbit") {
    std::mt19937 rng(6);
    auto paths = f.b1().all_paths(6);
    std::uniform_int_distribution<std::size_t> pick(0, paths.size() - 1);
    for (int trial = 0; trial < 50; ++trial) {
      FinitePath p = paths[pick(rng)];
      FinitePath image = f.forward(p);
      FinitePath at = p;
      for (int j = 0; j < 20 && !f.b1().is_max_path(at); ++j) {
        at = f.b1().successor(at);
        FinitePath moved = f.forward(at);
        CHECK(moved.terminal_vertex() == image.terminal_vertex());
        CHECK_NOTHROW(f.b2().orbit_shift(image, moved));
      }
    }
  }
  SUBCASE("cocycles") {
    ContinuityReport r = check_cocycle_continuity(f, 5);
    CHECK(r.ok());
    CHECK(r.values_computed > 0);
    FinitePath p = parse_path(f.b1().diagram(), "0,0,0,0");
    CocycleValue v = cocycle(f, p, CocycleDirection::forward);
    CHECK(v.verified);
    CHECK(f.b2().orbit_shift(f.forward(p), f.forward(f.b1().successor(p))) == v.n);
    CHECK(code_of([&] { cocycle(f, f.b1().max_path_to(4, 0), CocycleDirection::forward); }) == ErrorCode::maximal_path);
    CHECK(code_of([&] { cocycle(f, parse_path(f.b1().diagram(), "1,3,3,0"), CocycleDirection::forward); }) ==
          ErrorCode::needs_depth);
  }
}

TEST_CASE("identity intertwining gives cocycle one") {
  auto d = odometer(2, 8);
  auto pl = run_pipeline(d, d, CountMatrix(1, 1, 1), CountMatrix(1, 1, 2), 3);
  for (const auto& p : pl.f.b1().all_paths(6)) {
    if (pl.f.b1().is_max_path(p) || p.prefix(d, 5) == pl.f.b1().max_path_to(5, 0)) continue;
    auto v = cocycle(pl.f, p, CocycleDirection::forward);
    CHECK(v.n == 1);
    CHECK(v.verified);
  }
  CHECK(check_cocycle_continuity(pl.f, 5).ok());
}

TEST_CASE("fiber pair cocycles are locally constant") {
  auto fp = fiber_pair(7);
  auto pl = run_pipeline(fp.b1, fp.b2, fp.p, fp.q, 3);
  CHECK(check_cylinder_bijection(pl.f, 4).ok);
  ContinuityReport r = check_cocycle_continuity(pl.f, 4);
  CHECK(r.ok());
  CHECK(k1_rank(fp.b1, 4).rank == k1_rank(fp.b2, 4).rank);
}

TEST_CASE("bounded intertwining search") {
  SUBCASE("finds P = Q = 2 for the binary/quaternary pair") {
    SearchResult r = search_stationary_intertwining(paired_binary(5), odometer(4, 5), {6, 3});
    REQUIRE(r.found);
    CHECK(r.found->p[0] == CountMatrix(1, 1, 2));
    CHECK(r.found->q[0] == CountMatrix(1, 1, 2));
  }
  SUBCASE("2x2 search recovers the fiber swap") {
    auto fp = fiber_pair(4);
    SearchResult r = search_stationary_intertwining(fp.b1, fp.b2, {3, 0});
    REQUIRE(r.found);
    CHECK_FALSE(check_intertwining(fp.b1, fp.b2, *r.found));
  }
  SUBCASE("binary against ternary has no solution") {
    SearchResult r = search_stationary_intertwining(odometer(2, 4), odometer(3, 4), {12, 0});
    CHECK_FALSE(r.found);
    CHECK(r.rejected.size() == 169);
  }
  SUBCASE("non-stationary input is refused") {
    CHECK(code_of([] { search_stationary_intertwining(odometer(2, 1), odometer(2, 3), {}); }) ==
          ErrorCode::invalid_argument);
  }
}
