#include <random>

#include "doctest.h"
#include "support/oracles.hpp"

using namespace bratteli;

namespace {

BigMatrix big_rows(std::vector<std::vector<std::int64_t>> rows) { return to_big(CountMatrix::from_rows(rows)); }

BigMatrix diagonal_matrix(const SnfResult& r, std::size_t rows, std::size_t cols) {
  BigMatrix d(rows, cols, BigInt(0));
  for (std::size_t i = 0; i < r.diagonal.size(); ++i) d(i, i) = r.diagonal[i];
  return d;
}

void check_snf(const BigMatrix& a) {
  SnfResult r = smith_normal_form(a);
  REQUIRE(r.diagonal.size() == std::min(a.rows(), a.cols()));
  CHECK(multiply(multiply(r.left, a), r.right) == diagonal_matrix(r, a.rows(), a.cols()));
  CHECK(abs(determinant(r.left)) == 1);
  CHECK(abs(determinant(r.right)) == 1);
  for (std::size_t i = 0; i + 1 < r.diagonal.size(); ++i) {
    CHECK(r.diagonal[i] >= 0);
    if (r.diagonal[i] != 0) CHECK(r.diagonal[i + 1] % r.diagonal[i] == 0);
    else CHECK(r.diagonal[i + 1] == 0);
  }
  auto expect = oracle::invariant_factors(a);
  REQUIRE(r.rank() == expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) CHECK(r.diagonal[i] == expect[i]);
}

}  // namespace

TEST_CASE("known normal forms") {
  SnfResult r = smith_normal_form(big_rows({{2, 4}, {6, 8}}));
  CHECK(r.diagonal == BigVector{2, 4});
  CHECK(smith_normal_form(big_rows({{0, 0}, {0, 0}})).rank() == 0);
  CHECK(smith_normal_form(big_rows({{1, 0, 0}, {0, 1, 0}})).diagonal == BigVector{1, 1});
  CHECK(cokernel(big_rows({{2, 0}, {0, 3}})) == AbelianGroup{0, {6}});
  CHECK(cokernel(big_rows({{4, 0}, {0, 6}, {0, 0}})) == AbelianGroup{1, {2, 12}});
  CHECK(kernel_rank(big_rows({{1, 2}, {2, 4}})) == 1);
  CHECK(determinant(big_rows({{2, 1}, {1, 2}})) == 3);
}

TEST_CASE("normal form of I - P^T for a single cycle") {
  FinitePermutationSystem s{4, {1, 2, 3, 0}, {0, 0, 0, 0}};
  BigMatrix m = BigMatrix::identity(4);
  BigMatrix p = permutation_matrix(s);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) m(i, j) -= p(j, i);
  CHECK(cokernel(m) == AbelianGroup{1, {}});
  CHECK(kernel_rank(m) == 1);
  check_snf(m);
}

TEST_CASE("property: normal form matches determinantal divisors") {
  std::mt19937 rng(31);
  std::uniform_int_distribution<int> shape(1, 4), entry(-6, 6);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t rows = shape(rng), cols = shape(rng);
    BigMatrix a(rows, cols, BigInt(0));
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) a(i, j) = entry(rng);
    check_snf(a);
    if (rows == cols) {
      std::vector<std::vector<mpz_class>> m(rows, std::vector<mpz_class>(cols));
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m[i][j] = a(i, j);
      CHECK(determinant(a) == oracle::cofactor_det(m));
    }
  }
}

TEST_CASE("entries beyond 64 bits stay exact") {
  BigInt huge("123456789012345678901234567890");
  BigMatrix a(2, 2, BigInt(0));
  a(0, 0) = huge * 6;
  a(0, 1) = huge * 4;
  a(1, 0) = huge * 2;
  a(1, 1) = 0;
  check_snf(a);
}
