#include "bratteli/snf.hpp"

#include <utility>

#include "bratteli/error.hpp"

namespace bratteli {

namespace {

void swap_rows(BigMatrix& m, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(a, j), m(b, j));
}

void swap_cols(BigMatrix& m, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t i = 0; i < m.rows(); ++i) std::swap(m(i, a), m(i, b));
}

// row[target] -= q * row[src]
void sub_row(BigMatrix& m, std::size_t target, std::size_t src, const BigInt& q) {
  if (q == 0) return;
  for (std::size_t j = 0; j < m.cols(); ++j) m(target, j) -= q * m(src, j);
}

void sub_col(BigMatrix& m, std::size_t target, std::size_t src, const BigInt& q) {
  if (q == 0) return;
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, target) -= q * m(i, src);
}

}  // namespace

std::size_t SnfResult::rank() const {
  std::size_t r = 0;
  for (const auto& x : diagonal)
    if (x != 0) ++r;
  return r;
}

SnfResult smith_normal_form(const BigMatrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  BigMatrix d = a;
  BigMatrix u = BigMatrix::identity(m);
  BigMatrix v = BigMatrix::identity(n);
  const std::size_t steps = std::min(m, n);

  for (std::size_t t = 0; t < steps; ++t) {
    // Pivot: nonzero entry of least absolute value in the trailing block.
    bool found = false;
    std::size_t pr = t, pc = t;
    BigInt best;
    for (std::size_t i = t; i < m; ++i)
      for (std::size_t j = t; j < n; ++j)
        if (d(i, j) != 0 && (!found || abs(d(i, j)) < best)) {
          found = true;
          best = abs(d(i, j));
          pr = i;
          pc = j;
        }
    if (!found) break;
    swap_rows(d, t, pr);
    swap_rows(u, t, pr);
    swap_cols(d, t, pc);
    swap_cols(v, t, pc);

    for (;;) {
      bool clean = true;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (d(i, t) == 0) continue;
        BigInt q;
        mpz_fdiv_q(q.get_mpz_t(), d(i, t).get_mpz_t(), d(t, t).get_mpz_t());
        sub_row(d, i, t, q);
        sub_row(u, i, t, q);
        if (d(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (d(t, j) == 0) continue;
        BigInt q;
        mpz_fdiv_q(q.get_mpz_t(), d(t, j).get_mpz_t(), d(t, t).get_mpz_t());
        sub_col(d, j, t, q);
        sub_col(v, j, t, q);
        if (d(t, j) != 0) clean = false;
      }
      if (!clean) {
        // A remainder smaller than the pivot survived; move it into place.
        std::size_t br = t, bc = t;
        BigInt small = abs(d(t, t));
        for (std::size_t i = t + 1; i < m; ++i)
          if (d(i, t) != 0 && abs(d(i, t)) < small) { small = abs(d(i, t)); br = i; bc = t; }
        for (std::size_t j = t + 1; j < n; ++j)
          if (d(t, j) != 0 && abs(d(t, j)) < small) { small = abs(d(t, j)); br = t; bc = j; }
        swap_rows(d, t, br);
        swap_rows(u, t, br);
        swap_cols(d, t, bc);
        swap_cols(v, t, bc);
        continue;
      }
      // Row and column are clear; enforce divisibility of the trailing block.
      bool divides = true;
      for (std::size_t i = t + 1; i < m && divides; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (d(i, j) % d(t, t) != 0) {
            sub_row(d, t, i, BigInt(-1));
            sub_row(u, t, i, BigInt(-1));
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (d(t, t) < 0) {
      for (std::size_t j = 0; j < n; ++j) d(t, j) = -d(t, j);
      for (std::size_t j = 0; j < m; ++j) u(t, j) = -u(t, j);
    }
  }

  SnfResult r;
  r.diagonal.resize(steps);
  for (std::size_t t = 0; t < steps; ++t) r.diagonal[t] = d(t, t);
  r.left = std::move(u);
  r.right = std::move(v);
  return r;
}

AbelianGroup cokernel(const BigMatrix& a) {
  SnfResult s = smith_normal_form(a);
  AbelianGroup g;
  g.free_rank = a.rows() - s.rank();
  for (const auto& x : s.diagonal)
    if (x > 1) g.torsion.push_back(x);
  return g;
}

std::size_t kernel_rank(const BigMatrix& a) { return a.cols() - smith_normal_form(a).rank(); }

BigInt determinant(const BigMatrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::invalid_argument, "determinant of a non-square matrix");
  // Fraction-free Bareiss elimination.
  const std::size_t n = a.rows();
  if (n == 0) return 1;
  BigMatrix m = a;
  BigInt sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t swap = k + 1;
      while (swap < n && m(swap, k) == 0) ++swap;
      if (swap == n) return 0;
      swap_rows(m, k, swap);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        m(i, j) = m(i, j) * m(k, k) - m(i, k) * m(k, j);
        mpz_divexact(m(i, j).get_mpz_t(), m(i, j).get_mpz_t(), prev.get_mpz_t());
      }
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

}  // namespace bratteli
