#include "bratteli/matrix.hpp"

#include "bratteli/error.hpp"

namespace bratteli {

BigInt gcd_of(const BigVector& v) {
  BigInt g = 0;
  for (const auto& x : v) {
    BigInt a = abs(x);
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), a.get_mpz_t());
  }
  return g;
}

BigMatrix to_big(const CountMatrix& m) { return m.cast<BigInt>(); }

BigMatrix multiply(const BigMatrix& a, const BigMatrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::invalid_argument, "matrix product: dimension mismatch");
  BigMatrix out(a.rows(), b.cols(), BigInt(0));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += a(i, k) * b(k, j);
    }
  return out;
}

BigVector multiply(const BigMatrix& a, const BigVector& v) {
  if (a.cols() != v.size()) throw Error(ErrorCode::invalid_argument, "matrix-vector product: dimension mismatch");
  BigVector out(a.rows(), BigInt(0));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out[i] += a(i, j) * v[j];
  return out;
}

CountMatrix multiply_checked(const CountMatrix& a, const CountMatrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::invalid_argument, "matrix product: dimension mismatch");
  CountMatrix out(a.rows(), b.cols(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      std::int64_t acc = 0;
      for (std::size_t k = 0; k < a.cols(); ++k) {
        std::int64_t term = 0;
        if (__builtin_mul_overflow(a(i, k), b(k, j), &term) || __builtin_add_overflow(acc, term, &acc))
          throw Error(ErrorCode::overflow, "matrix product overflows 64-bit entries");
      }
      out(i, j) = acc;
    }
  return out;
}

}  // namespace bratteli
