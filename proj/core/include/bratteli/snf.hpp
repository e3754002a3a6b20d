#pragma once

#include "bratteli/matrix.hpp"

namespace bratteli {

struct SnfResult {
  BigVector diagonal;  // min(rows, cols) entries, d_i | d_{i+1}, all >= 0
  BigMatrix left;      // rows x rows, unimodular
  BigMatrix right;     // cols x cols, unimodular
  std::size_t rank() const;
};

// left * a * right = diag(diagonal), padded with zeros to the shape of a.
SnfResult smith_normal_form(const BigMatrix& a);

struct AbelianGroup {
  std::size_t free_rank = 0;
  BigVector torsion;  // elementary divisors > 1, increasing by divisibility
  friend bool operator==(const AbelianGroup&, const AbelianGroup&) = default;
};

AbelianGroup cokernel(const BigMatrix& a);
std::size_t kernel_rank(const BigMatrix& a);

BigInt determinant(const BigMatrix& a);

}  // namespace bratteli
