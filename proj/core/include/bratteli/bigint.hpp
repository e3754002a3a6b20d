#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

namespace bratteli {

using BigInt = mpz_class;
using BigVector = std::vector<BigInt>;

inline BigInt big(std::int64_t v) { return BigInt(static_cast<long>(v)); }

inline std::string to_string(const BigInt& v) { return v.get_str(); }

BigInt gcd_of(const BigVector& v);

}  // namespace bratteli
