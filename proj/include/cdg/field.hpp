#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <gmpxx.h>

namespace cdg {

// Prime field F_p for p < 2^30 (the bound keeps Shoup-style SIMD reduction
// valid). Elements are canonical residues in [0, p). The field object is a
// small value type carried by matrices and spaces.
struct FpField {
  using Elt = std::uint32_t;

  std::uint32_t p;

  explicit FpField(std::uint32_t prime = 32003) : p(prime) {
    if (p < 2 || p >= (1u << 30)) throw std::invalid_argument("fp: prime out of range [2, 2^30)");
    for (std::uint64_t q = 2; q * q <= p; ++q)
      if (p % q == 0) throw std::invalid_argument("fp: modulus " + std::to_string(p) + " is not prime");
  }

  Elt zero() const { return 0; }
  Elt one() const { return 1 % p; }
  bool is_zero(Elt a) const { return a == 0; }
  Elt from_int(long long v) const {
    long long r = v % static_cast<long long>(p);
    return static_cast<Elt>(r < 0 ? r + p : r);
  }
  Elt add(Elt a, Elt b) const { Elt s = a + b; return s >= p ? s - p : s; }
  Elt sub(Elt a, Elt b) const { return a >= b ? a - b : a + p - b; }
  Elt neg(Elt a) const { return a == 0 ? 0 : p - a; }
  Elt mul(Elt a, Elt b) const { return static_cast<Elt>(std::uint64_t(a) * b % p); }
  Elt inv(Elt a) const {
    if (a == 0) throw std::domain_error("fp: inverse of zero");
    // extended Euclid on (a, p)
    std::int64_t t = 0, nt = 1, r = p, nr = a;
    while (nr != 0) {
      std::int64_t q = r / nr;
      std::int64_t tmp = t - q * nt; t = nt; nt = tmp;
      tmp = r - q * nr; r = nr; nr = tmp;
    }
    if (t < 0) t += p;
    return static_cast<Elt>(t);
  }
  Elt div(Elt a, Elt b) const { return mul(a, inv(b)); }
  std::string str(Elt a) const { return std::to_string(a); }
  bool operator==(const FpField&) const = default;
};

// Exact rationals backed by GMP. Same interface as FpField so the whole
// stack can be instantiated over either field.
struct RatField {
  using Elt = mpq_class;

  Elt zero() const { return Elt(0); }
  Elt one() const { return Elt(1); }
  bool is_zero(const Elt& a) const { return sgn(a) == 0; }
  Elt from_int(long long v) const { return Elt(static_cast<long>(v)); }
  Elt from_fraction(long long num, long long den) const {
    if (den == 0) throw std::domain_error("rat: zero denominator");
    Elt q(static_cast<long>(num), static_cast<long>(den));
    q.canonicalize();
    return q;
  }
  Elt add(const Elt& a, const Elt& b) const { return a + b; }
  Elt sub(const Elt& a, const Elt& b) const { return a - b; }
  Elt neg(const Elt& a) const { return -a; }
  Elt mul(const Elt& a, const Elt& b) const { return a * b; }
  Elt inv(const Elt& a) const {
    if (sgn(a) == 0) throw std::domain_error("rat: inverse of zero");
    return 1 / a;
  }
  Elt div(const Elt& a, const Elt& b) const { return mul(a, inv(b)); }
  std::string str(const Elt& a) const { return a.get_str(); }
  bool operator==(const RatField&) const { return true; }
};

} // namespace cdg
