#pragma once

// Internal arithmetic for the Type A supersingular curve. Not installed.

#include <gmpxx.h>
#include <vector>

#include "rbeks/pairing.hpp"

namespace rbeks::detail {

struct AffinePoint {
  mpz_class x;
  mpz_class y;
  bool infinity = true;
};

// a + b*i with i^2 = -1.
struct Fp2 {
  mpz_class a;
  mpz_class b;
};

struct Group {
  SecurityLevel level;
  mpz_class p;
  mpz_class q;
  mpz_class cofactor;    // (p + 1) / q
  mpz_class sqrt_exp;    // (p + 1) / 4
  mpz_class legendre_exp;  // (p - 1) / 2
  std::size_t p_bytes;
  std::size_t q_bytes;
  AffinePoint generator;
  // generator * 2^i for i in [0, |q|)
  std::vector<AffinePoint> generator_doublings;
};

const Group& type_a_group(SecurityLevel level);

// Curve arithmetic over F_p. None of these touch the op counters.
AffinePoint point_add(const Group& g, const AffinePoint& a, const AffinePoint& b);
AffinePoint point_negate(const Group& g, const AffinePoint& a);
AffinePoint point_mul(const Group& g, const AffinePoint& base, const mpz_class& k);
AffinePoint generator_mul(const Group& g, const mpz_class& k);
bool on_curve(const Group& g, const AffinePoint& a);
// Square root mod p when it exists.
bool field_sqrt(const Group& g, const mpz_class& v, mpz_class& root);

Fp2 fp2_mul(const Group& g, const Fp2& x, const Fp2& y);
Fp2 fp2_sqr(const Group& g, const Fp2& x);
Fp2 fp2_conj(const Group& g, const Fp2& x);
Fp2 fp2_inverse(const Group& g, const Fp2& x);
// Exponentiation of a norm-1 element (inverse is conjugation).
Fp2 unitary_pow(const Group& g, const Fp2& x, const mpz_class& e);
// x^((p^2 - 1) / q)
Fp2 final_exponentiation(const Group& g, const Fp2& x);
// Reduced Tate pairing e(P, distort(Q)).
Fp2 tate_pairing(const Group& g, const AffinePoint& p, const AffinePoint& q);

}  // namespace rbeks::detail
