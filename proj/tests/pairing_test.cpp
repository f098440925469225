#include <gtest/gtest.h>

#include <gmpxx.h>

#include "rbeks/error.hpp"
#include "rbeks/op_counter.hpp"
#include "rbeks/pairing.hpp"
#include "test_support.hpp"

using namespace rbeks;
using rbeks::testing::ctx160;

namespace {

// Textbook reference: affine Miller loop with vertical lines, F_p2 = F_p[i],
// i^2 = -1, distortion (x, y) -> (-x, i y), final power (p^2 - 1) / q.
struct Fp2 {
  mpz_class a, b;
};

struct Oracle {
  mpz_class p, q;

  mpz_class md(const mpz_class& v) const {
    mpz_class r = v % p;
    if (r < 0) r += p;
    return r;
  }
  mpz_class inv(const mpz_class& v) const {
    mpz_class r;
    mpz_invert(r.get_mpz_t(), md(v).get_mpz_t(), p.get_mpz_t());
    return r;
  }
  Fp2 mul(const Fp2& x, const Fp2& y) const {
    return {md(x.a * y.a - x.b * y.b), md(x.a * y.b + x.b * y.a)};
  }
  Fp2 div(const Fp2& x, const Fp2& y) const {
    mpz_class n = inv(y.a * y.a + y.b * y.b);
    Fp2 conj{y.a, md(-y.b)};
    Fp2 t = mul(x, conj);
    return {md(t.a * n), md(t.b * n)};
  }
  Fp2 pow(Fp2 x, mpz_class e) const {
    Fp2 r{1, 0};
    while (e > 0) {
      if (mpz_odd_p(e.get_mpz_t())) r = mul(r, x);
      x = mul(x, x);
      e >>= 1;
    }
    return r;
  }

  struct Pt {
    mpz_class x, y;
    bool inf;
  };

  // Line through T and U (tangent when equal) evaluated at the distorted Q,
  // divided by the vertical at T + U. Updates T.
  Fp2 step(Pt& t, const Pt& u, const mpz_class& qx, const mpz_class& qy) const {
    const Fp2 qx2{md(-qx), 0};
    const Fp2 qy2{0, qy};
    if (t.x == u.x && md(t.y + u.y) == 0) {
      Fp2 vert{md(qx2.a - t.x), 0};
      t.inf = true;
      return vert;
    }
    mpz_class lambda =
        (t.x == u.x) ? md((3 * t.x * t.x + 1) * inv(2 * t.y))
                     : md((u.y - t.y) * inv(u.x - t.x));
    mpz_class x3 = md(lambda * lambda - t.x - u.x);
    mpz_class y3 = md(lambda * (t.x - x3) - t.y);
    Fp2 line{md(-t.y - lambda * (qx2.a - t.x)), qy2.b};
    Fp2 vert{md(qx2.a - x3), 0};
    t = {x3, y3, false};
    return div(line, vert);
  }

  Fp2 pair(const G1Element& P, const G1Element& Q) const {
    if (P.is_identity() || Q.is_identity()) return {1, 0};
    Pt base{P.x(), P.y(), false};
    Pt t = base;
    Fp2 f{1, 0};
    const auto bits = mpz_sizeinbase(q.get_mpz_t(), 2);
    for (long i = static_cast<long>(bits) - 2; i >= 0; --i) {
      f = mul(f, f);
      f = mul(f, step(t, t, Q.x(), Q.y()));
      if (mpz_tstbit(q.get_mpz_t(), i)) f = mul(f, step(t, base, Q.x(), Q.y()));
    }
    return pow(f, (p * p - 1) / q);
  }

  Fp2 decode(const GTElement& e) const {
    Bytes enc = e.serialize();
    const std::size_t n = (enc.size() - 3) / 2;
    mpz_class a, b;
    mpz_import(a.get_mpz_t(), n, 1, 1, 0, 0, enc.data() + 3);
    mpz_import(b.get_mpz_t(), n, 1, 1, 0, 0, enc.data() + 3 + n);
    return {a, b};
  }
};

Oracle oracle_for(const BilinearContext& ctx) {
  return {ctx.field_modulus(), ctx.order()};
}

}  // namespace

TEST(Pairing, ParametersAreWellFormed) {
  for (int bits : {160, 224, 256}) {
    auto ctx = BilinearContext::setup(bits);
    const auto& p = ctx.field_modulus();
    const auto& q = ctx.order();
    EXPECT_EQ(mpz_sizeinbase(q.get_mpz_t(), 2), static_cast<std::size_t>(bits));
    EXPECT_GT(mpz_probab_prime_p(q.get_mpz_t(), 30), 0);
    EXPECT_GT(mpz_probab_prime_p(p.get_mpz_t(), 30), 0);
    EXPECT_EQ(mpz_class(p % 4), 3);
    EXPECT_EQ(mpz_class((p + 1) % q), 0);
    const auto& g = ctx.generator();
    EXPECT_FALSE(g.is_identity());
    EXPECT_EQ(mpz_class((g.y() * g.y() - g.x() * g.x() * g.x() - g.x()) % p), 0);
    EXPECT_EQ(static_cast<int>(ctx.level()), bits);
  }
}

TEST(Pairing, UnsupportedLevels) {
  for (int bits : {0, 80, 128, 192, 512}) {
    try {
      BilinearContext::setup(bits);
      FAIL() << bits;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::kUnsupportedSecurityLevel);
    }
  }
}

TEST(Pairing, SetupIsShared) {
  EXPECT_TRUE(BilinearContext::setup(160) == ctx160());
  EXPECT_FALSE(BilinearContext::setup(224) == ctx160());
}

TEST(Pairing, MatchesTextbookTatePairing) {
  const auto& ctx = ctx160();
  const auto o = oracle_for(ctx);
  SeededRandom rng(11);
  const auto& g = ctx.generator();
  auto egg = o.pair(g, g);
  auto lib = o.decode(ctx.pair(g, g));
  EXPECT_EQ(lib.a, egg.a);
  EXPECT_EQ(lib.b, egg.b);
  for (int i = 0; i < 5; ++i) {
    auto a = ctx.random_g1(rng);
    auto b = ctx.random_g1(rng);
    auto want = o.pair(a, b);
    auto got = o.decode(ctx.pair(a, b));
    EXPECT_EQ(got.a, want.a);
    EXPECT_EQ(got.b, want.b);
  }
  // Order-q subgroup of F_p2^*.
  auto one = o.pow(egg, o.q);
  EXPECT_EQ(one.a, 1);
  EXPECT_EQ(one.b, 0);
}

TEST(Pairing, NonDegenerate) {
  for (int bits : {160, 224}) {
    auto ctx = BilinearContext::setup(bits);
    EXPECT_FALSE(ctx.pair(ctx.generator(), ctx.generator()).is_identity());
  }
}

TEST(Pairing, SmallExponents) {
  const auto& ctx = ctx160();
  const auto& g = ctx.generator();
  EXPECT_EQ(ctx.pair(g.pow(ctx.scalar(3)), g.pow(ctx.scalar(5))),
            ctx.pair(g, g).pow(ctx.scalar(15)));
}

TEST(Pairing, IdentityArguments) {
  const auto& ctx = ctx160();
  const auto& g = ctx.generator();
  EXPECT_TRUE(ctx.pair(g, ctx.g1_identity()).is_identity());
  EXPECT_TRUE(ctx.pair(ctx.g1_identity(), g).is_identity());
  EXPECT_EQ(ctx.pair(g, ctx.g1_identity()), ctx.gt_identity());
}

TEST(Pairing, BilinearityThousandTrials) {
  const auto& ctx = ctx160();
  SeededRandom rng(1000);
  const auto& g = ctx.generator();
  const auto egg = ctx.pair(g, g);
  for (int i = 0; i < 1000; ++i) {
    auto a = ctx.random_scalar(rng);
    auto b = ctx.random_scalar(rng);
    ASSERT_EQ(ctx.pair(g.pow(a), g.pow(b)), egg.pow(a * b)) << "trial " << i;
  }
}

TEST(Pairing, SymmetricHundredPairs) {
  const auto& ctx = ctx160();
  SeededRandom rng(100);
  for (int i = 0; i < 100; ++i) {
    auto a = ctx.random_g1(rng);
    auto b = ctx.random_g1(rng);
    ASSERT_EQ(ctx.pair(a, b), ctx.pair(b, a));
  }
}

TEST(Pairing, G1GroupLaws) {
  const auto& ctx = ctx160();
  SeededRandom rng(5);
  const auto& g = ctx.generator();
  auto a = ctx.random_scalar(rng);
  auto b = ctx.random_scalar(rng);
  EXPECT_EQ(g.pow(a) * g.pow(b), g.pow(a + b));
  EXPECT_EQ(g.pow(a).pow(b), g.pow(a * b));
  EXPECT_EQ(g.pow(a) / g.pow(a), ctx.g1_identity());
  EXPECT_EQ(g.pow(a).inverse(), g.pow(-a));
  EXPECT_TRUE(g.pow(ctx.scalar(0)).is_identity());
  EXPECT_EQ(g.pow(ctx.scalar(1)), g);
  EXPECT_EQ(g * g, g.pow(ctx.scalar(2)));
  EXPECT_EQ(g * ctx.g1_identity(), g);
  // q - 1 = -1
  EXPECT_EQ(g.pow(ctx.scalar(ctx.order() - 1)), g.inverse());
  EXPECT_EQ(g.pow(ctx.scalar(ctx.order())), ctx.g1_identity());
}

TEST(Pairing, GTGroupLaws) {
  const auto& ctx = ctx160();
  SeededRandom rng(6);
  auto e = ctx.pair(ctx.generator(), ctx.generator());
  auto a = ctx.random_scalar(rng);
  auto b = ctx.random_scalar(rng);
  EXPECT_EQ(e.pow(a) * e.pow(b), e.pow(a + b));
  EXPECT_EQ(e.pow(a) / e.pow(a), ctx.gt_identity());
  EXPECT_EQ(e.pow(a).inverse(), e.pow(-a));
  auto r = ctx.random_gt(rng);
  EXPECT_FALSE(r.is_identity());
  EXPECT_TRUE(r.pow(ctx.scalar(ctx.order())).is_identity());
}

TEST(Pairing, ScalarArithmetic) {
  const auto& ctx = ctx160();
  SeededRandom rng(7);
  auto a = ctx.random_scalar(rng);
  EXPECT_FALSE(a.is_zero());
  EXPECT_EQ(a * a.inverse(), ctx.scalar(1));
  EXPECT_EQ(a / a, ctx.scalar(1));
  EXPECT_EQ(a - a, ctx.scalar(0));
  EXPECT_EQ(a + (-a), ctx.scalar(0));
  EXPECT_EQ(ctx.scalar(mpz_class(-1)), ctx.scalar(ctx.order() - 1));
  try {
    ctx.scalar(0).inverse();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kInvalidArgument);
  }
}

TEST(Pairing, RoundTripEncodings) {
  const auto& ctx = ctx160();
  SeededRandom rng(8);
  for (int i = 0; i < 50; ++i) {
    auto s = ctx.random_scalar(rng);
    auto sb = s.serialize();
    EXPECT_EQ(sb.size(), ctx.scalar_size());
    EXPECT_EQ(ctx.decode_scalar(sb), s);
    EXPECT_EQ(ctx.decode_scalar(sb).serialize(), sb);

    auto p = ctx.random_g1(rng);
    auto pb = p.serialize();
    EXPECT_EQ(pb.size(), ctx.g1_size());
    EXPECT_EQ(ctx.decode_g1(pb), p);
    EXPECT_EQ(ctx.decode_g1(pb).serialize(), pb);
    auto np = p.inverse();
    EXPECT_EQ(ctx.decode_g1(np.serialize()), np);

    auto t = ctx.random_gt(rng);
    auto tb = t.serialize();
    EXPECT_EQ(tb.size(), ctx.gt_size());
    EXPECT_EQ(ctx.decode_gt(tb), t);
    EXPECT_EQ(ctx.decode_gt(tb).serialize(), tb);
  }
  auto id = ctx.g1_identity();
  EXPECT_EQ(ctx.decode_g1(id.serialize()), id);
  EXPECT_EQ(ctx.decode_gt(ctx.gt_identity().serialize()), ctx.gt_identity());
  EXPECT_EQ(ctx.decode_scalar(ctx.scalar(0).serialize()), ctx.scalar(0));
}

TEST(Pairing, EncodingHeader) {
  const auto& ctx = ctx160();
  auto s = ctx.scalar(9).serialize();
  auto p = ctx.generator().serialize();
  auto t = ctx.gt_identity().serialize();
  EXPECT_EQ(s[0], 0x01);
  EXPECT_EQ(p[0], 0x02);
  EXPECT_EQ(t[0], 0x03);
  for (const auto* b : {&s, &p, &t}) {
    EXPECT_EQ((*b)[1], 0x00);
    EXPECT_EQ((*b)[2], kEncodingVersion);
  }
}

namespace {

template <typename F>
void expect_invalid(F&& f, const char* label) {
  try {
    f();
    ADD_FAILURE() << label << ": accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kInvalidEncoding) << label << ": " << e.what();
  }
}

}  // namespace

TEST(Pairing, RejectsMalformedEncodings) {
  const auto& ctx = ctx160();
  SeededRandom rng(9);
  auto s = ctx.random_scalar(rng).serialize();
  auto p = ctx.random_g1(rng).serialize();
  auto t = ctx.random_gt(rng).serialize();

  expect_invalid([&] { ctx.decode_scalar({}); }, "empty scalar");
  expect_invalid([&] { ctx.decode_g1(s); }, "scalar as G1");
  expect_invalid([&] { ctx.decode_gt(p); }, "G1 as GT");
  expect_invalid([&] {
    auto b = s;
    b.pop_back();
    ctx.decode_scalar(b);
  }, "short scalar");
  expect_invalid([&] {
    auto b = p;
    b.push_back(0);
    ctx.decode_g1(b);
  }, "long G1");
  expect_invalid([&] {
    auto b = s;
    b[2] = 2;
    ctx.decode_scalar(b);
  }, "future version");
  expect_invalid([&] {
    auto b = s;
    std::fill(b.begin() + 3, b.end(), 0xff);
    ctx.decode_scalar(b);
  }, "unreduced scalar");
  expect_invalid([&] {
    auto b = p;
    b[3] = 0x80;
    ctx.decode_g1(b);
  }, "unknown G1 flags");
  expect_invalid([&] {
    auto b = ctx.g1_identity().serialize();
    b.back() = 1;
    ctx.decode_g1(b);
  }, "identity with payload");
  expect_invalid([&] {
    auto b = p;
    std::fill(b.begin() + 4, b.end(), 0xff);
    ctx.decode_g1(b);
  }, "unreduced x");
  expect_invalid([&] {
    auto b = t;
    b.back() ^= 1;
    ctx.decode_gt(b);
  }, "GT norm");
  // Off-curve x: about half of all x values are not abscissae.
  int off_curve = 0;
  for (std::uint8_t v = 1; v < 40; ++v) {
    auto b = p;
    std::fill(b.begin() + 4, b.end(), 0);
    b.back() = v;
    try {
      ctx.decode_g1(b);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::kInvalidEncoding);
      ++off_curve;
    }
  }
  EXPECT_GT(off_curve, 0);
}

TEST(Pairing, RejectsPointsOutsideSubgroup) {
  // (0, 0) lies on y^2 = x^3 + x but has order 2.
  const auto& ctx = ctx160();
  Bytes b(ctx.g1_size(), 0);
  b[0] = 0x02;
  b[2] = kEncodingVersion;
  expect_invalid([&] { ctx.decode_g1(b); }, "order-2 point");
}

TEST(Pairing, ContextMismatch) {
  const auto& a = ctx160();
  auto b = BilinearContext::setup(224);
  try {
    a.pair(a.generator(), b.generator());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kContextMismatch);
  }
  try {
    auto x = a.generator() * b.generator();
    (void)x;
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kContextMismatch);
  }
  try {
    auto x = a.scalar(1) + b.scalar(1);
    (void)x;
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kContextMismatch);
  }
  try {
    a.generator().pow(Scalar{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kContextMismatch);
  }
}

TEST(Pairing, H1Deterministic) {
  const auto& ctx = ctx160();
  EXPECT_EQ(ctx.hash_h1("alpha"), ctx.hash_h1("alpha"));
  EXPECT_EQ(ctx.hash_h1(""), ctx.hash_h1(""));
  EXPECT_FALSE(ctx.hash_h1("").is_zero());
}

TEST(Pairing, H1RegressionVectors) {
  const auto& ctx = ctx160();
  auto a = ctx.hash_h1("keywordA");
  auto b = ctx.hash_h1("keywordB");
  EXPECT_NE(a, b);
  EXPECT_EQ(a.value().get_str(16), "728d78001375af0fab7e447e676c8dbef185116f");
  EXPECT_EQ(b.value().get_str(16), "4f126a8cba5dd18d58c6059a8ca35a49dcf6e0c0");
}

TEST(Pairing, H1NeverZero) {
  const auto& ctx = ctx160();
  SeededRandom rng(10);
  for (int i = 0; i < 10000; ++i) {
    std::uint8_t buf[24];
    rng.fill(buf);
    ASSERT_FALSE(ctx.hash_h1(ByteView(buf, sizeof buf)).is_zero());
  }
}

TEST(Pairing, H1DomainSeparatedFromH2) {
  const auto& ctx = ctx160();
  const auto& g = ctx.generator();
  EXPECT_NE(ctx.hash_h1(g.serialize()), ctx.hash_h2(g));
}

TEST(Pairing, H2CanonicalEncoding) {
  const auto& ctx = ctx160();
  const auto& g = ctx.generator();
  EXPECT_EQ(ctx.hash_h2(g), ctx.hash_h2(ctx.decode_g1(g.serialize())));
  auto g2 = g.pow(ctx.scalar(2));
  EXPECT_EQ(ctx.hash_h2(g2), ctx.hash_h2(g * g));
  EXPECT_NE(ctx.hash_h2(g), ctx.hash_h2(g2));
  EXPECT_EQ(ctx.hash_h2(g).value().get_str(16), "9d827239763a9a5a9fe1dbde8144e804f1d41de4");
  EXPECT_EQ(ctx.hash_h2(g2).value().get_str(16), "e1618acd642f7282a7199063e79ecc7fa1beef99");
}

TEST(Pairing, H2NeverZero) {
  const auto& ctx = ctx160();
  SeededRandom rng(12);
  auto e = ctx.random_g1(rng);
  const auto step = ctx.random_g1(rng);
  for (int i = 0; i < 10000; ++i) {
    ASSERT_FALSE(ctx.hash_h2(e).is_zero());
    e = e * step;
  }
  EXPECT_FALSE(ctx.hash_h2(ctx.g1_identity()).is_zero());
}

TEST(Pairing, OpCounters) {
  const auto& ctx = ctx160();
  SeededRandom rng(13);
  const auto& g = ctx.generator();
  auto a = ctx.random_scalar(rng);
  OpCountScope scope;
  auto x = g.pow(a);
  auto e = ctx.pair(x, g);
  e = e.pow(a);
  ctx.hash_h1("w");
  ctx.hash_h2(x);
  auto r = ctx.random_gt(rng);
  (void)r;
  auto y = x * g;
  (void)y;
  ctx.decode_gt(e.serialize());
  ctx.decode_g1(x.serialize());
  auto c = scope.elapsed();
  EXPECT_EQ(c.g1_exp, 1u);
  EXPECT_EQ(c.gt_exp, 1u);
  EXPECT_EQ(c.pairings, 1u);
  EXPECT_EQ(c.hashes, 2u);
}

TEST(Pairing, RandomSourcesAreDeterministicWhenSeeded) {
  SeededRandom a(42), b(42), c(43);
  EXPECT_EQ(a.next_u64(), b.next_u64());
  EXPECT_NE(a.next_u64(), c.next_u64());
  auto f1 = a.fork(1), f2 = a.fork(1);
  EXPECT_EQ(f1.next_u64(), f2.next_u64());
  for (int i = 0; i < 1000; ++i) EXPECT_LT(a.uniform(7), 7u);
  SystemRandom sys;
  EXPECT_NE(sys.next_u64(), sys.next_u64());
}
