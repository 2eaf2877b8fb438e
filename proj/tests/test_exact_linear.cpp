#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cdg/matrix.hpp"
#include "cdg/rng.hpp"
#include "cdg/subspace.hpp"

using namespace cdg;

namespace {

template <class F>
Matrix<F> random_matrix(const F& k, Rng& rng, int rows, int cols, double density = 0.6) {
  std::vector<typename Matrix<F>::Entry> es;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (rng.chance(density)) {
        auto v = k.from_int(static_cast<long long>(rng.below(200)) - 100);
        if (!k.is_zero(v)) es.push_back({r, c, v});
      }
  return Matrix<F>::from_triples(k, rows, cols, std::move(es));
}

} // namespace

TEST_CASE("hand-reduced echelon form over F_5 is reproduced exactly") {
  FpField k(5);
  // [1 2 0 3; 2 4 1 1; 0 0 2 4] reduces by hand to [1 2 0 0; 0 0 1 0; 0 0 0 1].
  auto m = Matrix<FpField>::from_dense(k, 3, 4, {1, 2, 0, 3, 2, 4, 1, 1, 0, 0, 2, 4});
  auto r = rref(m);
  CHECK(r.rank == 3);
  CHECK(r.pivots == std::vector<int>{0, 2, 3});
  auto expect = Matrix<FpField>::from_dense(k, 3, 4, {1, 2, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1});
  CHECK(r.rref == expect);
  // Kernel: x0 = -2 x1, i.e. (3,1,0,0) over F_5.
  auto ki = kernel_image(m);
  CHECK(ki.kernel.cols() == 1);
  CHECK(ki.kernel.col_vector(0) == std::vector<std::uint32_t>{3, 1, 0, 0});
}

TEST_CASE("all-ones 2x2 matrix over Q: rank one, kernel (-1, 1)") {
  RatField k;
  auto m = Matrix<RatField>::from_dense(k, 2, 2, {k.one(), k.one(), k.one(), k.one()});
  auto r = rref(m);
  CHECK(r.rank == 1);
  auto ki = kernel_image(m);
  REQUIRE(ki.kernel.cols() == 1);
  CHECK(ki.kernel.at(0, 0) == mpq_class(-1));
  CHECK(ki.kernel.at(1, 0) == mpq_class(1));
  CHECK(ki.image.cols() == 1);
  CHECK(ki.image.at(0, 0) == mpq_class(1));
  CHECK(ki.image.at(1, 0) == mpq_class(1));
}

TEST_CASE("rational elimination keeps exact fractions") {
  RatField k;
  // [[1/2, 1/3], [1/5, 1/7]] is invertible; solve against (1, 0).
  auto m = Matrix<RatField>::from_dense(
      k, 2, 2, {k.from_fraction(1, 2), k.from_fraction(1, 3), k.from_fraction(1, 5), k.from_fraction(1, 7)});
  auto x = solve(m, {k.one(), k.zero()});
  REQUIRE(x.has_value());
  // det = 1/210, so the inverse first column is (30, -42): 30/2 - 42/3 = 1, 30/5 - 42/7 = 0.
  CHECK((*x)[0] == mpq_class(30));
  CHECK((*x)[1] == mpq_class(-42));
}

TEST_CASE("fp kernel and image properties on random instances") {
  FpField k(32003);
  Rng rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    int rows = rng.range(0, 12), cols = rng.range(0, 12);
    auto m = random_matrix(k, rng, rows, cols);
    auto r = rref(m);
    auto ki = kernel_image(m);
    CHECK(ki.kernel.cols() == cols - r.rank);
    CHECK(ki.image.cols() == r.rank);
    CHECK(m.mul(ki.kernel).is_zero());
    // rref is idempotent and preserves the row space.
    auto r2 = rref(r.rref);
    CHECK(r2.rref == r.rref);
    // image columns solve m x = col.
    for (int j = 0; j < ki.image.cols(); ++j)
      CHECK(solve(m, ki.image.col_vector(j)).has_value());
    // determinism: same input, identical result.
    CHECK(rref(m).rref == r.rref);
  }
}

TEST_CASE("solve agrees with hand-checkable consistency") {
  FpField k(32003);
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    int rows = rng.range(1, 10), cols = rng.range(1, 10);
    auto m = random_matrix(k, rng, rows, cols);
    std::vector<std::uint32_t> x0(cols);
    for (auto& v : x0) v = k.from_int(static_cast<long long>(rng.below(32003)));
    auto b = m.apply(x0);
    auto x = solve(m, b);
    REQUIRE(x.has_value());
    CHECK(m.apply(*x) == b);
  }
}

TEST_CASE("subspace arithmetic matches brute-force enumeration over F_3") {
  FpField k(3);
  Rng rng(23);
  const int ambient = 4;
  auto enumerate = [&](const Subspace<FpField>& s) {
    // Count members of k^4 lying in s by direct membership tests.
    int count = 0;
    for (int code = 0; code < 81; ++code) {
      std::vector<std::uint32_t> v(ambient);
      int c = code;
      for (int i = 0; i < ambient; ++i) { v[i] = std::uint32_t(c % 3); c /= 3; }
      if (s.contains(v)) ++count;
    }
    return count;
  };
  auto pow3 = [](int e) { int r = 1; while (e--) r *= 3; return r; };
  for (int trial = 0; trial < 25; ++trial) {
    auto u = Subspace<FpField>::from_columns(random_matrix(k, rng, ambient, rng.range(0, 3)));
    auto v = Subspace<FpField>::from_columns(random_matrix(k, rng, ambient, rng.range(0, 3)));
    auto s = Subspace<FpField>::sum(u, v);
    auto i = Subspace<FpField>::intersect(u, v);
    CHECK(enumerate(u) == pow3(u.dim()));
    CHECK(enumerate(s) == pow3(s.dim()));
    CHECK(enumerate(i) == pow3(i.dim()));
    CHECK(s.contains(u));
    CHECK(s.contains(v));
    CHECK(u.contains(i));
    CHECK(v.contains(i));
    CHECK(s.dim() + i.dim() == u.dim() + v.dim());
    // Brute-force cross-check of the intersection: members of both spans.
    int both = 0;
    for (int code = 0; code < 81; ++code) {
      std::vector<std::uint32_t> w(ambient);
      int c = code;
      for (int j = 0; j < ambient; ++j) { w[j] = std::uint32_t(c % 3); c /= 3; }
      if (u.contains(w) && v.contains(w)) {
        ++both;
        CHECK(i.contains(w));
      }
    }
    CHECK(both == pow3(i.dim()));
  }
}

TEST_CASE("complement_in extends an inner basis to the outer space") {
  FpField k(32003);
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    int ambient = rng.range(1, 10);
    auto u = Subspace<FpField>::from_columns(random_matrix(k, rng, ambient, rng.range(0, ambient)));
    auto w = Subspace<FpField>::image_of(random_matrix(k, rng, ambient, ambient), u);
    auto v = Subspace<FpField>::intersect(u, w);
    auto comp = Subspace<FpField>::complement_in(u, v);
    CHECK(comp.cols() == u.dim() - v.dim());
    auto back = Subspace<FpField>::sum(v, Subspace<FpField>::from_columns(comp));
    CHECK(back == u);
  }
}

TEST_CASE("preimage_of characterizes membership after mapping") {
  FpField k(101);
  Rng rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    int a = rng.range(1, 7), b = rng.range(1, 7);
    auto f = random_matrix(k, rng, a, b);
    auto t = Subspace<FpField>::from_columns(random_matrix(k, rng, a, rng.range(0, 3)));
    auto pre = Subspace<FpField>::preimage_of(f, t);
    for (int j = 0; j < pre.dim(); ++j)
      CHECK(t.contains(f.apply(pre.basis().col_vector(j))));
    // Random vectors outside the preimage must map outside t.
    for (int s = 0; s < 5; ++s) {
      std::vector<std::uint32_t> x(b);
      for (auto& v : x) v = k.from_int(static_cast<long long>(rng.below(101)));
      if (!pre.contains(x)) CHECK(!t.contains(f.apply(x)));
    }
  }
}

TEST_CASE("scalar and avx2 row kernels are exactly equivalent") {
  Rng rng(57);
  const std::uint32_t p = 32003;
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = rng.below(70);
    std::uint32_t c = std::uint32_t(rng.below(p));
    std::vector<std::uint32_t> x(n), y0(n);
    for (auto& v : x) v = std::uint32_t(rng.below(p));
    for (auto& v : y0) v = std::uint32_t(rng.below(p));

    auto ys = y0, yv = y0;
    kern::axpy_scalar(ys.data(), x.data(), c, n, p);
    if (kern::avx2_supported()) {
      kern::axpy_avx2(yv.data(), x.data(), c, n, p);
      CHECK(ys == yv);
    }
    auto zs = y0, zv = y0;
    kern::scal_scalar(zs.data(), c, n, p);
    if (kern::avx2_supported()) {
      kern::scal_avx2(zv.data(), c, n, p);
      CHECK(zs == zv);
    }
  }
  // Large primes near the 2^30 bound still reduce correctly.
  const std::uint32_t q = 1073741789; // largest prime below 2^30
  std::vector<std::uint32_t> x{q - 1, q - 2, 12345, 0, q / 2, q - 1, 1, 7, q - 3, 9, q / 3, 2};
  std::vector<std::uint32_t> ys = x, yv = x;
  kern::axpy_scalar(ys.data(), x.data(), q - 1, x.size(), q);
  if (kern::avx2_supported()) {
    kern::axpy_avx2(yv.data(), x.data(), q - 1, x.size(), q);
    CHECK(ys == yv);
  }
}

TEST_CASE("matrix multiplication through dispatched kernels matches forced scalar") {
  FpField k(32003);
  Rng rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = random_matrix(k, rng, rng.range(1, 15), rng.range(1, 15));
    auto b = random_matrix(k, rng, a.cols(), rng.range(1, 15));
    kern::force(kern::Impl::scalar);
    auto c_scalar = a.mul(b);
    auto r_scalar = rref(a);
    kern::reset();
    auto c_active = a.mul(b);
    auto r_active = rref(a);
    CHECK(c_scalar == c_active);
    CHECK(r_scalar.rref == r_active.rref);
  }
  kern::reset();
}

TEST_CASE("field guards reject invalid moduli and division by zero") {
  CHECK_THROWS(FpField(1));
  CHECK_THROWS(FpField(32004));
  CHECK_THROWS(FpField(1u << 30));
  FpField k(7);
  CHECK_THROWS(k.inv(0));
  CHECK(k.mul(k.inv(3), 3) == 1);
  RatField q;
  CHECK_THROWS(q.inv(q.zero()));
  CHECK_THROWS(q.from_fraction(1, 0));
  CHECK(q.from_fraction(2, 4) == q.from_fraction(1, 2));
}
