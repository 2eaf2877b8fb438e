#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cdg/families.hpp"

using namespace cdg;

TEST_CASE("every built-in family passes full validation over F_p and Q") {
  FpField kp(32003);
  RatField kq;
  for (int n = 0; n <= 3; ++n) {
    for (const auto& name : algebra_family_names()) {
      if (name == "point2" && n != 1) continue;
      auto ap = make_family(name, kp, n, kp.from_int(2));
      auto rp = validate_algebra(ap);
      INFO(name, " n=", n, " over F_p: ", rp.str());
      CHECK(rp.ok());
      auto aq = make_family(name, kq, n, kq.from_int(2));
      auto rq = validate_algebra(aq);
      INFO(name, " n=", n, " over Q: ", rq.str());
      CHECK(rq.ok());
    }
  }
}

TEST_CASE("opposite algebra is valid and an involution") {
  FpField k(32003);
  for (const auto& name : algebra_family_names()) {
    int n = name == "point2" ? 1 : 2;
    auto a = make_family(name, k, n, k.from_int(3));
    auto op = opposite(a);
    INFO(name);
    CHECK(validate_algebra(op).ok());
    CHECK(opposite(op) == a);
    // Curvature flips sign, differential is unchanged.
    CHECK(op.curv == a.scale_elt(k.neg(k.one()), a.curv));
    CHECK(op.diff == a.diff);
  }
  // Noncommutative families genuinely change under opposite.
  auto tc = curved_two_cycle(k, 2);
  CHECK(!(opposite(tc).mult == tc.mult));
  CHECK(opposite(path_a2(k, 2)).mult != path_a2(k, 2).mult);
}

TEST_CASE("truncation keeps validity, kills curvature at order zero") {
  FpField k(101);
  for (const auto& name : algebra_family_names()) {
    if (name == "point2") continue;
    auto a = make_family(name, k, 3, k.from_int(5));
    CHECK(truncate(a, 3) == a);
    for (int m = 0; m <= 3; ++m) {
      auto tr = truncate(a, m);
      INFO(name, " -> order ", m);
      CHECK(tr.n == m);
      CHECK(validate_algebra(tr).ok());
    }
    CHECK(truncate(a, 0).curv == truncate(a, 0).zero_elt());
  }
}

TEST_CASE("curvature over t reconstructs the curvature") {
  FpField k(32003);
  for (const auto& name : algebra_family_names()) {
    int n = name == "point2" ? 1 : 2;
    auto a = make_family(name, k, n, k.from_int(7));
    CHECK(a.t_shift(a.curvature_over_t(), 1) == a.curv);
  }
}

TEST_CASE("clifford line multiplies as x^2 = mu t, with t truncation") {
  FpField k(13);
  auto mu = k.from_int(4);
  auto a = clifford_line(k, 2, mu);
  auto x = a.basis_elt(0, 1);
  auto xx = a.mul_elt(x, x);
  CHECK(xx == a.scale_elt(mu, a.basis_elt(1, 0)));
  // (t x)(t x) = mu t^3 = 0 at order 2.
  auto tx = a.t_shift(x, 1);
  CHECK(a.is_zero_elt(a.mul_elt(tx, tx)));
  // (t x) x = mu t^2.
  CHECK(a.mul_elt(tx, x) == a.scale_elt(mu, a.basis_elt(2, 0)));
  // Degree bookkeeping.
  CHECK(a.homo_deg(x) == 1);
  CHECK(a.homo_deg(xx) == 0);
  CHECK(!a.homo_deg(a.add_elt(x, a.unit)).has_value());
}

TEST_CASE("two-cycle quiver is noncommutative with central curvature") {
  RatField k;
  auto a = curved_two_cycle(k, 2);
  auto al = a.basis_elt(0, 2), be = a.basis_elt(0, 3);
  CHECK(a.mul_elt(al, be) == a.basis_elt(0, 4));
  CHECK(a.mul_elt(be, al) == a.basis_elt(0, 5));
  CHECK(!(a.mul_elt(al, be) == a.mul_elt(be, al)));
  // Length-three products vanish.
  CHECK(a.is_zero_elt(a.mul_elt(a.mul_elt(al, be), al)));
  // Curvature commutes with every basis element.
  for (int j = 0; j < a.nb(); ++j) {
    auto e = a.basis_elt(0, j);
    CHECK(a.mul_elt(a.curv, e) == a.mul_elt(e, a.curv));
  }
}

TEST_CASE("mixed family has the advertised twisted differential") {
  RatField k;
  auto mu = k.from_int(3);
  auto a = curved_mixed(k, 2, mu);
  auto x = a.basis_elt(0, 1), u = a.basis_elt(0, 2);
  CHECK(a.d_elt(x) == a.add_elt(u, a.scale_elt(mu, a.t_shift(u, 1))));
  CHECK(a.is_zero_elt(a.d_elt(a.d_elt(x))));
  CHECK(a.is_zero_elt(a.d_elt(a.curv)));
  // u is central.
  CHECK(a.mul_elt(x, u) == a.mul_elt(u, x));
}

TEST_CASE("validation pinpoints broken laws") {
  FpField k(7);
  auto good = curved_mixed(k, 2, k.from_int(1));
  REQUIRE(validate_algebra(good).ok());

  auto bad1 = good;
  bad1.mult[1][2] = bad1.zero_elt();  // x*u = 0 breaks Leibniz and d^2 = [c,-]
  CHECK(!validate_algebra(bad1).ok());

  auto bad2 = good;
  bad2.curv[bad2.idx(0, 2)] = k.one();  // curvature with a t^0 part
  auto rep2 = validate_algebra(bad2);
  CHECK(!rep2.ok());
  bool saw = false;
  for (const auto& f : rep2.failures)
    if (f.find("t^0") != std::string::npos) saw = true;
  CHECK(saw);

  auto bad3 = good;
  bad3.diff[2] = bad3.basis_elt(0, 3);  // d(u) = xu has wrong degree and breaks d^2
  CHECK(!validate_algebra(bad3).ok());

  auto bad4 = good;
  bad4.unit = bad4.basis_elt(1, 0);  // t is not a unit
  CHECK(!validate_algebra(bad4).ok());

  auto bad5 = good;
  bad5.mult[2][1] = bad5.zero_elt();  // u*x = 0: associativity of (x,u,x)? keeps assoc but breaks d^2
  CHECK(!validate_algebra(bad5).ok());
}

TEST_CASE("element pretty-printing") {
  FpField k(7);
  auto a = clifford_line(k, 2, k.from_int(4));
  auto e = a.add_elt(a.scale_elt(k.from_int(3), a.basis_elt(2, 0)), a.basis_elt(0, 1));
  CHECK(a.elt_str(e) == "1*x + 3*t^2*1");
  CHECK(a.elt_str(a.zero_elt()) == "0");
}
