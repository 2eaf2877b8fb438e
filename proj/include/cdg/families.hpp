#pragma once

#include "cdg/algebra.hpp"

namespace cdg {

namespace detail {

template <class F>
struct AlgebraBuilder {
  DeformedAlgebra<F> a;

  AlgebraBuilder(F k, Grading g, int n, std::vector<std::string> names, std::vector<int> degs) {
    a.k = k;
    a.grading = g;
    a.n = n;
    a.names = std::move(names);
    a.degs = std::move(degs);
    a.mult.assign(a.nb(), std::vector<typename DeformedAlgebra<F>::AlgElt>(a.nb(), a.zero_elt()));
    a.diff.assign(a.nb(), a.zero_elt());
    a.unit = a.zero_elt();
    a.curv = a.zero_elt();
  }

  void set_mult(int i, int j, std::vector<std::tuple<int, int, typename F::Elt>> terms) {
    a.mult[i][j] = a.zero_elt();
    for (auto& [s, l, c] : terms) a.mult[i][j][a.idx(s, l)] = c;
  }
  void set_diff(int j, std::vector<std::tuple<int, int, typename F::Elt>> terms) {
    a.diff[j] = a.zero_elt();
    for (auto& [s, l, c] : terms) a.diff[j][a.idx(s, l)] = c;
  }
  void set_unit(std::vector<std::tuple<int, int, typename F::Elt>> terms) {
    a.unit = a.zero_elt();
    for (auto& [s, l, c] : terms) a.unit[a.idx(s, l)] = c;
  }
  void set_curv(std::vector<std::tuple<int, int, typename F::Elt>> terms) {
    a.curv = a.zero_elt();
    for (auto& [s, l, c] : terms) a.curv[a.idx(s, l)] = c;
  }
};

}  // namespace detail

// The ground field alone: one even generator, no differential, no curvature.
template <class F>
DeformedAlgebra<F> trivial_algebra(F k, int n, Grading g = Grading::Z) {
  detail::AlgebraBuilder<F> b(k, g, n, {"1"}, {0});
  b.set_mult(0, 0, {{0, 0, k.one()}});
  b.set_unit({{0, 0, k.one()}});
  return b.a;
}

// One odd generator with x*x = mu*t: a Clifford-type deformation of the exterior line.
// Z/2-graded (x*x is even while |x| is odd).
template <class F>
DeformedAlgebra<F> clifford_line(F k, int n, typename F::Elt mu) {
  detail::AlgebraBuilder<F> b(k, Grading::Z2, n, {"1", "x"}, {0, 1});
  b.set_mult(0, 0, {{0, 0, k.one()}});
  b.set_mult(0, 1, {{0, 1, k.one()}});
  b.set_mult(1, 0, {{0, 1, k.one()}});
  if (n >= 1 && !k.is_zero(mu)) b.set_mult(1, 1, {{1, 0, mu}});
  b.set_unit({{0, 0, k.one()}});
  return b.a;
}

// k[u]/(u^2) with |u| = 2 and curvature t*u; zero differential, commutative.
template <class F>
DeformedAlgebra<F> curved_dual_numbers(F k, int n) {
  detail::AlgebraBuilder<F> b(k, Grading::Z, n, {"1", "u"}, {0, 2});
  b.set_mult(0, 0, {{0, 0, k.one()}});
  b.set_mult(0, 1, {{0, 1, k.one()}});
  b.set_mult(1, 0, {{0, 1, k.one()}});
  b.set_unit({{0, 0, k.one()}});
  if (n >= 1) b.set_curv({{1, 1, k.one()}});
  return b.a;
}

// Exterior line tensor dual numbers: |x| = 1, |u| = 2, d(x) = u + mu*t*u, curvature t*u.
template <class F>
DeformedAlgebra<F> curved_mixed(F k, int n, typename F::Elt mu) {
  detail::AlgebraBuilder<F> b(k, Grading::Z, n, {"1", "x", "u", "xu"}, {0, 1, 2, 3});
  auto one = k.one();
  b.set_mult(0, 0, {{0, 0, one}});
  for (int j : {1, 2, 3}) {
    b.set_mult(0, j, {{0, j, one}});
    b.set_mult(j, 0, {{0, j, one}});
  }
  b.set_mult(1, 2, {{0, 3, one}});  // x*u = xu
  b.set_mult(2, 1, {{0, 3, one}});  // u*x = xu (u is even and central)
  // x*x = u*u = all products hitting length > present basis vanish.
  b.set_unit({{0, 0, one}});
  if (n >= 1) {
    b.set_diff(1, {{0, 2, one}, {1, 2, mu}});
    b.set_curv({{1, 2, one}});
  } else {
    b.set_diff(1, {{0, 2, one}});
  }
  return b.a;
}

// Path algebra of the two-vertex quiver with one arrow of degree 1; noncommutative, uncurved.
template <class F>
DeformedAlgebra<F> path_a2(F k, int n) {
  detail::AlgebraBuilder<F> b(k, Grading::Z, n, {"e1", "e2", "al"}, {0, 0, 1});
  auto one = k.one();
  b.set_mult(0, 0, {{0, 0, one}});
  b.set_mult(1, 1, {{0, 1, one}});
  b.set_mult(2, 0, {{0, 2, one}});  // al . e1 = al
  b.set_mult(1, 2, {{0, 2, one}});  // e2 . al = al
  b.set_unit({{0, 0, one}, {0, 1, one}});
  return b.a;
}

// Two-vertex cyclic quiver, paths of length >= 3 killed, curvature t*(al.be + be.al).
// Noncommutative and curved; the curvature is central in the truncation.
template <class F>
DeformedAlgebra<F> curved_two_cycle(F k, int n) {
  detail::AlgebraBuilder<F> b(k, Grading::Z, n, {"e1", "e2", "al", "be", "albe", "beal"},
                              {0, 0, 1, 1, 2, 2});
  auto one = k.one();
  // Arrows: al : 1 -> 2, be : 2 -> 1; product x*y composes y first.
  b.set_mult(0, 0, {{0, 0, one}});
  b.set_mult(1, 1, {{0, 1, one}});
  b.set_mult(2, 0, {{0, 2, one}});  // al.e1
  b.set_mult(1, 2, {{0, 2, one}});  // e2.al
  b.set_mult(3, 1, {{0, 3, one}});  // be.e2
  b.set_mult(0, 3, {{0, 3, one}});  // e1.be
  b.set_mult(2, 3, {{0, 4, one}});  // al.be : loop at 2
  b.set_mult(3, 2, {{0, 5, one}});  // be.al : loop at 1
  b.set_mult(4, 1, {{0, 4, one}});  // albe.e2
  b.set_mult(1, 4, {{0, 4, one}});  // e2.albe
  b.set_mult(5, 0, {{0, 5, one}});  // beal.e1
  b.set_mult(0, 5, {{0, 5, one}});  // e1.beal
  b.set_unit({{0, 0, one}, {0, 1, one}});
  if (n >= 1) b.set_curv({{1, 4, one}, {1, 5, one}});
  return b.a;
}

// Ground field in even degree, two-periodic grading, first-order deformation with c = t.
template <class F>
DeformedAlgebra<F> periodic_point(F k) {
  detail::AlgebraBuilder<F> b(k, Grading::Z2, 1, {"1"}, {0});
  b.set_mult(0, 0, {{0, 0, k.one()}});
  b.set_unit({{0, 0, k.one()}});
  b.set_curv({{1, 0, k.one()}});
  return b.a;
}

inline std::vector<std::string> algebra_family_names() {
  return {"trivial", "clifford", "dual", "mixed", "a2", "twocycle", "point2"};
}

// Build a family by name; mu is used by clifford and mixed, ignored elsewhere.
template <class F>
DeformedAlgebra<F> make_family(const std::string& name, F k, int n, typename F::Elt mu) {
  if (name == "trivial") return trivial_algebra(k, n);
  if (name == "clifford") return clifford_line(k, n, mu);
  if (name == "dual") return curved_dual_numbers(k, n);
  if (name == "mixed") return curved_mixed(k, n, mu);
  if (name == "a2") return path_a2(k, n);
  if (name == "twocycle") return curved_two_cycle(k, n);
  if (name == "point2") return periodic_point(k);
  throw std::invalid_argument("unknown algebra family: " + name);
}

}  // namespace cdg
