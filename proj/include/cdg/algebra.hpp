#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cdg/graded.hpp"

namespace cdg {

// Graded algebra over k[t]/(t^(n+1)) with t central of degree 0, an R_n-linear degree-1
// derivation d, and a degree-2 curvature element c in t*A with d(c) = 0 and d^2 = [c,-].
// Elements are coefficient vectors over the (t-power, basis) grid: index s*nb + j <-> t^s e_j.
template <class F>
struct DeformedAlgebra {
  using Elt = typename F::Elt;
  using AlgElt = std::vector<Elt>;

  F k;
  Grading grading = Grading::Z;
  int n = 0;
  std::vector<std::string> names;
  std::vector<int> degs;
  std::vector<std::vector<AlgElt>> mult;  // mult[i][j] = e_i * e_j
  std::vector<AlgElt> diff;               // d(e_j)
  AlgElt unit;
  AlgElt curv;

  bool operator==(const DeformedAlgebra&) const = default;

  int nb() const { return static_cast<int>(names.size()); }
  int dim() const { return (n + 1) * nb(); }
  int idx(int s, int j) const { return s * nb() + j; }
  int deg_norm(int d) const { return norm_deg(grading, d); }

  AlgElt zero_elt() const { return AlgElt(dim(), k.zero()); }
  AlgElt basis_elt(int s, int j) const {
    AlgElt a = zero_elt();
    a[idx(s, j)] = k.one();
    return a;
  }
  bool is_zero_elt(const AlgElt& a) const {
    for (const Elt& x : a)
      if (!k.is_zero(x)) return false;
    return true;
  }
  AlgElt add_elt(const AlgElt& a, const AlgElt& b) const {
    AlgElt r = a;
    for (int i = 0; i < dim(); ++i) r[i] = k.add(r[i], b[i]);
    return r;
  }
  AlgElt sub_elt(const AlgElt& a, const AlgElt& b) const {
    AlgElt r = a;
    for (int i = 0; i < dim(); ++i) r[i] = k.sub(r[i], b[i]);
    return r;
  }
  AlgElt scale_elt(const Elt& c, const AlgElt& a) const {
    AlgElt r = a;
    for (Elt& x : r) x = k.mul(c, x);
    return r;
  }

  // Multiply by t^s, truncating past t^n.
  AlgElt t_shift(const AlgElt& a, int s) const {
    AlgElt r = zero_elt();
    for (int p = 0; p + s <= n; ++p)
      for (int j = 0; j < nb(); ++j) r[idx(p + s, j)] = a[idx(p, j)];
    return r;
  }

  AlgElt mul_elt(const AlgElt& a, const AlgElt& b) const {
    AlgElt r = zero_elt();
    for (int sa = 0; sa <= n; ++sa)
      for (int i = 0; i < nb(); ++i) {
        const Elt& ca = a[idx(sa, i)];
        if (k.is_zero(ca)) continue;
        for (int sb = 0; sa + sb <= n; ++sb)
          for (int j = 0; j < nb(); ++j) {
            Elt c = k.mul(ca, b[idx(sb, j)]);
            if (k.is_zero(c)) continue;
            const AlgElt& tab = mult[i][j];
            for (int sc = 0; sa + sb + sc <= n; ++sc)
              for (int l = 0; l < nb(); ++l) {
                int from = idx(sc, l), to = idx(sa + sb + sc, l);
                r[to] = k.add(r[to], k.mul(c, tab[from]));
              }
          }
      }
    return r;
  }

  AlgElt d_elt(const AlgElt& a) const {
    AlgElt r = zero_elt();
    for (int s = 0; s <= n; ++s)
      for (int j = 0; j < nb(); ++j) {
        const Elt& c = a[idx(s, j)];
        if (k.is_zero(c)) continue;
        for (int sd = 0; s + sd <= n; ++sd)
          for (int l = 0; l < nb(); ++l) {
            int to = idx(s + sd, l);
            r[to] = k.add(r[to], k.mul(c, diff[j][idx(sd, l)]));
          }
      }
    return r;
  }

  bool is_homogeneous(const AlgElt& a, int d) const {
    for (int s = 0; s <= n; ++s)
      for (int j = 0; j < nb(); ++j)
        if (!k.is_zero(a[idx(s, j)]) && deg_norm(degs[j]) != deg_norm(d)) return false;
    return true;
  }

  // Degree of a nonzero homogeneous element; nullopt for zero or mixed.
  std::optional<int> homo_deg(const AlgElt& a) const {
    std::optional<int> d;
    for (int s = 0; s <= n; ++s)
      for (int j = 0; j < nb(); ++j)
        if (!k.is_zero(a[idx(s, j)])) {
          int dj = deg_norm(degs[j]);
          if (d && *d != dj) return std::nullopt;
          d = dj;
        }
    return d;
  }

  // c = t * (c/t); the quotient is canonical modulo t^n (shift coefficients down).
  AlgElt curvature_over_t() const {
    AlgElt r = zero_elt();
    for (int s = 0; s + 1 <= n; ++s)
      for (int j = 0; j < nb(); ++j) r[idx(s, j)] = curv[idx(s + 1, j)];
    return r;
  }

  std::string elt_str(const AlgElt& a) const {
    std::ostringstream os;
    bool first = true;
    for (int s = 0; s <= n; ++s)
      for (int j = 0; j < nb(); ++j) {
        const Elt& c = a[idx(s, j)];
        if (k.is_zero(c)) continue;
        if (!first) os << " + ";
        first = false;
        os << k.str(c);
        if (s > 0) os << "*t" << (s > 1 ? "^" + std::to_string(s) : "");
        os << "*" << names[j];
      }
    if (first) os << "0";
    return os.str();
  }
};

// a . b = (-1)^(|a||b|) b a, same d, curvature -c.
template <class F>
DeformedAlgebra<F> opposite(const DeformedAlgebra<F>& a) {
  DeformedAlgebra<F> r = a;
  for (int i = 0; i < a.nb(); ++i)
    for (int j = 0; j < a.nb(); ++j) {
      bool flip = (a.deg_norm(a.degs[i]) % 2 != 0) && (a.deg_norm(a.degs[j]) % 2 != 0);
      r.mult[i][j] = flip ? a.scale_elt(a.k.neg(a.k.one()), a.mult[j][i]) : a.mult[j][i];
    }
  r.curv = a.scale_elt(a.k.neg(a.k.one()), a.curv);
  return r;
}

// Reduce the deformation order: kill t^(m+1), ..., t^n.
template <class F>
DeformedAlgebra<F> truncate(const DeformedAlgebra<F>& a, int m) {
  if (m < 0 || m > a.n) throw std::invalid_argument("truncate: bad order");
  DeformedAlgebra<F> r;
  r.k = a.k;
  r.grading = a.grading;
  r.n = m;
  r.names = a.names;
  r.degs = a.degs;
  auto cut = [&](const typename DeformedAlgebra<F>::AlgElt& x) {
    typename DeformedAlgebra<F>::AlgElt y = r.zero_elt();
    for (int s = 0; s <= m; ++s)
      for (int j = 0; j < a.nb(); ++j) y[r.idx(s, j)] = x[a.idx(s, j)];
    return y;
  };
  r.mult.assign(a.nb(), std::vector<typename DeformedAlgebra<F>::AlgElt>());
  for (int i = 0; i < a.nb(); ++i)
    for (int j = 0; j < a.nb(); ++j) r.mult[i].push_back(cut(a.mult[i][j]));
  for (int j = 0; j < a.nb(); ++j) r.diff.push_back(cut(a.diff[j]));
  r.unit = cut(a.unit);
  r.curv = cut(a.curv);
  return r;
}

struct ValidationReport {
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
  void fail(std::string msg) { failures.push_back(std::move(msg)); }
  std::string str() const {
    std::string s;
    for (const auto& f : failures) s += f + "\n";
    return s;
  }
};

template <class F>
ValidationReport validate_algebra(const DeformedAlgebra<F>& a) {
  ValidationReport rep;
  const int nb = a.nb(), dim = a.dim();
  if (a.n < 0) rep.fail("order must be nonnegative");
  if (static_cast<int>(a.degs.size()) != nb) rep.fail("degree list size mismatch");
  if (static_cast<int>(a.mult.size()) != nb) rep.fail("mult table rows mismatch");
  for (const auto& row : a.mult)
    if (static_cast<int>(row.size()) != nb) rep.fail("mult table cols mismatch");
  if (static_cast<int>(a.diff.size()) != nb) rep.fail("diff table size mismatch");
  auto len_ok = [&](const typename DeformedAlgebra<F>::AlgElt& x) {
    return static_cast<int>(x.size()) == dim;
  };
  for (const auto& row : a.mult)
    for (const auto& x : row)
      if (!len_ok(x)) rep.fail("mult entry length mismatch");
  for (const auto& x : a.diff)
    if (!len_ok(x)) rep.fail("diff entry length mismatch");
  if (!len_ok(a.unit)) rep.fail("unit length mismatch");
  if (!len_ok(a.curv)) rep.fail("curvature length mismatch");
  if (!rep.ok()) return rep;

  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j)
      if (!a.is_homogeneous(a.mult[i][j], a.degs[i] + a.degs[j]))
        rep.fail("product " + a.names[i] + "*" + a.names[j] + " not homogeneous");
  for (int j = 0; j < nb; ++j)
    if (!a.is_homogeneous(a.diff[j], a.degs[j] + 1))
      rep.fail("d(" + a.names[j] + ") not homogeneous of degree +1");
  if (!a.is_homogeneous(a.curv, 2)) rep.fail("curvature not homogeneous of degree 2");
  if (!a.is_homogeneous(a.unit, 0)) rep.fail("unit not of degree 0");

  for (int s = 0; s <= a.n; ++s)
    for (int j = 0; j < nb; ++j) {
      auto e = a.basis_elt(s, j);
      if (a.mul_elt(a.unit, e) != e) rep.fail("unit fails on left of t^" + std::to_string(s) + " " + a.names[j]);
      if (a.mul_elt(e, a.unit) != e) rep.fail("unit fails on right of t^" + std::to_string(s) + " " + a.names[j]);
    }

  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j)
      for (int l = 0; l < nb; ++l) {
        auto ei = a.basis_elt(0, i), ej = a.basis_elt(0, j), el = a.basis_elt(0, l);
        auto lhs = a.mul_elt(a.mul_elt(ei, ej), el);
        auto rhs = a.mul_elt(ei, a.mul_elt(ej, el));
        if (lhs != rhs)
          rep.fail("associativity fails on (" + a.names[i] + "," + a.names[j] + "," + a.names[l] + ")");
      }

  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j) {
      auto ei = a.basis_elt(0, i), ej = a.basis_elt(0, j);
      auto lhs = a.d_elt(a.mul_elt(ei, ej));
      auto rhs = a.add_elt(a.mul_elt(a.diff[i], ej),
                           a.deg_norm(a.degs[i]) % 2 == 0
                               ? a.mul_elt(ei, a.diff[j])
                               : a.scale_elt(a.k.neg(a.k.one()), a.mul_elt(ei, a.diff[j])));
      if (lhs != rhs) rep.fail("Leibniz fails on (" + a.names[i] + "," + a.names[j] + ")");
    }

  if (!a.is_zero_elt(a.d_elt(a.curv))) rep.fail("curvature is not closed");

  for (int j = 0; j < nb; ++j) {
    auto e = a.basis_elt(0, j);
    auto dd = a.d_elt(a.d_elt(e));
    auto comm = a.sub_elt(a.mul_elt(a.curv, e), a.mul_elt(e, a.curv));
    if (dd != comm) rep.fail("d^2 != [c,-] on " + a.names[j]);
  }

  for (int j = 0; j < nb; ++j)
    if (!a.k.is_zero(a.curv[a.idx(0, j)])) rep.fail("curvature has a t^0 component");

  return rep;
}

}  // namespace cdg
