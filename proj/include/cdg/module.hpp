#pragma once
// Modules over a deformed algebra: a graded carrier with an action of the
// deformation parameter, an action of each algebra basis element, and a
// degree-1 predifferential. The square of the predifferential is not
// constrained by the carrier; the curvature law d^2 = c.(-) is a separate
// check so that twisted intermediates can be handled uniformly.

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cdg/algebra.hpp"
#include "cdg/graded.hpp"
#include "cdg/matrix.hpp"
#include "cdg/subspace.hpp"

namespace cdg {

template <class F>
struct CdgModule {
  using Elt = typename F::Elt;

  std::shared_ptr<const DeformedAlgebra<F>> alg;
  GradedSpace space;
  GradedMap<F> T;                 // action of the deformation parameter
  GradedMap<F> d;                 // predifferential
  std::vector<GradedMap<F>> act;  // action of each algebra basis element

  const F& field() const { return T.field(); }
  Grading grading() const { return space.grading; }

  static CdgModule make(std::shared_ptr<const DeformedAlgebra<F>> a, GradedSpace sp,
                        GradedMap<F> t, GradedMap<F> dd, std::vector<GradedMap<F>> as) {
    if (!a) throw std::invalid_argument("module: null algebra");
    if (sp.grading != a->grading) throw std::invalid_argument("module: grading mismatch");
    auto shape = [&sp](const GradedMap<F>& g, int deg) {
      return g.src() == sp && g.dst() == sp && g.deg() == norm_deg(sp.grading, deg);
    };
    if (!shape(t, 0)) throw std::invalid_argument("module: parameter action shape");
    if (!shape(dd, 1)) throw std::invalid_argument("module: predifferential shape");
    if (static_cast<int>(as.size()) != a->nb())
      throw std::invalid_argument("module: wrong number of basis actions");
    for (int j = 0; j < a->nb(); ++j)
      if (!shape(as[j], a->degs[j]))
        throw std::invalid_argument("module: action shape for " + a->names[j]);
    return {std::move(a), std::move(sp), std::move(t), std::move(dd), std::move(as)};
  }
};

template <class F>
bool modules_equal(const CdgModule<F>& a, const CdgModule<F>& b) {
  if (!(*a.alg == *b.alg) || !(a.space == b.space)) return false;
  if (!(a.T == b.T) || !(a.d == b.d)) return false;
  for (int j = 0; j < a.alg->nb(); ++j)
    if (!(a.act[j] == b.act[j])) return false;
  return true;
}

template <class F>
GradedMap<F> t_pow(const CdgModule<F>& m, int s) {
  if (s < 0) throw std::invalid_argument("module: negative parameter power");
  GradedMap<F> r = GradedMap<F>::identity(m.field(), m.space);
  for (int i = 0; i < s; ++i) r = compose(m.T, r);
  return r;
}

// Action of a homogeneous algebra element of the given degree.
template <class F>
GradedMap<F> act_elt(const CdgModule<F>& m, const typename DeformedAlgebra<F>::AlgElt& a,
                     int deg) {
  const auto& A = *m.alg;
  if (!A.is_homogeneous(a, deg)) throw std::invalid_argument("module: inhomogeneous coefficient");
  GradedMap<F> r(m.field(), m.space, m.space, deg);
  for (int s = 0; s <= A.n; ++s) {
    GradedMap<F> ts = t_pow(m, s);
    for (int j = 0; j < A.nb(); ++j) {
      const auto& c = a[A.idx(s, j)];
      if (m.field().is_zero(c)) continue;
      r = r.add(compose(ts, m.act[j]).scale(c));
    }
  }
  return r;
}

template <class F>
GradedMap<F> act_elt(const CdgModule<F>& m, const typename DeformedAlgebra<F>::AlgElt& a) {
  auto hd = m.alg->homo_deg(a);
  if (!hd) throw std::invalid_argument("module: element without a single degree");
  return act_elt(m, a, *hd);
}

// d^2 - c.(-): zero exactly when the module satisfies the curvature law.
template <class F>
GradedMap<F> mc_residual(const CdgModule<F>& m) {
  return compose(m.d, m.d).sub(act_elt(m, m.alg->curv, 2));
}

// Check all module laws; with curvature_law=false only the quasi-module laws
// (shapes, nilpotence, unit, multiplicativity, Leibniz) are required.
template <class F>
ValidationReport validate_module(const CdgModule<F>& m, bool curvature_law = true) {
  ValidationReport rep;
  if (!m.alg) {
    rep.fail("null algebra");
    return rep;
  }
  const auto& A = *m.alg;
  const F& k = m.field();
  auto shape = [&m](const GradedMap<F>& g, int deg) {
    return g.src() == m.space && g.dst() == m.space &&
           g.deg() == norm_deg(m.space.grading, deg);
  };
  if (m.space.grading != A.grading) rep.fail("grading mismatch with algebra");
  if (!shape(m.T, 0)) rep.fail("parameter action is not a degree-0 endomorphism");
  if (!shape(m.d, 1)) rep.fail("predifferential is not a degree-1 endomorphism");
  if (static_cast<int>(m.act.size()) != A.nb()) rep.fail("wrong number of basis actions");
  if (!rep.ok()) return rep;
  for (int j = 0; j < A.nb(); ++j)
    if (!shape(m.act[j], A.degs[j])) rep.fail("action of " + A.names[j] + " has wrong shape");
  if (!rep.ok()) return rep;

  if (!t_pow(m, A.n + 1).is_zero()) rep.fail("parameter action is not nilpotent of the right order");
  if (!(act_elt(m, A.unit, 0) == GradedMap<F>::identity(k, m.space)))
    rep.fail("unit does not act as identity");
  if (!(compose(m.T, m.d) == compose(m.d, m.T)))
    rep.fail("parameter action does not commute with the predifferential");
  for (int j = 0; j < A.nb(); ++j)
    if (!(compose(m.T, m.act[j]) == compose(m.act[j], m.T)))
      rep.fail("parameter action does not commute with action of " + A.names[j]);
  for (int i = 0; i < A.nb(); ++i)
    for (int j = 0; j < A.nb(); ++j)
      if (!(compose(m.act[i], m.act[j]) == act_elt(m, A.mult[i][j], A.degs[i] + A.degs[j])))
        rep.fail("action not multiplicative on " + A.names[i] + "*" + A.names[j]);
  for (int j = 0; j < A.nb(); ++j) {
    GradedMap<F> lhs = compose(m.d, m.act[j]);
    GradedMap<F> tail = compose(m.act[j], m.d);
    if (norm_deg(Grading::Z2, A.degs[j]) == 1) tail = tail.neg();
    if (!(lhs == act_elt(m, A.diff[j], A.degs[j] + 1).add(tail)))
      rep.fail("Leibniz rule fails on " + A.names[j]);
  }
  if (curvature_law && !mc_residual(m).is_zero())
    rep.fail("curvature law d^2 = c.(-) violated");
  return rep;
}

// ---------------------------------------------------------------------------
// Morphisms

template <class F>
struct Morphism {
  CdgModule<F> src, dst;
  GradedMap<F> f;

  int deg() const { return f.deg(); }
};

template <class F>
Morphism<F> morphism(CdgModule<F> src, CdgModule<F> dst, GradedMap<F> f) {
  if (!(*src.alg == *dst.alg)) throw std::invalid_argument("morphism: algebra mismatch");
  if (!(f.src() == src.space) || !(f.dst() == dst.space))
    throw std::invalid_argument("morphism: endpoint mismatch");
  return {std::move(src), std::move(dst), std::move(f)};
}

template <class F>
Morphism<F> identity_morphism(const CdgModule<F>& m) {
  return {m, m, GradedMap<F>::identity(m.field(), m.space)};
}

template <class F>
Morphism<F> zero_morphism(const CdgModule<F>& src, const CdgModule<F>& dst, int deg = 0) {
  return morphism(src, dst, GradedMap<F>::zero(src.field(), src.space, dst.space, deg));
}

template <class F>
Morphism<F> compose(const Morphism<F>& g, const Morphism<F>& f) {
  if (!modules_equal(f.dst, g.src)) throw std::invalid_argument("morphism: compose mismatch");
  return {f.src, g.dst, compose(g.f, f.f)};
}

// f(a.x) = (-1)^(|f||a|) a.f(x), and f commutes with the parameter action.
template <class F>
bool is_linear(const Morphism<F>& mor) {
  const auto& A = *mor.src.alg;
  if (!(compose(mor.f, mor.src.T) == compose(mor.dst.T, mor.f))) return false;
  for (int j = 0; j < A.nb(); ++j) {
    GradedMap<F> rhs = compose(mor.dst.act[j], mor.f);
    if (norm_deg(Grading::Z2, mor.deg() * A.degs[j]) == 1) rhs = rhs.neg();
    if (!(compose(mor.f, mor.src.act[j]) == rhs)) return false;
  }
  return true;
}

// d(f) = d_dst . f - (-1)^|f| f . d_src
template <class F>
GradedMap<F> dmorph(const Morphism<F>& mor) {
  GradedMap<F> tail = compose(mor.f, mor.src.d);
  if (norm_deg(Grading::Z2, mor.deg()) == 1) tail = tail.neg();
  return compose(mor.dst.d, mor.f).sub(tail);
}

template <class F>
bool is_closed(const Morphism<F>& mor) {
  return dmorph(mor).is_zero();
}

template <class F>
ValidationReport validate_morphism(const Morphism<F>& mor) {
  ValidationReport rep;
  if (!(*mor.src.alg == *mor.dst.alg)) rep.fail("algebra mismatch");
  if (!(mor.f.src() == mor.src.space) || !(mor.f.dst() == mor.dst.space))
    rep.fail("endpoint mismatch");
  if (!rep.ok()) return rep;
  if (!is_linear(mor)) rep.fail("not linear over the algebra");
  return rep;
}

// ---------------------------------------------------------------------------
// Shifts, sums, cones, twists

template <class F>
CdgModule<F> shift_module(const CdgModule<F>& m, int s) {
  std::vector<GradedMap<F>> as;
  as.reserve(m.act.size());
  for (const auto& a : m.act) as.push_back(a.shifted(s));
  return {m.alg, m.space.shifted(s), m.T.shifted(s), m.d.shifted(s), std::move(as)};
}

template <class F>
Morphism<F> shift_morphism(const Morphism<F>& mor, int s) {
  return {shift_module(mor.src, s), shift_module(mor.dst, s), mor.f.shifted(s)};
}

template <class F>
struct ModuleSum {
  CdgModule<F> mod;
  Morphism<F> in_a, in_b, pr_a, pr_b;
};

template <class F>
ModuleSum<F> direct_sum_module(const CdgModule<F>& a, const CdgModule<F>& b) {
  if (!(*a.alg == *b.alg)) throw std::invalid_argument("module sum: algebra mismatch");
  const F& k = a.field();
  GradedMap<F> ia = incl_first<F>(k, a.space, b.space);
  GradedMap<F> ib = incl_second<F>(k, a.space, b.space);
  GradedMap<F> pa = proj_first<F>(k, a.space, b.space);
  GradedMap<F> pb = proj_second<F>(k, a.space, b.space);
  auto both = [&](const GradedMap<F>& fa, const GradedMap<F>& fb) {
    return compose(ia, compose(fa, pa)).add(compose(ib, compose(fb, pb)));
  };
  std::vector<GradedMap<F>> act;
  for (int j = 0; j < a.alg->nb(); ++j) act.push_back(both(a.act[j], b.act[j]));
  CdgModule<F> mod{a.alg, direct_sum(a.space, b.space), both(a.T, b.T), both(a.d, b.d),
                   std::move(act)};
  return {mod, {a, mod, ia}, {b, mod, ib}, {mod, a, pa}, {mod, b, pb}};
}

// Cone of a closed degree-0 morphism: dst (+) src[1] with the usual twist.
template <class F>
struct ModuleCone {
  CdgModule<F> mod;
  Morphism<F> incl;  // dst -> cone
  Morphism<F> proj;  // cone -> src[1]
};

template <class F>
ModuleCone<F> cone_module(const Morphism<F>& mor) {
  if (mor.deg() != 0) throw std::invalid_argument("module cone: morphism must have degree 0");
  if (!is_linear(mor)) throw std::invalid_argument("module cone: morphism not linear");
  if (!is_closed(mor)) throw std::invalid_argument("module cone: morphism not closed");
  const F& k = mor.src.field();
  CdgModule<F> m1 = shift_module(mor.src, 1);
  const CdgModule<F>& n = mor.dst;
  GradedMap<F> in = incl_first<F>(k, n.space, m1.space);
  GradedMap<F> im = incl_second<F>(k, n.space, m1.space);
  GradedMap<F> pn = proj_first<F>(k, n.space, m1.space);
  GradedMap<F> pm = proj_second<F>(k, n.space, m1.space);
  GradedMap<F> fplus(k, m1.space, n.space, 1);
  for (int j : m1.space.degrees()) fplus.set_block(j, mor.f.block(j + 1));
  std::vector<GradedMap<F>> act;
  for (int j = 0; j < n.alg->nb(); ++j)
    act.push_back(compose(in, compose(n.act[j], pn)).add(compose(im, compose(m1.act[j], pm))));
  CdgModule<F> mod{n.alg, direct_sum(n.space, m1.space),
                   compose(in, compose(n.T, pn)).add(compose(im, compose(m1.T, pm))),
                   compose(in, compose(n.d, pn))
                       .add(compose(in, compose(fplus, pm)))
                       .add(compose(im, compose(m1.d, pm))),
                   std::move(act)};
  return {mod, {n, mod, in}, {mod, m1, pm}};
}

template <class F>
struct ModuleCocone {
  CdgModule<F> mod;
  Morphism<F> to_src;    // cocone -> src
  Morphism<F> from_dst;  // dst[-1] -> cocone
};

template <class F>
ModuleCocone<F> cocone_module(const Morphism<F>& mor) {
  ModuleCone<F> cn = cone_module(mor);
  CdgModule<F> mod = shift_module(cn.mod, -1);
  return {mod, {mod, mor.src, cn.proj.f.shifted(-1)},
          {shift_module(mor.dst, -1), mod, cn.incl.f.shifted(-1)}};
}

// Replace d by d + theta for a linear degree-1 operator theta.
template <class F>
CdgModule<F> twist_module(const CdgModule<F>& m, const GradedMap<F>& theta) {
  if (!(theta.src() == m.space) || !(theta.dst() == m.space) ||
      theta.deg() != norm_deg(m.grading(), 1))
    throw std::invalid_argument("module twist: operator shape");
  Morphism<F> op{m, m, theta};
  if (!is_linear(op)) throw std::invalid_argument("module twist: operator not linear");
  return {m.alg, m.space, m.T, m.d.add(theta), m.act};
}

// ---------------------------------------------------------------------------
// Graded subspaces, submodules, quotients

template <class F>
class GradedSub {
 public:
  GradedSub(F k, GradedSpace ambient) : k_(k), amb_(std::move(ambient)) {}

  static GradedSub zero(F k, GradedSpace ambient) { return GradedSub(k, std::move(ambient)); }
  static GradedSub full(F k, GradedSpace ambient) {
    GradedSub s(k, ambient);
    for (int j : ambient.degrees()) s.set(j, Subspace<F>::full(k, ambient.dim(j)));
    return s;
  }

  const GradedSpace& ambient() const { return amb_; }
  const F& field() const { return k_; }

  Subspace<F> at(int j) const {
    int jn = norm_deg(amb_.grading, j);
    auto it = at_.find(jn);
    if (it != at_.end()) return it->second;
    return Subspace<F>::zero(k_, amb_.dim(jn));
  }

  void set(int j, Subspace<F> s) {
    int jn = norm_deg(amb_.grading, j);
    if (s.ambient() != amb_.dim(jn)) throw std::invalid_argument("graded sub: ambient mismatch");
    if (s.dim() == 0)
      at_.erase(jn);
    else
      at_.insert_or_assign(jn, std::move(s));
  }

  int dim(int j) const { return at(j).dim(); }
  int total_dim() const {
    int t = 0;
    for (const auto& [j, s] : at_) t += s.dim();
    return t;
  }

  // Degreewise dimensions, as a graded space.
  GradedSpace space() const {
    GradedSpace r(amb_.grading);
    for (const auto& [j, s] : at_) r.add_dim(j, s.dim());
    return r;
  }

  bool contains(const GradedSub& o) const {
    if (!(amb_ == o.amb_)) throw std::invalid_argument("graded sub: ambient mismatch");
    for (int j : amb_.degrees())
      if (!at(j).contains(o.at(j))) return false;
    return true;
  }

  bool operator==(const GradedSub& o) const {
    if (!(amb_ == o.amb_)) return false;
    for (int j : amb_.degrees())
      if (!(at(j) == o.at(j))) return false;
    return true;
  }

 private:
  F k_;
  GradedSpace amb_;
  std::map<int, Subspace<F>> at_;
};

template <class F>
GradedSub<F> sub_image(const GradedMap<F>& f) {
  GradedSub<F> s(f.field(), f.dst());
  for (int j : f.src().degrees())
    s.set(j + f.deg(), Subspace<F>::from_columns(f.block(j)));
  return s;
}

template <class F>
GradedSub<F> sub_kernel(const GradedMap<F>& f) {
  GradedSub<F> s(f.field(), f.src());
  for (int j : f.src().degrees()) {
    if (f.dst().dim(j + f.deg()) == 0) {
      s.set(j, Subspace<F>::full(f.field(), f.src().dim(j)));
      continue;
    }
    s.set(j, Subspace<F>::from_columns(kernel_image(f.block(j)).kernel));
  }
  return s;
}

template <class F>
GradedSub<F> sub_sum(const GradedSub<F>& a, const GradedSub<F>& b) {
  if (!(a.ambient() == b.ambient())) throw std::invalid_argument("graded sub: ambient mismatch");
  GradedSub<F> s(a.field(), a.ambient());
  for (int j : a.ambient().degrees()) s.set(j, Subspace<F>::sum(a.at(j), b.at(j)));
  return s;
}

template <class F>
GradedSub<F> sub_intersect(const GradedSub<F>& a, const GradedSub<F>& b) {
  if (!(a.ambient() == b.ambient())) throw std::invalid_argument("graded sub: ambient mismatch");
  GradedSub<F> s(a.field(), a.ambient());
  for (int j : a.ambient().degrees()) s.set(j, Subspace<F>::intersect(a.at(j), b.at(j)));
  return s;
}

// Image g(s) as a graded subspace of the codomain.
template <class F>
GradedSub<F> sub_image_of(const GradedMap<F>& g, const GradedSub<F>& s) {
  if (!(s.ambient() == g.src())) throw std::invalid_argument("graded sub: wrong ambient");
  GradedSub<F> r(g.field(), g.dst());
  for (int j : g.src().degrees())
    r.set(j + g.deg(), Subspace<F>::image_of(g.block(j), s.at(j)));
  return r;
}

// g(s) contained in s, for an endomorphism-shaped map.
template <class F>
bool preserves(const GradedMap<F>& g, const GradedSub<F>& s) {
  for (int j : g.src().degrees())
    if (!s.at(j + g.deg()).contains(Subspace<F>::image_of(g.block(j), s.at(j)))) return false;
  return true;
}

template <class F>
bool sub_stable(const CdgModule<F>& m, const GradedSub<F>& s) {
  if (!(s.ambient() == m.space)) throw std::invalid_argument("graded sub: wrong ambient module");
  if (!preserves(m.d, s) || !preserves(m.T, s)) return false;
  for (const auto& a : m.act)
    if (!preserves(a, s)) return false;
  return true;
}

template <class F>
GradedSub<F> t_power_image(const CdgModule<F>& m, int i) {
  return sub_image(t_pow(m, i));
}

template <class F>
GradedSub<F> t_power_kernel(const CdgModule<F>& m, int i) {
  return sub_kernel(t_pow(m, i));
}

namespace detail {

// Express g on chosen sub bases: columns of g restricted to s, in coordinates
// of the target's echelon basis. Throws if the image leaves the subspace.
template <class F>
GradedMap<F> restrict_map(const GradedMap<F>& g, const GradedSub<F>& s, const GradedSpace& ssp) {
  const F& k = g.field();
  GradedMap<F> r(k, ssp, ssp, g.deg());
  for (int j : ssp.degrees()) {
    Subspace<F> srcs = s.at(j), dsts = s.at(j + g.deg());
    if (srcs.dim() == 0) continue;
    Matrix<F> img = g.block(j).mul(srcs.basis());
    std::vector<typename Matrix<F>::Entry> es;
    for (int c = 0; c < img.cols(); ++c) {
      auto co = dsts.coords(img.col_vector(c));
      if (!co) throw std::logic_error("module: subspace not stable under restriction");
      for (int rr = 0; rr < dsts.dim(); ++rr)
        if (!k.is_zero((*co)[rr])) es.push_back({rr, c, (*co)[rr]});
    }
    r.set_block(j, Matrix<F>::from_triples(k, dsts.dim(), srcs.dim(), std::move(es)));
  }
  return r;
}

}  // namespace detail

template <class F>
struct SubInduced {
  CdgModule<F> mod;
  Morphism<F> incl;
};

template <class F>
SubInduced<F> submodule(const CdgModule<F>& m, const GradedSub<F>& s) {
  if (!sub_stable(m, s)) throw std::invalid_argument("submodule: subspace not stable");
  const F& k = m.field();
  GradedSpace ssp = s.space();
  std::vector<GradedMap<F>> act;
  for (const auto& a : m.act) act.push_back(detail::restrict_map(a, s, ssp));
  CdgModule<F> mod{m.alg, ssp, detail::restrict_map(m.T, s, ssp),
                   detail::restrict_map(m.d, s, ssp), std::move(act)};
  GradedMap<F> incl(k, ssp, m.space, 0);
  for (int j : ssp.degrees()) incl.set_block(j, s.at(j).basis());
  return {mod, {mod, m, incl}};
}

template <class F>
struct QuotInduced {
  CdgModule<F> mod;
  Morphism<F> proj;
  std::map<int, Matrix<F>> reps;  // columns lifting the quotient basis
};

template <class F>
QuotInduced<F> quotient_module(const CdgModule<F>& m, const GradedSub<F>& s) {
  if (!sub_stable(m, s)) throw std::invalid_argument("quotient: subspace not stable");
  const F& k = m.field();
  GradedSpace qsp(m.grading());
  std::map<int, Matrix<F>> reps;
  std::map<int, Matrix<F>> projb;
  for (int j : m.space.degrees()) {
    int dj = m.space.dim(j);
    Matrix<F> r = Subspace<F>::complement_in(Subspace<F>::full(k, dj), s.at(j));
    qsp.add_dim(j, r.cols());
    if (r.cols() == 0) continue;
    Matrix<F> p = s.at(j).basis().hstack(r);
    auto inv = solve_matrix(p, Matrix<F>::identity(k, dj));
    if (!inv) throw std::logic_error("quotient: basis completion not invertible");
    projb.insert_or_assign(j, inv->block(s.dim(j), 0, r.cols(), dj));
    reps.insert_or_assign(j, std::move(r));
  }
  auto induce = [&](const GradedMap<F>& g) {
    GradedMap<F> r(k, qsp, qsp, g.deg());
    for (const auto& [j, rj] : reps) {
      auto it = projb.find(norm_deg(m.grading(), j + g.deg()));
      if (it == projb.end()) continue;
      r.set_block(j, it->second.mul(g.block(j).mul(rj)));
    }
    return r;
  };
  std::vector<GradedMap<F>> act;
  for (const auto& a : m.act) act.push_back(induce(a));
  CdgModule<F> mod{m.alg, qsp, induce(m.T), induce(m.d), std::move(act)};
  GradedMap<F> proj(k, m.space, qsp, 0);
  for (const auto& [j, pb] : projb) proj.set_block(j, pb);
  return {mod, {m, mod, proj}, std::move(reps)};
}

template <class F>
struct SubquotResult {
  CdgModule<F> mod;
  std::map<int, Matrix<F>> reps;  // ambient columns lifting the basis
};

// u/s for stable graded subspaces s inside u.
template <class F>
SubquotResult<F> subquotient(const CdgModule<F>& m, const GradedSub<F>& u, const GradedSub<F>& s) {
  if (!u.contains(s)) throw std::invalid_argument("subquotient: inner space not contained");
  if (!sub_stable(m, u) || !sub_stable(m, s))
    throw std::invalid_argument("subquotient: subspace not stable");
  const F& k = m.field();
  GradedSpace qsp(m.grading());
  std::map<int, Matrix<F>> reps;
  for (int j : m.space.degrees()) {
    Matrix<F> r = Subspace<F>::complement_in(u.at(j), s.at(j));
    qsp.add_dim(j, r.cols());
    if (r.cols() > 0) reps.insert_or_assign(j, std::move(r));
  }
  auto coords_in = [&](int j, const Matrix<F>& img) {
    // coordinates modulo s: solve against [s basis | reps], keep the tail
    int jn = norm_deg(m.grading(), j);
    Matrix<F> sb = s.at(jn).basis();
    auto it = reps.find(jn);
    Matrix<F> rb = it != reps.end() ? it->second : Matrix<F>::zero(k, m.space.dim(jn), 0);
    auto sol = solve_matrix(sb.hstack(rb), img);
    if (!sol) throw std::logic_error("subquotient: image leaves the subspace");
    return sol->block(sb.cols(), 0, rb.cols(), img.cols());
  };
  auto induce = [&](const GradedMap<F>& g) {
    GradedMap<F> r(k, qsp, qsp, g.deg());
    for (const auto& [j, rj] : reps) {
      if (qsp.dim(j + g.deg()) == 0) continue;
      r.set_block(j, coords_in(j + g.deg(), g.block(j).mul(rj)));
    }
    return r;
  };
  std::vector<GradedMap<F>> act;
  for (const auto& a : m.act) act.push_back(induce(a));
  return {CdgModule<F>{m.alg, qsp, induce(m.T), induce(m.d), std::move(act)},
          std::move(reps)};
}

// ---------------------------------------------------------------------------
// Order changes along truncations of the algebra

// View a module over an order-m truncation as a module over the full algebra.
template <class F>
CdgModule<F> forget(const CdgModule<F>& m, std::shared_ptr<const DeformedAlgebra<F>> full) {
  if (!full) throw std::invalid_argument("forget: null algebra");
  if (m.alg->n > full->n || !(truncate(*full, m.alg->n) == *m.alg))
    throw std::invalid_argument("forget: algebra is not a matching truncation");
  return {std::move(full), m.space, m.T, m.d, m.act};
}

template <class F>
struct OrderChange {
  CdgModule<F> mod;   // over the truncated algebra
  Morphism<F> map;    // over the original algebra (quotient or inclusion)
};

// M / t^(i+1) M over the order-i truncation, with the projection from M.
template <class F>
OrderChange<F> reduce_order(const CdgModule<F>& m, int i) {
  if (i < 0 || i > m.alg->n) throw std::invalid_argument("reduce_order: order out of range");
  QuotInduced<F> q = quotient_module(m, t_power_image(m, i + 1));
  CdgModule<F> low = q.mod;
  low.alg = std::make_shared<DeformedAlgebra<F>>(truncate(*m.alg, i));
  return {std::move(low), q.proj};
}

// Ker t^(i+1) over the order-i truncation, with the inclusion into M.
template <class F>
OrderChange<F> order_kernel(const CdgModule<F>& m, int i) {
  if (i < 0 || i > m.alg->n) throw std::invalid_argument("order_kernel: order out of range");
  SubInduced<F> s = submodule(m, t_power_kernel(m, i + 1));
  CdgModule<F> low = s.mod;
  low.alg = std::make_shared<DeformedAlgebra<F>>(truncate(*m.alg, i));
  return {std::move(low), s.incl};
}

// ---------------------------------------------------------------------------
// Duals

// Graded dual, a module over the opposite algebra (whose curvature is -c).
template <class F>
CdgModule<F> dualize(const CdgModule<F>& m,
                     std::shared_ptr<const DeformedAlgebra<F>> op = nullptr) {
  if (!op)
    op = std::make_shared<DeformedAlgebra<F>>(opposite(*m.alg));
  else if (!(*op == opposite(*m.alg)))
    throw std::invalid_argument("dualize: wrong opposite algebra");
  const F& k = m.field();
  const auto& A = *m.alg;
  GradedSpace dsp = m.space.dualed();
  GradedMap<F> dd(k, dsp, dsp, 1);
  GradedMap<F> dt(k, dsp, dsp, 0);
  for (int j : dsp.degrees()) {
    Matrix<F> b = m.d.block(-j - 1).transpose();
    // sign (-1)^(j+1), matching the complex-level dual; together with the
    // (-1)^(|a| j) action signs this is the unique combination satisfying the
    // dual-module Leibniz rule when the algebra differential is nonzero
    dd.set_block(j, norm_deg(Grading::Z2, j) == 1 ? b : b.neg());
    dt.set_block(j, m.T.block(-j).transpose());
  }
  std::vector<GradedMap<F>> dact;
  for (int bi = 0; bi < A.nb(); ++bi) {
    int db = A.degs[bi];
    GradedMap<F> a(k, dsp, dsp, db);
    for (int j : dsp.degrees()) {
      Matrix<F> blk = m.act[bi].block(-j - db).transpose();
      if (norm_deg(Grading::Z2, db * j) == 1) blk = blk.neg();
      a.set_block(j, blk);
    }
    dact.push_back(std::move(a));
  }
  return {std::move(op), std::move(dsp), std::move(dt), std::move(dd), std::move(dact)};
}

// Canonical closed embedding into the double dual, (-1)^j on degree j.
template <class F>
Morphism<F> ev_morphism(const CdgModule<F>& m) {
  CdgModule<F> dd = dualize(dualize(m));
  const F& k = m.field();
  GradedMap<F> e(k, m.space, dd.space, 0);
  for (int j : m.space.degrees()) {
    Matrix<F> id = Matrix<F>::identity(k, m.space.dim(j));
    e.set_block(j, norm_deg(Grading::Z2, j) == 1 ? id.neg() : id);
  }
  return {m, std::move(dd), std::move(e)};
}

// ---------------------------------------------------------------------------
// Bridges to plain complexes

template <class F>
Complex<F> as_complex(const CdgModule<F>& m) {
  if (!compose(m.d, m.d).is_zero())
    throw std::invalid_argument("as_complex: predifferential does not square to zero");
  return Complex<F>::make(m.space, m.d);
}

// ---------------------------------------------------------------------------
// Regular modules

// The order-i quotient of the algebra acting on itself from the left. Its
// predifferential squares to the commutator with the curvature, so over a
// curved algebra this is a quasi-module, not a module; twists repair that.
template <class F>
struct RegularModule {
  using Elt = typename F::Elt;
  using AlgElt = typename DeformedAlgebra<F>::AlgElt;

  CdgModule<F> mod;
  int order = 0;
  std::map<std::pair<int, int>, std::pair<int, int>> pos;  // (s,basis) -> (degree,row)

  // Coordinate vector, within one degree, of an algebra element (truncated).
  std::vector<Elt> vec(const AlgElt& e, int deg) const {
    const auto& A = *mod.alg;
    int dn = A.deg_norm(deg);
    std::vector<Elt> v(mod.space.dim(dn), A.k.zero());
    for (int s = 0; s <= A.n; ++s)
      for (int j = 0; j < A.nb(); ++j) {
        const Elt& c = e[A.idx(s, j)];
        if (A.k.is_zero(c)) continue;
        if (s > order) continue;
        auto p = pos.at({s, j});
        if (p.first != dn) throw std::invalid_argument("regular module: inhomogeneous element");
        v[p.second] = c;
      }
    return v;
  }

  // Right multiplication x -> x * w by a homogeneous element, as a graded map.
  GradedMap<F> right_mult(const AlgElt& w, int deg) const {
    const auto& A = *mod.alg;
    if (!A.is_homogeneous(w, deg)) throw std::invalid_argument("regular module: inhomogeneous element");
    GradedMap<F> g(A.k, mod.space, mod.space, deg);
    std::map<int, std::vector<typename Matrix<F>::Entry>> tri;
    for (const auto& [sj, p] : pos) {
      AlgElt img = A.t_shift(A.mul_elt(A.basis_elt(0, sj.second), w), sj.first);
      for (int s2 = 0; s2 <= std::min(order, A.n); ++s2)
        for (int l = 0; l < A.nb(); ++l) {
          const Elt& c = img[A.idx(s2, l)];
          if (A.k.is_zero(c)) continue;
          tri[p.first].push_back({pos.at({s2, l}).second, p.second, c});
        }
    }
    for (auto& [j, es] : tri)
      g.set_block(j, Matrix<F>::from_triples(A.k, mod.space.dim(A.deg_norm(j + deg)),
                                             mod.space.dim(j), std::move(es)));
    return g;
  }
};

template <class F>
RegularModule<F> regular_module(std::shared_ptr<const DeformedAlgebra<F>> a, int order = -1) {
  if (!a) throw std::invalid_argument("regular module: null algebra");
  const auto& A = *a;
  int ord = order < 0 ? A.n : order;
  if (ord < 0 || ord > A.n) throw std::invalid_argument("regular module: order out of range");
  GradedSpace sp(A.grading);
  std::map<std::pair<int, int>, std::pair<int, int>> pos;
  std::map<int, std::vector<std::pair<int, int>>> bas;
  for (int s = 0; s <= ord; ++s)
    for (int j = 0; j < A.nb(); ++j) bas[A.deg_norm(A.degs[j])].push_back({s, j});
  for (const auto& [deg, v] : bas) {
    sp.add_dim(deg, static_cast<int>(v.size()));
    for (int i = 0; i < static_cast<int>(v.size()); ++i) pos[v[i]] = {deg, i};
  }
  const F& k = A.k;
  auto build = [&](int deg, auto img_of) {
    GradedMap<F> g(k, sp, sp, deg);
    std::map<int, std::vector<typename Matrix<F>::Entry>> tri;
    for (const auto& [sj, p] : pos) {
      typename DeformedAlgebra<F>::AlgElt img = img_of(sj.first, sj.second);
      for (int s2 = 0; s2 <= ord; ++s2)
        for (int l = 0; l < A.nb(); ++l) {
          const auto& c = img[A.idx(s2, l)];
          if (k.is_zero(c)) continue;
          tri[p.first].push_back({pos.at({s2, l}).second, p.second, c});
        }
    }
    for (auto& [j, es] : tri)
      g.set_block(j, Matrix<F>::from_triples(k, sp.dim(A.deg_norm(j + deg)), sp.dim(j),
                                             std::move(es)));
    return g;
  };
  GradedMap<F> t = build(0, [&](int s, int j) {
    return s + 1 <= ord ? A.basis_elt(s + 1, j) : A.zero_elt();
  });
  GradedMap<F> d = build(1, [&](int s, int j) { return A.t_shift(A.diff[j], s); });
  std::vector<GradedMap<F>> act;
  for (int b = 0; b < A.nb(); ++b)
    act.push_back(build(A.degs[b], [&](int s, int j) { return A.t_shift(A.mult[b][j], s); }));
  return {CdgModule<F>::make(a, std::move(sp), std::move(t), std::move(d), std::move(act)), ord,
          std::move(pos)};
}

template <class F>
CdgModule<F> zero_module(std::shared_ptr<const DeformedAlgebra<F>> a) {
  if (!a) throw std::invalid_argument("zero module: null algebra");
  GradedSpace sp(a->grading);
  GradedMap<F> z0 = GradedMap<F>::zero(a->k, sp, sp, 0);
  GradedMap<F> z1 = GradedMap<F>::zero(a->k, sp, sp, 1);
  std::vector<GradedMap<F>> act;
  for (int j = 0; j < a->nb(); ++j)
    act.push_back(GradedMap<F>::zero(a->k, sp, sp, a->degs[j]));
  return CdgModule<F>::make(std::move(a), sp, z0, z1, std::move(act));
}

// Sum of shifted regular modules: one summand per generator degree.
template <class F>
CdgModule<F> free_module(std::shared_ptr<const DeformedAlgebra<F>> a,
                         const std::vector<int>& gen_degrees) {
  CdgModule<F> m = zero_module(a);
  for (int g : gen_degrees)
    m = direct_sum_module(m, shift_module(regular_module(a).mod, -g)).mod;
  return m;
}

// ---------------------------------------------------------------------------
// Hom complexes of modules

// Hom^k = linear maps M -> N of degree k, with D(f) = d.f - (-1)^k f.d.
// Both modules must satisfy the curvature law, which makes D^2 = 0.
template <class F>
class ModuleHom {
 public:
  using Elt = typename F::Elt;

  ModuleHom(CdgModule<F> m, CdgModule<F> n)
      : m_(std::move(m)), n_(std::move(n)),
        layout_(m_.field(), m_.space, n_.space),
        cpx_(Complex<F>::zero(m_.field(), m_.grading())) {
    if (!(*m_.alg == *n_.alg)) throw std::invalid_argument("module hom: algebra mismatch");
    if (!mc_residual(m_).is_zero() || !mc_residual(n_).is_zero())
      throw std::invalid_argument("module hom: curvature law fails on an argument");
    const F& k = m_.field();
    const auto& A = *m_.alg;
    GradedSpace hs(m_.grading());
    for (int kk : layout_.hom_degrees()) {
      int amb = layout_.dim(kk);
      if (amb == 0) {
        sols_.emplace(kk, Subspace<F>::zero(k, 0));
        continue;
      }
      // Linearity equations: f.T - T.f and f.act_j - (-1)^(k|e_j|) act_j.f.
      std::vector<std::vector<Elt>> rows_per_col(amb);
      for (int c = 0; c < amb; ++c) {
        std::vector<Elt> unit(amb, k.zero());
        unit[c] = k.one();
        GradedMap<F> f = layout_.to_map(kk, unit);
        std::vector<Elt>& out = rows_per_col[c];
        auto push = [&](const GradedMap<F>& r) {
          std::vector<Elt> v = layout_.from_map(r);
          out.insert(out.end(), v.begin(), v.end());
        };
        push(compose(f, m_.T).sub(compose(n_.T, f)));
        for (int j = 0; j < A.nb(); ++j) {
          GradedMap<F> rhs = compose(n_.act[j], f);
          if (norm_deg(Grading::Z2, kk * A.degs[j]) == 1) rhs = rhs.neg();
          push(compose(f, m_.act[j]).sub(rhs));
        }
      }
      int nrows = static_cast<int>(rows_per_col[0].size());
      std::vector<typename Matrix<F>::Entry> es;
      for (int c = 0; c < amb; ++c)
        for (int r = 0; r < nrows; ++r)
          if (!k.is_zero(rows_per_col[c][r])) es.push_back({r, c, rows_per_col[c][r]});
      Matrix<F> constraints = Matrix<F>::from_triples(k, nrows, amb, std::move(es));
      Subspace<F> sol = Subspace<F>::from_columns(kernel_image(constraints).kernel);
      hs.add_dim(kk, sol.dim());
      sols_.emplace(kk, std::move(sol));
    }
    GradedMap<F> dd(k, hs, hs, 1);
    for (int kk : layout_.hom_degrees()) {
      const Subspace<F>& sol = sols_.at(kk);
      auto it1 = sols_.find(norm_deg(m_.grading(), kk + 1));
      if (sol.dim() == 0 || it1 == sols_.end() || it1->second.dim() == 0) continue;
      std::vector<typename Matrix<F>::Entry> es;
      for (int c = 0; c < sol.dim(); ++c) {
        GradedMap<F> f = layout_.to_map(kk, sol.basis().col_vector(c));
        GradedMap<F> df = dmap_of(f, kk);
        auto co = it1->second.coords(layout_.from_map(df));
        if (!co) throw std::logic_error("module hom: differential leaves the linear subspace");
        for (int r = 0; r < it1->second.dim(); ++r)
          if (!k.is_zero((*co)[r])) es.push_back({r, c, (*co)[r]});
      }
      dd.set_block(kk, Matrix<F>::from_triples(k, it1->second.dim(), sol.dim(), std::move(es)));
    }
    cpx_ = Complex<F>::make(std::move(hs), std::move(dd));
  }

  const Complex<F>& cpx() const { return cpx_; }
  const CdgModule<F>& src() const { return m_; }
  const CdgModule<F>& dst() const { return n_; }
  int dim(int k) const { return cpx_.space.dim(k); }

  Morphism<F> to_morphism(int k, const std::vector<Elt>& sol_coords) const {
    int kn = norm_deg(m_.grading(), k);
    const Subspace<F>& sol = sols_.at(kn);
    if (static_cast<int>(sol_coords.size()) != sol.dim())
      throw std::invalid_argument("module hom: coordinate size mismatch");
    return {m_, n_, layout_.to_map(kn, sol.basis().apply(sol_coords))};
  }

  std::vector<Elt> from_morphism(const Morphism<F>& mor) const {
    auto it = sols_.find(mor.deg());
    if (it == sols_.end()) {
      if (!mor.f.is_zero()) throw std::invalid_argument("module hom: map out of degree range");
      return {};
    }
    auto co = it->second.coords(layout_.from_map(mor.f));
    if (!co) throw std::invalid_argument("module hom: map is not linear");
    return *co;
  }

 private:
  GradedMap<F> dmap_of(const GradedMap<F>& f, int k) const {
    GradedMap<F> tail = compose(f, m_.d);
    if (norm_deg(Grading::Z2, k) == 1) tail = tail.neg();
    return compose(n_.d, f).sub(tail);
  }

  CdgModule<F> m_, n_;
  MapLayout<F> layout_;
  std::map<int, Subspace<F>> sols_;
  Complex<F> cpx_;
};

}  // namespace cdg
