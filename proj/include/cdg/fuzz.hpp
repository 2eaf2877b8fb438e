#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cdg/families.hpp"
#include "cdg/generators.hpp"
#include "cdg/rng.hpp"

namespace cdg {

// Deterministic random-instance recipes. Everything is driven by the seeded
// Rng only, so a campaign replays byte-for-byte from its seed.

struct RandomModulePolicy {
  int max_dim = 40;    // carrier dimension cap for the base sum
  int max_parts = 3;   // direct summands in the base recipe
  int max_shift = 2;   // absolute homological shift of each summand
  double forget_prob = 0.3;    // build over a lower order and restrict scalars
  double cone_prob = 0.3;      // wrap in the cone of a random closed morphism
  double scramble_prob = 0.6;  // conjugate by a random graded automorphism
  double raise_prob = 0.5;     // use the parameter-raising unipotent conjugator
};

template <class F>
typename F::Elt random_scalar(const F& k, Rng& rng) {
  return k.from_int(rng.range(-4, 4));
}

template <class F>
DeformedAlgebra<F> random_algebra(const F& k, Rng& rng, int max_order = 3) {
  auto names = algebra_family_names();
  const std::string& nm = names[rng.below(names.size())];
  int n = rng.range(0, max_order);
  typename F::Elt mu = k.from_int(rng.range(-3, 3));
  return make_family(nm, k, n, mu);
}

// Random degree-0 element of the parameter ideal; 1 + w is then a unipotent
// automorphism whose conjugation action raises the parameter filtration.
template <class F>
typename DeformedAlgebra<F>::AlgElt random_raising_element(const DeformedAlgebra<F>& a,
                                                           Rng& rng) {
  auto w = a.zero_elt();
  for (int s = 1; s <= a.n; ++s)
    for (int j = 0; j < a.nb(); ++j) {
      if (a.degs[j] != 0 || !rng.chance(0.4)) continue;
      auto v = random_scalar(a.k, rng);
      if (a.k.is_zero(v)) continue;
      w = a.add_elt(w, a.scale_elt(v, a.basis_elt(s, j)));
    }
  return w;
}

// Conjugate every structure map by a degree-0 automorphism: the result is an
// isomorphic module presented on a scrambled basis.
template <class F>
CdgModule<F> conjugate_module(const CdgModule<F>& m, const GradedMap<F>& g) {
  const F& k = m.field();
  GradedMap<F> gi(k, m.space, m.space, 0);
  for (int j : m.space.degrees()) {
    auto inv = solve_matrix(g.block(j), Matrix<F>::identity(k, m.space.dim(j)));
    if (!inv) throw std::invalid_argument("conjugate: map is not invertible");
    gi.set_block(j, std::move(*inv));
  }
  auto conj = [&](const GradedMap<F>& f) { return compose(g, compose(f, gi)); };
  std::vector<GradedMap<F>> act;
  act.reserve(m.act.size());
  for (const auto& e : m.act) act.push_back(conj(e));
  return CdgModule<F>::make(m.alg, m.space, conj(m.T), conj(m.d), std::move(act));
}

// Product of random unipotent lower and upper triangular blocks per degree.
template <class F>
GradedMap<F> random_automorphism(const CdgModule<F>& m, Rng& rng) {
  const F& k = m.field();
  GradedMap<F> g(k, m.space, m.space, 0);
  for (int j : m.space.degrees()) {
    int d = m.space.dim(j);
    std::vector<typename Matrix<F>::Entry> le, ue;
    for (int c = 0; c < d; ++c) {
      le.push_back({c, c, k.one()});
      ue.push_back({c, c, k.one()});
    }
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        if (r == c || !rng.chance(0.3)) continue;
        auto v = random_scalar(k, rng);
        if (k.is_zero(v)) continue;
        (r > c ? le : ue).push_back({r, c, v});
      }
    g.set_block(j, Matrix<F>::from_triples(k, d, d, std::move(le))
                       .mul(Matrix<F>::from_triples(k, d, d, std::move(ue))));
  }
  return g;
}

// Random closed degree-0 morphism sampled from the cycle space of the hom
// complex; nullopt when that space is zero.
template <class F>
std::optional<Morphism<F>> random_closed_morphism(const CdgModule<F>& src,
                                                  const CdgModule<F>& dst, Rng& rng) {
  ModuleHom<F> hom(src, dst);
  if (hom.dim(0) == 0) return std::nullopt;
  Matrix<F> zk = kernel_image(hom.cpx().d.block(0)).kernel;
  if (zk.cols() == 0) return std::nullopt;
  const F& k = src.field();
  std::vector<typename F::Elt> mix(static_cast<std::size_t>(zk.cols()), k.zero());
  for (auto& v : mix) v = random_scalar(k, rng);
  return hom.to_morphism(0, zk.apply(mix));
}

// Compound recipe: a sum of shifted generators (possibly built over a lower
// order and forgotten), optionally wrapped in a cone and then conjugated.
template <class F>
CdgModule<F> random_module(std::shared_ptr<const DeformedAlgebra<F>> a, Rng& rng,
                           const RandomModulePolicy& pol = {}) {
  const F& k = a->k;
  int n = a->n;
  auto base_over = [&](std::shared_ptr<const DeformedAlgebra<F>> alg) {
    std::vector<CdgModule<F>> parts;
    int want = rng.range(1, pol.max_parts);
    int total = 0;
    for (int p = 0; p < want; ++p) {
      Generator<F> g = gamma(alg, rng.range(0, alg->n));
      int dim = g.mod.space.total_dim();
      if (!parts.empty() && total + dim > pol.max_dim) break;
      total += dim;
      int s = rng.range(-pol.max_shift, pol.max_shift);
      parts.push_back(s == 0 ? std::move(g.mod) : shift_module(g.mod, s));
    }
    return direct_sum_many(alg, parts).mod;
  };
  CdgModule<F> m = [&] {
    if (n > 0 && rng.chance(pol.forget_prob)) {
      auto low = std::make_shared<const DeformedAlgebra<F>>(truncate(*a, rng.range(0, n - 1)));
      return forget(base_over(low), a);
    }
    return base_over(a);
  }();
  if (rng.chance(pol.cone_prob)) {
    Generator<F> g = gamma(a, rng.range(0, n));
    if (m.space.total_dim() + g.mod.space.total_dim() <= pol.max_dim + 12) {
      int s = rng.range(-1, 1);
      CdgModule<F> other = s == 0 ? std::move(g.mod) : shift_module(g.mod, s);
      if (auto mor = random_closed_morphism(other, m, rng)) m = cone_module(*mor).mod;
    }
  }
  if (rng.chance(pol.scramble_prob)) {
    if (rng.chance(pol.raise_prob)) {
      GradedMap<F> g = GradedMap<F>::identity(k, m.space)
                           .add(act_elt(m, random_raising_element(*m.alg, rng), 0));
      m = conjugate_module(m, g);
    } else {
      m = conjugate_module(m, random_automorphism(m, rng));
    }
  }
  return m;
}

}  // namespace cdg
