#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "cdg/matrix.hpp"
#include "cdg/subspace.hpp"

namespace cdg {

enum class Grading { Z, Z2 };

inline int norm_deg(Grading g, int d) { return g == Grading::Z ? d : ((d % 2) + 2) % 2; }

// Finite-dimensional graded vector space: nonzero dimensions per (normalized) degree.
struct GradedSpace {
  Grading grading = Grading::Z;
  std::map<int, int> dims;

  GradedSpace() = default;
  explicit GradedSpace(Grading g) : grading(g) {}
  GradedSpace(Grading g, const std::map<int, int>& ds) : grading(g) {
    for (const auto& [j, n] : ds) add_dim(j, n);
  }

  int dim(int j) const {
    auto it = dims.find(norm_deg(grading, j));
    return it == dims.end() ? 0 : it->second;
  }
  void add_dim(int j, int n) {
    if (n < 0) throw std::invalid_argument("graded space: negative dimension");
    if (n == 0) return;
    dims[norm_deg(grading, j)] += n;
  }
  int total_dim() const {
    int t = 0;
    for (const auto& [j, n] : dims) t += n;
    return t;
  }
  std::vector<int> degrees() const {
    std::vector<int> out;
    for (const auto& [j, n] : dims) out.push_back(j);
    return out;
  }
  bool empty() const { return dims.empty(); }
  int min_deg() const {
    if (dims.empty()) throw std::logic_error("graded space: empty");
    return dims.begin()->first;
  }
  int max_deg() const {
    if (dims.empty()) throw std::logic_error("graded space: empty");
    return dims.rbegin()->first;
  }

  GradedSpace shifted(int s) const {
    GradedSpace r(grading);
    for (const auto& [j, n] : dims) r.add_dim(j - s, n);
    return r;
  }
  GradedSpace dualed() const {
    GradedSpace r(grading);
    for (const auto& [j, n] : dims) r.add_dim(-j, n);
    return r;
  }

  bool operator==(const GradedSpace&) const = default;
};

// Layout convention for sums: summands concatenated in argument order within each degree.
inline GradedSpace direct_sum(const GradedSpace& a, const GradedSpace& b) {
  if (a.grading != b.grading) throw std::invalid_argument("graded space: grading mismatch");
  GradedSpace r = a;
  for (const auto& [j, n] : b.dims) r.add_dim(j, n);
  return r;
}

template <class F> class GradedMap;

// Canonical degree-0 maps of a two-summand space a (+) b.
template <class F>
GradedMap<F> incl_first(F k, const GradedSpace& a, const GradedSpace& b) {
  GradedSpace s = direct_sum(a, b);
  GradedMap<F> f(k, a, s, 0);
  for (int j : a.degrees()) {
    std::vector<typename Matrix<F>::Entry> es;
    for (int i = 0; i < a.dim(j); ++i) es.push_back({i, i, k.one()});
    f.set_block(j, Matrix<F>::from_triples(k, s.dim(j), a.dim(j), std::move(es)));
  }
  return f;
}

template <class F>
GradedMap<F> incl_second(F k, const GradedSpace& a, const GradedSpace& b) {
  GradedSpace s = direct_sum(a, b);
  GradedMap<F> f(k, b, s, 0);
  for (int j : b.degrees()) {
    std::vector<typename Matrix<F>::Entry> es;
    for (int i = 0; i < b.dim(j); ++i) es.push_back({a.dim(j) + i, i, k.one()});
    f.set_block(j, Matrix<F>::from_triples(k, s.dim(j), b.dim(j), std::move(es)));
  }
  return f;
}

template <class F>
GradedMap<F> proj_first(F k, const GradedSpace& a, const GradedSpace& b) {
  GradedSpace s = direct_sum(a, b);
  GradedMap<F> f(k, s, a, 0);
  for (int j : a.degrees()) {
    std::vector<typename Matrix<F>::Entry> es;
    for (int i = 0; i < a.dim(j); ++i) es.push_back({i, i, k.one()});
    f.set_block(j, Matrix<F>::from_triples(k, a.dim(j), s.dim(j), std::move(es)));
  }
  return f;
}

template <class F>
GradedMap<F> proj_second(F k, const GradedSpace& a, const GradedSpace& b) {
  GradedSpace s = direct_sum(a, b);
  GradedMap<F> f(k, s, b, 0);
  for (int j : b.degrees()) {
    std::vector<typename Matrix<F>::Entry> es;
    for (int i = 0; i < b.dim(j); ++i) es.push_back({i, a.dim(j) + i, k.one()});
    f.set_block(j, Matrix<F>::from_triples(k, b.dim(j), s.dim(j), std::move(es)));
  }
  return f;
}

// Degree-homogeneous linear map between graded spaces; block(j) : src^j -> dst^(j+deg).
template <class F>
class GradedMap {
 public:
  using Elt = typename F::Elt;

  GradedMap(F k, GradedSpace src, GradedSpace dst, int deg)
      : k_(k), src_(std::move(src)), dst_(std::move(dst)) {
    if (src_.grading != dst_.grading) throw std::invalid_argument("graded map: grading mismatch");
    deg_ = norm_deg(grading(), deg);
  }

  static GradedMap zero(F k, GradedSpace src, GradedSpace dst, int deg) {
    return GradedMap(k, std::move(src), std::move(dst), deg);
  }
  static GradedMap identity(F k, const GradedSpace& s) {
    GradedMap f(k, s, s, 0);
    for (const auto& [j, n] : s.dims) f.blocks_.emplace(j, Matrix<F>::identity(k, n));
    return f;
  }

  const F& field() const { return k_; }
  Grading grading() const { return src_.grading; }
  const GradedSpace& src() const { return src_; }
  const GradedSpace& dst() const { return dst_; }
  int deg() const { return deg_; }

  Matrix<F> block(int j) const {
    int jn = norm_deg(grading(), j);
    auto it = blocks_.find(jn);
    if (it != blocks_.end()) return it->second;
    return Matrix<F>::zero(k_, dst_.dim(jn + deg_), src_.dim(jn));
  }
  void set_block(int j, const Matrix<F>& m) {
    int jn = norm_deg(grading(), j);
    if (m.rows() != dst_.dim(jn + deg_) || m.cols() != src_.dim(jn))
      throw std::invalid_argument("graded map: block shape mismatch");
    if (m.is_zero())
      blocks_.erase(jn);
    else
      blocks_.insert_or_assign(jn, m);
  }
  const std::map<int, Matrix<F>>& stored_blocks() const { return blocks_; }

  std::vector<Elt> apply(int j, const std::vector<Elt>& v) const { return block(j).apply(v); }

  bool is_zero() const {
    for (const auto& [j, m] : blocks_)
      if (!m.is_zero()) return false;
    return true;
  }

  GradedMap add(const GradedMap& o) const {
    check_parallel(o);
    GradedMap r = *this;
    for (const auto& [j, m] : o.blocks_) r.set_block(j, r.block(j).add(m));
    return r;
  }
  GradedMap sub(const GradedMap& o) const { return add(o.neg()); }
  GradedMap neg() const { return scale(k_.neg(k_.one())); }
  GradedMap scale(const Elt& c) const {
    GradedMap r(k_, src_, dst_, deg_);
    for (const auto& [j, m] : blocks_) r.set_block(j, m.scale(c));
    return r;
  }

  // Shift both ends; odd-degree maps pick up (-1)^(s*deg) so chain-map algebra is stable.
  GradedMap shifted(int s) const {
    GradedMap r(k_, src_.shifted(s), dst_.shifted(s), deg_);
    bool flip = (s % 2 != 0) && (deg_ % 2 != 0);
    for (const auto& [j, m] : blocks_) r.set_block(j - s, flip ? m.neg() : m);
    return r;
  }

  bool operator==(const GradedMap& o) const {
    if (!(src_ == o.src_) || !(dst_ == o.dst_) || deg_ != o.deg_) return false;
    return sub(o).is_zero();
  }

 private:
  void check_parallel(const GradedMap& o) const {
    if (!(src_ == o.src_) || !(dst_ == o.dst_) || deg_ != o.deg_)
      throw std::invalid_argument("graded map: not parallel");
  }

  F k_;
  GradedSpace src_, dst_;
  int deg_ = 0;
  std::map<int, Matrix<F>> blocks_;
};

template <class F>
GradedMap<F> compose(const GradedMap<F>& g, const GradedMap<F>& f) {
  if (!(f.dst() == g.src())) throw std::invalid_argument("graded map: compose mismatch");
  GradedMap<F> r(f.field(), f.src(), g.dst(), f.deg() + g.deg());
  for (const auto& j : f.src().degrees()) r.set_block(j, g.block(j + f.deg()).mul(f.block(j)));
  return r;
}

// Cochain complex: degree +1 differential squaring to zero.
template <class F>
struct Complex {
  GradedSpace space;
  GradedMap<F> d;

  static Complex make(GradedSpace s, GradedMap<F> d) {
    if (!(d.src() == s) || !(d.dst() == s)) throw std::invalid_argument("complex: d endpoints");
    if (d.deg() != norm_deg(s.grading, 1)) throw std::invalid_argument("complex: d degree");
    if (!compose(d, d).is_zero()) throw std::invalid_argument("complex: d^2 != 0");
    return Complex{std::move(s), std::move(d)};
  }
  static Complex zero(F k, Grading g) {
    GradedSpace s(g);
    return Complex{s, GradedMap<F>::zero(k, s, s, 1)};
  }
  const F& field() const { return d.field(); }
  Grading grading() const { return space.grading; }
};

// Koszul differential on maps: D(f) = d_D . f - (-1)^deg(f) f . d_C.
template <class F>
GradedMap<F> dmap(const Complex<F>& c, const Complex<F>& d, const GradedMap<F>& f) {
  if (!(f.src() == c.space) || !(f.dst() == d.space))
    throw std::invalid_argument("dmap: endpoint mismatch");
  auto t1 = compose(d.d, f);
  auto t2 = compose(f, c.d);
  return f.deg() % 2 == 0 ? t1.sub(t2) : t1.add(t2);
}

template <class F>
bool is_chain_map(const Complex<F>& c, const Complex<F>& d, const GradedMap<F>& f) {
  return dmap(c, d, f).is_zero();
}

// C[s]^j = C^(j+s); GradedMap::shifted already carries the (-1)^s sign on the degree-1 d.
template <class F>
Complex<F> shift(const Complex<F>& c, int s) {
  return Complex<F>::make(c.space.shifted(s), c.d.shifted(s));
}

template <class F>
struct SumResult {
  Complex<F> sum;
  GradedMap<F> incl_left, incl_right, proj_left, proj_right;
};

template <class F>
SumResult<F> direct_sum(const Complex<F>& a, const Complex<F>& b) {
  const F& k = a.field();
  GradedSpace s = direct_sum(a.space, b.space);
  GradedMap<F> d(k, s, s, 1);
  GradedMap<F> il(k, a.space, s, 0), ir(k, b.space, s, 0);
  GradedMap<F> pl(k, s, a.space, 0), pr(k, s, b.space, 0);
  for (int j : s.degrees()) {
    int na = a.space.dim(j), nb = b.space.dim(j);
    int ma = a.space.dim(j + 1), mb = b.space.dim(j + 1);
    auto top = a.d.block(j).hstack(Matrix<F>::zero(k, ma, nb));
    auto bot = Matrix<F>::zero(k, mb, na).hstack(b.d.block(j));
    d.set_block(j, top.vstack(bot));
    il.set_block(j, Matrix<F>::identity(k, na).vstack(Matrix<F>::zero(k, nb, na)));
    ir.set_block(j, Matrix<F>::zero(k, na, nb).vstack(Matrix<F>::identity(k, nb)));
    pl.set_block(j, Matrix<F>::identity(k, na).hstack(Matrix<F>::zero(k, na, nb)));
    pr.set_block(j, Matrix<F>::zero(k, nb, na).hstack(Matrix<F>::identity(k, nb)));
  }
  return {Complex<F>::make(std::move(s), std::move(d)), il, ir, pl, pr};
}

// cone(f)^h = D^h (+) C^(h+1), d(x, y) = (d_D x + f y, -d_C y); f closed of degree 0.
template <class F>
struct ConeResult {
  Complex<F> cone;
  GradedMap<F> incl;  // D -> cone
  GradedMap<F> proj;  // cone -> C[1]
};

template <class F>
ConeResult<F> cone(const Complex<F>& c, const Complex<F>& d, const GradedMap<F>& f) {
  if (f.deg() != 0) throw std::invalid_argument("cone: map degree must be 0");
  if (!is_chain_map(c, d, f)) throw std::invalid_argument("cone: map not closed");
  const F& k = f.field();
  GradedSpace cs = direct_sum(d.space, c.space.shifted(1));
  GradedMap<F> cd(k, cs, cs, 1);
  GradedMap<F> incl(k, d.space, cs, 0);
  GradedMap<F> proj(k, cs, c.space.shifted(1), 0);
  for (int j : cs.degrees()) {
    int nd = d.space.dim(j), nc = c.space.dim(j + 1);
    int mc = c.space.dim(j + 2);
    auto top = d.d.block(j).hstack(f.block(j + 1));
    auto bot = Matrix<F>::zero(k, mc, nd).hstack(c.d.block(j + 1).neg());
    cd.set_block(j, top.vstack(bot));
    incl.set_block(j, Matrix<F>::identity(k, nd).vstack(Matrix<F>::zero(k, nc, nd)));
    proj.set_block(j, Matrix<F>::zero(k, nc, nd).hstack(Matrix<F>::identity(k, nc)));
  }
  return {Complex<F>::make(std::move(cs), std::move(cd)), incl, proj};
}

template <class F>
Complex<F> cocone(const Complex<F>& c, const Complex<F>& d, const GradedMap<F>& f) {
  return shift(cone(c, d, f).cone, -1);
}

// Dual complex: (C*)^j = (C^(-j))*, differential (-1)^(j+1) transpose(d^(-j-1)).
template <class F>
Complex<F> dual(const Complex<F>& c) {
  const F& k = c.field();
  GradedSpace s = c.space.dualed();
  GradedMap<F> d(k, s, s, 1);
  for (int j : s.degrees()) {
    auto m = c.d.block(-j - 1).transpose();
    bool even_j = norm_deg(c.grading(), j) % 2 == 0;
    d.set_block(j, even_j ? m.neg() : m);  // sign (-1)^(j+1)
  }
  return Complex<F>::make(std::move(s), std::move(d));
}

// Cohomology with deterministic representatives (echelon complement of boundaries in cycles).
template <class F>
struct CohomologyDeg {
  Subspace<F> cycles;
  Subspace<F> boundaries;
  Matrix<F> reps;  // ambient x hdim, columns are chosen class representatives
};

template <class F>
struct Cohomology {
  std::map<int, CohomologyDeg<F>> at;
  GradedSpace h_space;

  int h_dim(int j) const { return h_space.dim(j); }
  int total() const { return h_space.total_dim(); }
};

template <class F>
Cohomology<F> cohomology(const Complex<F>& c) {
  const F& k = c.field();
  Cohomology<F> out;
  out.h_space = GradedSpace(c.grading());
  for (int j : c.space.degrees()) {
    int n = c.space.dim(j);
    auto zk = kernel_image(c.d.block(j)).kernel;
    auto cycles = Subspace<F>::from_columns(zk);
    auto boundaries = Subspace<F>::from_columns(kernel_image(c.d.block(j - 1)).image);
    EchelonAccum<F> acc(k, n);
    for (int b = 0; b < boundaries.dim(); ++b) acc.insert(boundaries.basis().col_vector(b));
    std::vector<int> kept;
    for (int z = 0; z < cycles.dim(); ++z)
      if (acc.insert(cycles.basis().col_vector(z))) kept.push_back(z);
    Matrix<F> reps = cycles.basis().select_columns(kept);
    out.h_space.add_dim(j, static_cast<int>(kept.size()));
    out.at.emplace(j, CohomologyDeg<F>{std::move(cycles), std::move(boundaries), std::move(reps)});
  }
  return out;
}

// Coordinates of a cycle's class in the chosen representative basis.
template <class F>
std::vector<typename F::Elt> class_coords(const F&, const CohomologyDeg<F>& cd,
                                          const std::vector<typename F::Elt>& v) {
  if (!cd.cycles.contains(v)) throw std::invalid_argument("class_coords: not a cycle");
  int hb = cd.boundaries.dim();
  auto sys = hb > 0 ? cd.boundaries.basis().hstack(cd.reps) : cd.reps;
  auto x = solve(sys, v);
  if (!x) throw std::logic_error("class_coords: decomposition failed");
  return std::vector<typename F::Elt>(x->begin() + hb, x->end());
}

template <class F>
bool is_exact(const Complex<F>& c) {
  return cohomology(c).total() == 0;
}

// Induced map on cohomology for a closed map f (any degree).
template <class F>
GradedMap<F> h_map(const Complex<F>& c, const Complex<F>& d, const GradedMap<F>& f) {
  if (!is_chain_map(c, d, f)) throw std::invalid_argument("h_map: map not closed");
  auto hc = cohomology(c);
  auto hd = cohomology(d);
  GradedMap<F> out(f.field(), hc.h_space, hd.h_space, f.deg());
  for (int j : hc.h_space.degrees()) {
    const auto& src = hc.at.at(j);
    int jt = norm_deg(c.grading(), j + f.deg());
    int hsrc = src.reps.cols(), hdst = hd.h_space.dim(jt);
    if (hdst == 0) {
      // All images must be boundaries; verified via class_coords when target nonzero ambient.
      continue;
    }
    const auto& dst = hd.at.at(jt);
    std::vector<typename Matrix<F>::Entry> es;
    for (int s = 0; s < hsrc; ++s) {
      auto img = f.block(j).apply(src.reps.col_vector(s));
      auto co = class_coords(f.field(), dst, img);
      for (int r = 0; r < hdst; ++r)
        if (!f.field().is_zero(co[r])) es.push_back({r, s, co[r]});
    }
    out.set_block(j, Matrix<F>::from_triples(f.field(), hdst, hsrc, std::move(es)));
  }
  return out;
}

template <class F>
bool is_quasi_iso(const Complex<F>& c, const Complex<F>& d, const GradedMap<F>& f) {
  if (!is_chain_map(c, d, f)) return false;
  auto hc = cohomology(c);
  auto hd = cohomology(d);
  auto hf = h_map(c, d, f);
  GradedSpace probe = direct_sum(hc.h_space, hd.h_space.shifted(f.deg()));
  for (int j : probe.degrees()) {
    int a = hc.h_space.dim(j), b = hd.h_space.dim(j + f.deg());
    if (a != b) return false;
    if (rank(hf.block(j)) != a) return false;
  }
  return true;
}

// Degreewise short exactness of 0 -> A -f-> B -g-> C -> 0 for chain maps of
// degree zero. With g.f = 0 the three rank conditions pin down exactness.
template <class F>
bool is_short_exact_sequence(const Complex<F>& a, const Complex<F>& b, const Complex<F>& c,
                             const GradedMap<F>& f, const GradedMap<F>& g) {
  if (f.deg() != 0 || g.deg() != 0) return false;
  if (!is_chain_map(a, b, f) || !is_chain_map(b, c, g)) return false;
  if (!compose(g, f).is_zero()) return false;
  std::set<int> js;
  for (int j : a.space.degrees()) js.insert(j);
  for (int j : b.space.degrees()) js.insert(j);
  for (int j : c.space.degrees()) js.insert(j);
  for (int j : js) {
    int da = a.space.dim(j), db = b.space.dim(j), dc = c.space.dim(j);
    if (rank(f.block(j)) != da) return false;  // injective
    if (rank(g.block(j)) != dc) return false;  // surjective
    if (da != db - dc) return false;           // Ker g = Im f given g.f = 0
  }
  return true;
}

// Cohomology sequence of a degreewise short exact sequence of complexes,
// with the connecting map built by the zig-zag: lift a cycle of C through g,
// apply d_B, pull the result back through f.
template <class F>
struct LesReport {
  bool ses = false;    // inputs formed a short exact sequence of chain maps
  bool exact = false;  // the resulting long sequence is exact at every node
  Cohomology<F> ha, hb, hc;
  GradedMap<F> hf, hg;  // induced maps on cohomology
  GradedMap<F> delta;   // connecting H^j(C) -> H^(j+1)(A)
};

template <class F>
LesReport<F> les(const Complex<F>& a, const Complex<F>& b, const Complex<F>& c,
                 const GradedMap<F>& f, const GradedMap<F>& g) {
  const F& k = f.field();
  LesReport<F> out{is_short_exact_sequence(a, b, c, f, g),
                   false,
                   cohomology(a),
                   cohomology(b),
                   cohomology(c),
                   h_map(a, b, f),
                   h_map(b, c, g),
                   GradedMap<F>(k, GradedSpace(a.grading()), GradedSpace(a.grading()), 1)};
  if (!out.ses) return out;
  out.delta = GradedMap<F>(k, out.hc.h_space, out.ha.h_space, 1);
  for (int j : out.hc.h_space.degrees()) {
    int hc_j = out.hc.h_space.dim(j);
    int jt = norm_deg(a.grading(), j + 1);
    int ha_jt = out.ha.h_space.dim(jt);
    if (hc_j == 0 || ha_jt == 0) continue;
    Matrix<F> reps = out.hc.at.at(j).reps;
    auto lift = solve_matrix(g.block(j), reps);
    if (!lift) throw std::logic_error("les: surjectivity lift failed");
    Matrix<F> db = b.d.block(j).mul(*lift);
    auto pull = solve_matrix(f.block(jt), db);
    if (!pull) throw std::logic_error("les: connecting pullback failed");
    std::vector<typename Matrix<F>::Entry> es;
    for (int s = 0; s < hc_j; ++s) {
      auto co = class_coords(k, out.ha.at.at(jt), pull->col_vector(s));
      for (int r = 0; r < ha_jt; ++r)
        if (!k.is_zero(co[r])) es.push_back({r, s, co[r]});
    }
    out.delta.set_block(j, Matrix<F>::from_triples(k, ha_jt, hc_j, std::move(es)));
  }
  // Exactness at every node: zero composites plus the rank balance
  // dim(node) = rank(incoming) + rank(outgoing).
  bool ok = compose(out.hg, out.hf).is_zero() && compose(out.delta, out.hg).is_zero() &&
            compose(out.hf, out.delta).is_zero();
  std::set<int> js;
  for (int j : out.ha.h_space.degrees()) js.insert(j), js.insert(j - 1);
  for (int j : out.hb.h_space.degrees()) js.insert(j);
  for (int j : out.hc.h_space.degrees()) js.insert(j), js.insert(j + 1);
  for (int j : js) {
    ok = ok && out.hb.h_space.dim(j) ==
                   rank(out.hf.block(j)) + rank(out.hg.block(j));
    ok = ok && out.hc.h_space.dim(j) ==
                   rank(out.hg.block(j)) + rank(out.delta.block(j));
    ok = ok && out.ha.h_space.dim(norm_deg(a.grading(), j + 1)) ==
                   rank(out.delta.block(j)) + rank(out.hf.block(j + 1));
  }
  out.exact = ok;
  return out;
}

// Over a field, complexes are isomorphic iff graded dimensions and differential ranks agree.
template <class F>
bool complexes_isomorphic(const Complex<F>& a, const Complex<F>& b) {
  if (a.grading() != b.grading()) return false;
  if (!(a.space == b.space)) return false;
  for (int j : a.space.degrees())
    if (rank(a.d.block(j)) != rank(b.d.block(j))) return false;
  return true;
}

// Coordinate chart on graded maps src -> dst of each degree k: the space
// prod_j Hom(src^j, dst^(j+k)) flattened in ascending j, row-major per block.
template <class F>
class MapLayout {
 public:
  using Elt = typename F::Elt;

  MapLayout(F k, GradedSpace src, GradedSpace dst)
      : k_(k), src_(std::move(src)), dst_(std::move(dst)) {
    if (src_.grading != dst_.grading) throw std::invalid_argument("map layout: grading mismatch");
    if (src_.grading == Grading::Z2) {
      ks_ = {0, 1};
    } else if (!src_.empty() && !dst_.empty()) {
      for (int k2 = dst_.min_deg() - src_.max_deg(); k2 <= dst_.max_deg() - src_.min_deg(); ++k2)
        ks_.push_back(k2);
    }
    space_ = GradedSpace(src_.grading);
    for (int k2 : ks_) {
      int off = 0;
      for (int j : src_.degrees()) {
        int rows = dst_.dim(j + k2), cols = src_.dim(j);
        if (rows == 0 || cols == 0) continue;
        layout_[k2].push_back({j, rows, cols, off});
        off += rows * cols;
      }
      space_.add_dim(k2, off);
    }
  }

  const GradedSpace& space() const { return space_; }
  const GradedSpace& src() const { return src_; }
  const GradedSpace& dst() const { return dst_; }
  const std::vector<int>& hom_degrees() const { return ks_; }
  int dim(int k) const { return space_.dim(k); }

  GradedMap<F> to_map(int k, const std::vector<Elt>& v) const {
    int kn = norm_deg(src_.grading, k);
    if (static_cast<int>(v.size()) != space_.dim(kn))
      throw std::invalid_argument("map layout: coordinate size mismatch");
    GradedMap<F> f(k_, src_, dst_, kn);
    auto it = layout_.find(kn);
    if (it == layout_.end()) return f;
    for (const auto& [j, rows, cols, off] : it->second) {
      std::vector<typename Matrix<F>::Entry> es;
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
          if (!k_.is_zero(v[off + r * cols + c])) es.push_back({r, c, v[off + r * cols + c]});
      f.set_block(j, Matrix<F>::from_triples(k_, rows, cols, std::move(es)));
    }
    return f;
  }

  std::vector<Elt> from_map(const GradedMap<F>& f) const {
    if (!(f.src() == src_) || !(f.dst() == dst_))
      throw std::invalid_argument("map layout: endpoint mismatch");
    int kn = f.deg();
    std::vector<Elt> v(space_.dim(kn), k_.zero());
    auto it = layout_.find(kn);
    if (it != layout_.end())
      for (const auto& [j, rows, cols, off] : it->second) {
        auto m = f.block(j);
        (void)rows;
        for (const auto& e : m.entries()) v[off + e.r * cols + e.c] = e.v;
      }
    return v;
  }

 private:
  F k_;
  GradedSpace src_, dst_, space_;
  std::vector<int> ks_;
  std::map<int, std::vector<std::tuple<int, int, int, int>>> layout_;
};

// Hom complex of plain complexes: Hom^k = prod_j Hom(C^j, D^(j+k)), D(f) = d.f - (-1)^k f.d.
template <class F>
class HomComplex {
 public:
  using Elt = typename F::Elt;

  HomComplex(const Complex<F>& c, const Complex<F>& d)
      : c_(c), d_(d), layout_(c.field(), c.space, d.space),
        cpx_(Complex<F>::zero(c.field(), c.grading())) {
    const F& k = c.field();
    const GradedSpace& hs = layout_.space();
    GradedMap<F> dd(k, hs, hs, 1);
    for (int k2 : layout_.hom_degrees()) {
      int n = hs.dim(k2), m = hs.dim(k2 + 1);
      if (n == 0 || m == 0) continue;
      std::vector<typename Matrix<F>::Entry> es;
      for (int col = 0; col < n; ++col) {
        std::vector<Elt> unit(n, k.zero());
        unit[col] = k.one();
        auto v = layout_.from_map(dmap(c_, d_, layout_.to_map(k2, unit)));
        for (int r = 0; r < m; ++r)
          if (!k.is_zero(v[r])) es.push_back({r, col, v[r]});
      }
      dd.set_block(k2, Matrix<F>::from_triples(k, m, n, std::move(es)));
    }
    cpx_ = Complex<F>::make(hs, std::move(dd));
  }

  const Complex<F>& cpx() const { return cpx_; }
  GradedMap<F> to_map(int k, const std::vector<Elt>& v) const { return layout_.to_map(k, v); }
  std::vector<Elt> from_map(const GradedMap<F>& f) const { return layout_.from_map(f); }

 private:
  Complex<F> c_, d_;
  MapLayout<F> layout_;
  Complex<F> cpx_;
};

}  // namespace cdg
