#pragma once

#include <optional>
#include <vector>

#include "cdg/matrix.hpp"

namespace cdg {

// Incrementally maintained row-echelon span; used for rank growth tests and
// reduction against an accumulating basis.
template <class F>
class EchelonAccum {
public:
  using Elt = typename F::Elt;

  EchelonAccum(F k, int width) : k_(k), width_(width) {}

  // Reduce v against the stored rows; returns the residual.
  std::vector<Elt> reduce(std::vector<Elt> v) const {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const Elt& c = v[pivot_[i]];
      if (!k_.is_zero(c)) detail::row_axpy(k_, v, rows_[i], k_.neg(c));
    }
    return v;
  }

  // Insert v into the span; returns true if the rank grew.
  bool insert(std::vector<Elt> v) {
    v = reduce(std::move(v));
    int p = -1;
    for (int i = 0; i < width_; ++i)
      if (!k_.is_zero(v[i])) { p = i; break; }
    if (p < 0) return false;
    detail::row_scale(k_, v, k_.inv(v[p]));
    // Back-substitute into existing rows to keep reduced form.
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const Elt& c = rows_[i][p];
      if (!k_.is_zero(c)) detail::row_axpy(k_, rows_[i], v, k_.neg(c));
    }
    rows_.push_back(std::move(v));
    pivot_.push_back(p);
    return true;
  }

  bool contains(const std::vector<Elt>& v) const {
    std::vector<Elt> r = reduce(v);
    for (const Elt& x : r)
      if (!k_.is_zero(x)) return false;
    return true;
  }

  int rank() const { return static_cast<int>(rows_.size()); }

private:
  F k_;
  int width_;
  std::vector<std::vector<Elt>> rows_;
  std::vector<int> pivot_;
};

// A subspace of k^ambient, stored as a reduced-column-echelon basis with
// strictly increasing pivot rows.
template <class F>
class Subspace {
public:
  using Elt = typename F::Elt;

  static Subspace from_columns(const Matrix<F>& cols) {
    Subspace s(cols.field(), cols.rows());
    s.basis_ = column_echelon(cols);
    s.compute_pivots();
    return s;
  }

  static Subspace zero(F k, int ambient) { return Subspace(k, ambient); }

  static Subspace full(F k, int ambient) {
    Subspace s(k, ambient);
    s.basis_ = Matrix<F>::identity(k, ambient);
    s.compute_pivots();
    return s;
  }

  int ambient() const { return ambient_; }
  int dim() const { return basis_.cols(); }
  const Matrix<F>& basis() const { return basis_; }
  const F& field() const { return k_; }

  // Coordinates of v in the echelon basis, if v belongs to the subspace.
  std::optional<std::vector<Elt>> coords(const std::vector<Elt>& v) const {
    std::vector<Elt> c(dim(), k_.zero());
    for (int j = 0; j < dim(); ++j) c[j] = v[pivot_rows_[j]];
    std::vector<Elt> w = basis_.apply(c);
    for (int i = 0; i < ambient_; ++i)
      if (!(w[i] == v[i])) return std::nullopt;
    return c;
  }

  bool contains(const std::vector<Elt>& v) const { return coords(v).has_value(); }

  bool contains(const Subspace& o) const {
    if (o.ambient_ != ambient_) throw std::invalid_argument("subspace: ambient mismatch");
    for (int j = 0; j < o.dim(); ++j)
      if (!contains(o.basis_.col_vector(j))) return false;
    return true;
  }

  bool operator==(const Subspace& o) const {
    return ambient_ == o.ambient_ && basis_ == o.basis_;
  }

  static Subspace sum(const Subspace& a, const Subspace& b) {
    if (a.ambient_ != b.ambient_) throw std::invalid_argument("subspace: ambient mismatch");
    return from_columns(a.basis_.hstack(b.basis_));
  }

  static Subspace intersect(const Subspace& a, const Subspace& b) {
    if (a.ambient_ != b.ambient_) throw std::invalid_argument("subspace: ambient mismatch");
    if (a.dim() == 0 || b.dim() == 0) return zero(a.k_, a.ambient_);
    Matrix<F> j = a.basis_.hstack(b.basis_);
    Matrix<F> ker = kernel_image(j).kernel;
    Matrix<F> ucoords = ker.block(0, 0, a.dim(), ker.cols());
    return from_columns(a.basis_.mul(ucoords));
  }

  // Image f(S) inside the codomain of f.
  static Subspace image_of(const Matrix<F>& f, const Subspace& s) {
    if (f.cols() != s.ambient_) throw std::invalid_argument("subspace: image_of shape mismatch");
    return from_columns(f.mul(s.basis_));
  }

  // Preimage {x : f x in t}.
  static Subspace preimage_of(const Matrix<F>& f, const Subspace& t) {
    if (f.rows() != t.ambient_) throw std::invalid_argument("subspace: preimage_of shape mismatch");
    Matrix<F> j = f.hstack(t.basis_);
    Matrix<F> ker = kernel_image(j).kernel;
    return from_columns(ker.block(0, 0, f.cols(), ker.cols()));
  }

  // Columns of u's basis that extend v to a basis of u (v must be contained
  // in u); the returned representatives span a complement of v inside u.
  static Matrix<F> complement_in(const Subspace& u, const Subspace& v) {
    if (u.ambient_ != v.ambient_) throw std::invalid_argument("subspace: ambient mismatch");
    EchelonAccum<F> acc(u.k_, u.ambient_);
    for (int j = 0; j < v.dim(); ++j) acc.insert(v.basis_.col_vector(j));
    std::vector<int> keep;
    for (int j = 0; j < u.dim(); ++j)
      if (acc.insert(u.basis_.col_vector(j))) keep.push_back(j);
    return u.basis_.select_columns(keep);
  }

private:
  Subspace(F k, int ambient) : k_(k), ambient_(ambient), basis_(k, ambient, 0) {
    if (ambient < 0) throw std::invalid_argument("subspace: negative ambient");
  }

  void compute_pivots() {
    pivot_rows_.clear();
    for (int j = 0; j < basis_.cols(); ++j) {
      std::vector<Elt> col = basis_.col_vector(j);
      int p = -1;
      for (int i = 0; i < ambient_; ++i)
        if (!k_.is_zero(col[i])) { p = i; break; }
      pivot_rows_.push_back(p);
    }
  }

  F k_;
  int ambient_;
  Matrix<F> basis_;
  std::vector<int> pivot_rows_;
};

} // namespace cdg
