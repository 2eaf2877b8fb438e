#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cdg/field.hpp"
#include "cdg/kernels.hpp"

namespace cdg {

// Sparse matrix over an exact field. Entries are kept sorted by (row, col)
// with no explicit zeros; elimination densifies on demand. Matrices act on
// column vectors.
template <class F>
class Matrix {
public:
  using Elt = typename F::Elt;
  struct Entry {
    int r = 0, c = 0;
    Elt v{};
  };

  Matrix(F k, int rows, int cols) : k_(k), rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("matrix: negative shape");
  }

  static Matrix zero(F k, int rows, int cols) { return Matrix(k, rows, cols); }

  static Matrix identity(F k, int n) {
    Matrix m(k, n, n);
    m.entries_.reserve(n);
    for (int i = 0; i < n; ++i) m.entries_.push_back({i, i, k.one()});
    return m;
  }

  static Matrix from_triples(F k, int rows, int cols, std::vector<Entry> es) {
    Matrix m(k, rows, cols);
    std::sort(es.begin(), es.end(), [](const Entry& a, const Entry& b) {
      return a.r != b.r ? a.r < b.r : a.c < b.c;
    });
    for (std::size_t i = 0; i < es.size(); ++i) {
      const Entry& e = es[i];
      if (e.r < 0 || e.r >= rows || e.c < 0 || e.c >= cols)
        throw std::invalid_argument("matrix: entry out of range");
      if (i > 0 && es[i - 1].r == e.r && es[i - 1].c == e.c)
        throw std::invalid_argument("matrix: duplicate entry");
      if (!k.is_zero(e.v)) m.entries_.push_back(e);
    }
    return m;
  }

  static Matrix from_dense(F k, int rows, int cols, const std::vector<Elt>& rowmajor) {
    if (static_cast<int>(rowmajor.size()) != rows * cols)
      throw std::invalid_argument("matrix: dense size mismatch");
    Matrix m(k, rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        if (!k.is_zero(rowmajor[std::size_t(r) * cols + c]))
          m.entries_.push_back({r, c, rowmajor[std::size_t(r) * cols + c]});
    return m;
  }

  // Column vectors as single-column matrices.
  static Matrix column(F k, const std::vector<Elt>& v) {
    Matrix m(k, static_cast<int>(v.size()), 1);
    for (int i = 0; i < static_cast<int>(v.size()); ++i)
      if (!k.is_zero(v[i])) m.entries_.push_back({i, 0, v[i]});
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const F& field() const { return k_; }
  const std::vector<Entry>& entries() const { return entries_; }
  bool is_zero() const { return entries_.empty(); }

  Elt at(int r, int c) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair<int, int>{r, c},
                               [](const Entry& e, const std::pair<int, int>& k2) {
                                 return e.r != k2.first ? e.r < k2.first : e.c < k2.second;
                               });
    if (it != entries_.end() && it->r == r && it->c == c) return it->v;
    return k_.zero();
  }

  std::vector<Elt> dense() const {
    std::vector<Elt> d(std::size_t(rows_) * cols_, k_.zero());
    for (const Entry& e : entries_) d[std::size_t(e.r) * cols_ + e.c] = e.v;
    return d;
  }

  std::vector<Elt> col_vector(int c) const {
    std::vector<Elt> v(rows_, k_.zero());
    for (const Entry& e : entries_)
      if (e.c == c) v[e.r] = e.v;
    return v;
  }

  std::vector<Elt> apply(const std::vector<Elt>& x) const {
    if (static_cast<int>(x.size()) != cols_) throw std::invalid_argument("matrix: apply size mismatch");
    std::vector<Elt> y(rows_, k_.zero());
    for (const Entry& e : entries_) y[e.r] = k_.add(y[e.r], k_.mul(e.v, x[e.c]));
    return y;
  }

  Matrix add(const Matrix& o) const {
    check_same_shape(o);
    std::vector<Entry> es;
    es.reserve(entries_.size() + o.entries_.size());
    std::size_t i = 0, j = 0;
    auto lt = [](const Entry& a, const Entry& b) { return a.r != b.r ? a.r < b.r : a.c < b.c; };
    while (i < entries_.size() || j < o.entries_.size()) {
      if (j == o.entries_.size() || (i < entries_.size() && lt(entries_[i], o.entries_[j]))) {
        es.push_back(entries_[i++]);
      } else if (i == entries_.size() || lt(o.entries_[j], entries_[i])) {
        es.push_back(o.entries_[j++]);
      } else {
        Elt s = k_.add(entries_[i].v, o.entries_[j].v);
        if (!k_.is_zero(s)) es.push_back({entries_[i].r, entries_[i].c, s});
        ++i, ++j;
      }
    }
    Matrix m(k_, rows_, cols_);
    m.entries_ = std::move(es);
    return m;
  }

  Matrix scale(const Elt& c) const {
    Matrix m(k_, rows_, cols_);
    if (k_.is_zero(c)) return m;
    m.entries_.reserve(entries_.size());
    for (const Entry& e : entries_) m.entries_.push_back({e.r, e.c, k_.mul(e.v, c)});
    return m;
  }

  Matrix neg() const { return scale(k_.neg(k_.one())); }
  Matrix sub(const Matrix& o) const { return add(o.neg()); }

  Matrix mul(const Matrix& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("matrix: mul shape mismatch");
    // C[i,:] += v * B[k,:] for each entry (i,k,v); dense accumulator rows.
    std::vector<Elt> acc(std::size_t(rows_) * o.cols_, k_.zero());
    std::vector<Elt> bd = o.dense();
    if constexpr (std::is_same_v<F, FpField>) {
      for (const Entry& e : entries_)
        if (o.cols_ > 0)
          kern::axpy(acc.data() + std::size_t(e.r) * o.cols_, bd.data() + std::size_t(e.c) * o.cols_,
                     e.v, o.cols_, k_.p);
    } else {
      for (const Entry& e : entries_)
        for (int c = 0; c < o.cols_; ++c) {
          Elt& t = acc[std::size_t(e.r) * o.cols_ + c];
          t = k_.add(t, k_.mul(e.v, bd[std::size_t(e.c) * o.cols_ + c]));
        }
    }
    return from_dense(k_, rows_, o.cols_, acc);
  }

  Matrix transpose() const {
    std::vector<Entry> es;
    es.reserve(entries_.size());
    for (const Entry& e : entries_) es.push_back({e.c, e.r, e.v});
    return from_triples(k_, cols_, rows_, std::move(es));
  }

  Matrix hstack(const Matrix& o) const {
    if (rows_ != o.rows_) throw std::invalid_argument("matrix: hstack rows mismatch");
    std::vector<Entry> es = entries_;
    for (const Entry& e : o.entries_) es.push_back({e.r, e.c + cols_, e.v});
    return from_triples(k_, rows_, cols_ + o.cols_, std::move(es));
  }

  Matrix vstack(const Matrix& o) const {
    if (cols_ != o.cols_) throw std::invalid_argument("matrix: vstack cols mismatch");
    std::vector<Entry> es = entries_;
    for (const Entry& e : o.entries_) es.push_back({e.r + rows_, e.c, e.v});
    return from_triples(k_, rows_ + o.rows_, cols_, std::move(es));
  }

  Matrix block(int r0, int c0, int nr, int nc) const {
    if (r0 < 0 || c0 < 0 || r0 + nr > rows_ || c0 + nc > cols_)
      throw std::invalid_argument("matrix: block out of range");
    std::vector<Entry> es;
    for (const Entry& e : entries_)
      if (e.r >= r0 && e.r < r0 + nr && e.c >= c0 && e.c < c0 + nc)
        es.push_back({e.r - r0, e.c - c0, e.v});
    return from_triples(k_, nr, nc, std::move(es));
  }

  // Keep a subset of columns, in the given order.
  Matrix select_columns(const std::vector<int>& cols) const {
    Matrix m(k_, rows_, static_cast<int>(cols.size()));
    std::vector<Entry> es;
    for (int j = 0; j < static_cast<int>(cols.size()); ++j) {
      std::vector<Elt> v = col_vector(cols[j]);
      for (int r = 0; r < rows_; ++r)
        if (!k_.is_zero(v[r])) es.push_back({r, j, v[r]});
    }
    return from_triples(k_, rows_, static_cast<int>(cols.size()), std::move(es));
  }

  bool operator==(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_ || entries_.size() != o.entries_.size()) return false;
    for (std::size_t i = 0; i < entries_.size(); ++i)
      if (entries_[i].r != o.entries_[i].r || entries_[i].c != o.entries_[i].c ||
          entries_[i].v != o.entries_[i].v)
        return false;
    return true;
  }

private:
  void check_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix: shape mismatch");
  }

  F k_;
  int rows_, cols_;
  std::vector<Entry> entries_;
};

template <class F>
struct RrefResult {
  Matrix<F> rref;
  std::vector<int> pivots;
  int rank = 0;
};

namespace detail {

// Dense row elimination helpers; the FpField path runs the dispatched kernels.
template <class F>
void row_axpy(const F& k, std::vector<typename F::Elt>& y, const std::vector<typename F::Elt>& x,
              typename F::Elt c) {
  if constexpr (std::is_same_v<F, FpField>) {
    if (!y.empty()) kern::axpy(y.data(), x.data(), c, y.size(), k.p);
  } else {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = k.add(y[i], k.mul(c, x[i]));
  }
}

template <class F>
void row_scale(const F& k, std::vector<typename F::Elt>& y, typename F::Elt c) {
  if constexpr (std::is_same_v<F, FpField>) {
    if (!y.empty()) kern::scal(y.data(), c, y.size(), k.p);
  } else {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = k.mul(c, y[i]);
  }
}

} // namespace detail

// Reduced row echelon form with deterministic first-nonzero pivoting.
template <class F>
RrefResult<F> rref(const Matrix<F>& m) {
  const F& k = m.field();
  using Elt = typename F::Elt;
  int R = m.rows(), C = m.cols();
  std::vector<std::vector<Elt>> rows(R, std::vector<Elt>(C, k.zero()));
  for (const auto& e : m.entries()) rows[e.r][e.c] = e.v;

  std::vector<int> pivots;
  int rank = 0;
  for (int col = 0; col < C && rank < R; ++col) {
    int pr = -1;
    for (int r = rank; r < R; ++r)
      if (!k.is_zero(rows[r][col])) { pr = r; break; }
    if (pr < 0) continue;
    std::swap(rows[rank], rows[pr]);
    detail::row_scale(k, rows[rank], k.inv(rows[rank][col]));
    for (int r = 0; r < R; ++r) {
      if (r == rank || k.is_zero(rows[r][col])) continue;
      detail::row_axpy(k, rows[r], rows[rank], k.neg(rows[r][col]));
    }
    pivots.push_back(col);
    ++rank;
  }

  std::vector<typename Matrix<F>::Entry> es;
  for (int r = 0; r < rank; ++r)
    for (int c = 0; c < C; ++c)
      if (!k.is_zero(rows[r][c])) es.push_back({r, c, rows[r][c]});
  return {Matrix<F>::from_triples(k, R, C, std::move(es)), pivots, rank};
}

template <class F>
int rank(const Matrix<F>& m) {
  return rref(m).rank;
}

template <class F>
struct KernelImage {
  Matrix<F> kernel; // cols(m) x (cols(m) - rank)
  Matrix<F> image;  // rows(m) x rank, reduced column echelon form
};

// Reduced column echelon form of the column span.
template <class F>
Matrix<F> column_echelon(const Matrix<F>& m) {
  RrefResult<F> r = rref(m.transpose());
  Matrix<F> t = r.rref.transpose();
  return t.block(0, 0, m.rows(), r.rank);
}

template <class F>
KernelImage<F> kernel_image(const Matrix<F>& m) {
  const F& k = m.field();
  RrefResult<F> r = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (int p : r.pivots) is_pivot[p] = true;
  std::vector<typename Matrix<F>::Entry> es;
  int kcol = 0;
  for (int f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    es.push_back({f, kcol, k.one()});
    for (int pr = 0; pr < r.rank; ++pr) {
      auto v = r.rref.at(pr, f);
      if (!k.is_zero(v)) es.push_back({r.pivots[pr], kcol, k.neg(v)});
    }
    ++kcol;
  }
  Matrix<F> kernel = Matrix<F>::from_triples(k, m.cols(), kcol, std::move(es));
  return {kernel, column_echelon(m)};
}

// Particular solution of A x = b, if consistent; free variables are set to 0.
template <class F>
std::optional<std::vector<typename F::Elt>> solve(const Matrix<F>& a,
                                                  const std::vector<typename F::Elt>& b) {
  const F& k = a.field();
  Matrix<F> aug = a.hstack(Matrix<F>::column(k, b));
  RrefResult<F> r = rref(aug);
  for (int p : r.pivots)
    if (p == a.cols()) return std::nullopt;
  std::vector<typename F::Elt> x(a.cols(), k.zero());
  for (int i = 0; i < r.rank; ++i) x[r.pivots[i]] = r.rref.at(i, a.cols());
  return x;
}

// Columnwise solve A X = B; nullopt if any column is inconsistent.
template <class F>
std::optional<Matrix<F>> solve_matrix(const Matrix<F>& a, const Matrix<F>& b) {
  const F& k = a.field();
  if (a.rows() != b.rows()) throw std::invalid_argument("solve_matrix: shape mismatch");
  Matrix<F> aug = a.hstack(b);
  RrefResult<F> r = rref(aug);
  for (int p : r.pivots)
    if (p >= a.cols()) return std::nullopt;
  std::vector<typename Matrix<F>::Entry> es;
  for (int i = 0; i < r.rank; ++i)
    for (int j = 0; j < b.cols(); ++j) {
      auto v = r.rref.at(i, a.cols() + j);
      if (!k.is_zero(v)) es.push_back({r.pivots[i], j, v});
    }
  return Matrix<F>::from_triples(k, a.cols(), b.cols(), std::move(es));
}

} // namespace cdg
