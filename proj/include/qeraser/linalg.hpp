// Copyright 2026 The qeraser Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense complex linear algebra for the small (dim <= 16) vectors and
// matrices of two-path interferometry: Kronecker products, partial traces,
// Hermitian and general eigenvalues, singular values and the R-matrix
// spectrum used by the Wootters concurrence.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "qeraser/error.hpp"

namespace qeraser {

using cplx = std::complex<double>;

namespace tol {
inline constexpr double kStructural = 1e-12;
inline constexpr double kDerived = 1e-10;
// Eigenvalues in [-kClamp, 0) are roundoff and clamp to zero.
inline constexpr double kClamp = 1e-10;
}  // namespace tol

class ComplexVec {
 public:
  ComplexVec() = default;
  explicit ComplexVec(std::size_t dim) : amps_(dim, cplx{0.0, 0.0}) {}
  ComplexVec(std::initializer_list<cplx> amps) : amps_(amps) {}
  explicit ComplexVec(std::vector<cplx> amps) : amps_(std::move(amps)) {}

  static ComplexVec basis(std::size_t dim, std::size_t index) {
    if (index >= dim) throw StructuralError("basis index out of range");
    ComplexVec v(dim);
    v[index] = 1.0;
    return v;
  }

  std::size_t dim() const { return amps_.size(); }
  cplx& operator[](std::size_t i) { return amps_[i]; }
  const cplx& operator[](std::size_t i) const { return amps_[i]; }
  std::span<const cplx> amps() const { return amps_; }
  std::span<cplx> amps() { return amps_; }

  double norm_sq() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
  }
  double norm() const { return std::sqrt(norm_sq()); }

  bool is_normalized(double eps = tol::kStructural) const {
    return std::abs(norm_sq() - 1.0) <= eps;
  }

  ComplexVec normalized() const {
    const double n = norm();
    if (n == 0.0) throw ContractViolation("cannot normalize the zero vector");
    ComplexVec out = *this;
    for (auto& a : out.amps_) a /= n;
    return out;
  }

  ComplexVec& operator*=(cplx s) {
    for (auto& a : amps_) a *= s;
    return *this;
  }
  ComplexVec& operator+=(const ComplexVec& o) {
    if (o.dim() != dim()) throw StructuralError("vector dimension mismatch");
    for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] += o.amps_[i];
    return *this;
  }

  friend ComplexVec operator*(cplx s, ComplexVec v) { return v *= s; }
  friend ComplexVec operator+(ComplexVec a, const ComplexVec& b) { return a += b; }
  friend bool operator==(const ComplexVec&, const ComplexVec&) = default;

 private:
  std::vector<cplx> amps_;
};

// <a|b>
inline cplx inner(const ComplexVec& a, const ComplexVec& b) {
  if (a.dim() != b.dim()) throw StructuralError("inner: dimension mismatch");
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

class ComplexMat {
 public:
  ComplexMat() = default;
  ComplexMat(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}
  // Row-major nested initializer: {{a, b}, {c, d}}.
  ComplexMat(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw StructuralError("ragged matrix initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static ComplexMat identity(std::size_t n) {
    ComplexMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  static ComplexMat diagonal(std::span<const double> d) {
    ComplexMat m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }
  static ComplexMat diagonal(std::initializer_list<double> d) {
    return diagonal(std::span<const double>(d.begin(), d.size()));
  }
  // |v><v|
  static ComplexMat projector(const ComplexVec& v) {
    ComplexMat m(v.dim(), v.dim());
    for (std::size_t i = 0; i < v.dim(); ++i)
      for (std::size_t j = 0; j < v.dim(); ++j) m(i, j) = v[i] * std::conj(v[j]);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  ComplexMat adjoint() const {
    ComplexMat m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
  }
  ComplexMat transpose() const {
    ComplexMat m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }
  ComplexMat conj() const {
    ComplexMat m = *this;
    for (auto& x : m.data_) x = std::conj(x);
    return m;
  }

  cplx trace() const {
    if (!is_square()) throw StructuralError("trace of a non-square matrix");
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < rows_; ++i) s += (*this)(i, i);
    return s;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& x : data_) m = std::max(m, std::abs(x));
    return m;
  }

  ComplexMat& operator+=(const ComplexMat& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  ComplexMat& operator-=(const ComplexMat& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  ComplexMat& operator*=(cplx s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend ComplexMat operator+(ComplexMat a, const ComplexMat& b) { return a += b; }
  friend ComplexMat operator-(ComplexMat a, const ComplexMat& b) { return a -= b; }
  friend ComplexMat operator*(cplx s, ComplexMat a) { return a *= s; }

  friend ComplexMat operator*(const ComplexMat& a, const ComplexMat& b) {
    if (a.cols_ != b.rows_) throw StructuralError("matrix product: inner dimension mismatch");
    ComplexMat m(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{0.0, 0.0}) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) m(i, j) += aik * b(k, j);
      }
    return m;
  }

  friend ComplexVec operator*(const ComplexMat& a, const ComplexVec& v) {
    if (a.cols_ != v.dim()) throw StructuralError("matrix-vector product: dimension mismatch");
    ComplexVec out(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      cplx s{0.0, 0.0};
      for (std::size_t j = 0; j < a.cols_; ++j) s += a(i, j) * v[j];
      out[i] = s;
    }
    return out;
  }

  friend bool operator==(const ComplexMat&, const ComplexMat&) = default;

 private:
  void check_same_shape(const ComplexMat& o) const {
    if (o.rows_ != rows_ || o.cols_ != cols_) throw StructuralError("matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

inline double max_abs_diff(const ComplexMat& a, const ComplexMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw StructuralError("shape mismatch");
  return (a - b).max_abs();
}

inline double max_abs_diff(const ComplexVec& a, const ComplexVec& b) {
  if (a.dim() != b.dim()) throw StructuralError("dimension mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Distance between kets after removing the global phase of b relative to a.
inline double phase_aligned_distance(const ComplexVec& a, const ComplexVec& b) {
  const cplx ov = inner(b, a);
  const cplx phase = std::abs(ov) > 0.0 ? ov / std::abs(ov) : cplx{1.0, 0.0};
  return max_abs_diff(a, phase * b);
}

// ---------------------------------------------------------------------------
// Kronecker products

inline ComplexVec tensor(const ComplexVec& a, const ComplexVec& b) {
  ComplexVec out(a.dim() * b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < b.dim(); ++j) out[i * b.dim() + j] = a[i] * b[j];
  return out;
}

inline ComplexMat tensor(const ComplexMat& a, const ComplexMat& b) {
  ComplexMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cplx aij = a(i, j);
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Structural predicates

inline bool is_hermitian(const ComplexMat& m, double eps = tol::kStructural) {
  if (!m.is_square()) return false;
  const double scale = std::max(1.0, m.max_abs());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j)
      if (std::abs(m(i, j) - std::conj(m(j, i))) > eps * scale) return false;
  return true;
}

inline bool is_unitary(const ComplexMat& u, double eps = tol::kStructural) {
  if (!u.is_square()) return false;
  return max_abs_diff(u.adjoint() * u, ComplexMat::identity(u.rows())) <= eps;
}

// ---------------------------------------------------------------------------
// Partial trace

// Reduced matrix over the registers listed in `keep` (any order; the result
// uses ascending register order). `dims` lists the register dimensions with
// register 0 most significant.
inline ComplexMat partial_trace(const ComplexMat& rho, std::span<const std::size_t> dims,
                                std::span<const std::size_t> keep) {
  if (!rho.is_square()) throw StructuralError("partial_trace: matrix is not square");
  if (keep.empty()) throw StructuralError("partial_trace: keep set is empty");
  const std::size_t total =
      std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
  if (dims.empty() || total != rho.rows())
    throw StructuralError("partial_trace: register dims do not match matrix dimension");

  const std::size_t nreg = dims.size();
  std::vector<bool> kept(nreg, false);
  for (std::size_t r : keep) {
    if (r >= nreg) throw StructuralError("partial_trace: register index out of range");
    if (kept[r]) throw StructuralError("partial_trace: duplicate register in keep set");
    kept[r] = true;
  }

  std::vector<std::size_t> stride(nreg, 1);
  for (std::size_t r = nreg - 1; r-- > 0;) stride[r] = stride[r + 1] * dims[r + 1];

  std::size_t kdim = 1;
  std::size_t tdim = 1;
  for (std::size_t r = 0; r < nreg; ++r) (kept[r] ? kdim : tdim) *= dims[r];

  // Maps a (kept multi-index, traced multi-index) pair to a full flat index.
  auto full_index = [&](std::size_t k, std::size_t t) {
    std::size_t idx = 0;
    for (std::size_t r = nreg; r-- > 0;) {
      if (kept[r]) {
        idx += (k % dims[r]) * stride[r];
        k /= dims[r];
      } else {
        idx += (t % dims[r]) * stride[r];
        t /= dims[r];
      }
    }
    return idx;
  };

  ComplexMat out(kdim, kdim);
  for (std::size_t i = 0; i < kdim; ++i)
    for (std::size_t j = 0; j < kdim; ++j) {
      cplx s{0.0, 0.0};
      for (std::size_t t = 0; t < tdim; ++t) s += rho(full_index(i, t), full_index(j, t));
      out(i, j) = s;
    }
  return out;
}

inline ComplexMat partial_trace(const ComplexMat& rho, std::initializer_list<std::size_t> dims,
                                std::initializer_list<std::size_t> keep) {
  return partial_trace(rho, std::span<const std::size_t>(dims.begin(), dims.size()),
                       std::span<const std::size_t>(keep.begin(), keep.size()));
}

// ---------------------------------------------------------------------------
// Hermitian eigensystem (cyclic complex Jacobi)

struct HermitianEigen {
  std::vector<double> values;  // nonincreasing
  ComplexMat vectors;          // column k pairs with values[k]
};

inline HermitianEigen herm_eigen(const ComplexMat& m) {
  if (!is_hermitian(m)) throw ContractViolation("herm_eigen: matrix is not Hermitian");
  const std::size_t n = m.rows();
  ComplexMat a = m;
  ComplexMat v = ComplexMat::identity(n);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };
  const double scale = std::max(a.max_abs(), 1e-300);

  for (int sweep = 0; sweep < 100 && off_norm() > 1e-17 * scale; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double mag = std::abs(a(p, q));
        if (mag <= 1e-300) continue;
        const cplx phase = a(p, q) / mag;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // J = [[c, s], [-s conj(phase), c conj(phase)]] on (p, q)
        const cplx jpp = c, jpq = s, jqp = -s * std::conj(phase), jqq = c * std::conj(phase);
        for (std::size_t k = 0; k < n; ++k) {  // a <- a J
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * jpp + akq * jqp;
          a(k, q) = akp * jpq + akq * jqq;
        }
        for (std::size_t k = 0; k < n; ++k) {  // a <- J^H a
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {  // v <- v J
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * jpp + vkq * jqp;
          v(k, q) = vkp * jpq + vkq * jqq;
        }
      }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });
  HermitianEigen out{std::vector<double>(n), ComplexMat(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

inline std::vector<double> herm_eigvals(const ComplexMat& m) { return herm_eigen(m).values; }

// Clamps roundoff-negative eigenvalues to zero; anything below -kClamp is a bug.
inline double clamp_nonnegative(double lambda, const char* what) {
  if (lambda >= 0.0) return lambda;
  if (lambda >= -tol::kClamp) return 0.0;
  throw ContractViolation(std::string(what) + ": eigenvalue " + std::to_string(lambda) +
                          " is negative beyond roundoff");
}

inline void check_density(const ComplexMat& rho, double eps = tol::kStructural) {
  if (!rho.is_square()) throw StructuralError("density matrix must be square");
  if (!is_hermitian(rho, eps)) throw ContractViolation("density matrix is not Hermitian");
  if (std::abs(rho.trace() - 1.0) > eps) throw ContractViolation("density matrix trace is not 1");
  for (double l : herm_eigvals(rho)) clamp_nonnegative(l, "density matrix");
}

inline bool is_density(const ComplexMat& rho, double eps = tol::kStructural) {
  try {
    check_density(rho, eps);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

// Principal square root of a positive semidefinite Hermitian matrix.
inline ComplexMat sqrt_psd(const ComplexMat& m) {
  const HermitianEigen e = herm_eigen(m);
  const std::size_t n = m.rows();
  ComplexMat out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = std::sqrt(clamp_nonnegative(e.values[k], "sqrt_psd"));
    if (s == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        out(i, j) += s * e.vectors(i, k) * std::conj(e.vectors(j, k));
  }
  return out;
}

// ---------------------------------------------------------------------------
// General (non-Hermitian) eigenvalues: Householder Hessenberg reduction
// followed by single-shift complex QR with Wilkinson shifts.

inline std::vector<cplx> eigvals(const ComplexMat& m) {
  if (!m.is_square()) throw StructuralError("eigvals: matrix is not square");
  const std::size_t n = m.rows();
  ComplexMat h = m;
  if (n == 0) return {};

  for (std::size_t k = 0; k + 2 < n; ++k) {
    double alpha_sq = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) alpha_sq += std::norm(h(i, k));
    const double alpha = std::sqrt(alpha_sq);
    if (alpha == 0.0) continue;
    const cplx x0 = h(k + 1, k);
    const cplx phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : cplx{1.0, 0.0};
    std::vector<cplx> u(n, 0.0);
    for (std::size_t i = k + 1; i < n; ++i) u[i] = h(i, k);
    u[k + 1] += phase * alpha;
    double unorm_sq = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) unorm_sq += std::norm(u[i]);
    if (unorm_sq == 0.0) continue;
    // h <- (I - 2uu^H/|u|^2) h (I - 2uu^H/|u|^2)
    for (std::size_t j = 0; j < n; ++j) {
      cplx s{0.0, 0.0};
      for (std::size_t i = k + 1; i < n; ++i) s += std::conj(u[i]) * h(i, j);
      s *= 2.0 / unorm_sq;
      for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= u[i] * s;
    }
    for (std::size_t i = 0; i < n; ++i) {
      cplx s{0.0, 0.0};
      for (std::size_t j = k + 1; j < n; ++j) s += h(i, j) * u[j];
      s *= 2.0 / unorm_sq;
      for (std::size_t j = k + 1; j < n; ++j) h(i, j) -= s * std::conj(u[j]);
    }
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }

  const double eps = 1e-16;
  const double scale = std::max(h.max_abs(), 1e-300);
  std::vector<cplx> out(n);
  std::size_t hi = n - 1;
  int iter = 0;
  while (true) {
    if (hi == 0) {
      out[0] = h(0, 0);
      break;
    }
    // Find the start of the unreduced block ending at hi.
    std::size_t lo = hi;
    while (lo > 0) {
      const double sub = std::abs(h(lo, lo - 1));
      const double diag = std::abs(h(lo, lo)) + std::abs(h(lo - 1, lo - 1));
      if (sub <= eps * std::max(diag, scale * 1e-3)) {
        h(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }
    if (lo == hi) {
      out[hi] = h(hi, hi);
      --hi;
      iter = 0;
      continue;
    }
    if (++iter > 1000) throw ContractViolation("eigvals: QR iteration did not converge");

    // Wilkinson shift from the trailing 2x2 block.
    const cplx a = h(hi - 1, hi - 1), b = h(hi - 1, hi), c = h(hi, hi - 1), d = h(hi, hi);
    const cplx tr_half = 0.5 * (a + d);
    const cplx disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
    const cplx mu1 = tr_half + disc, mu2 = tr_half - disc;
    cplx mu = std::abs(mu1 - d) < std::abs(mu2 - d) ? mu1 : mu2;
    if (iter % 11 == 0) mu += cplx{0.75 * std::abs(h(hi, hi - 1)), 0.0};

    for (std::size_t i = lo; i <= hi; ++i) h(i, i) -= mu;
    std::vector<std::array<cplx, 2>> rots;  // (c, s) per Givens step
    for (std::size_t k = lo; k < hi; ++k) {
      const cplx x = h(k, k), y = h(k + 1, k);
      const double r = std::hypot(std::abs(x), std::abs(y));
      cplx gc, gs;
      if (r == 0.0) {
        gc = 1.0;
        gs = 0.0;
      } else if (std::abs(x) == 0.0) {
        gc = 0.0;
        gs = 1.0;
      } else {
        gc = std::abs(x) / r;
        gs = (x / std::abs(x)) * std::conj(y) / r;
      }
      // rows k, k+1 <- G [row_k; row_k+1], G = [[c, s], [-conj(s), c]]
      for (std::size_t j = k; j < n; ++j) {
        const cplx u = h(k, j), w = h(k + 1, j);
        h(k, j) = gc * u + gs * w;
        h(k + 1, j) = -std::conj(gs) * u + gc * w;
      }
      rots.push_back({gc, gs});
    }
    for (std::size_t k = lo; k < hi; ++k) {
      const cplx gc = rots[k - lo][0], gs = rots[k - lo][1];
      // columns k, k+1 <- [col_k, col_k+1] G^H
      for (std::size_t i = 0; i <= std::min(hi, k + 1); ++i) {
        const cplx u = h(i, k), w = h(i, k + 1);
        h(i, k) = u * std::conj(gc) + w * std::conj(gs);
        h(i, k + 1) = -u * gs + w * std::conj(gc);
      }
    }
    for (std::size_t i = lo; i <= hi; ++i) h(i, i) += mu;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Singular values (one-sided Jacobi; small values keep absolute accuracy
// near machine epsilon, unlike sqrt(eig(A^H A))).

inline std::vector<double> singular_values(const ComplexMat& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  ComplexMat a = m;
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < cols; ++i)
      for (std::size_t j = i + 1; j < cols; ++j) {
        double alpha = 0.0, beta = 0.0;
        cplx gamma{0.0, 0.0};
        for (std::size_t k = 0; k < rows; ++k) {
          alpha += std::norm(a(k, i));
          beta += std::norm(a(k, j));
          gamma += std::conj(a(k, i)) * a(k, j);
        }
        const double g = std::abs(gamma);
        if (g == 0.0 || g <= 1e-16 * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const cplx phase = gamma / g;
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t k = 0; k < rows; ++k) {
          const cplx ai = a(k, i);
          const cplx aj = a(k, j) * std::conj(phase);
          a(k, i) = c * ai - s * aj;
          a(k, j) = s * ai + c * aj;
        }
      }
    if (!rotated) break;
  }
  std::vector<double> sv(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < rows; ++k) s += std::norm(a(k, j));
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<>());
  if (rows < cols) sv.resize(rows);
  return sv;
}

// ---------------------------------------------------------------------------
// Concurrence spectrum

inline const ComplexMat& sigma_y_sigma_y() {
  static const ComplexMat yy = [] {
    const ComplexMat y{{0.0, cplx{0.0, -1.0}}, {cplx{0.0, 1.0}, 0.0}};
    return tensor(y, y);
  }();
  return yy;
}

// (sigma_y x sigma_y) rho^* (sigma_y x sigma_y)
inline ComplexMat spin_flip(const ComplexMat& rho) {
  if (rho.rows() != 4 || rho.cols() != 4) throw StructuralError("spin_flip: expected a 4x4 matrix");
  const ComplexMat& yy = sigma_y_sigma_y();
  return yy * rho.conj() * yy;
}

// The eigenvalues of R = sqrt(sqrt(rho) rho_tilde sqrt(rho)), nonincreasing.
// Computed as the singular values of sqrt(rho) sqrt(rho_tilde), since
// R^2 = (sqrt(rho) sqrt(rho_tilde)) (sqrt(rho) sqrt(rho_tilde))^H.
inline std::vector<double> prod_spectrum_sqrt(const ComplexMat& rho, const ComplexMat& rho_tilde) {
  if (rho.rows() != 4 || rho.cols() != 4 || rho_tilde.rows() != 4 || rho_tilde.cols() != 4)
    throw StructuralError("prod_spectrum_sqrt: expected 4x4 matrices");
  check_density(rho);
  return singular_values(sqrt_psd(rho) * sqrt_psd(rho_tilde));
}

// Eigenvalues of the non-Hermitian product rho * rho_tilde (real, >= 0 in
// exact arithmetic), nonincreasing. Square roots of these are the R spectrum,
// but with only sqrt(eps) absolute accuracy near zero.
inline std::vector<double> prod_eigvals(const ComplexMat& rho, const ComplexMat& rho_tilde) {
  if (rho.rows() != 4 || rho.cols() != 4 || rho_tilde.rows() != 4 || rho_tilde.cols() != 4)
    throw StructuralError("prod_eigvals: expected 4x4 matrices");
  std::vector<double> out;
  for (const cplx& z : eigvals(rho * rho_tilde)) out.push_back(clamp_nonnegative(z.real(), "prod_eigvals"));
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

}  // namespace qeraser
