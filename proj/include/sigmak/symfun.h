#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <stdexcept>

#include <Eigen/Dense>

namespace sigmak {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

class invalid_input : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Up to three distinct zero-based indices, kept sorted.
class IndexSet {
 public:
  IndexSet() = default;
  IndexSet(std::initializer_list<int> indices) {
    if (indices.size() > 3) throw invalid_input("IndexSet holds at most 3 indices");
    for (int i : indices) idx_[size_++] = i;
    std::sort(idx_.begin(), idx_.begin() + size_);
    for (int a = 1; a < size_; ++a) {
      if (idx_[a] == idx_[a - 1]) throw invalid_input("IndexSet has a repeated index");
    }
  }

  int size() const { return size_; }
  bool empty() const { return size_ == 0; }
  int operator[](int a) const { return idx_[a]; }
  const int* begin() const { return idx_.data(); }
  const int* end() const { return idx_.data() + size_; }
  bool contains(int i) const { return std::find(begin(), end(), i) != end(); }

 private:
  std::array<int, 3> idx_{};
  int size_ = 0;
};

template <typename Derived>
void check_finite(const Eigen::MatrixBase<Derived>& kappa) {
  if (!kappa.allFinite()) throw invalid_input("curvature vector has a non-finite entry");
}

/// kappa with the entries listed in s removed.
template <typename Derived>
VectorX<typename Derived::Scalar> remove_entries(const Eigen::MatrixBase<Derived>& kappa,
                                                 const IndexSet& s) {
  const int n = static_cast<int>(kappa.size());
  for (int j : s) {
    if (j < 0 || j >= n) throw invalid_input("excluded index out of range");
  }
  VectorX<typename Derived::Scalar> out(n - s.size());
  int w = 0;
  for (int j = 0; j < n; ++j) {
    if (!s.contains(j)) out(w++) = kappa(j);
  }
  return out;
}

/// sigma_0..sigma_n of kappa: coefficients of prod_i (1 + kappa_i t).
template <typename Derived>
VectorX<typename Derived::Scalar> sigma_all(const Eigen::MatrixBase<Derived>& kappa) {
  using Scalar = typename Derived::Scalar;
  check_finite(kappa);
  const Eigen::Index n = kappa.size();
  VectorX<Scalar> c = VectorX<Scalar>::Zero(n + 1);
  c(0) = Scalar(1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar v = kappa(i);
    for (Eigen::Index m = i + 1; m >= 1; --m) c(m) += v * c(m - 1);
  }
  return c;
}

/// sigma_k(kappa); 1 for k = 0 and 0 for k < 0 or k > n.
template <typename Derived>
typename Derived::Scalar sigma(int k, const Eigen::MatrixBase<Derived>& kappa) {
  using Scalar = typename Derived::Scalar;
  check_finite(kappa);
  const int n = static_cast<int>(kappa.size());
  if (k < 0 || k > n) return Scalar(0);
  if (k == 0) return Scalar(1);
  VectorX<Scalar> c = VectorX<Scalar>::Zero(k + 1);
  c(0) = Scalar(1);
  for (int i = 0; i < n; ++i) {
    const Scalar v = kappa(i);
    for (int m = std::min(i + 1, k); m >= 1; --m) c(m) += v * c(m - 1);
  }
  return c(k);
}

/// Cached sigma_0..sigma_n with exclusion variants obtained by deflation.
///
/// Removing kappa_j divides the generating polynomial by (1 + kappa_j t).
/// Coefficients below the rank of |kappa_j| among the remaining entries are
/// deflated forward, the rest backward (division by kappa_j), which keeps both
/// halves free of cancellation. When the backward half is needed and
/// |kappa_j| <= 1e-8 max|kappa| the table is rebuilt instead.
template <typename Scalar>
class SymTable {
 public:
  template <typename Derived>
  explicit SymTable(const Eigen::MatrixBase<Derived>& kappa)
      : kappa_(kappa.template cast<Scalar>()), c_(sigma_all(kappa_)) {}

  int n() const { return static_cast<int>(kappa_.size()); }
  const VectorX<Scalar>& base() const { return kappa_; }
  const VectorX<Scalar>& values() const { return c_; }

  Scalar operator()(int k) const { return at(c_, k); }

  /// sigma_k(kappa | s).
  Scalar excl(int k, const IndexSet& s) const {
    if (k < 0 || k > n() - s.size()) {
      validate(s);
      return Scalar(0);
    }
    if (k == 0) {
      validate(s);
      return Scalar(1);
    }
    return at(excl_all(s), k);
  }

  /// All coefficients of (kappa | s).
  VectorX<Scalar> excl_all(const IndexSet& s) const {
    validate(s);
    VectorX<Scalar> rest = kappa_;
    VectorX<Scalar> c = c_;
    // Remove from the highest index down so earlier positions stay valid.
    for (int a = s.size() - 1; a >= 0; --a) {
      c = deflate(c, rest, s[a]);
      VectorX<Scalar> shorter(rest.size() - 1);
      shorter << rest.head(s[a]), rest.tail(rest.size() - s[a] - 1);
      rest = shorter;
    }
    return c;
  }

  /// sigma_k^{pp} = sigma_{k-1}(kappa | p).
  Scalar d1(int k, int p) const { return excl(k - 1, {p}); }

  /// sigma_k^{pp,qq} = sigma_{k-2}(kappa | pq), zero on the diagonal.
  Scalar d2(int k, int p, int q) const {
    if (p == q) {
      validate({p});
      return Scalar(0);
    }
    return excl(k - 2, {p, q});
  }

 private:
  static Scalar at(const VectorX<Scalar>& c, int k) {
    if (k < 0 || k >= c.size()) return Scalar(0);
    return c(k);
  }

  void validate(const IndexSet& s) const {
    for (int j : s) {
      if (j < 0 || j >= n()) throw invalid_input("excluded index out of range");
    }
  }

  static VectorX<Scalar> deflate(const VectorX<Scalar>& c, const VectorX<Scalar>& rest, int j) {
    using std::abs;
    const int len = static_cast<int>(rest.size());
    const Scalar x = rest(j);
    int r = 0;
    Scalar max_abs(0);
    for (int l = 0; l < len; ++l) {
      max_abs = std::max(max_abs, abs(rest(l)));
      if (l != j && abs(rest(l)) > abs(x)) ++r;
    }
    VectorX<Scalar> out(len);
    out(0) = Scalar(1);
    for (int m = 1; m <= r; ++m) out(m) = c(m) - x * out(m - 1);
    if (r < len - 1) {
      if (abs(x) <= Scalar(1e-8) * max_abs) {
        VectorX<Scalar> shorter(len - 1);
        shorter << rest.head(j), rest.tail(len - j - 1);
        return sigma_all(shorter);
      }
      out(len - 1) = c(len) / x;
      for (int m = len - 1; m >= r + 2; --m) out(m - 1) = (c(m) - out(m)) / x;
    }
    return out;
  }

  VectorX<Scalar> kappa_;
  VectorX<Scalar> c_;
};

template <typename Derived>
SymTable(const Eigen::MatrixBase<Derived>&) -> SymTable<typename Derived::Scalar>;

/// sigma_k(kappa | s) by deflating the full table.
template <typename Derived>
typename Derived::Scalar sigma_excl(int k, const Eigen::MatrixBase<Derived>& kappa,
                                    const IndexSet& s) {
  return SymTable<typename Derived::Scalar>(kappa).excl(k, s);
}

/// First partial d sigma_k / d kappa_p.
template <typename Derived>
typename Derived::Scalar sigma_d1(int k, const Eigen::MatrixBase<Derived>& kappa, int p) {
  return sigma_excl(k - 1, kappa, {p});
}

/// Second partial d^2 sigma_k / d kappa_p d kappa_q.
template <typename Derived>
typename Derived::Scalar sigma_d2(int k, const Eigen::MatrixBase<Derived>& kappa, int p, int q) {
  if (p == q) {
    sigma_excl(0, kappa, {p});
    return typename Derived::Scalar(0);
  }
  return sigma_excl(k - 2, kappa, {p, q});
}

/// Binomial coefficient C_n^k as a double; 0 outside 0 <= k <= n.
inline double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int t = 1; t <= k; ++t) r = r * (n - k + t) / t;
  return std::round(r);
}

}  // namespace sigmak
