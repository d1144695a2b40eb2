#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "sigmak/cones.h"
#include "sigmak/jacobi.h"
#include "sigmak/symfun.h"

namespace sigmak {

template <typename Scalar>
struct KeyParams {
  int k = 0;
  int i = 0;
  Scalar K = Scalar(0);
  Scalar c = Scalar(0);  // 1 / (K kappa_i sigma_{k-1}(kappa|i) - 1)
};

template <typename Derived>
KeyParams<typename Derived::Scalar> make_key_params(const Eigen::MatrixBase<Derived>& kappa, int k,
                                                    int i, typename Derived::Scalar K) {
  using Scalar = typename Derived::Scalar;
  const int n = static_cast<int>(kappa.size());
  if (i < 0 || i >= n) throw invalid_input("distinguished index out of range");
  if (k < 1 || k > n) throw invalid_input("level k out of range");
  const Scalar t = K * kappa(i) * sigma_excl(k - 1, kappa, {i});
  if (!(t > Scalar(1))) throw domain_error("K kappa_i sigma_{k-1}(kappa|i) must exceed 1");
  return {k, i, K, Scalar(1) / (t - Scalar(1))};
}

/// kappa_i [K vv^T - S] - sigma^{ii} E_ii + diag_{j != i}(a_j).
template <typename Derived>
MatrixX<typename Derived::Scalar> key_matrix(const Eigen::MatrixBase<Derived>& kappa,
                                             const KeyParams<typename Derived::Scalar>& prm) {
  using Scalar = typename Derived::Scalar;
  const int n = static_cast<int>(kappa.size());
  const int k = prm.k, i = prm.i;
  if (i < 0 || i >= n) throw invalid_input("distinguished index out of range");
  if (!(prm.K * kappa(i) * sigma_excl(k - 1, kappa, {i}) > Scalar(1))) {
    throw domain_error("K kappa_i sigma_{k-1}(kappa|i) must exceed 1");
  }
  SymTable<Scalar> t(kappa);
  VectorX<Scalar> v(n);
  for (int j = 0; j < n; ++j) v(j) = t.d1(k, j);
  MatrixX<Scalar> s = MatrixX<Scalar>::Zero(n, n);
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) s(p, q) = s(q, p) = t.d2(k, p, q);
  }
  const Scalar ki = kappa(i);
  const Scalar kK = ki * prm.K;
  MatrixX<Scalar> m(n, n);
  for (int p = 0; p < n; ++p) {
    for (int q = p; q < n; ++q) m(p, q) = m(q, p) = kK * (v(p) * v(q)) - ki * s(p, q);
  }
  m(i, i) -= v(i);
  for (int j = 0; j < n; ++j) {
    if (j != i) m(j, j) += v(j) + (ki + kappa(j)) * s(i, j);
  }
  return m;
}

template <typename Scalar>
struct ABCD {
  MatrixX<Scalar> A, B, C, D;
  std::vector<int> index;  // row r corresponds to kappa_{index[r]}
};

/// The four forms on the coordinates j != i.
template <typename Derived>
ABCD<typename Derived::Scalar> abcd_matrices(const Eigen::MatrixBase<Derived>& kappa, int k, int i) {
  using Scalar = typename Derived::Scalar;
  const int n = static_cast<int>(kappa.size());
  if (i < 0 || i >= n) throw invalid_input("distinguished index out of range");
  SymTable<Scalar> t(kappa);
  ABCD<Scalar> out;
  for (int j = 0; j < n; ++j) {
    if (j != i) out.index.push_back(j);
  }
  const int m = n - 1;
  out.A.resize(m, m);
  out.B.resize(m, m);
  out.C.resize(m, m);
  out.D.resize(m, m);
  VectorX<Scalar> w(m);
  for (int a = 0; a < m; ++a) {
    const int j = out.index[a];
    const VectorX<Scalar> c = t.excl_all({i, j});
    auto at = [&](int l) { return (l < 0 || l >= c.size()) ? Scalar(0) : c(l); };
    w(a) = at(k - 1);
    out.A(a, a) = at(k - 2) * at(k - 2);
    out.B(a, a) = 2 * at(k - 2);
    out.C(a, a) = kappa(j) * kappa(j) * at(k - 2) * at(k - 2) - 2 * at(k) * at(k - 2);
  }
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      const VectorX<Scalar> c = t.excl_all({i, out.index[a], out.index[b]});
      auto at = [&](int l) { return (l < 0 || l >= c.size()) ? Scalar(0) : c(l); };
      out.A(a, b) = out.A(b, a) = at(k - 2) * at(k - 2) - at(k - 1) * at(k - 3);
      out.B(a, b) = out.B(b, a) = -at(k - 2);
      out.C(a, b) = out.C(b, a) = at(k) * at(k - 2) - at(k - 1) * at(k - 1);
    }
  }
  for (int a = 0; a < m; ++a) {
    for (int b = a; b < m; ++b) out.D(a, b) = out.D(b, a) = w(a) * w(b);
  }
  return out;
}

/// (1/c)[alpha A + sigma_k B + C - c D], alpha = kappa_i^2 or 1.
template <typename Derived>
MatrixX<typename Derived::Scalar> rhs_combination(const Eigen::MatrixBase<Derived>& kappa,
                                                  const KeyParams<typename Derived::Scalar>& prm,
                                                  bool with_kappa_i_sq) {
  using Scalar = typename Derived::Scalar;
  const ABCD<Scalar> f = abcd_matrices(kappa, prm.k, prm.i);
  const Scalar alpha = with_kappa_i_sq ? kappa(prm.i) * kappa(prm.i) : Scalar(1);
  const Scalar sk = sigma(prm.k, kappa);
  return (alpha * f.A + sk * f.B + f.C) / prm.c - f.D;
}

/// Zero-pad an (n-1)x(n-1) form on the coordinates j != i back to n x n.
template <typename Derived>
MatrixX<typename Derived::Scalar> embed(const Eigen::MatrixBase<Derived>& r, int i) {
  using Scalar = typename Derived::Scalar;
  const int n = static_cast<int>(r.rows()) + 1;
  MatrixX<Scalar> out = MatrixX<Scalar>::Zero(n, n);
  for (int a = 0; a < n - 1; ++a) {
    for (int b = 0; b < n - 1; ++b) out(a < i ? a : a + 1, b < i ? b : b + 1) = r(a, b);
  }
  return out;
}

enum class Lemma41Form {
  kProof,      // (kappa_i K (sigma^{ii})^2 - sigma^{ii}) M - R
  kStatement,  // M - R
};

/// Key form minus the embedded right-hand side; PSD when the bound holds.
template <typename Derived>
MatrixX<typename Derived::Scalar> lemma41_gap(const Eigen::MatrixBase<Derived>& kappa,
                                              const KeyParams<typename Derived::Scalar>& prm,
                                              bool with_kappa_i_sq, Lemma41Form form) {
  using Scalar = typename Derived::Scalar;
  MatrixX<Scalar> m = key_matrix(kappa, prm);
  if (form == Lemma41Form::kProof) {
    const Scalar sii = sigma_excl(prm.k - 1, kappa, {prm.i});
    m *= sii * (prm.K * kappa(prm.i) * sii - Scalar(1));
  }
  return m - embed(rhs_combination(kappa, prm, with_kappa_i_sq), prm.i);
}

template <typename Scalar>
struct HForm {
  MatrixX<Scalar> H;
  VectorX<Scalar> lower;  // diagonal of the lower bound for H
  std::vector<int> index;
};

/// H on (kappa|i), n >= 5, with its diagonal lower bound.
template <typename Derived>
HForm<typename Derived::Scalar> h_matrix(const Eigen::MatrixBase<Derived>& kappa, int i) {
  using Scalar = typename Derived::Scalar;
  const int n = static_cast<int>(kappa.size());
  if (n < 5) throw invalid_input("h_matrix needs n >= 5");
  if (i < 0 || i >= n) throw invalid_input("distinguished index out of range");
  const VectorX<Scalar> kb = remove_entries(kappa, {i});
  const int m = n - 1;
  SymTable<Scalar> t(kb);
  SymTable<Scalar> sq(kb.cwiseAbs2());
  if (t(n - 5) == Scalar(0)) throw domain_error("sigma_{n-5}(kappa|i) vanishes");
  const Scalar r = 2 * t(n - 3) / (3 * t(n - 5));
  HForm<Scalar> out;
  for (int j = 0; j < n; ++j) {
    if (j != i) out.index.push_back(j);
  }
  out.H.resize(m, m);
  out.lower.resize(m);
  for (int a = 0; a < m; ++a) {
    out.H(a, a) = sq.excl(n - 3, {a});
    const VectorX<Scalar> c = t.excl_all({a});
    auto at = [&](int l) { return (l < 0 || l >= c.size()) ? Scalar(0) : c(l); };
    out.lower(a) = r * (at(n - 5) * at(n - 3) - 4 * at(n - 6) * at(n - 2) -
                        Scalar(4) / 3 * t(n - 5) * t(n - 3));
    for (int b = a + 1; b < m; ++b) {
      const VectorX<Scalar> d = t.excl_all({a, b});
      auto dt = [&](int l) { return (l < 0 || l >= d.size()) ? Scalar(0) : d(l); };
      out.H(a, b) = out.H(b, a) = r * dt(n - 5) * dt(n - 3) - dt(n - 3) * dt(n - 3);
    }
  }
  return out;
}

/// expm1(x)/x, continuous through 0.
template <typename Scalar>
Scalar exprel(Scalar x) {
  using std::abs;
  using std::expm1;
  if (abs(x) < Scalar(1e-6)) return Scalar(1) + x / 2 + x * x / 6;
  return expm1(x) / x;
}

/// (e^{a} - e^{b}) / (a - b) scaled by e^{-top}; a == b gives the derivative.
template <typename Scalar>
Scalar scaled_divided_difference(Scalar a, Scalar b, Scalar top) {
  using std::exp;
  if (a >= b) return exp(a - top) * exprel(-(a - b));
  return exp(b - top) * exprel(-(b - a));
}

template <typename Scalar>
struct TestFnTerms {
  Scalar Ai{}, Bi{}, Ci{}, Di{}, Ei{};  // each scaled by e^{-kappa_1}
  Scalar log_p{};
  bool vacuous = false;  // kappa_1 <= 1
  Scalar total() const { return Ai + Bi + Ci + Di - Ei; }
};

namespace detail {

template <typename Scalar>
struct TestFnParts {
  VectorX<Scalar> w, v, dd;  // weights e^{kappa_l - kappa_1}, sigma^{ll}, divided differences
  MatrixX<Scalar> s;
  Scalar log_w{}, log_p{}, sii{}, top{};
};

template <typename Derived>
TestFnParts<typename Derived::Scalar> testfn_parts(const Eigen::MatrixBase<Derived>& kappa, int k,
                                                   int i) {
  using Scalar = typename Derived::Scalar;
  using std::exp;
  using std::log;
  const int n = static_cast<int>(kappa.size());
  if (i < 0 || i >= n) throw invalid_input("distinguished index out of range");
  SymTable<Scalar> t(kappa);
  TestFnParts<Scalar> p;
  p.top = kappa.maxCoeff();
  p.w.resize(n);
  p.v.resize(n);
  p.dd.resize(n);
  p.s = MatrixX<Scalar>::Zero(n, n);
  for (int l = 0; l < n; ++l) {
    p.w(l) = exp(kappa(l) - p.top);
    p.v(l) = t.d1(k, l);
    p.dd(l) = l == i ? Scalar(0) : scaled_divided_difference<Scalar>(kappa(l), kappa(i), p.top);
    for (int q = l + 1; q < n; ++q) p.s(l, q) = p.s(q, l) = t.d2(k, l, q);
  }
  p.log_w = log(p.w.sum());
  p.log_p = p.top + p.log_w;
  p.sii = p.v(i);
  return p;
}

}  // namespace detail

/// The five test-function terms at derivative values h_l = h_{lli}.
template <typename Derived, typename DerivedH>
TestFnTerms<typename Derived::Scalar> testfn_terms(const Eigen::MatrixBase<Derived>& kappa, int k,
                                                   int i, const Eigen::MatrixBase<DerivedH>& h,
                                                   typename Derived::Scalar K) {
  using Scalar = typename Derived::Scalar;
  using std::exp;
  const int n = static_cast<int>(kappa.size());
  if (h.size() != n) throw invalid_input("h must match kappa in length");
  check_finite(h);
  const auto p = detail::testfn_parts(kappa, k, i);
  const VectorX<Scalar> hh = h.template cast<Scalar>();
  TestFnTerms<Scalar> out;
  out.log_p = p.log_p;
  out.vacuous = !(p.top > Scalar(1));
  const Scalar ski = p.v.dot(hh);
  out.Ai = p.w(i) * (K * ski * ski - hh.dot(p.s * hh));
  for (int l = 0; l < n; ++l) {
    const Scalar h2 = hh(l) * hh(l);
    out.Ci += p.w(l) * h2;
    if (l == i) continue;
    out.Bi += 2 * p.s(i, l) * p.w(l) * h2;
    out.Di += 2 * p.v(l) * p.dd(l) * h2;
  }
  out.Ci *= p.sii;
  const Scalar q = p.w.dot(hh);
  out.Ei = (1 + p.log_p) / (p.log_p * exp(p.log_w)) * p.sii * q * q;
  return out;
}

/// Matrix of h -> A_i + B_i + C_i + D_i - E_i (scaled by e^{-kappa_1}).
template <typename Derived>
MatrixX<typename Derived::Scalar> testfn_matrix(const Eigen::MatrixBase<Derived>& kappa, int k,
                                                int i, typename Derived::Scalar K) {
  using Scalar = typename Derived::Scalar;
  using std::exp;
  const int n = static_cast<int>(kappa.size());
  const auto p = detail::testfn_parts(kappa, k, i);
  const Scalar e = (1 + p.log_p) / (p.log_p * exp(p.log_w)) * p.sii;
  MatrixX<Scalar> m(n, n);
  for (int l = 0; l < n; ++l) {
    for (int q = l; q < n; ++q) {
      m(l, q) = m(q, l) = p.w(i) * (K * (p.v(l) * p.v(q)) - p.s(l, q)) - e * (p.w(l) * p.w(q));
    }
  }
  for (int l = 0; l < n; ++l) {
    m(l, l) += p.sii * p.w(l);
    if (l != i) m(l, l) += 2 * p.s(i, l) * p.w(l) + 2 * p.v(l) * p.dd(l);
  }
  return m;
}

}  // namespace sigmak
