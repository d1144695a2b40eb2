#pragma once

// Reference implementations used only by the tests: brute-force subset
// sums, finite differences and the scalar double sums behind each form.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// sigma_k by enumerating all k-subsets, accumulated in long double.
inline long double sigma(int k, const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  if (k < 0 || k > n) return 0.0L;
  if (k == 0) return 1.0L;
  long double total = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    long double p = 1;
    for (int j = 0; j < n; ++j) {
      if (mask & (1u << j)) p *= x[j];
    }
    total += p;
  }
  return total;
}

/// Sum of |products| over k-subsets, the scale for relative comparisons.
inline long double sigma_abs(int k, const std::vector<double>& x) {
  std::vector<double> a(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) a[j] = std::abs(x[j]);
  return sigma(k, a);
}

inline std::vector<double> without(const std::vector<double>& x, std::vector<int> drop) {
  std::vector<double> out;
  for (int j = 0; j < static_cast<int>(x.size()); ++j) {
    bool skip = false;
    for (int d : drop) skip |= d == j;
    if (!skip) out.push_back(x[j]);
  }
  return out;
}

inline double sigma_excl(int k, const std::vector<double>& x, std::vector<int> drop) {
  return static_cast<double>(sigma(k, without(x, std::move(drop))));
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

/// Central difference of sigma_k in coordinate p.
inline double fd_d1(int k, std::vector<double> x, int p, double h = 1e-5) {
  const double x0 = x[p];
  x[p] = x0 + h;
  const long double up = sigma(k, x);
  x[p] = x0 - h;
  const long double dn = sigma(k, x);
  return static_cast<double>((up - dn) / (2 * h));
}

/// Mixed central difference of sigma_k in coordinates p != q.
inline double fd_d2(int k, std::vector<double> x, int p, int q, double h = 1e-4) {
  auto at = [&](double dp, double dq) {
    std::vector<double> y = x;
    y[p] += dp;
    y[q] += dq;
    return sigma(k, y);
  };
  return static_cast<double>((at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h));
}

/// kappa_i [K (sum_j s^jj xi_j)^2 - sum_{p != q} s^pp,qq xi_p xi_q] - s^ii xi_i^2
///   + sum_{j != i} a_j xi_j^2.
inline double key_form(const std::vector<double>& x, int k, int i, double K,
                       const std::vector<double>& xi) {
  const int n = static_cast<int>(x.size());
  long double lin = 0, cross = 0, diag = 0;
  for (int j = 0; j < n; ++j) lin += sigma_excl(k - 1, x, {j}) * xi[j];
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      if (p != q) cross += sigma_excl(k - 2, x, {p, q}) * xi[p] * xi[q];
    }
  }
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    const double a = sigma_excl(k - 1, x, {j}) + (x[i] + x[j]) * sigma_excl(k - 2, x, {i, j});
    diag += a * xi[j] * xi[j];
  }
  return static_cast<double>(x[i] * (K * lin * lin - cross) -
                             sigma_excl(k - 1, x, {i}) * xi[i] * xi[i] + diag);
}

/// The A, B, C, D sums over j != i and ordered pairs p != q (both != i);
/// xi is indexed by the full coordinate and xi[i] is ignored.
struct Abcd {
  double A, B, C, D;
};

inline Abcd abcd_forms(const std::vector<double>& x, int k, int i, const std::vector<double>& xi) {
  const int n = static_cast<int>(x.size());
  long double A = 0, B = 0, C = 0, D = 0;
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    auto s = [&](int m) { return sigma_excl(m, x, {i, j}); };
    const double x2 = xi[j] * xi[j];
    A += s(k - 2) * s(k - 2) * x2;
    B += 2 * s(k - 2) * x2;
    C += (x[j] * x[j] * s(k - 2) * s(k - 2) - 2 * s(k) * s(k - 2)) * x2;
    D += s(k - 1) * s(k - 1) * x2;
  }
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      if (p == q || p == i || q == i) continue;
      auto s = [&](int m) { return sigma_excl(m, x, {i, p, q}); };
      const double xx = xi[p] * xi[q];
      A += (s(k - 2) * s(k - 2) - s(k - 1) * s(k - 3)) * xx;
      B += -s(k - 2) * xx;
      C += (s(k) * s(k - 2) - s(k - 1) * s(k - 1)) * xx;
      D += sigma_excl(k - 1, x, {i, p}) * sigma_excl(k - 1, x, {i, q}) * xx;
    }
  }
  return {static_cast<double>(A), static_cast<double>(B), static_cast<double>(C),
          static_cast<double>(D)};
}

/// Reference least eigenvalue from Eigen's self-adjoint solver.
inline double min_eig(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly)
      .eigenvalues()(0);
}

}  // namespace oracle
