#pragma once

#include <cmath>
#include <stdexcept>

#include "sigmak/symfun.h"

namespace sigmak {

class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Cone { kOpen, kBarred };

struct ConeQuery {
  int n = 0;
  int k = 1;
  Cone variant = Cone::kOpen;
};

/// Gamma_k: sigma_1..sigma_k > 0. Barred: sigma_1..sigma_{k-1} > 0 and
/// sigma_k >= 0. Signs are those of the computed values, no tolerance.
template <typename Derived>
bool in_gamma(const ConeQuery& q, const Eigen::MatrixBase<Derived>& kappa) {
  using Scalar = typename Derived::Scalar;
  if (q.n != kappa.size()) throw invalid_input("cone query dimension mismatch");
  if (q.k < 1 || q.k > q.n) throw invalid_input("cone level outside 1..n");
  const VectorX<Scalar> c = sigma_all(kappa);
  for (int m = 1; m < q.k; ++m) {
    if (!(c(m) > 0)) return false;
  }
  return q.variant == Cone::kOpen ? c(q.k) > 0 : c(q.k) >= 0;
}

template <typename Derived>
bool in_gamma(int k, const Eigen::MatrixBase<Derived>& kappa, Cone variant = Cone::kOpen) {
  return in_gamma(ConeQuery{static_cast<int>(kappa.size()), k, variant}, kappa);
}

template <typename Derived>
bool is_sorted_descending(const Eigen::MatrixBase<Derived>& kappa) {
  for (Eigen::Index j = 1; j < kappa.size(); ++j) {
    if (kappa(j) > kappa(j - 1)) return false;
  }
  return true;
}

/// kappa_k + ... + kappa_n (k one-based, as in the cone level).
template <typename Derived>
typename Derived::Scalar tail_sum_check(int k, const Eigen::MatrixBase<Derived>& kappa) {
  if (!is_sorted_descending(kappa)) throw invalid_input("tail sum needs a descending vector");
  if (k < 1 || k > kappa.size()) throw invalid_input("tail sum level outside 1..n");
  return kappa.tail(kappa.size() - k + 1).sum();
}

/// t kappa with t = (target / sigma_k)^(1/k).
template <typename Derived>
VectorX<typename Derived::Scalar> normalize_sigma_k(const Eigen::MatrixBase<Derived>& kappa, int k,
                                                    typename Derived::Scalar target) {
  using Scalar = typename Derived::Scalar;
  using std::pow;
  const Scalar s = sigma(k, kappa);
  if (!(s > 0)) throw domain_error("normalize_sigma_k needs sigma_k > 0");
  if (!(target > 0)) throw domain_error("normalize_sigma_k needs a positive target");
  const Scalar t = pow(target / s, Scalar(1) / Scalar(k));
  return t * kappa;
}

}  // namespace sigmak
