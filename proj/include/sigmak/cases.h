#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sigmak {

enum class Case { kA, kB1, kB2, kB3, kC };

/// Every label whose defining conditions hold, plus the first of them in
/// the order A, B1, B2, B3, C.
struct CaseLabel {
  Case primary = Case::kC;
  std::vector<Case> all;
  bool has(Case c) const;
};

/// delta_0 = 1 / (32 n (n-2)).
double case_delta0(int n);

/// Case split for sigma_{n-2} at the zero-based index i. kappa must be
/// sorted descending with n >= 5.
CaseLabel classify_case(const Eigen::VectorXd& kappa, int i);

std::string to_string(Case c);

}  // namespace sigmak
