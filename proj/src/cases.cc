#include "sigmak/cases.h"

#include <algorithm>

#include "sigmak/cones.h"
#include "sigmak/symfun.h"

namespace sigmak {

bool CaseLabel::has(Case c) const { return std::find(all.begin(), all.end(), c) != all.end(); }

double case_delta0(int n) { return 1.0 / (32.0 * n * (n - 2)); }

CaseLabel classify_case(const Eigen::VectorXd& kappa, int i) {
  const int n = static_cast<int>(kappa.size());
  if (n < 5) throw invalid_input("classify_case needs n >= 5");
  if (i < 0 || i >= n) throw invalid_input("distinguished index out of range");
  if (!is_sorted_descending(kappa)) throw invalid_input("classify_case needs sorted input");
  SymTable<double> t(kappa);
  const double s = t(n - 2);
  const double si = t.excl(n - 2, {i});
  CaseLabel out;
  if (si >= 0) {
    out.all.push_back(Case::kC);
  } else if (kappa(n - 2) <= 0) {
    out.all.push_back(Case::kA);
  } else {
    const double lead = kappa(i) * t.excl(n - 3, {i});
    double prod = 1.0;
    for (int j = 0; j < n - 2; ++j) prod *= kappa(j);
    const double bound = (1 + case_delta0(n)) * s;
    const bool b1 = lead >= bound;
    const bool b2 = prod >= 2.0 * (n - 2) * s;
    if (b1) out.all.push_back(Case::kB1);
    if (b2) out.all.push_back(Case::kB2);
    if (lead <= bound && !b2) out.all.push_back(Case::kB3);
  }
  out.primary = out.all.front();
  return out;
}

std::string to_string(Case c) {
  switch (c) {
    case Case::kA: return "A";
    case Case::kB1: return "B1";
    case Case::kB2: return "B2";
    case Case::kB3: return "B3";
    case Case::kC: return "C";
  }
  return "?";
}

}  // namespace sigmak
