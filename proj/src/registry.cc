#include "sigmak/registry.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "sigmak/cases.h"
#include "sigmak/cones.h"
#include "sigmak/jacobi.h"
#include "sigmak/quadforms.h"
#include "sigmak/sampling.h"
#include "sigmak/symfun.h"

namespace sigmak {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Draw = std::optional<Sample>;

// Running sum of one side of a relation, with the magnitude of its terms.
struct Side {
  double sum = 0.0;
  double mag = 0.0;
  Side() = default;
  Side(std::initializer_list<double> terms) {
    for (double t : terms) add(t);
  }
  void add(double t) {
    sum += t;
    mag += std::abs(t);
  }
};

double identity_slack(const Side& l, const Side& r) {
  return -std::abs(l.sum - r.sum) / (1.0 + l.mag + r.mag);
}

double ineq_slack(const Side& l, const Side& r) { return (l.sum - r.sum) / (1.0 + l.mag + r.mag); }

double ineq_slack(double l, double r) { return ineq_slack(Side{l}, Side{r}); }

double rel_eig(const MatrixXd& m) { return psd_slack(m); }

double rel_eig(const MatrixXd& m, double scale) {
  if (!(scale > 0)) return 0.0;
  return min_eig(m) / scale;
}

double at(const VectorXd& c, int m) { return (m < 0 || m >= c.size()) ? 0.0 : c(m); }

std::vector<int> range(int lo, int hi) {
  std::vector<int> out;
  for (int k = lo; k <= hi; ++k) out.push_back(k);
  return out;
}

auto levels_from(int lo) {
  return [lo](int n) { return range(lo, n); };
}

auto level_free(int min_n) {
  return [min_n](int n) { return n >= min_n ? std::vector<int>{0} : std::vector<int>{}; };
}

auto level_top2(int min_n) {
  return [min_n](int n) { return n >= min_n ? std::vector<int>{n - 2} : std::vector<int>{}; };
}

// 2k > n and 2 <= k <= n - 1.
std::vector<int> conjecture_levels(int n) {
  std::vector<int> out;
  for (int k = 2; k <= n - 1; ++k) {
    if (2 * k > n) out.push_back(k);
  }
  return out;
}

std::optional<VectorXd> open_point(int n, int k, CounterRng& rng) {
  SampleSpec spec;
  spec.n = n;
  spec.k = k;
  spec.kappa1_target = 1.0;
  spec.max_attempts = 200;
  try {
    return sample_gamma(spec, rng);
  } catch (const sampling_exhausted&) {
    return std::nullopt;
  }
}

// Gamma_k or its barred boundary, half and half.
std::optional<VectorXd> barred_point(int n, int k, CounterRng& rng) {
  if (rng.uniform() < 0.5) return open_point(n, k, rng);
  for (int a = 0; a < 200; ++a) {
    if (auto p = try_boundary(n, k, rng)) return p;
  }
  return std::nullopt;
}

// Barred Gamma_n: nonnegative entries with at most one zero.
VectorXd barred_full_point(int n, CounterRng& rng) {
  VectorXd kappa(n);
  for (int j = 0; j < n; ++j) kappa(j) = rng.log_uniform(1e-3, 1.0);
  if (rng.uniform() < 0.3) kappa(rng.integer(0, n - 1)) = 0.0;
  std::sort(kappa.data(), kappa.data() + n, std::greater<double>());
  return kappa;
}

// A point at scale kappa1 with kappa_i near the top and N0 <= sigma_k <= N.
std::optional<VectorXd> large_point(const Cell& c, int k, int i, CounterRng& rng) {
  SampleSpec spec;
  spec.n = c.n;
  spec.k = k;
  spec.kappa1_target = c.kappa1;
  spec.near_top_index = i;
  spec.sigma_k_range = std::make_pair(1.0, 10.0);
  spec.max_attempts = 200;
  try {
    return sample_gamma(spec, rng);
  } catch (const sampling_exhausted&) {
    return std::nullopt;
  }
}

// A point at scale kappa1 with no further constraint.
std::optional<VectorXd> scaled_point(const Cell& c, CounterRng& rng) {
  if (rng.uniform() < 0.5) {
    const int i = rng.integer(0, std::max(0, c.k - 2));
    return large_point(c, c.k, i, rng);
  }
  SampleSpec spec;
  spec.n = c.n;
  spec.k = c.k;
  spec.kappa1_target = c.kappa1;
  spec.max_attempts = 200;
  try {
    return sample_gamma(spec, rng);
  } catch (const sampling_exhausted&) {
    return std::nullopt;
  }
}

std::vector<int> distinct(int n, int count, CounterRng& rng) {
  std::vector<int> out;
  while (static_cast<int>(out.size()) < count) {
    const int j = rng.integer(0, n - 1);
    if (std::find(out.begin(), out.end(), j) == out.end()) out.push_back(j);
  }
  return out;
}

Draw real_draw(const Cell& c, CounterRng& rng, int indices) {
  Sample s;
  s.kappa = sample_real(c.n, rng);
  s.index = distinct(c.n, indices, rng);
  return s;
}

Draw gamma_draw(const Cell& c, CounterRng& rng, int indices) {
  auto p = open_point(c.n, c.k, rng);
  if (!p) return std::nullopt;
  Sample s;
  s.kappa = *p * rng.log_uniform(0.1, 10.0);
  s.index = distinct(c.n, indices, rng);
  return s;
}

// Near-top sample for the conjecture family; index[0] is i.
Draw key_draw(const Cell& c, CounterRng& rng) {
  const int i = rng.integer(0, std::max(0, c.k - 2));
  auto p = large_point(c, c.k, i, rng);
  if (!p) return std::nullopt;
  if (c.K > 0 && !(c.K * (*p)(i) * sigma_excl(c.k - 1, *p, {i}) > 1.0)) return std::nullopt;
  Sample s;
  s.kappa = *p;
  s.index = {i};
  return s;
}

Draw case_draw(const Cell& c, CounterRng& rng, bool want_ab) {
  auto s = key_draw(c, rng);
  if (!s) return std::nullopt;
  const CaseLabel label = classify_case(s->kappa, s->index[0]);
  const bool ab = label.has(Case::kA) || label.has(Case::kB1) || label.has(Case::kB2);
  const bool b3c = label.has(Case::kB3) || label.has(Case::kC);
  if (want_ab ? !ab : !b3c) return std::nullopt;
  if (!want_ab && s->index[0] > c.n - 4) return std::nullopt;
  return s;
}

// --- symmetric-function facts -------------------------------------------

double recursion_slack(const Sample& s, const Cell& c) {
  SymTable<double> t(s.kappa);
  const int i = s.index[0];
  return identity_slack({t(c.k)}, {s.kappa(i) * t.excl(c.k - 1, {i}), t.excl(c.k, {i})});
}

double sum_excl_slack(const Sample& s, const Cell& c) {
  SymTable<double> t(s.kappa);
  Side l;
  for (int i = 0; i < c.n; ++i) l.add(t.excl(c.k, {i}));
  return identity_slack(l, {(c.n - c.k) * t(c.k)});
}

double sum_weighted_slack(const Sample& s, const Cell& c) {
  SymTable<double> t(s.kappa);
  Side l;
  for (int i = 0; i < c.n; ++i) l.add(s.kappa(i) * t.excl(c.k - 1, {i}));
  return identity_slack(l, {c.k * t(c.k)});
}

// --- five algebraic identities ------------------------------------------

Draw id1_draw(const Cell& c, CounterRng& rng) {
  auto s = gamma_draw(c, rng, 0);
  if (!s) return std::nullopt;
  std::vector<int> pos;
  for (int j = 0; j < c.n; ++j) {
    if (s->kappa(j) > 0) pos.push_back(j);
  }
  const int i = pos[rng.integer(0, static_cast<int>(pos.size()) - 1)];
  int j = rng.integer(0, c.n - 2);
  if (j >= i) ++j;
  s->index = {i, j};
  const double g = s->kappa(i) * sigma_excl(c.k - 1, s->kappa, {i});
  s->aux = {(1.0 + rng.log_uniform(1e-2, 1e3)) / g};
  return s;
}

double id1_slack(const Sample& s, const Cell& c) {
  SymTable<double> t(s.kappa);
  const int k = c.k, i = s.index[0], j = s.index[1];
  const double K = s.aux[0];
  const double ki = s.kappa(i), kj = s.kappa(j);
  const double sii = t.d1(k, i), sjj = t.d1(k, j), sij = t.d2(k, i, j);
  const double aj = sjj + (ki + kj) * sij;
  const double g = K * ki * sii;
  const double x = (sii + sjj) * (ki + kj) * t.excl(k - 2, {i, j});
  const double e = t.excl(k - 1, {i, j});
  return identity_slack({-g * sjj * sjj, 2 * g * sjj * ki * sij, -ki * ki * sij * sij, aj * g * sii,
                         -aj * sii},
                        {g * x, -x, -e * e});
}

double id2_slack(const Sample& s, const Cell& c) {
  SymTable<double> t(s.kappa);
  const int k = c.k, i = s.index[0], p = s.index[1], q = s.index[2];
  const double ki = s.kappa(i);
  const double spp = t.d1(k, p), sqq = t.d1(k, q), sii = t.d1(k, i);
  const double siq = t.d2(k, i, q), sip = t.d2(k, i, p), spq = t.d2(k, p, q);
  return identity_slack({ki * spp * siq, ki * sqq * sip, -ki * sii * spq, -spp * sqq,
                         -ki * ki * sip * siq, ki * sii * spq},
                        {-t.excl(k - 1, {i, p}) * t.excl(k - 1, {i, q})});
}

double id3_slack(const Sample& s, const Cell& c) {
  SymTable<double> t(s.kappa);
  const int k = c.k, i = s.index[0], j = s.index[1];
  const double ki = s.kappa(i), kj = s.kappa(j);
  const double sii = t.d1(k, i), sjj = t.d1(k, j), e = t.excl(k - 2, {i, j});
  return identity_slack({sii * ki, sii * kj, sjj * ki, sjj * kj},
                        {2 * t(k), -2 * t.excl(k, {i, j}), ki * ki * e, kj * kj * e});
}

double id4_slack(const Sample& s, const Cell& c) {
  SymTable<double> t(s.kappa);
  const int k = c.k, i = s.index[0], p = s.index[1], q = s.index[2];
  const double ki = s.kappa(i), kq = s.kappa(q);
  const VectorXd r = t.excl_all({i, p, q});
  const double a1 = at(r, k - 1), a2 = at(r, k - 2), a3 = at(r, k - 3);
  return identity_slack({t.d1(k, q) * t.d2(k, i, p), -t.d1(k, i) * t.d2(k, p, q)},
                        {ki * a2 * a2, -ki * a1 * a3, kq * a3 * a1, -kq * a2 * a2});
}

double id5_slack(const Sample& s, const Cell& c) {
  SymTable<double> t(s.kappa);
  const int k = c.k, i = s.index[0], p = s.index[1], q = s.index[2];
  const double ki = s.kappa(i), kq = s.kappa(q);
  const VectorXd r = t.excl_all({i, p, q});
  const double a0 = at(r, k), a1 = at(r, k - 1), a2 = at(r, k - 2), a3 = at(r, k - 3);
  return identity_slack({t.d1(k, p) * t.excl(k - 1, {i, q})},
                        {t(k) * a2, a1 * a1, -a0 * a2, -kq * ki * a2 * a2, kq * ki * a3 * a1});
}

// --- identities on R^m ----------------------------------------------------

double square_sum_slack(const Sample& s, const Cell& c) {
  const VectorXd sig = sigma_all(s.kappa);
  const int k = c.k;
  Side r{sigma(k, VectorXd(s.kappa.cwiseAbs2()))};
  for (int i = 1; i <= k; ++i) r.add(2.0 * (i % 2 == 1 ? 1 : -1) * at(sig, k + i) * at(sig, k - i));
  return identity_slack({at(sig, k) * at(sig, k)}, r);
}

double paired_sum_slack(const Sample& s, const Cell& c) {
  SymTable<double> t(s.kappa);
  const int m = c.n, sl = c.k;
  Side l;
  for (int i = 0; i < m; ++i) {
    const VectorXd e = t.excl_all({i});
    l.add(at(e, m - sl) * at(e, m - 1));
  }
  return identity_slack(l, {t(m - sl) * t(m - 1), -(sl + 1) * t(m) * t(m - sl - 1)});
}

double pair_square_slack(const Sample& s, const Cell& c) {
  SymTable<double> t(s.kappa);
  const int m = c.n, j = s.index[0];
  Side l;
  for (int q = 0; q < m; ++q) {
    if (q == j) continue;
    const double v = t.excl(m - 4, {j, q});
    l.add(v * v);
  }
  const VectorXd e = t.excl_all({j});
  return identity_slack(l, {3 * at(e, m - 4) * at(e, m - 4), -2 * at(e, m - 5) * at(e, m - 3),
                            -4 * at(e, m - 6) * at(e, m - 2), -6 * at(e, m - 7) * at(e, m - 1)});
}

// --- classical inequalities -----------------------------------------------

double newton_slack(const Sample& s, const Cell& c) {
  const VectorXd sig = sigma_all(s.kappa);
  const int n = c.n, k = c.k;
  const double b1 = binom(n, k - 1);
  const double l = at(sig, k - 1) * at(sig, k - 1) / (b1 * b1);
  const double r = at(sig, k) * at(sig, k - 2) / (binom(n, k) * binom(n, k - 2));
  return ineq_slack(l, r);
}

Draw maclaurin_draw(const Cell& c, CounterRng& rng) {
  auto s = gamma_draw(c, rng, 0);
  if (s) s->index = {rng.integer(1, c.k)};
  return s;
}

double maclaurin_slack(const Sample& s, const Cell& c) {
  const VectorXd sig = sigma_all(s.kappa);
  const int n = c.n, k = c.k, l = s.index[0];
  return ineq_slack(std::pow(sig(l) / binom(n, l), 1.0 / l),
                    std::pow(sig(k) / binom(n, k), 1.0 / k));
}

Draw gen_newton_draw(const Cell& c, CounterRng& rng) {
  auto s = gamma_draw(c, rng, 0);
  if (!s) return std::nullopt;
  const int sl = rng.integer(1, c.k);
  s->index = {sl, rng.integer(1, sl)};
  return s;
}

double gen_newton_slack(const Sample& s, const Cell& c) {
  const VectorXd sig = sigma_all(s.kappa);
  const int n = c.n, k = c.k, sl = s.index[0], r = s.index[1];
  auto norm = [&](int m) { return m > n ? 0.0 : sig(m) / binom(n, m); };
  return ineq_slack(norm(sl) * norm(k), norm(sl - r) * norm(k + r));
}

// Same inequality with kappa in Gamma_{k+r}, the cone of the highest index.
Draw gen_newton_cone_draw(const Cell& c, CounterRng& rng) {
  const int r = rng.integer(1, std::min(c.k, c.n - c.k));
  const int sl = rng.integer(r, c.k);
  auto p = open_point(c.n, c.k + r, rng);
  if (!p) return std::nullopt;
  Sample s;
  s.kappa = *p * rng.log_uniform(0.1, 10.0);
  s.index = {sl, r};
  return s;
}

// Diagonal reduction of the concavity inequality for sigma_k / sigma_l.
Draw guan_draw(const Cell& c, CounterRng& rng) {
  auto s = gamma_draw(c, rng, 0);
  if (!s) return std::nullopt;
  s->index = {rng.integer(1, c.k - 1)};
  s->aux = {rng.log_uniform(0.1, 10.0)};
  return s;
}

double guan_slack(const Sample& s, const Cell& c) {
  const int n = c.n, k = c.k, l = s.index[0];
  const double delta = s.aux[0];
  const double alpha = 1.0 / (k - l);
  SymTable<double> t(s.kappa);
  VectorXd v(n), u(n);
  MatrixXd sk = MatrixXd::Zero(n, n), sl = MatrixXd::Zero(n, n);
  for (int p = 0; p < n; ++p) {
    v(p) = t.d1(k, p);
    u(p) = t.d1(l, p);
    for (int q = p + 1; q < n; ++q) {
      sk(p, q) = sk(q, p) = t.d2(k, p, q);
      sl(p, q) = sl(q, p) = t.d2(l, p, q);
    }
  }
  const double sgk = t(k), sgl = t(l);
  const MatrixXd t1 = -sk;
  const MatrixXd t2 = (1 - alpha + alpha / delta) / sgk * (v * v.transpose());
  const MatrixXd t3 = -sgk * (alpha + 1 - delta * alpha) / (sgl * sgl) * (u * u.transpose());
  const MatrixXd t4 = sgk / sgl * sl;
  return rel_eig(t1 + t2 + t3 + t4, t1.norm() + t2.norm() + t3.norm() + t4.norm());
}

Draw ordered_pair_draw(const Cell& c, CounterRng& rng) {
  auto s = gamma_draw(c, rng, 2);
  if (s) std::sort(s->index.begin(), s->index.end());
  return s;
}

double theta_pair_slack(const Sample& s, const Cell& c) {
  const int n = c.n, k = c.k, i = s.index[0], j = s.index[1];
  const double theta = std::sqrt(k * (n - k) / (n - 1.0));
  SymTable<double> t(s.kappa);
  return ineq_slack(theta * t.excl(k - 1, {j}), std::abs(t.excl(k - 1, {i, j})));
}

Draw ratio_draw(const Cell& c, CounterRng& rng) {
  auto s = gamma_draw(c, rng, 0);
  if (s) s->index = {rng.integer(0, c.k)};
  return s;
}

double ratio_slack(const Sample& s, const Cell& c) {
  const int n = c.n, k = c.k, sl = s.index[0];
  const VectorXd sig = sigma_all(s.kappa);
  return ineq_slack(std::pow(s.kappa(0), sl) * sig(k - sl) / sig(k),
                    binom(n, k - sl) / binom(n, k));
}

Draw nonpositive_draw(const Cell& c, CounterRng& rng, int need) {
  auto s = gamma_draw(c, rng, 0);
  if (!s) return std::nullopt;
  std::vector<int> neg;
  for (int j = 0; j < c.n; ++j) {
    if (s->kappa(j) <= 0) neg.push_back(j);
  }
  if (static_cast<int>(neg.size()) < need) return std::nullopt;
  if (need == 2) {
    const auto pick = distinct(static_cast<int>(neg.size()), 2, rng);
    s->index = {std::max(neg[pick[0]], neg[pick[1]]), std::min(neg[pick[0]], neg[pick[1]])};
  }
  return s;
}

double negative_bound_slack(const Sample& s, const Cell& c) {
  double worst = std::numeric_limits<double>::infinity();
  const double bound = (c.n - c.k) * s.kappa(0) / c.k;
  for (int j = 0; j < c.n; ++j) {
    if (s.kappa(j) <= 0) worst = std::min(worst, ineq_slack(bound, -s.kappa(j)));
  }
  return worst;
}

double negative_pair_slack(const Sample& s, const Cell& c) {
  const int i = s.index[0], j = s.index[1];
  const VectorXd r = SymTable<double>(s.kappa).excl_all({i, j});
  return ineq_slack(2 * at(r, c.k) / at(r, c.k - 1), -(s.kappa(i) + s.kappa(j)));
}

Draw product_draw(const Cell& c, CounterRng& rng) {
  auto p = barred_point(c.n, c.k, rng);
  if (!p) return std::nullopt;
  Sample s;
  s.kappa = *p;
  s.index = {rng.integer(1, c.k - 1)};
  return s;
}

double product_slack(const Sample& s, const Cell&) {
  const int sl = s.index[0];
  double prod = 1.0;
  for (int j = 0; j < sl; ++j) prod *= s.kappa(j);
  return ineq_slack(sigma(sl, s.kappa), prod);
}

Draw leading_draw(const Cell& c, CounterRng& rng) {
  auto s = gamma_draw(c, rng, 0);
  if (s) s->index = {rng.integer(0, c.k - 1)};
  return s;
}

double theta_lead_slack(const Sample& s, const Cell& c) {
  const int n = c.n, k = c.k, j = s.index[0];
  const double theta = 1.0 / (std::pow(n, n - k) * binom(n, k));
  return ineq_slack(sigma_excl(k - 1, s.kappa, {j}), theta * sigma(k, s.kappa) / s.kappa(j));
}

Draw top2_draw(const Cell& c, CounterRng& rng, int indices) {
  auto p = open_point(c.n, c.n - 2, rng);
  if (!p) return std::nullopt;
  Sample s;
  s.kappa = *p;
  s.index = distinct(c.n, indices, rng);
  return s;
}

double pair_sum_bound_slack(const Sample& s, const Cell& c) {
  const int m = c.n, j = s.index[0];
  SymTable<double> t(s.kappa);
  Side r;
  for (int q = 0; q < m; ++q) {
    if (q == j) continue;
    const double v = t.excl(m - 4, {j, q});
    r.add(v * v);
  }
  return ineq_slack(Side{4 * t(m - 4) * t(m - 4)}, r);
}

constexpr double kLowerDelta = 0.1;

Draw lower_draw(const Cell& c, CounterRng& rng) {
  auto s = top2_draw(c, rng, 0);
  if (!s) return std::nullopt;
  const VectorXd& x = s->kappa;
  const int m = c.n;
  if (!(-x(m - 1) >= kLowerDelta * x(0) || x(m - 2) >= kLowerDelta * x(0))) return std::nullopt;
  return s;
}

double lower_slack(const Sample& s, const Cell& c) {
  const int m = c.n;
  const double d = kLowerDelta;
  const double dp = std::min(std::pow(d, m - 2) / std::pow(2.0, m - 1), std::pow(d, m - 1));
  return ineq_slack(sigma_excl(m - 3, s.kappa, {0}), dp * std::pow(s.kappa(0), m - 3));
}

// --- forms that are nonnegative outright ----------------------------------

Draw barred_full_draw(const Cell& c, CounterRng& rng) {
  Sample s;
  s.kappa = barred_full_point(c.n, rng);
  return s;
}

// diag a * sigma_s(kappa|j), off-diagonal b * sigma_s(kappa|pq).
MatrixXd excl_form(const VectorXd& kappa, int sl, double a, double b) {
  const int n = static_cast<int>(kappa.size());
  SymTable<double> t(kappa);
  MatrixXd m(n, n);
  for (int p = 0; p < n; ++p) {
    m(p, p) = a * t.excl(sl, {p});
    for (int q = p + 1; q < n; ++q) m(p, q) = m(q, p) = b * t.excl(sl, {p, q});
  }
  return m;
}

double gram_sum_slack(const Sample& s, const Cell& c) {
  return rel_eig(excl_form(s.kappa, c.k, 1.0, 1.0));
}

double three_down_slack(const Sample& s, const Cell& c) {
  return rel_eig(excl_form(s.kappa, c.n - 3, 2.0, -1.0));
}

double level_gram_slack(const Sample& s, const Cell& c) {
  const int n = c.n, sl = c.k;
  SymTable<double> t(s.kappa);
  MatrixXd m(n, n);
  for (int p = 0; p < n; ++p) {
    const double d = t.excl(sl - 1, {p});
    m(p, p) = d * d;
    for (int q = p + 1; q < n; ++q) {
      const VectorXd r = t.excl_all({p, q});
      m(p, q) = m(q, p) = at(r, sl - 1) * at(r, sl - 1) - at(r, sl) * at(r, sl - 2);
    }
  }
  return rel_eig(m);
}

Draw single_index_draw(const Cell& c, CounterRng& rng) { return gamma_draw(c, rng, 1); }

double d_gram_slack(const Sample& s, const Cell& c) {
  return rel_eig(abcd_matrices(s.kappa, c.k, s.index[0]).D);
}

double a_form_slack(const Sample& s, const Cell& c) {
  return rel_eig(abcd_matrices(s.kappa, c.k, s.index[0]).A);
}

double b_form_slack(const Sample& s, const Cell& c) {
  return rel_eig(abcd_matrices(s.kappa, c.k, s.index[0]).B);
}

double h_bound_slack(const Sample& s, const Cell&) {
  const HForm<double> h = h_matrix(s.kappa, s.index[0]);
  return rel_eig(h.H - MatrixXd(h.lower.asDiagonal()));
}

// --- exponential-weight checks --------------------------------------------

Draw pair_large_draw(const Cell& c, CounterRng& rng) {
  auto p = scaled_point(c, rng);
  if (!p) return std::nullopt;
  Sample s;
  s.kappa = *p;
  s.index = distinct(c.n, 2, rng);
  return s;
}

// Both sides divided by e^{max(kappa_i, kappa_l)}.
double exp_weight_slack(const Sample& s, const Cell& c) {
  const int k = c.k, i = s.index[0], l = s.index[1];
  const double eps = 1.0 / (3.0 * k);
  const double ki = s.kappa(i), kl = s.kappa(l);
  const double top = std::max(ki, kl);
  const double wl = std::exp(kl - top);
  const double dd = scaled_divided_difference(kl, ki, top);
  SymTable<double> t(s.kappa);
  return ineq_slack(Side{(2 - eps) * wl * t.excl(k - 2, {i, l}), (2 - eps) * dd * t.excl(k - 1, {l})},
                    Side{wl * t.excl(k - 1, {i}) / s.kappa(0)});
}

Draw near_pair_draw(const Cell& c, CounterRng& rng) {
  auto s = key_draw(c, rng);
  if (!s) return std::nullopt;
  int j = rng.integer(0, c.n - 2);
  if (j >= s->index[0]) ++j;
  s->index.push_back(j);
  return s;
}

double coefficient_slack(const Sample& s, const Cell& c) {
  const int k = c.k, i = s.index[0], j = s.index[1];
  const double ki = s.kappa(i), kj = s.kappa(j);
  SymTable<double> t(s.kappa);
  const double sii = t.d1(k, i), sjj = t.d1(k, j), sij = t.d2(k, i, j);
  const double d = ki - kj;
  const double first =
      ineq_slack(Side{2 * ki * exprel(-d) * sjj}, Side{sjj, (ki + kj) * sij});
  if (d == 0) return first;
  double second;
  if (d > 0) {
    second = ineq_slack((ki + kj) * sii, 2 * ki * sjj * std::exp(-d));
  } else {
    second = ineq_slack(2 * ki * std::exp(-d) * sjj, (ki + kj) * sii);
  }
  return std::min(first, second);
}

double log_p(const VectorXd& kappa) {
  const double top = kappa.maxCoeff();
  return top + std::log((kappa.array() - top).exp().sum());
}

double weighted_key_slack(const Sample& s, const Cell& c) {
  const int n = c.n, k = c.k, i = s.index[0];
  SymTable<double> t(s.kappa);
  VectorXd v(n);
  MatrixXd sm = MatrixXd::Zero(n, n);
  for (int p = 0; p < n; ++p) {
    v(p) = t.d1(k, p);
    for (int q = p + 1; q < n; ++q) sm(p, q) = sm(q, p) = t.d2(k, p, q);
  }
  MatrixXd m = c.K * (v * v.transpose()) - sm;
  for (int l = 0; l < n; ++l) {
    if (l != i) m(l, l) += 2 * exprel(s.kappa(l) - s.kappa(i)) * v(l);
  }
  m(i, i) -= v(i) / log_p(s.kappa);
  return rel_eig(m);
}

double weighted_diag_slack(const Sample& s, const Cell& c) {
  const int n = c.n, k = c.k, i = s.index[0];
  SymTable<double> t(s.kappa);
  const double sii = t.d1(k, i);
  const double lp = log_p(s.kappa);
  double worst = std::numeric_limits<double>::infinity();
  for (int l = 0; l < n; ++l) {
    if (l == i) continue;
    const double sil = t.d2(k, i, l);
    worst = std::min(worst, ineq_slack(2 * sil, sii / lp));
    worst = std::min(worst, ineq_slack(2 * s.kappa(0) * sil, sii));
  }
  return worst;
}

double testfn_slack(const Sample& s, const Cell& c) {
  return rel_eig(testfn_matrix(s.kappa, c.k, s.index[0], c.K));
}

// --- sigma_{n-2} machinery ------------------------------------------------

double top_ratio_slack(const Sample& s, const Cell& c) {
  const int n = c.n, i = s.index[0];
  const VectorXd r = SymTable<double>(s.kappa).excl_all({i});
  const double ratio = at(r, n - 3) / at(r, n - 5);
  const double k1 = s.kappa(0);
  return std::min(ratio / (1.0 + std::abs(ratio)),
                  ineq_slack(Side{1.1 * k1 * k1, sigma(n - 2, s.kappa) / s.kappa(i)}, Side{ratio}));
}

// kappa-bar coefficients for the sigma_{n-2} forms: r and the form R.
struct BarForm {
  double r = 0.0;
  MatrixXd R;
};

BarForm bar_form(const VectorXd& kappa, int i) {
  const int n = static_cast<int>(kappa.size());
  const VectorXd kb = remove_entries(kappa, {i});
  SymTable<double> t(kb);
  BarForm f;
  f.r = 2 * t(n - 3) / (3 * t(n - 5));
  f.R.resize(n - 1, n - 1);
  for (int a = 0; a < n - 1; ++a) {
    const VectorXd e = t.excl_all({a});
    f.R(a, a) = 2 * at(e, n - 3) * at(e, n - 5) - 2 * at(e, n - 2) * at(e, n - 6);
    for (int b = a + 1; b < n - 1; ++b) {
      const VectorXd d = t.excl_all({a, b});
      f.R(a, b) = f.R(b, a) = at(d, n - 3) * at(d, n - 5);
    }
  }
  return f;
}

double a_bound_slack(const Sample& s, const Cell& c) {
  const int i = s.index[0];
  const double ki = s.kappa(i);
  const BarForm f = bar_form(s.kappa, i);
  return rel_eig(8.0 / 9.0 * ki * ki * abcd_matrices(s.kappa, c.n - 2, i).A - f.r * f.R);
}

double case_scalar_slack(const Sample& s, const Cell& c) {
  const int n = c.n, i = s.index[0];
  const VectorXd kb = remove_entries(s.kappa, {i});
  SymTable<double> t(kb);
  double worst = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n - 1; ++j) {
    const VectorXd e = t.excl_all({j});
    worst = std::min(worst, ineq_slack(Side{-t(n - 2) * at(e, n - 6), -at(e, n - 2) * at(e, n - 6),
                                            t(n - 3) * t(n - 5) / 40.0},
                                       Side{}));
  }
  return worst;
}

double s601_slack(const Sample& s, const Cell& c) {
  const int n = c.n, i = s.index[0];
  const double ki = s.kappa(i);
  const ABCD<double> f = abcd_matrices(s.kappa, n - 2, i);
  const double g = sigma_excl(n - 3, s.kappa, {i});
  return rel_eig(8.0 * ki * ki / 9.0 * f.A + f.C - g * g / 20.0 * MatrixXd::Identity(n - 1, n - 1));
}

double s602_slack(const Sample& s, const Cell& c) {
  const int n = c.n, i = s.index[0];
  const double ki = s.kappa(i);
  const KeyParams<double> prm = make_key_params(s.kappa, n - 2, i, c.K);
  const ABCD<double> f = abcd_matrices(s.kappa, n - 2, i);
  const double g = sigma_excl(n - 3, s.kappa, {i});
  return rel_eig(ki * ki / 9.0 * f.A + sigma(n - 2, s.kappa) * f.B - prm.c * f.D +
                 g * g / 20.0 * MatrixXd::Identity(n - 1, n - 1));
}

double key_slack(const Sample& s, const Cell& c) {
  return rel_eig(key_matrix(s.kappa, make_key_params(s.kappa, c.k, s.index[0], c.K)));
}

auto gap_slack(bool with_sq, Lemma41Form form) {
  return [with_sq, form](const Sample& s, const Cell& c) {
    const KeyParams<double> prm = make_key_params(s.kappa, c.k, s.index[0], c.K);
    return rel_eig(lemma41_gap(s.kappa, prm, with_sq, form));
  };
}

// --- catalog ----------------------------------------------------------------

LemmaCheck make(std::string id, CheckKind kind, CheckKind base, std::string statement,
                std::function<std::vector<int>(int)> levels,
                std::function<Draw(const Cell&, CounterRng&)> draw,
                std::function<double(const Sample&, const Cell&)> slack, bool uses_K = false) {
  LemmaCheck c;
  c.id = std::move(id);
  c.kind = kind;
  c.base = base;
  c.statement = std::move(statement);
  c.levels = std::move(levels);
  c.draw = std::move(draw);
  c.slack = std::move(slack);
  c.uses_K = uses_K;
  return c;
}

std::vector<LemmaCheck> build() {
  using K = CheckKind;
  const auto I = K::kIdentity, Q = K::kInequality, P = K::kPsd, S = K::kAsymptotic;
  auto real1 = [](const Cell& c, CounterRng& r) { return real_draw(c, r, 1); };
  auto real0 = [](const Cell& c, CounterRng& r) { return real_draw(c, r, 0); };
  auto gamma2 = [](const Cell& c, CounterRng& r) { return gamma_draw(c, r, 2); };
  auto gamma3 = [](const Cell& c, CounterRng& r) { return gamma_draw(c, r, 3); };
  auto top2_1 = [](const Cell& c, CounterRng& r) { return top2_draw(c, r, 1); };
  auto top2_0 = [](const Cell& c, CounterRng& r) { return top2_draw(c, r, 0); };
  auto ab = [](const Cell& c, CounterRng& r) { return case_draw(c, r, true); };
  auto b3c = [](const Cell& c, CounterRng& r) { return case_draw(c, r, false); };
  auto three = [](int n) { return n >= 3 ? range(2, n) : std::vector<int>{}; };

  std::vector<LemmaCheck> v;
  v.push_back(make("sym_recursion", I, I, "sigma_k = kappa_i sigma_{k-1}(kappa|i) + sigma_k(kappa|i)",
                   levels_from(1), real1, recursion_slack));
  v.push_back(make("sym_sum_excl", I, I, "sum_i sigma_k(kappa|i) = (n-k) sigma_k", levels_from(1),
                   real0, sum_excl_slack));
  v.push_back(make("sym_sum_weighted", I, I, "sum_i kappa_i sigma_{k-1}(kappa|i) = k sigma_k",
                   levels_from(1), real0, sum_weighted_slack));

  v.push_back(make("L4_2_id1", I, I,
                   "kappa_i K s^ii s^jj(2 kappa_i s^ii,jj - s^jj) - kappa_i^2 (s^ii,jj)^2 + "
                   "a_j(kappa_i K s^ii - 1) s^ii = (1/c)(s^ii + s^jj)(kappa_i + kappa_j) "
                   "sigma_{k-2}(kappa|ij) - sigma_{k-1}(kappa|ij)^2",
                   three, id1_draw, id1_slack));
  v.push_back(make("L4_2_id2", I, I,
                   "kappa_i(s^pp s^ii,qq + s^qq s^ii,pp - s^ii s^pp,qq) - s^pp s^qq - "
                   "kappa_i^2 s^ii,pp s^ii,qq + kappa_i s^ii s^pp,qq = "
                   "-sigma_{k-1}(kappa|ip) sigma_{k-1}(kappa|iq)",
                   three, gamma3, id2_slack));
  v.push_back(make("L4_2_id3", I, I,
                   "(s^ii + s^jj)(kappa_i + kappa_j) = 2 sigma_k - 2 sigma_k(kappa|ij) + "
                   "(kappa_i^2 + kappa_j^2) sigma_{k-2}(kappa|ij)",
                   three, gamma2, id3_slack));
  v.push_back(make("L4_2_id4", I, I,
                   "s^qq s^ii,pp - s^ii s^pp,qq = (kappa_i - kappa_q)(t_{k-2}^2 - t_{k-1} t_{k-3}), "
                   "t = sigma(kappa|ipq)",
                   three, gamma3, id4_slack));
  v.push_back(make("L4_2_id5", I, I,
                   "s^pp sigma_{k-1}(kappa|iq) = sigma_k t_{k-2} + t_{k-1}^2 - t_k t_{k-2} - "
                   "kappa_q kappa_i (t_{k-2}^2 - t_{k-3} t_{k-1}), t = sigma(kappa|ipq)",
                   three, gamma3, id5_slack));
  v.push_back(make("L5_1_identity", I, I,
                   "sigma_k^2 = sigma_k(kappa^2) + 2 sum_{i=1..k} (-1)^{i+1} sigma_{k+i} sigma_{k-i}",
                   levels_from(1), real0, square_sum_slack));
  v.push_back(make("L5_4_identity", I, I,
                   "sum_i sigma_{m-s}(kappa|i) sigma_{m-1}(kappa|i) = sigma_{m-s} sigma_{m-1} - "
                   "(s+1) sigma_m sigma_{m-s-1}",
                   levels_from(1), real0, paired_sum_slack));
  v.push_back(make("L5_5_identity", I, I,
                   "sum_{s!=j} sigma_{m-4}(kappa|js)^2 = 3 e_{m-4}^2 - 2 e_{m-5} e_{m-3} - "
                   "4 e_{m-6} e_{m-2} - 6 e_{m-7} e_{m-1}, e = sigma(kappa|j)",
                   level_free(3), real1, pair_square_slack));

  v.push_back(make("newton", Q, Q,
                   "sigma_{k-1}^2 / C(n,k-1)^2 >= sigma_k sigma_{k-2} / (C(n,k) C(n,k-2)) on R^n",
                   levels_from(2), real0, newton_slack));
  v.push_back(make("maclaurin", Q, Q,
                   "(sigma_k / C(n,k))^{1/k} <= (sigma_l / C(n,l))^{1/l}, 1 <= l <= k, on Gamma_k",
                   levels_from(1), maclaurin_draw, maclaurin_slack));
  v.push_back(make("gen_newton", Q, Q,
                   "sigma_s sigma_k / (C(n,s) C(n,k)) >= sigma_{s-r} sigma_{k+r} / "
                   "(C(n,s-r) C(n,k+r)), 1 <= r <= s <= k, on Gamma_k",
                   levels_from(1), gen_newton_draw, gen_newton_slack));
  v.push_back(make("gen_newton_cone", Q, Q,
                   "gen_newton with kappa in Gamma_{k+r}", [](int n) { return range(1, n - 1); },
                   gen_newton_cone_draw, gen_newton_slack));
  v.push_back(make("L2_1_guan", Q, Q,
                   "-S_k + (1 - a + a/d) v v^T / sigma_k - sigma_k (a + 1 - d a) u u^T / sigma_l^2 + "
                   "(sigma_k / sigma_l) S_l >= 0, a = 1/(k-l), v = grad sigma_k, u = grad sigma_l",
                   levels_from(2), guan_draw, guan_slack));
  v.push_back(make("L2_2_theta", Q, Q,
                   "|sigma_{k-1}(kappa|ij)| <= sqrt(k(n-k)/(n-1)) sigma_{k-1}(kappa|j), "
                   "kappa_i >= kappa_j, on Gamma_k",
                   levels_from(1), ordered_pair_draw, theta_pair_slack));
  v.push_back(make("L2_3_ratio", Q, Q,
                   "kappa_1^s sigma_{k-s} / sigma_k >= C(n,k-s) / C(n,k), 0 <= s <= k, on Gamma_k",
                   levels_from(1), ratio_draw, ratio_slack));
  v.push_back(make("L2_4a", Q, Q, "kappa_i <= 0 implies -kappa_i < (n-k) kappa_1 / k on Gamma_k",
                   [](int n) { return range(1, n - 1); },
                   [](const Cell& c, CounterRng& r) { return nonpositive_draw(c, r, 1); },
                   negative_bound_slack));
  v.push_back(make("L2_4b", Q, Q,
                   "kappa_i <= kappa_j <= 0 implies -(kappa_i + kappa_j) < "
                   "2 sigma_k(kappa|ij) / sigma_{k-1}(kappa|ij) on Gamma_k",
                   [](int n) { return range(1, n - 2); },
                   [](const Cell& c, CounterRng& r) { return nonpositive_draw(c, r, 2); },
                   negative_pair_slack));
  v.push_back(make("L2_5_product", Q, Q,
                   "sigma_s >= kappa_1 ... kappa_s, s < k, on the barred Gamma_k", levels_from(2),
                   product_draw, product_slack));
  v.push_back(make("L2_6_theta", Q, Q,
                   "sigma_{k-1}(kappa|j) >= theta sigma_k / kappa_j for j <= k, "
                   "theta = 1 / (n^{n-k} C(n,k)), on Gamma_k",
                   levels_from(1), leading_draw, theta_lead_slack));
  v.push_back(make("L5_8_sum", Q, Q,
                   "4 sigma_{m-4}^2 >= sum_{s!=j} sigma_{m-4}(kappa|js)^2 on Gamma_{m-2}",
                   level_free(4), top2_1, pair_sum_bound_slack));
  v.push_back(make("L5_9_lower", Q, Q,
                   "-kappa_m >= d kappa_1 or kappa_{m-1} >= d kappa_1 implies sigma_{m-3}(kappa|1) "
                   ">= min(d^{m-2} / 2^{m-1}, d^{m-1}) kappa_1^{m-3}, d = 1/10, on Gamma_{m-2}",
                   level_free(5), lower_draw, lower_slack));

  v.push_back(make("L5_2_psd", P, P,
                   "diag sigma_s(kappa|j), off-diagonal sigma_s(kappa|pq) is PSD on the barred "
                   "Gamma_m, 0 <= s <= m",
                   [](int n) { return range(0, n); }, barred_full_draw, gram_sum_slack));
  v.push_back(make("L5_3_psd", P, P,
                   "diag 2 sigma_{m-3}(kappa|j), off-diagonal -sigma_{m-3}(kappa|pq) is PSD on the "
                   "barred Gamma_m",
                   level_free(3), barred_full_draw, three_down_slack));
  v.push_back(make("L5_6_psd", P, P,
                   "diag sigma_{s-1}(kappa|j)^2, off-diagonal sigma_{s-1}(kappa|pq)^2 - "
                   "sigma_s(kappa|pq) sigma_{s-2}(kappa|pq) is PSD on Gamma_s",
                   levels_from(1), [](const Cell& c, CounterRng& r) { return gamma_draw(c, r, 0); },
                   level_gram_slack));
  v.push_back(make("L5_7_psd", P, P,
                   "diag 2 sigma_{m-3}(kappa|j), off-diagonal -sigma_{m-3}(kappa|pq) is PSD on "
                   "Gamma_{m-2}",
                   level_free(3), top2_0, three_down_slack));
  v.push_back(make("D_gram", P, P, "D_{k;i} = w w^T with w_j = sigma_{k-1}(kappa|ij) is PSD",
                   levels_from(1), single_index_draw, d_gram_slack));
  v.push_back(make("A_psd", P, P, "A_{k;i} is PSD when (kappa|i) is in Gamma_{k-1}",
                   levels_from(2), single_index_draw, a_form_slack));
  v.push_back(make("B_psd", P, P, "B_{n-2;i} is PSD when (kappa|i) is in Gamma_{n-3}",
                   level_top2(4), single_index_draw, b_form_slack));
  v.push_back(make("L6_4_H", P, P,
                   "H_i - r diag(e_{n-5} e_{n-3} - 4 e_{n-6} e_{n-2} - (4/3) sigma_{n-5} sigma_{n-3}) "
                   "is PSD, r = 2 sigma_{n-3} / (3 sigma_{n-5}), all on (kappa|i) in Gamma_{n-3}",
                   level_top2(5), single_index_draw, h_bound_slack));

  v.push_back(make("L3_2", S, Q,
                   "(2 - 1/(3k)) [e^{kappa_l} sigma_{k-2}(kappa|il) + "
                   "(e^{kappa_l} - e^{kappa_i})/(kappa_l - kappa_i) sigma_{k-1}(kappa|l)] >= "
                   "e^{kappa_l} sigma_{k-1}(kappa|i) / kappa_1, 2k > n",
                   [](int n) {
                     std::vector<int> out;
                     for (int k = 2; k <= n; ++k) {
                       if (2 * k > n) out.push_back(k);
                     }
                     return out;
                   },
                   pair_large_draw, exp_weight_slack));
  v.push_back(make("L3_4", S, Q,
                   "2 kappa_i (1 - e^{kappa_j - kappa_i})/(kappa_i - kappa_j) s^jj >= a_j, and the "
                   "exponential comparison of s^ii and s^jj, for kappa_i near the top",
                   conjecture_levels, near_pair_draw, coefficient_slack));
  v.push_back(make("L3_5_a", S, P,
                   "K v v^T - S + diag_{l!=i}(2 (e^{kappa_l - kappa_i} - 1)/(kappa_l - kappa_i) s^ll) "
                   "- E_ii s^ii / log P is PSD, kappa_i near the top",
                   conjecture_levels, key_draw, weighted_key_slack, true));
  v.push_back(make("L3_5_b", S, Q,
                   "2 sigma_{k-2}(kappa|il) >= sigma_{k-1}(kappa|i) / log P and 2 kappa_1 "
                   "sigma_{k-2}(kappa|il) >= sigma_{k-1}(kappa|i), kappa_i near the top",
                   conjecture_levels, key_draw, weighted_diag_slack));
  v.push_back(make("S3_02_testfn", S, P,
                   "h -> A_i + B_i + C_i + D_i - E_i is PSD (weights scaled by e^{-kappa_1})",
                   conjecture_levels,
                   [](const Cell& c, CounterRng& r) -> Draw {
                     auto p = scaled_point(c, r);
                     if (!p) return std::nullopt;
                     Sample s;
                     s.kappa = *p;
                     s.index = {r.integer(0, c.n - 1)};
                     return s;
                   },
                   testfn_slack, true));
  v.push_back(make("L6_1_ratio", S, Q,
                   "0 < sigma_{n-3}(kappa|i) / sigma_{n-5}(kappa|i) <= 1.1 kappa_1^2 + "
                   "sigma_{n-2} / kappa_i, kappa_i near the top",
                   level_top2(5), key_draw, top_ratio_slack));
  v.push_back(make("L6_2_bound", S, P,
                   "(8/9) kappa_i^2 A_{n-2;i} - r R is PSD, r = 2 sigma_{n-3}(kappa|i) / "
                   "(3 sigma_{n-5}(kappa|i))",
                   level_top2(5), key_draw, a_bound_slack));
  v.push_back(make("L6_3_bound", S, Q,
                   "-sigma_{n-2}(b) sigma_{n-6}(b|j) - sigma_{n-2}(b|j) sigma_{n-6}(b|j) + "
                   "sigma_{n-3}(b) sigma_{n-5}(b) / 40 >= 0, b = (kappa|i), cases A, B1, B2",
                   level_top2(5), ab, case_scalar_slack));
  v.push_back(make("T6_1_s601", S, P,
                   "(8/9) kappa_i^2 A + C - sigma_{n-3}(kappa|i)^2 / 20 I is PSD, cases A, B1, B2",
                   level_top2(5), ab, s601_slack));
  v.push_back(make("T6_1_s602", S, P,
                   "kappa_i^2 / 9 A + sigma_{n-2} B - c D + sigma_{n-3}(kappa|i)^2 / 20 I is PSD, "
                   "cases A, B1, B2",
                   level_top2(5), ab, s602_slack, true));
  v.push_back(make("C3_1_key", S, P,
                   "kappa_i [K v v^T - S] - s^ii E_ii + diag_{j!=i} a_j is PSD, kappa_i near the "
                   "top, N0 <= sigma_k <= N, 2k > n",
                   conjecture_levels, key_draw, key_slack, true));
  v.back().gated = [](int n, int k) { return k >= n - 2; };
  v.push_back(make("S7_case_key", S, P,
                   "key form PSD in cases B3 and C, zero-based i <= n - 4", level_top2(5), b3c,
                   key_slack, true));
  const auto l41_levels = [](int n) { return range(2, n - 1); };
  v.push_back(make("L4_1", S, P,
                   "(kappa_i K (s^ii)^2 - s^ii) M - (1/c)[kappa_i^2 A + sigma_k B + C - c D] is PSD, "
                   "M the key form",
                   l41_levels, key_draw, gap_slack(true, Lemma41Form::kProof), true));
  v.push_back(make("L4_1_alpha1", S, P,
                   "as L4_1 with A in place of kappa_i^2 A", l41_levels, key_draw,
                   gap_slack(false, Lemma41Form::kProof), true));
  v.back().gated = [](int, int) { return false; };
  v.push_back(make("L4_1_unscaled", S, P,
                   "M - (1/c)[kappa_i^2 A + sigma_k B + C - c D] is PSD", l41_levels, key_draw,
                   gap_slack(true, Lemma41Form::kStatement), true));
  v.back().gated = [](int, int) { return false; };
  v.push_back(make("L4_1_unscaled_alpha1", S, P,
                   "M - (1/c)[A + sigma_k B + C - c D] is PSD", l41_levels, key_draw,
                   gap_slack(false, Lemma41Form::kStatement), true));
  v.back().gated = [](int, int) { return false; };
  return v;
}

std::uint64_t point_key(const LemmaCheck& check, const Cell& cell, std::uint64_t seed,
                        std::uint64_t tag) {
  std::uint64_t h = combine(seed, stable_hash(check.id));
  h = combine(h, static_cast<std::uint64_t>(cell.n));
  h = combine(h, static_cast<std::uint64_t>(cell.k));
  return combine(h, tag);
}

struct Slot {
  double slack = 0.0;
  std::uint64_t counter = 0;
  bool drawn = false;
};

}  // namespace

std::string to_string(CheckKind kind) {
  switch (kind) {
    case CheckKind::kIdentity: return "IDENTITY";
    case CheckKind::kInequality: return "INEQUALITY";
    case CheckKind::kPsd: return "PSD";
    case CheckKind::kAsymptotic: return "ASYMPTOTIC";
  }
  return "?";
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kPass: return "PASS";
    case Verdict::kFail: return "FAIL";
    case Verdict::kThreshold: return "THRESHOLD";
  }
  return "?";
}

int default_samples(CheckKind kind) {
  return (kind == CheckKind::kIdentity || kind == CheckKind::kInequality) ? 10000 : 1000;
}

const std::vector<LemmaCheck>& registry_list() {
  static const std::vector<LemmaCheck> checks = build();
  return checks;
}

const LemmaCheck* find_check(const std::string& id) {
  for (const auto& c : registry_list()) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

bool slack_passes(CheckKind base, double slack, const RunOptions& opt) {
  const double bar = base == CheckKind::kPsd ? opt.psd_eps : opt.tol;
  return slack >= -bar;
}

double evaluate_at(const LemmaCheck& check, const Cell& cell, const Sample& sample) {
  const double s = check.slack(sample, cell);
  return std::isnan(s) ? -std::numeric_limits<double>::infinity() : s;
}

std::optional<Sample> replay_sample(const LemmaCheck& check, const Cell& cell,
                                    std::uint64_t stream, std::uint64_t counter) {
  CounterRng rng(stream, counter);
  return check.draw(cell, rng);
}

GridPoint run_point(const LemmaCheck& check, const Cell& cell, int samples, std::uint64_t seed,
                    std::uint64_t tag, const RunOptions& opt, std::optional<CheckWitness>* worst) {
  const std::uint64_t key = point_key(check, cell, seed, tag);
  std::vector<Slot> slots(samples);
  auto work = [&](int lo, int hi) {
    for (int s = lo; s < hi; ++s) {
      CounterRng rng(combine(key, static_cast<std::uint64_t>(s)));
      for (int a = 0; a < opt.max_attempts; ++a) {
        const std::uint64_t start = rng.counter();
        if (auto smp = check.draw(cell, rng)) {
          slots[s] = {evaluate_at(check, cell, *smp), start, true};
          break;
        }
      }
      if (!slots[s].drawn) return;  // later samples of this chunk are discarded anyway
    }
  };
  const int jobs = std::max(1, std::min(opt.jobs, samples));
  if (jobs == 1) {
    work(0, samples);
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) {
      pool.emplace_back(work, samples * j / jobs, samples * (j + 1) / jobs);
    }
    for (auto& th : pool) th.join();
  }
  GridPoint gp;
  gp.kappa1 = cell.kappa1;
  gp.K = cell.K;
  gp.min_slack = std::numeric_limits<double>::infinity();
  int best = -1;
  for (int s = 0; s < samples; ++s) {
    if (!slots[s].drawn) {
      gp.exhausted = true;
      break;
    }
    ++gp.samples;
    if (best < 0 || slots[s].slack < gp.min_slack) {
      gp.min_slack = slots[s].slack;
      best = s;
    }
  }
  gp.pass = gp.samples == 0 || slack_passes(check.base, gp.min_slack, opt);
  if (worst && best >= 0) {
    CheckWitness w;
    w.cell = cell;
    w.stream = combine(key, static_cast<std::uint64_t>(best));
    w.counter = slots[best].counter;
    w.sample = *replay_sample(check, cell, w.stream, w.counter);
    w.slack = slots[best].slack;
    w.sample_index = best;
    *worst = w;
  }
  return gp;
}

CheckResult run_check(const std::string& id, int n, int k, const RunOptions& opt) {
  const LemmaCheck* check = find_check(id);
  if (!check) throw invalid_input("unknown check id: " + id);
  const auto lv = check->levels(n);
  if (std::find(lv.begin(), lv.end(), k) == lv.end()) {
    throw invalid_input(id + " does not admit n = " + std::to_string(n) +
                        ", k = " + std::to_string(k));
  }
  CheckResult res;
  res.id = id;
  res.kind = check->kind;
  res.n = n;
  res.k = k;
  res.seed = opt.seed;
  res.gated = check->gated(n, k);
  res.threshold = check->base == CheckKind::kPsd ? opt.psd_eps : opt.tol;
  const int samples = opt.samples.value_or(default_samples(check->kind));
  res.min_slack = std::numeric_limits<double>::infinity();

  if (check->kind != CheckKind::kAsymptotic) {
    std::optional<CheckWitness> w;
    const GridPoint gp = run_point(*check, Cell{n, k, 1.0, 0.0}, samples, opt.seed, 0, opt, &w);
    res.samples = gp.samples;
    res.min_slack = gp.min_slack;
    res.witness = w;
    res.verdict = gp.pass && gp.samples > 0 ? Verdict::kPass : Verdict::kFail;
    res.sweep.push_back(gp);
    return res;
  }

  const std::vector<double> Ks = check->uses_K ? opt.K_grid : std::vector<double>{0.0};
  // Row of the largest K decides the threshold; the other rows are reported.
  std::vector<bool> top_row;
  for (std::size_t g = 0; g < opt.kappa1_grid.size(); ++g) {
    bool row_pass = true;
    for (std::size_t h = 0; h < Ks.size(); ++h) {
      const Cell cell{n, k, opt.kappa1_grid[g], Ks[h]};
      std::optional<CheckWitness> w;
      const GridPoint gp = run_point(*check, cell, samples, opt.seed, g * 64 + h, opt, &w);
      res.samples += gp.samples;
      if (gp.samples > 0 && gp.min_slack < res.min_slack) {
        res.min_slack = gp.min_slack;
        res.witness = w;
      }
      if (h + 1 == Ks.size()) row_pass = gp.pass && gp.samples > 0;
      res.sweep.push_back(gp);
    }
    top_row.push_back(row_pass);
  }
  if (top_row.empty() || !top_row.back()) {
    res.verdict = Verdict::kFail;
    return res;
  }
  std::size_t first = top_row.size() - 1;
  while (first > 0 && top_row[first - 1]) --first;
  res.kappa1_star = opt.kappa1_grid[first];
  res.verdict = Verdict::kThreshold;
  return res;
}

}  // namespace sigmak
