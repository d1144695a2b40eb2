#include "sigmak/sampling.h"

#include <algorithm>
#include <cmath>
#include <functional>

#include "sigmak/cones.h"

namespace sigmak {
namespace {

Eigen::VectorXd sorted_desc(Eigen::VectorXd v) {
  std::sort(v.data(), v.data() + v.size(), std::greater<double>());
  return v;
}

// A Gamma_k point of dimension n at unit scale, or nullopt.
std::optional<Eigen::VectorXd> try_open(int n, int k, CounterRng& rng) {
  if (rng.uniform() < 0.5) return try_box(n, k, rng);
  // Shell: solve one entry so that sigma_k lands just above zero.
  Eigen::VectorXd rest;
  if (k == 1) {
    rest = Eigen::VectorXd::Zero(n - 1);
    for (int j = 0; j < n - 1; ++j) rest(j) = rng.uniform(-1.0, 1.0);
  } else {
    auto p = try_box(n - 1, k - 1, rng);
    if (!p) return std::nullopt;
    rest = *p;
  }
  if (rest.size() == 0) return try_box(n, k, rng);
  const double a = sigma(k, rest);
  const double b = sigma(k - 1, rest);
  if (!(b > 0)) return std::nullopt;
  const double eta = rng.log_uniform(1e-6, 1.0);
  const double t = (eta * b * rest.cwiseAbs().maxCoeff() - a) / b;
  Eigen::VectorXd kappa(n);
  kappa << rest, t;
  kappa = sorted_desc(kappa);
  if (!in_gamma(k, kappa)) return std::nullopt;
  return kappa / kappa(0);
}

}  // namespace

std::optional<Eigen::VectorXd> try_box(int n, int k, CounterRng& rng) {
  Eigen::VectorXd kappa(n);
  const double tail_lo = -(n - k) / static_cast<double>(k) * 0.95;
  for (int j = 0; j < n; ++j) {
    kappa(j) = j < k ? rng.log_uniform(1.0 / n, 1.0) : rng.uniform(tail_lo, 1.0);
  }
  kappa = sorted_desc(kappa);
  if (!(kappa(0) > 0) || !in_gamma(k, kappa)) return std::nullopt;
  return kappa / kappa(0);
}

std::optional<Eigen::VectorXd> try_boundary(int n, int k, CounterRng& rng) {
  if (n < 2) return std::nullopt;
  Eigen::VectorXd rest;
  if (k == 1) {
    rest.resize(n - 1);
    for (int j = 0; j < n - 1; ++j) rest(j) = rng.uniform(-1.0, 1.0);
  } else {
    auto p = try_box(n - 1, k - 1, rng);
    if (!p) return std::nullopt;
    rest = *p;
  }
  const double b = sigma(k - 1, rest);
  if (!(b > 0)) return std::nullopt;
  Eigen::VectorXd kappa(n);
  kappa << rest, -sigma(k, rest) / b;
  kappa = sorted_desc(kappa);
  if (!in_gamma(k, kappa, Cone::kBarred)) return std::nullopt;
  return kappa;
}

std::optional<Eigen::VectorXd> try_constructive(int n, int k, double kappa1, int top, double lo,
                                                double hi, CounterRng& rng) {
  if (top < 1 || top > n - 1) return std::nullopt;
  const double target = rng.log_uniform(lo, hi);
  const double spread = std::sqrt(kappa1) / n;
  Eigen::VectorXd rest(n - 1);
  rest(0) = kappa1;
  for (int j = 1; j < top; ++j) rest(j) = rng.uniform(kappa1 - spread, kappa1);
  double scale;
  if (k > top) {
    const double r = rng.uniform(-3.0, 3.0);
    scale = std::pow(target * std::pow(10.0, r) / std::pow(kappa1, top), 1.0 / (k - top));
  } else {
    scale = kappa1 * std::pow(10.0, rng.uniform(-6.0, 0.0));
  }
  const double neg = 0.25 * rng.integer(0, 2);
  for (int j = top; j < n - 1; ++j) {
    const double mag = scale * std::exp(rng.uniform(-3.0, 3.0));
    rest(j) = rng.uniform() < neg ? -mag : mag;
  }
  if (k >= 2 && !in_gamma(k - 1, rest)) return std::nullopt;
  const double a = sigma(k, rest);
  const double b = sigma(k - 1, rest);
  if (!(b > 0) || std::abs(a) > 1e6 * target) return std::nullopt;
  const double t = (target - a) / b;
  if (!(t <= kappa1)) return std::nullopt;
  Eigen::VectorXd kappa(n);
  kappa << rest, t;
  kappa = sorted_desc(kappa);
  if (!in_gamma(k, kappa)) return std::nullopt;
  return kappa;
}

Eigen::VectorXd sample_real(int n, CounterRng& rng) {
  Eigen::VectorXd kappa(n);
  for (int j = 0; j < n; ++j) kappa(j) = rng.normal() * std::exp(rng.uniform(-1.0, 1.0));
  return kappa;
}

int near_top_count(const Eigen::VectorXd& kappa) {
  if (kappa.size() == 0 || !(kappa(0) > 0)) return 0;
  const double bar = kappa(0) - std::sqrt(kappa(0)) / kappa.size();
  int c = 0;
  for (int j = 0; j < kappa.size(); ++j) {
    if (kappa(j) > bar) ++c;
  }
  return c;
}

Eigen::VectorXd sample_gamma(const SampleSpec& spec, CounterRng& rng) {
  const int n = spec.n;
  const int k = spec.k;
  if (n < 1 || k < 1 || k > n) throw invalid_input("sample_gamma needs 1 <= k <= n");
  if (!(spec.kappa1_target > 0)) throw invalid_input("kappa1_target must be positive");
  if (spec.sigma_k_range &&
      !(spec.sigma_k_range->first > 0 && spec.sigma_k_range->first <= spec.sigma_k_range->second)) {
    throw invalid_input("sigma_k_range must satisfy 0 < N0 <= N");
  }
  if (spec.near_top_index && (*spec.near_top_index < 0 || *spec.near_top_index >= n)) {
    throw invalid_input("near_top_index out of range");
  }
  const bool constructive = spec.near_top_index || spec.sigma_k_range;
  const double lo = spec.sigma_k_range ? spec.sigma_k_range->first : 1.0;
  // Without a range, targets span up to the all-equal value at kappa_1.
  const double hi = spec.sigma_k_range
                        ? spec.sigma_k_range->second
                        : std::max(10.0, binom(n, k) * std::pow(spec.kappa1_target, k));
  const int need = spec.near_top_index ? *spec.near_top_index + 1 : 1;
  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    std::optional<Eigen::VectorXd> kappa;
    if (!constructive) {
      kappa = try_open(n, k, rng);
      if (kappa) *kappa *= spec.kappa1_target;
    } else {
      if (n < 2) break;
      const int top = rng.integer(need, std::max(need, std::min(k - 1, n - 1)));
      kappa = try_constructive(n, k, spec.kappa1_target, top, lo, hi, rng);
    }
    if (!kappa) continue;
    if (spec.near_top_index && near_top_count(*kappa) <= *spec.near_top_index) continue;
    if (spec.sigma_k_range) {
      const double s = sigma(k, *kappa);
      if (s < lo * (1 - 1e-9) || s > hi * (1 + 1e-9)) continue;
    }
    return *kappa;
  }
  std::string what = "no point of Gamma_" + std::to_string(k) + " in dimension " +
                     std::to_string(n) + " after " + std::to_string(spec.max_attempts) +
                     " attempts";
  if (spec.near_top_index) {
    what += "; constraint believed infeasible: kappa_" + std::to_string(*spec.near_top_index + 1) +
            " > kappa_1 - sqrt(kappa_1)/n";
  } else if (spec.sigma_k_range) {
    what += "; constraint believed infeasible: sigma_k range";
  }
  throw sampling_exhausted(what);
}

Eigen::VectorXd sample_gamma(const SampleSpec& spec) {
  CounterRng rng(spec.rng_seed);
  return sample_gamma(spec, rng);
}

}  // namespace sigmak
