#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "sigmak/rng.h"

namespace sigmak {

class sampling_exhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SampleSpec {
  int n = 0;
  int k = 1;
  double kappa1_target = 1.0;
  /// Zero-based position i with kappa_i > kappa_1 - sqrt(kappa_1)/n.
  std::optional<int> near_top_index;
  std::optional<std::pair<double, double>> sigma_k_range;
  std::uint64_t rng_seed = 0;
  int max_attempts = 100000;
};

/// A point of Gamma_k, sorted descending, meeting every constraint in spec.
/// Draws come from `rng`; the result is a pure function of its state.
Eigen::VectorXd sample_gamma(const SampleSpec& spec, CounterRng& rng);
Eigen::VectorXd sample_gamma(const SampleSpec& spec);

/// One attempt of the box sampler at unit scale; nullopt on rejection.
std::optional<Eigen::VectorXd> try_box(int n, int k, CounterRng& rng);

/// One attempt at a barred-cone point with sigma_k = 0 solved for one entry.
std::optional<Eigen::VectorXd> try_boundary(int n, int k, CounterRng& rng);

/// One attempt at a Gamma_k point with kappa_1 = kappa1, sigma_k in [lo, hi]
/// and `top` leading entries within sqrt(kappa1)/n of kappa1.
std::optional<Eigen::VectorXd> try_constructive(int n, int k, double kappa1, int top, double lo,
                                                double hi, CounterRng& rng);

/// Entries with random sign and magnitudes spread over a few decades.
Eigen::VectorXd sample_real(int n, CounterRng& rng);

/// Number of leading entries of a descending kappa with kappa_j > kappa_1 - sqrt(kappa_1)/n.
int near_top_count(const Eigen::VectorXd& kappa);

}  // namespace sigmak
