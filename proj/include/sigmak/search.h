#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sigmak/quadforms.h"
#include "sigmak/registry.h"

namespace sigmak {

struct SearchConfig {
  int n = 0;
  int k = 0;
  int i = 0;  // position in the descending vector, zero-based
  double K = 1e3;
  double kappa1 = 1e4;
  std::pair<double, double> sigma_k_range{1.0, 10.0};
  int restarts = 50;
  int max_iters = 400;
  double step_init = 0.25;
  std::uint64_t seed = 42;
  double psd_eps = 1e-8;
  int keep = 10;  // length of the ranked list
  int jobs = 1;
};

struct Witness {
  Eigen::VectorXd kappa;
  KeyParams<double> params;
  double lambda_min = 0.0;
  double slack = 0.0;  // lambda_min / ||M||_F
  /// Slack recomputed in long double from the same kappa.
  double slack_long = 0.0;
  bool robust_negative = false;
  Eigen::VectorXd eigvec;
  std::uint64_t seed = 0;
  int restart = 0;
  int iteration = 0;
};

struct SearchResult {
  SearchConfig config;
  Witness best;
  /// Restart optima, most negative first, at most config.keep of them.
  std::vector<Witness> ranked;
  int feasible_restarts = 0;
  long evaluations = 0;
};

/// True when kappa meets every constraint of the configuration.
bool search_feasible(const SearchConfig& cfg, const Eigen::VectorXd& kappa);

/// Nelder-Mead on (kappa_2..kappa_n) with kappa_1 = cfg.kappa1, infeasible
/// points scoring +inf. Throws invalid_input on a malformed config and
/// sampling_exhausted when no feasible start can be drawn.
SearchResult minimize_lambda(const SearchConfig& cfg);

/// Rebuilds the witness fields from kappa alone and checks them against w.
/// Throws std::logic_error on a mismatch.
void revalidate(const SearchConfig& cfg, const Witness& w);

struct ThresholdProfile {
  std::string id;
  int n = 0;
  int k = 0;
  double lo = 0.0;
  double hi = 0.0;
  double kappa1_star = 0.0;
  std::string flag;  // empty, "no transition observed" or "no passing scale found"
  std::vector<GridPoint> points;  // evaluation order
  std::optional<CheckWitness> witness;
};

/// Log-scale bisection on kappa_1 between lo and hi (20 steps after the two
/// pilots), evaluated at the largest K of opt.K_grid for checks that read K.
ThresholdProfile threshold_bisect(const std::string& id, int n, int k, double lo, double hi,
                                  const RunOptions& opt);

}  // namespace sigmak
