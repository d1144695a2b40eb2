#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sigmak/rng.h"

namespace sigmak {

enum class CheckKind { kIdentity, kInequality, kPsd, kAsymptotic };
enum class Verdict { kPass, kFail, kThreshold };

std::string to_string(CheckKind kind);
std::string to_string(Verdict verdict);

/// Where a check is evaluated. kappa1 and K are only read by sweeping checks.
struct Cell {
  int n = 0;
  int k = 0;
  double kappa1 = 1.0;
  double K = 0.0;
};

/// One hypothesis-satisfying draw: the point plus whatever else the
/// statement quantifies over (indices, scalar parameters).
struct Sample {
  Eigen::VectorXd kappa;
  std::vector<int> index;
  std::vector<double> aux;
};

struct LemmaCheck {
  std::string id;
  CheckKind kind = CheckKind::kInequality;
  /// How slack is judged: kPsd against psd_eps, anything else against tol.
  CheckKind base = CheckKind::kInequality;
  std::string statement;
  /// Levels k at which the check runs in dimension n; {0} when unparametrized.
  std::function<std::vector<int>(int n)> levels;
  std::function<std::optional<Sample>(const Cell&, CounterRng&)> draw;
  std::function<double(const Sample&, const Cell&)> slack;
  bool uses_K = false;
  /// False where a failure is a research finding rather than a defect.
  std::function<bool(int n, int k)> gated = [](int, int) { return true; };
};

struct RunOptions {
  std::optional<int> samples;  // default depends on kind
  std::uint64_t seed = 42;
  double tol = 1e-10;
  double psd_eps = 1e-8;
  std::vector<double> kappa1_grid = {1e1, 1e2, 1e3, 1e4, 1e5, 1e6};
  std::vector<double> K_grid = {1e1, 1e2, 1e3, 1e4};
  int max_attempts = 2000;
  int jobs = 1;
};

int default_samples(CheckKind kind);

struct CheckWitness {
  Cell cell;
  Sample sample;
  double slack = 0.0;
  std::uint64_t stream = 0;
  std::uint64_t counter = 0;
  int sample_index = 0;
};

struct GridPoint {
  double kappa1 = 0.0;
  double K = 0.0;
  int samples = 0;
  double min_slack = 0.0;
  bool pass = true;
  bool exhausted = false;
};

struct CheckResult {
  std::string id;
  CheckKind kind = CheckKind::kInequality;
  int n = 0;
  int k = 0;
  int samples = 0;
  double min_slack = 0.0;
  Verdict verdict = Verdict::kPass;
  double threshold = 0.0;  // slack must stay >= -threshold
  bool gated = true;
  std::optional<double> kappa1_star;
  std::optional<CheckWitness> witness;
  std::vector<GridPoint> sweep;
  std::uint64_t seed = 0;
};

const std::vector<LemmaCheck>& registry_list();
/// nullptr when the id is unknown.
const LemmaCheck* find_check(const std::string& id);

/// Runs `id` at (n, k). Throws invalid_input for an unknown id or a level the
/// check does not admit.
CheckResult run_check(const std::string& id, int n, int k, const RunOptions& opt);

/// One batch at fixed (kappa1, K); `tag` separates the random streams of
/// batches that share a cell.
GridPoint run_point(const LemmaCheck& check, const Cell& cell, int samples, std::uint64_t seed,
                    std::uint64_t tag, const RunOptions& opt,
                    std::optional<CheckWitness>* worst = nullptr);

/// Regenerates a witness from its stream and counter.
std::optional<Sample> replay_sample(const LemmaCheck& check, const Cell& cell,
                                    std::uint64_t stream, std::uint64_t counter);
double evaluate_at(const LemmaCheck& check, const Cell& cell, const Sample& sample);

/// True when `slack` passes for a check judged as `base`.
bool slack_passes(CheckKind base, double slack, const RunOptions& opt);

}  // namespace sigmak
