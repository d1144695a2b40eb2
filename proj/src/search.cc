#include "sigmak/search.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "sigmak/cones.h"
#include "sigmak/jacobi.h"
#include "sigmak/sampling.h"

namespace sigmak {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate(const SearchConfig& cfg) {
  if (cfg.n < 2) throw invalid_input("search needs n >= 2");
  if (cfg.k < 2 || cfg.k > cfg.n) throw invalid_input("search needs 2 <= k <= n");
  if (cfg.i < 0 || cfg.i >= cfg.n) throw invalid_input("distinguished index out of range");
  if (!(cfg.K > 0) || !(cfg.kappa1 > 0)) throw invalid_input("K and kappa1 must be positive");
  const auto [lo, hi] = cfg.sigma_k_range;
  if (!(lo > 0) || !(hi >= lo)) throw invalid_input("sigma_k_range must satisfy 0 < N0 <= N");
  if (cfg.restarts < 1) throw invalid_input("restarts must be at least 1");
  if (cfg.max_iters < 1 || !(cfg.step_init > 0)) throw invalid_input("bad optimizer settings");
}

Eigen::VectorXd assemble(const SearchConfig& cfg, const Eigen::VectorXd& x) {
  Eigen::VectorXd kappa(cfg.n);
  kappa(0) = cfg.kappa1;
  kappa.tail(cfg.n - 1) = x;
  return kappa;
}

double objective(const SearchConfig& cfg, const Eigen::VectorXd& kappa) {
  if (!search_feasible(cfg, kappa)) return kInf;
  const MatrixX<double> m = key_matrix(kappa, make_key_params(kappa, cfg.k, cfg.i, cfg.K));
  const double s = psd_slack(m);
  return std::isnan(s) ? kInf : s;
}

struct RestartBest {
  Eigen::VectorXd kappa;
  double f = kInf;
  int iteration = 0;
  long evaluations = 0;
};

// Nelder-Mead with the standard coefficients (1, 2, 1/2, 1/2).
RestartBest nelder_mead(const SearchConfig& cfg, const Eigen::VectorXd& start) {
  const int d = cfg.n - 1;
  RestartBest best;
  auto eval = [&](const Eigen::VectorXd& x, int iter) {
    const Eigen::VectorXd kappa = assemble(cfg, x);
    const double f = objective(cfg, kappa);
    ++best.evaluations;
    if (f < best.f) {
      best.f = f;
      best.kappa = kappa;
      best.iteration = iter;
    }
    return f;
  };

  const double near = std::sqrt(cfg.kappa1) / cfg.n;
  std::vector<Eigen::VectorXd> pts(d + 1, start.tail(d));
  std::vector<double> fs(d + 1);
  fs[0] = eval(pts[0], 0);
  for (int j = 0; j < d; ++j) {
    const double x = start(j + 1);
    double step = cfg.step_init * (cfg.kappa1 - x < near ? near : std::max(std::abs(x), 1e-3));
    for (int h = 0; h < 40; ++h, step *= 0.5) {
      pts[j + 1] = pts[0];
      pts[j + 1](j) += (h % 2 == 0 ? -step : step);
      fs[j + 1] = eval(pts[j + 1], 0);
      if (fs[j + 1] < kInf) break;
    }
  }

  std::vector<int> order(d + 1);
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    for (int a = 0; a <= d; ++a) order[a] = a;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });
    const int lo = order[0], worst = order[d], second = order[d - 1];
    if (fs[lo] == kInf) break;
    if (fs[worst] < kInf && std::abs(fs[worst] - fs[lo]) <= 1e-12 * (std::abs(fs[worst]) + std::abs(fs[lo]))) {
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
    for (int a = 0; a <= d; ++a) {
      if (a != worst) centroid += pts[a];
    }
    centroid /= d;
    const Eigen::VectorXd xr = centroid + (centroid - pts[worst]);
    const double fr = eval(xr, iter);
    if (fr < fs[lo]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = eval(xe, iter);
      if (fe < fr) {
        pts[worst] = xe;
        fs[worst] = fe;
      } else {
        pts[worst] = xr;
        fs[worst] = fr;
      }
      continue;
    }
    if (fr < fs[second]) {
      pts[worst] = xr;
      fs[worst] = fr;
      continue;
    }
    const bool outside = fr < fs[worst];
    const Eigen::VectorXd xc =
        outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
    const double fc = eval(xc, iter);
    if (fc < (outside ? fr : fs[worst])) {
      pts[worst] = xc;
      fs[worst] = fc;
      continue;
    }
    for (int a = 0; a <= d; ++a) {
      if (a == lo) continue;
      pts[a] = pts[lo] + 0.5 * (pts[a] - pts[lo]);
      fs[a] = eval(pts[a], iter);
    }
  }
  return best;
}

Witness make_witness(const SearchConfig& cfg, const Eigen::VectorXd& kappa) {
  Witness w;
  w.kappa = kappa;
  w.params = make_key_params(kappa, cfg.k, cfg.i, cfg.K);
  const MatrixX<double> m = key_matrix(kappa, w.params);
  const SymEigen<double> e = jacobi_eigen(m);
  w.lambda_min = e.values(0);
  w.eigvec = e.vectors.col(0);
  const double f = m.norm();
  w.slack = f == 0 ? 0.0 : w.lambda_min / f;

  const VectorX<long double> kl = kappa.cast<long double>();
  const KeyParams<long double> pl = make_key_params(kl, cfg.k, cfg.i, static_cast<long double>(cfg.K));
  w.slack_long = static_cast<double>(psd_slack(key_matrix(kl, pl)));
  w.robust_negative = w.slack < -cfg.psd_eps && w.slack_long < -cfg.psd_eps;
  w.seed = cfg.seed;
  return w;
}

}  // namespace

bool search_feasible(const SearchConfig& cfg, const Eigen::VectorXd& kappa) {
  if (kappa.size() != cfg.n || !kappa.allFinite()) return false;
  if (kappa(0) != cfg.kappa1 || kappa.maxCoeff() > kappa(0)) return false;
  if (!(kappa(cfg.i) > cfg.kappa1 - std::sqrt(cfg.kappa1) / cfg.n)) return false;
  if (!in_gamma(cfg.k, kappa)) return false;
  const double sk = sigma(cfg.k, kappa);
  if (sk < cfg.sigma_k_range.first || sk > cfg.sigma_k_range.second) return false;
  return cfg.K * kappa(cfg.i) * sigma_excl(cfg.k - 1, kappa, {cfg.i}) > 1.0;
}

void revalidate(const SearchConfig& cfg, const Witness& w) {
  if (!search_feasible(cfg, w.kappa)) throw std::logic_error("witness violates the constraints");
  const MatrixX<double> m = key_matrix(w.kappa, make_key_params(w.kappa, cfg.k, cfg.i, cfg.K));
  const double f = m.norm();
  if (std::abs(min_eig(m) - w.lambda_min) > 1e-10 * f) {
    throw std::logic_error("witness lambda_min does not reproduce");
  }
  const double q = w.eigvec.dot(m * w.eigvec);
  if (std::abs(q - w.lambda_min * w.eigvec.squaredNorm()) > 1e-10 * f) {
    throw std::logic_error("witness eigenvector does not attain lambda_min");
  }
}

SearchResult minimize_lambda(const SearchConfig& cfg) {
  validate(cfg);
  const std::uint64_t base = combine(cfg.seed, stable_hash("minimize_lambda"));
  std::vector<RestartBest> runs(cfg.restarts);
  std::vector<std::string> errors(cfg.restarts);
  auto work = [&](int lo, int hi) {
    for (int r = lo; r < hi; ++r) {
      SampleSpec spec;
      spec.n = cfg.n;
      spec.k = cfg.k;
      spec.kappa1_target = cfg.kappa1;
      spec.near_top_index = cfg.i;
      spec.sigma_k_range = cfg.sigma_k_range;
      CounterRng rng(combine(base, static_cast<std::uint64_t>(r)));
      try {
        const Eigen::VectorXd start = sample_gamma(spec, rng);
        runs[r] = nelder_mead(cfg, start);
      } catch (const sampling_exhausted& e) {
        errors[r] = e.what();
      }
    }
  };
  const int jobs = std::max(1, std::min(cfg.jobs, cfg.restarts));
  if (jobs == 1) {
    work(0, cfg.restarts);
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) {
      pool.emplace_back(work, cfg.restarts * j / jobs, cfg.restarts * (j + 1) / jobs);
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw sampling_exhausted(e);
  }

  SearchResult res;
  res.config = cfg;
  std::vector<Witness> all;
  for (int r = 0; r < cfg.restarts; ++r) {
    res.evaluations += runs[r].evaluations;
    if (runs[r].f == kInf) continue;
    ++res.feasible_restarts;
    Witness w = make_witness(cfg, runs[r].kappa);
    w.restart = r;
    w.iteration = runs[r].iteration;
    revalidate(cfg, w);
    all.push_back(std::move(w));
  }
  if (all.empty()) throw sampling_exhausted("no restart reached a feasible point");
  std::stable_sort(all.begin(), all.end(),
                   [](const Witness& a, const Witness& b) { return a.slack < b.slack; });
  if (static_cast<int>(all.size()) > cfg.keep) all.resize(cfg.keep);
  res.best = all.front();
  res.ranked = std::move(all);
  return res;
}

ThresholdProfile threshold_bisect(const std::string& id, int n, int k, double lo, double hi,
                                  const RunOptions& opt) {
  const LemmaCheck* check = find_check(id);
  if (!check) throw invalid_input("unknown check id: " + id);
  const auto lv = check->levels(n);
  if (std::find(lv.begin(), lv.end(), k) == lv.end()) {
    throw invalid_input(id + " does not admit n = " + std::to_string(n) +
                        ", k = " + std::to_string(k));
  }
  if (!(lo > 0) || !(hi > lo)) throw invalid_input("threshold needs 0 < lo < hi");
  const double K = check->uses_K ? opt.K_grid.back() : 0.0;
  const int samples = opt.samples.value_or(default_samples(check->kind));

  ThresholdProfile prof;
  prof.id = id;
  prof.n = n;
  prof.k = k;
  prof.lo = lo;
  prof.hi = hi;
  int step = 0;
  auto probe = [&](double kappa1, std::optional<CheckWitness>* w) {
    const GridPoint gp =
        run_point(*check, Cell{n, k, kappa1, K}, samples, opt.seed, 100 + step++, opt, w);
    prof.points.push_back(gp);
    return gp.pass && gp.samples > 0;
  };

  std::optional<CheckWitness> worst;
  if (probe(lo, nullptr)) {
    prof.kappa1_star = lo;
    prof.flag = "no transition observed";
    return prof;
  }
  if (!probe(hi, &worst)) {
    prof.kappa1_star = hi;
    prof.flag = "no passing scale found";
    prof.witness = worst;
    return prof;
  }
  double a = lo, b = hi;
  for (int s = 0; s < 20; ++s) {
    const double mid = std::sqrt(a * b);
    if (probe(mid, nullptr)) {
      b = mid;
    } else {
      a = mid;
    }
  }
  prof.kappa1_star = b;
  return prof;
}

}  // namespace sigmak
