#include "sigmak/cli.h"

#include <cstring>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "sigmak/report.h"
#include "sigmak/sampling.h"

namespace sigmak {
namespace {

constexpr int kUsage = 2;

struct Common {
  std::string n = "5";
  std::string k = "auto";
  std::optional<int> samples;
  std::uint64_t seed = 42;
  std::optional<double> kappa1;
  std::optional<double> K;
  int jobs = 1;
  std::string out;
  double psd_eps = 1e-8;
  double tol = 1e-10;
};

RunOptions options_of(const Common& c) {
  RunOptions opt;
  opt.samples = c.samples;
  opt.seed = c.seed;
  opt.psd_eps = c.psd_eps;
  opt.tol = c.tol;
  opt.jobs = c.jobs;
  if (c.kappa1) opt.kappa1_grid = {*c.kappa1};
  if (c.K) opt.K_grid = {*c.K};
  return opt;
}

std::vector<std::string> split_ids(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Levels of `check` selected by a --k value at dimension n.
std::vector<int> select_levels(const LemmaCheck& check, int n, const std::string& kflag) {
  const std::vector<int> lv = check.levels(n);
  if (lv.empty()) return {};
  if (lv == std::vector<int>{0}) return lv;
  if (kflag == "all") return lv;
  const int want = kflag == "auto" ? n - 2 : std::stoi(kflag);
  if (std::find(lv.begin(), lv.end(), want) != lv.end()) return {want};
  return {};
}

bool valid_k_flag(const std::string& s) {
  if (s == "auto" || s == "all") return true;
  return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
}

// Writes to --out when given, else to `fallback`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw invalid_input("cannot open " + path);
    }
    os_ = path.empty() ? &fallback : &file_;
  }
  std::ostream& operator*() { return *os_; }
  bool to_file() const { return file_.is_open(); }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

std::string brief(const CheckResult& r) {
  std::ostringstream s;
  s << std::left << std::setw(22) << r.id << " n=" << r.n << " k=" << r.k << " "
    << std::setw(9) << to_string(r.verdict) << " min_slack=" << std::setprecision(4) << r.min_slack
    << " samples=" << r.samples;
  if (r.kappa1_star) s << " kappa1*=" << *r.kappa1_star;
  if (!r.gated) s << " (not gated)";
  return s.str();
}

int cmd_verify(const Common& c, const std::string& only, const std::vector<std::string>& args,
               std::ostream& out, std::ostream& err) {
  const auto [n_lo, n_hi] = parse_n_range(c.n);
  if (!valid_k_flag(c.k)) throw invalid_input("--k takes auto, all or an integer");
  std::vector<const LemmaCheck*> checks;
  if (only.empty()) {
    for (const auto& ch : registry_list()) checks.push_back(&ch);
  } else {
    for (const auto& id : split_ids(only)) {
      const LemmaCheck* ch = find_check(id);
      if (!ch) throw invalid_input("unknown check id: " + id);
      checks.push_back(ch);
    }
  }
  RunManifest man;
  man.command = "verify";
  man.args = args;
  man.options = options_of(c);
  man.started = utc_now();
  Sink sink(c.out, out);
  std::ostream& log = sink.to_file() ? out : err;
  bool failed = false;
  for (int n = n_lo; n <= n_hi; ++n) {
    for (const LemmaCheck* ch : checks) {
      for (int k : select_levels(*ch, n, c.k)) {
        const CheckResult r = run_check(ch->id, n, k, man.options);
        *sink << to_json(r).dump() << '\n';
        log << brief(r) << '\n';
        failed |= r.gated && r.verdict == Verdict::kFail;
        man.results.push_back(r);
      }
    }
  }
  if (man.results.empty()) throw invalid_input("no selected check admits the requested n and k");
  man.finished = utc_now();
  if (sink.to_file()) {
    std::ofstream mf(c.out + ".manifest.json");
    mf << to_json(man).dump(1) << '\n';
  }
  return failed ? 1 : 0;
}

int cmd_search(const Common& c, SearchConfig cfg, std::ostream& out, std::ostream& err) {
  const auto [n_lo, n_hi] = parse_n_range(c.n);
  if (!valid_k_flag(c.k) || c.k == "all") throw invalid_input("--k takes auto or an integer");
  Sink sink(c.out, out);
  std::ostream& log = sink.to_file() ? out : err;
  cfg.seed = c.seed;
  cfg.psd_eps = c.psd_eps;
  cfg.jobs = c.jobs;
  if (c.kappa1) cfg.kappa1 = *c.kappa1;
  if (c.K) cfg.K = *c.K;
  for (int n = n_lo; n <= n_hi; ++n) {
    cfg.n = n;
    cfg.k = c.k == "auto" ? n - 2 : std::stoi(c.k);
    const SearchResult res = minimize_lambda(cfg);
    for (std::size_t r = 0; r < res.ranked.size(); ++r) {
      json j = to_json(res.ranked[r]);
      j["rank"] = r;
      j["n"] = cfg.n;
      j["k"] = cfg.k;
      j["kappa1"] = cfg.kappa1;
      j["feasible_restarts"] = res.feasible_restarts;
      *sink << j.dump() << '\n';
    }
    log << "search n=" << cfg.n << " k=" << cfg.k << " i=" << cfg.i << " kappa1=" << cfg.kappa1
        << " K=" << cfg.K << " best slack=" << std::setprecision(4) << res.best.slack
        << " robust_negative=" << (res.best.robust_negative ? "yes" : "no") << '\n';
  }
  return 0;
}

int cmd_threshold(const Common& c, const std::string& id, double lo, double hi, std::ostream& out,
                  std::ostream& err) {
  const LemmaCheck* ch = find_check(id);
  if (!ch) throw invalid_input("unknown check id: " + id);
  const auto [n_lo, n_hi] = parse_n_range(c.n);
  if (!valid_k_flag(c.k)) throw invalid_input("--k takes auto, all or an integer");
  Sink sink(c.out, out);
  std::ostream& log = sink.to_file() ? out : err;
  const RunOptions opt = options_of(c);
  bool any = false;
  for (int n = n_lo; n <= n_hi; ++n) {
    for (int k : select_levels(*ch, n, c.k)) {
      const ThresholdProfile p = threshold_bisect(id, n, k, lo, hi, opt);
      *sink << to_json(p).dump() << '\n';
      log << id << " n=" << n << " k=" << k << " kappa1*=" << p.kappa1_star
          << (p.flag.empty() ? "" : " (" + p.flag + ")") << '\n';
      any = true;
    }
  }
  if (!any) throw invalid_input(id + " does not admit the requested n and k");
  return 0;
}

bool same_bits(const json& a, const json& b) {
  if (a.is_null() || b.is_null()) return a.is_null() && b.is_null();
  const double x = a.get<double>(), y = b.get<double>();
  return std::memcmp(&x, &y, sizeof x) == 0;
}

int cmd_replay(const std::string& path, int jobs, std::ostream& out) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open " + path);
  json man;
  try {
    man = json::parse(in);
  } catch (const json::exception& e) {
    throw invalid_input(std::string("manifest is not valid JSON: ") + e.what());
  }
  RunOptions opt = options_from_json(man.at("options"));
  opt.jobs = jobs;
  int mismatches = 0;
  for (const auto& rec : recorded_results(man)) {
    const CheckResult r = run_check(rec.id, rec.n, rec.k, opt);
    const json now = number(r.min_slack);
    const bool ok = same_bits(now, rec.min_slack);
    mismatches += ok ? 0 : 1;
    out << (ok ? "same " : "DIFF ") << rec.id << " n=" << rec.n << " k=" << rec.k
        << " recorded=" << rec.min_slack.dump() << " replayed=" << now.dump() << '\n';
  }
  out << (mismatches == 0 ? "replay identical" : "replay differs") << '\n';
  return mismatches == 0 ? 0 : 1;
}

int cmd_list(int n, std::ostream& out) {
  for (const auto& ch : registry_list()) {
    std::ostringstream lv;
    for (int k : ch.levels(n)) lv << (lv.tellp() > 0 ? "," : "") << k;
    out << std::left << std::setw(22) << ch.id << std::setw(11) << to_string(ch.kind)
        << " k@n=" << n << ": " << std::setw(12) << (lv.str().empty() ? "-" : lv.str()) << ' '
        << ch.statement << '\n';
  }
  return 0;
}

void add_common(CLI::App* sub, Common& c, bool with_samples) {
  sub->add_option("--n", c.n, "dimension or range a..b");
  sub->add_option("--k", c.k, "auto (n-2), all, or a level");
  if (with_samples) sub->add_option("--samples", c.samples, "samples per batch");
  sub->add_option("--seed", c.seed, "master seed");
  sub->add_option("--kappa1", c.kappa1, "single kappa_1 scale instead of the grid");
  sub->add_option("--K", c.K, "single K instead of the grid");
  sub->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--out", c.out, "output file (JSON lines); stdout when absent");
  sub->add_option("--psd-eps", c.psd_eps, "PSD tolerance relative to ||M||_F");
  sub->add_option("--tol", c.tol, "identity and inequality tolerance");
}

}  // namespace

std::pair<int, int> parse_n_range(const std::string& s) {
  auto to_int = [&](const std::string& t) {
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos) {
      throw invalid_input("--n takes an integer or a range a..b, got '" + s + "'");
    }
    return std::stoi(t);
  };
  const auto dots = s.find("..");
  const int lo = to_int(s.substr(0, dots));
  const int hi = dots == std::string::npos ? lo : to_int(s.substr(dots + 2));
  if (lo < 2 || hi < lo) throw invalid_input("--n range must satisfy 2 <= a <= b");
  return {lo, hi};
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical checks for elementary symmetric function inequalities", "sigmak"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  Common verify_c, search_c, thresh_c;
  std::string only, id, manifest;
  double lo = 10, hi = 1e6;
  int list_n = 6, replay_jobs = 1;
  SearchConfig cfg;

  auto* verify = app.add_subcommand("verify", "run registry checks, one JSON line per result");
  add_common(verify, verify_c, true);
  verify->add_option("--only", only, "comma-separated check ids");

  auto* search = app.add_subcommand("search", "Nelder-Mead search for a negative key form");
  add_common(search, search_c, false);
  search->add_option("--i", cfg.i, "zero-based near-top index");
  search->add_option("--restarts", cfg.restarts);
  search->add_option("--max-iters", cfg.max_iters);
  search->add_option("--step-init", cfg.step_init);
  search->add_option("--sigma-lo", cfg.sigma_k_range.first, "lower bound N0 on sigma_k");
  search->add_option("--sigma-hi", cfg.sigma_k_range.second, "upper bound N on sigma_k");
  search->add_option("--keep", cfg.keep, "length of the ranked witness list");

  auto* thresh = app.add_subcommand("threshold", "bisect the kappa_1 scale where a check starts to pass");
  add_common(thresh, thresh_c, true);
  thresh->add_option("--id", id, "check id")->required();
  thresh->add_option("--lo", lo);
  thresh->add_option("--hi", hi);

  auto* replay = app.add_subcommand("replay", "rerun a verify manifest and compare min_slack bitwise");
  replay->add_option("manifest", manifest, "path to <out>.manifest.json")->required();
  replay->add_option("--jobs", replay_jobs)->check(CLI::PositiveNumber);

  auto* list = app.add_subcommand("list", "list registered checks");
  list->add_option("--n", list_n, "dimension used to show admissible levels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : kUsage;
  }

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    if (*verify) return cmd_verify(verify_c, only, args, out, err);
    if (*search) return cmd_search(search_c, cfg, out, err);
    if (*thresh) return cmd_threshold(thresh_c, id, lo, hi, out, err);
    if (*replay) return cmd_replay(manifest, replay_jobs, out);
    if (*list) return cmd_list(list_n, out);
  } catch (const invalid_input& e) {
    err << "sigmak: " << e.what() << '\n';
    return kUsage;
  } catch (const sampling_exhausted& e) {
    err << "sigmak: infeasible configuration: " << e.what() << '\n';
    return kUsage;
  } catch (const domain_error& e) {
    err << "sigmak: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    // out-of-range stoi and similar
    err << "sigmak: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace sigmak
