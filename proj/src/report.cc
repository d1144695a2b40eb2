#include "sigmak/report.h"

#include <chrono>
#include <cmath>
#include <ctime>

namespace sigmak {

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

namespace {

json vec(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index j = 0; j < v.size(); ++j) a.push_back(number(v(j)));
  return a;
}

}  // namespace

json to_json(const Sample& s) {
  json aux = json::array();
  for (double a : s.aux) aux.push_back(number(a));
  return {{"kappa", vec(s.kappa)}, {"index", s.index}, {"aux", aux}};
}

json to_json(const CheckWitness& w) {
  return {{"kappa1", w.cell.kappa1}, {"K", w.cell.K},         {"sample", to_json(w.sample)},
          {"slack", number(w.slack)}, {"stream", w.stream},  {"counter", w.counter},
          {"sample_index", w.sample_index}};
}

json to_json(const GridPoint& g) {
  return {{"kappa1", g.kappa1}, {"K", g.K},       {"samples", g.samples},
          {"min_slack", g.samples > 0 ? number(g.min_slack) : json(nullptr)},
          {"pass", g.pass},     {"exhausted", g.exhausted}};
}

json to_json(const CheckResult& r) {
  json j = {{"schema_version", kSchemaVersion},
            {"id", r.id},
            {"kind", to_string(r.kind)},
            {"n", r.n},
            {"k", r.k},
            {"samples", r.samples},
            {"min_slack", number(r.min_slack)},
            {"threshold", r.threshold},
            {"verdict", to_string(r.verdict)},
            {"gated", r.gated},
            {"seed", r.seed}};
  j["kappa1_star"] = r.kappa1_star ? json(*r.kappa1_star) : json(nullptr);
  if (r.witness) j["witness"] = to_json(*r.witness);
  if (r.kind == CheckKind::kAsymptotic) {
    json sweep = json::array();
    for (const auto& g : r.sweep) sweep.push_back(to_json(g));
    j["sweep"] = sweep;
  }
  return j;
}

json to_json(const Witness& w) {
  return {{"schema_version", kSchemaVersion},
          {"kappa", vec(w.kappa)},
          {"params", {{"k", w.params.k}, {"i", w.params.i}, {"K", w.params.K}, {"c", w.params.c}}},
          {"lambda_min", number(w.lambda_min)},
          {"slack", number(w.slack)},
          {"slack_long_double", number(w.slack_long)},
          {"robust_negative", w.robust_negative},
          {"eigvec", vec(w.eigvec)},
          {"provenance", {{"seed", w.seed}, {"restart", w.restart}, {"iteration", w.iteration}}}};
}

json to_json(const ThresholdProfile& p) {
  json pts = json::array();
  for (const auto& g : p.points) pts.push_back(to_json(g));
  json j = {{"schema_version", kSchemaVersion},
            {"id", p.id},
            {"n", p.n},
            {"k", p.k},
            {"lo", p.lo},
            {"hi", p.hi},
            {"kappa1_star", p.kappa1_star},
            {"flag", p.flag.empty() ? json(nullptr) : json(p.flag)},
            {"profile", pts}};
  if (p.witness) j["witness"] = to_json(*p.witness);
  return j;
}

json to_json(const RunOptions& opt) {
  return {{"samples", opt.samples ? json(*opt.samples) : json(nullptr)},
          {"seed", opt.seed},
          {"tol", opt.tol},
          {"psd_eps", opt.psd_eps},
          {"kappa1_grid", opt.kappa1_grid},
          {"K_grid", opt.K_grid},
          {"max_attempts", opt.max_attempts}};
}

RunOptions options_from_json(const json& j) {
  RunOptions opt;
  if (!j.at("samples").is_null()) opt.samples = j.at("samples").get<int>();
  opt.seed = j.at("seed").get<std::uint64_t>();
  opt.tol = j.at("tol").get<double>();
  opt.psd_eps = j.at("psd_eps").get<double>();
  opt.kappa1_grid = j.at("kappa1_grid").get<std::vector<double>>();
  opt.K_grid = j.at("K_grid").get<std::vector<double>>();
  opt.max_attempts = j.at("max_attempts").get<int>();
  return opt;
}

json to_json(const RunManifest& m) {
  json results = json::array();
  for (const auto& r : m.results) results.push_back(to_json(r));
  return {{"schema_version", kSchemaVersion},
          {"tool_version", kToolVersion},
          {"command", m.command},
          {"args", m.args},
          {"options", to_json(m.options)},
          {"seed", m.options.seed},
          {"started", m.started},
          {"finished", m.finished},
          {"results", results}};
}

std::vector<RecordedResult> recorded_results(const json& manifest) {
  std::vector<RecordedResult> out;
  for (const auto& r : manifest.at("results")) {
    out.push_back({r.at("id").get<std::string>(), r.at("n").get<int>(), r.at("k").get<int>(),
                   r.at("min_slack")});
  }
  return out;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace sigmak
