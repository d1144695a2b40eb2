#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "sigmak/registry.h"
#include "sigmak/search.h"

namespace sigmak {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

using json = nlohmann::json;

/// Finite doubles as numbers, everything else as null.
json number(double x);

json to_json(const Sample& s);
json to_json(const CheckWitness& w);
json to_json(const GridPoint& g);
json to_json(const CheckResult& r);
json to_json(const Witness& w);
json to_json(const ThresholdProfile& p);
json to_json(const RunOptions& opt);

RunOptions options_from_json(const json& j);

/// Settings needed to rerun every result recorded in a verify manifest.
struct RunManifest {
  std::string command;
  std::vector<std::string> args;
  RunOptions options;
  std::string started;
  std::string finished;
  std::vector<CheckResult> results;
};

json to_json(const RunManifest& m);

/// Recorded (id, n, k, min_slack) of each result line, enough for a replay.
struct RecordedResult {
  std::string id;
  int n = 0;
  int k = 0;
  json min_slack;
};

std::vector<RecordedResult> recorded_results(const json& manifest);

/// UTC time in ISO 8601.
std::string utc_now();

}  // namespace sigmak
