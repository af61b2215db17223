/* Copyright 2026 The lmh-brtf Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// JSON run reports. Doubles are written in shortest round-trip form; the
// non-finite values +inf, -inf and nan are written as those strings.

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "lmhbrtf/error.hpp"
#include "lmhbrtf/metrics.hpp"
#include "lmhbrtf/model.hpp"
#include "lmhbrtf/synth.hpp"
#include "lmhbrtf/version.hpp"

namespace lmhbrtf {

using json = nlohmann::json;

inline constexpr int kReportSchemaVersion = 1;

inline json number_to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  return v;
}

inline double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "+inf" || s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw IoError("expected a number in report, got " + j.dump());
}

inline void to_json(json& j, const MultiRank& m) { j = m.ranks; }
inline void from_json(const json& j, MultiRank& m) { m.ranks = j.get<std::vector<std::size_t>>(); }

inline void to_json(json& j, const HyperParams& hp) {
  j = json{{"a0_lambda", hp.a0_lambda},
           {"b0_lambda", hp.b0_lambda},
           {"a0_beta", hp.a0_beta},
           {"b0_beta", hp.b0_beta},
           {"a0_tau", hp.a0_tau},
           {"b0_tau", hp.b0_tau},
           {"sigma0_sq", hp.sigma0_sq},
           {"gamma", hp.gamma ? json(*hp.gamma) : json("auto")},
           {"tol", hp.tol},
           {"max_iter", hp.max_iter},
           {"init_rank", hp.init_rank},
           {"init_multirank", hp.init_multirank},
           {"prune_threshold", hp.prune_threshold},
           {"conjugate_symmetry", hp.conjugate_symmetry}};
}

inline void from_json(const json& j, HyperParams& hp) {
  j.at("a0_lambda").get_to(hp.a0_lambda);
  j.at("b0_lambda").get_to(hp.b0_lambda);
  j.at("a0_beta").get_to(hp.a0_beta);
  j.at("b0_beta").get_to(hp.b0_beta);
  j.at("a0_tau").get_to(hp.a0_tau);
  j.at("b0_tau").get_to(hp.b0_tau);
  j.at("sigma0_sq").get_to(hp.sigma0_sq);
  const json& g = j.at("gamma");
  if (g.is_string() && g.get<std::string>() == "auto")
    hp.gamma.reset();
  else
    hp.gamma = g.get<double>();
  j.at("tol").get_to(hp.tol);
  j.at("max_iter").get_to(hp.max_iter);
  j.at("init_rank").get_to(hp.init_rank);
  j.at("init_multirank").get_to(hp.init_multirank);
  j.at("prune_threshold").get_to(hp.prune_threshold);
  j.at("conjugate_symmetry").get_to(hp.conjugate_symmetry);
}

inline void to_json(json& j, const IterationRecord& r) {
  j = json{{"iter", r.iter},
           {"fit", number_to_json(r.fit)},
           {"rel_change", number_to_json(r.rel_change)},
           {"tau", number_to_json(r.tau)},
           {"multirank", r.multirank}};
}

inline void from_json(const json& j, IterationRecord& r) {
  j.at("iter").get_to(r.iter);
  r.fit = number_from_json(j.at("fit"));
  r.rel_change = number_from_json(j.at("rel_change"));
  r.tau = number_from_json(j.at("tau"));
  j.at("multirank").get_to(r.multirank);
}

inline void to_json(json& j, const RunTrace& t) {
  j = json{{"converged", t.converged}, {"note", t.note}, {"records", t.records}};
}

inline void from_json(const json& j, RunTrace& t) {
  j.at("converged").get_to(t.converged);
  j.at("note").get_to(t.note);
  j.at("records").get_to(t.records);
}

inline void to_json(json& j, const SynthConfig& c) {
  j = json{{"shape", c.shape},   {"base_rank", c.base_rank},
           {"pattern", c.pattern}, {"rho", c.rho},
           {"sigma_sq", c.sigma_sq}, {"seed", c.seed},
           {"label", c.label}};
}

inline void from_json(const json& j, SynthConfig& c) {
  j.at("shape").get_to(c.shape);
  j.at("base_rank").get_to(c.base_rank);
  j.at("pattern").get_to(c.pattern);
  j.at("rho").get_to(c.rho);
  j.at("sigma_sq").get_to(c.sigma_sq);
  j.at("seed").get_to(c.seed);
  j.at("label").get_to(c.label);
}

inline void to_json(json& j, const MetricReport& m) {
  j = json{{"psnr", number_to_json(m.psnr)},
           {"ssim", number_to_json(m.ssim)},
           {"ergas", number_to_json(m.ergas)},
           {"sam", number_to_json(m.sam)}};
}

inline void from_json(const json& j, MetricReport& m) {
  m.psnr = number_from_json(j.at("psnr"));
  m.ssim = number_from_json(j.at("ssim"));
  m.ergas = number_from_json(j.at("ergas"));
  m.sam = number_from_json(j.at("sam"));
}

/// Everything a CLI run records. `timing` holds wall-clock seconds per phase
/// and is the only part expected to differ between identical runs.
struct RunReport {
  int schema_version = kReportSchemaVersion;
  std::string tool_version = LMHBRTF_VERSION;
  std::string command;
  std::uint64_t seed = 0;
  std::string transform = "dft";
  std::optional<HyperParams> hp;
  json inputs = json::object();
  std::optional<RunTrace> trace;
  std::optional<MultiRank> multirank;
  json results = json::object();
  std::map<std::string, double> timing;
};

inline void to_json(json& j, const RunReport& r) {
  j = json{{"schema_version", r.schema_version},
           {"tool_version", r.tool_version},
           {"command", r.command},
           {"seed", r.seed},
           {"rng_streams", {{"model_sparse_init", "seed_seq(seed, 0x53)"},
                            {"synth", "seed_seq(seed, stream tag)"}}},
           {"transform", r.transform},
           {"inputs", r.inputs},
           {"results", r.results}};
  j["hyperparams"] = r.hp ? json(*r.hp) : json(nullptr);
  j["trace"] = r.trace ? json(*r.trace) : json(nullptr);
  j["multirank"] = r.multirank ? json(*r.multirank) : json(nullptr);
  json t = json::object();
  for (const auto& [k, v] : r.timing) t[k] = number_to_json(v);
  j["timing"] = t;
}

inline void from_json(const json& j, RunReport& r) {
  j.at("schema_version").get_to(r.schema_version);
  if (r.schema_version != kReportSchemaVersion)
    throw IoError("unsupported report schema version " + std::to_string(r.schema_version));
  j.at("tool_version").get_to(r.tool_version);
  j.at("command").get_to(r.command);
  j.at("seed").get_to(r.seed);
  j.at("transform").get_to(r.transform);
  r.inputs = j.at("inputs");
  r.results = j.at("results");
  r.hp.reset();
  r.trace.reset();
  r.multirank.reset();
  if (!j.at("hyperparams").is_null()) r.hp = j.at("hyperparams").get<HyperParams>();
  if (!j.at("trace").is_null()) r.trace = j.at("trace").get<RunTrace>();
  if (!j.at("multirank").is_null()) r.multirank = j.at("multirank").get<MultiRank>();
  r.timing.clear();
  for (const auto& [k, v] : j.at("timing").items()) r.timing[k] = number_from_json(v);
}

/// The report without its timing block, for run-to-run comparisons.
inline json without_timing(const RunReport& r) {
  json j = r;
  j.erase("timing");
  return j;
}

inline void write_report(const std::string& path, const RunReport& r) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << json(r).dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

inline RunReport read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  try {
    return json::parse(in).get<RunReport>();
  } catch (const json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
}

}  // namespace lmhbrtf
