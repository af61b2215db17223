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

// lmh_brtf: synthetic benchmark, corruption, denoising and metrics driver.
//
// Exit status: 0 success, 1 runtime or numerical failure, 2 usage error.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lmhbrtf.hpp"

namespace {

using lmhbrtf::json;
using clock_type = std::chrono::steady_clock;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::vector<std::size_t> parse_dims(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long long v = -1;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || v <= 0)
      throw lmhbrtf::ArgumentError("bad dimension '" + item + "' in --dims");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

// Options shared by synth and denoise.
struct ModelOptions {
  std::size_t init_rank = 0;
  double sigma0_sq = 1.0;
  std::string gamma = "auto";
  double tol = 1e-6;
  std::size_t max_iter = 500;
  double prune_threshold = lmhbrtf::kDefaultPruneThreshold;
  bool conjugate_symmetry = false;

  void add_to(CLI::App* app) {
    app->add_option("--init-rank", init_rank, "Initial width per slice (0: half of min(I1,I2))");
    app->add_option("--sigma0sq", sigma0_sq, "Initial sparse variance");
    app->add_option("--gamma", gamma, "Refinement factor, a number or 'auto' (= phi)");
    app->add_option("--tol", tol, "Relative-change convergence threshold");
    app->add_option("--max-iter", max_iter, "Iteration cap");
    app->add_option("--prune-threshold", prune_threshold, "Relative column energy cutoff");
    app->add_flag("--conjugate-symmetry", conjugate_symmetry,
                  "Update one slice per DFT mirror pair");
  }

  lmhbrtf::HyperParams to_hp() const {
    lmhbrtf::HyperParams hp;
    hp.init_rank = init_rank;
    hp.sigma0_sq = sigma0_sq;
    if (gamma != "auto") {
      std::size_t used = 0;
      double g = 0.0;
      try {
        g = std::stod(gamma, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != gamma.size()) throw lmhbrtf::ArgumentError("--gamma expects a number or 'auto'");
      hp.gamma = g;
    }
    hp.tol = tol;
    hp.max_iter = max_iter;
    hp.prune_threshold = prune_threshold;
    hp.conjugate_symmetry = conjugate_symmetry;
    hp.validate();
    return hp;
  }
};

struct SynthArgs {
  std::size_t order = 0;
  std::string dims;
  std::size_t rank = 5;
  std::string pattern = "desk";
  double rho = 0.05;
  double sigma2 = 1e-4;
  std::uint64_t seed = 0;
  std::string out;
  std::string save_prefix;
  ModelOptions model;
};

struct CorruptArgs {
  std::string input, out, ref_out;
  lmhbrtf::CorruptConfig cfg;
};

struct DenoiseArgs {
  std::string input, out, sparse_out, report, reference;
  std::string transform = "dft";
  std::vector<std::string> transform_files;
  std::uint64_t seed = 0;
  ModelOptions model;
};

struct MetricsArgs {
  std::string ref, est, out;
  double ergas_scale = 1.0;
};

void write_json(const std::string& path, const json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw lmhbrtf::IoError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
}

int cmd_synth(const SynthArgs& a) {
  const lmhbrtf::Shape shape = parse_dims(a.dims);
  if (a.order != 0 && a.order != shape.size())
    throw lmhbrtf::ArgumentError("--order " + std::to_string(a.order) + " does not match " +
                                 std::to_string(shape.size()) + " entries in --dims");
  if (shape.size() < 3) throw lmhbrtf::ArgumentError("--dims needs at least three modes");
  lmhbrtf::SynthConfig cfg;
  cfg.shape = shape;
  cfg.base_rank = a.rank;
  std::string spec = a.pattern;
  if (spec == "desk" || spec == "desk-swapped")
    spec = lmhbrtf::desk_pattern_spec(shape.size(), spec == "desk-swapped");
  cfg.pattern = lmhbrtf::parse_pattern(spec, a.rank);
  cfg.rho = a.rho;
  cfg.sigma_sq = a.sigma2;
  cfg.seed = a.seed;
  cfg.label = spec;

  lmhbrtf::HyperParams hp = a.model.to_hp();
  const lmhbrtf::TransformSpec L = lmhbrtf::TransformSpec::dft_for(shape);
  lmhbrtf::RunReport rep;
  rep.command = "synth";
  rep.seed = a.seed;
  rep.inputs = {{"synth_config", cfg}};

  auto t0 = clock_type::now();
  const lmhbrtf::SynthInstance inst = lmhbrtf::generate(cfg, L);
  rep.timing["generate"] = seconds_since(t0);
  t0 = clock_type::now();
  lmhbrtf::RunResult res = lmhbrtf::run(inst.y, L, hp, a.seed);
  rep.timing["run"] = seconds_since(t0);

  rep.hp = hp;
  rep.trace = res.trace;
  rep.multirank = res.multirank;
  rep.results = {{"r_err", lmhbrtf::number_to_json(lmhbrtf::r_err(res.multirank, inst.multirank_gt))},
                 {"x_err", lmhbrtf::number_to_json(lmhbrtf::x_err(res.x_hat, inst.x_gt))},
                 {"multirank_gt", inst.multirank_gt},
                 {"iterations", res.trace.records.size()},
                 {"converged", res.trace.converged}};
  if (!a.save_prefix.empty()) {
    lmhbrtf::write_tensor(a.save_prefix + "y.npy", inst.y);
    lmhbrtf::write_tensor(a.save_prefix + "x_gt.npy", inst.x_gt);
    lmhbrtf::write_tensor(a.save_prefix + "s_gt.npy", inst.s_gt);
    lmhbrtf::write_tensor(a.save_prefix + "x_hat.npy", res.x_hat);
    lmhbrtf::write_tensor(a.save_prefix + "s_hat.npy", res.s_hat);
  }
  write_json(a.out, json(rep));
  return kExitOk;
}

int cmd_corrupt(const CorruptArgs& a) {
  const lmhbrtf::RealTensor clean = lmhbrtf::read_tensor(a.input);
  const lmhbrtf::RealTensor y = lmhbrtf::corrupt(clean, a.cfg);
  lmhbrtf::write_tensor(a.out, y);
  if (!a.ref_out.empty())
    lmhbrtf::write_tensor(a.ref_out, a.cfg.normalize
                                         ? lmhbrtf::normalize_range(clean, a.cfg.low, a.cfg.high)
                                         : clean);
  return kExitOk;
}

lmhbrtf::TransformSpec make_transform(const DenoiseArgs& a, const lmhbrtf::Shape& shape) {
  if (!a.transform_files.empty()) {
    std::vector<lmhbrtf::MatrixXcd> mats;
    for (const auto& f : a.transform_files) mats.push_back(lmhbrtf::read_matrix(f));
    return lmhbrtf::TransformSpec::explicit_matrices(mats);
  }
  if (a.transform != "dft")
    throw lmhbrtf::ArgumentError("unknown --transform '" + a.transform + "' (only dft is built in)");
  return lmhbrtf::TransformSpec::dft_for(shape);
}

int cmd_denoise(const DenoiseArgs& a) {
  lmhbrtf::RunReport rep;
  rep.command = "denoise";
  rep.seed = a.seed;
  auto t0 = clock_type::now();
  const lmhbrtf::RealTensor y = lmhbrtf::read_tensor(a.input);
  rep.timing["read"] = seconds_since(t0);
  const lmhbrtf::TransformSpec L = make_transform(a, y.shape());
  rep.transform = a.transform_files.empty() ? a.transform : "explicit";
  lmhbrtf::HyperParams hp = a.model.to_hp();
  rep.inputs = {{"input", a.input}, {"shape", y.shape()}, {"phi", L.phi()}};
  if (!a.transform_files.empty()) rep.inputs["transform_files"] = a.transform_files;

  t0 = clock_type::now();
  lmhbrtf::RunResult res = lmhbrtf::run(y, L, hp, a.seed);
  rep.timing["run"] = seconds_since(t0);
  rep.hp = hp;
  rep.trace = res.trace;
  rep.multirank = res.multirank;
  rep.results = {{"iterations", res.trace.records.size()}, {"converged", res.trace.converged}};
  if (!a.reference.empty()) {
    const lmhbrtf::RealTensor ref = lmhbrtf::read_tensor(a.reference);
    rep.results["metrics"] = lmhbrtf::evaluate_metrics(res.x_hat, ref);
    rep.results["observed_psnr"] = lmhbrtf::number_to_json(lmhbrtf::psnr(y, ref));
  }
  lmhbrtf::write_tensor(a.out, res.x_hat);
  if (!a.sparse_out.empty()) lmhbrtf::write_tensor(a.sparse_out, res.s_hat);
  if (!a.report.empty()) write_json(a.report, json(rep));
  return kExitOk;
}

int cmd_metrics(const MetricsArgs& a) {
  const lmhbrtf::RealTensor ref = lmhbrtf::read_tensor(a.ref);
  const lmhbrtf::RealTensor est = lmhbrtf::read_tensor(a.est);
  lmhbrtf::MetricReport m;
  m.psnr = lmhbrtf::psnr(est, ref);
  m.ssim = lmhbrtf::ssim(est, ref);
  m.ergas = lmhbrtf::ergas(est, ref, a.ergas_scale);
  m.sam = lmhbrtf::sam(est, ref);
  json j = m;
  j["sam_unit"] = "degrees";
  write_json(a.out, j);
  return kExitOk;
}

std::string config_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_array()) {
    std::string s;
    for (const auto& e : v) {
      if (!s.empty()) s += ',';
      s += config_value(e);
    }
    return s;
  }
  return v.dump();
}

// Splices "--key=value" pairs from a JSON config file in right after the
// subcommand name, so that flags given on the command line (which come later
// and win under take-last) override the file. Keys may be flat or nested
// under the subcommand name.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw lmhbrtf::ArgumentError("cannot open config file '" + path + "'");
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::exception& e) {
    throw lmhbrtf::ArgumentError("config file '" + path + "': " + e.what());
  }
  std::size_t sub = 1;
  while (sub < args.size() && args[sub].rfind("-", 0) == 0) ++sub;
  if (sub >= args.size()) throw lmhbrtf::ArgumentError("--config needs a subcommand");
  const json& section = cfg.contains(args[sub]) && cfg[args[sub]].is_object() ? cfg[args[sub]] : cfg;
  std::vector<std::string> extra;
  for (const auto& [k, v] : section.items()) {
    if (v.is_object()) continue;
    extra.push_back("--" + k + "=" + config_value(v));
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub + 1), extra.begin(), extra.end());
  return args;
}

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("LMH_BRTF_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-multi-rank Bayesian robust tensor factorization"};
  app.set_version_flag("--version", std::string(LMHBRTF_VERSION));
  app.require_subcommand(1);
  app.fallthrough();  // global options are also accepted after the subcommand
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (0: LMH_BRTF_THREADS or automatic)");
  app.add_option("--config", "JSON file of option defaults (flags take precedence)");

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic instance, recover it, score it");
  synth->add_option("--order", sa.order, "Tensor order (checked against --dims)");
  synth->add_option("--dims", sa.dims, "Comma-separated mode sizes")->required();
  synth->add_option("--rank", sa.rank, "Base rank R");
  synth->add_option("--pattern", sa.pattern,
                    "Multirank pattern such as R,0.5Rx4,Rx5; 'desk' or 'desk-swapped' for "
                    "the built-in block patterns");
  synth->add_option("--rho", sa.rho, "Fraction of entries carrying outliers");
  synth->add_option("--sigma2", sa.sigma2, "Gaussian noise variance");
  synth->add_option("--seed", sa.seed, "Random seed");
  synth->add_option("--out", sa.out, "Report path ('-' or empty: stdout)");
  synth->add_option("--save-prefix", sa.save_prefix, "Write tensors as <prefix>{y,x_gt,...}.npy");
  sa.model.tol = 1e-6;
  sa.model.max_iter = 3000;
  sa.model.gamma = "1";
  sa.model.add_to(synth);

  CorruptArgs ca;
  auto* corrupt = app.add_subcommand("corrupt", "Add impulse and Gaussian corruption");
  corrupt->add_option("--input", ca.input, "Clean tensor (.npy)")->required();
  corrupt->add_option("--out", ca.out, "Corrupted tensor (.npy)")->required();
  corrupt->add_option("--ref-out", ca.ref_out, "Also write the (normalized) clean reference");
  corrupt->add_option("--rho", ca.cfg.rho, "Fraction of entries replaced");
  corrupt->add_option("--sigma2", ca.cfg.sigma_sq, "Gaussian noise variance");
  corrupt->add_option("--low", ca.cfg.low, "Lower end of the impulse / value range");
  corrupt->add_option("--high", ca.cfg.high, "Upper end of the impulse / value range");
  corrupt->add_flag("--normalize", ca.cfg.normalize, "Rescale [low, high] to [0, 1] before noise");
  corrupt->add_option("--seed", ca.cfg.seed, "Random seed");

  DenoiseArgs da;
  auto* denoise = app.add_subcommand("denoise", "Recover the low-multi-rank part of a tensor");
  denoise->add_option("--input", da.input, "Observed tensor (.npy)")->required();
  denoise->add_option("--out", da.out, "Recovered low-rank tensor (.npy)")->required();
  denoise->add_option("--sparse-out", da.sparse_out, "Recovered sparse tensor (.npy)");
  denoise->add_option("--report", da.report, "Run report (.json)");
  denoise->add_option("--reference", da.reference, "Clean tensor for metrics in the report");
  denoise->add_option("--transform", da.transform, "Built-in transform (dft)");
  denoise->add_option("--transform-file", da.transform_files,
                      "Explicit transform matrix per trailing mode (.npy), repeatable")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  denoise->add_option("--seed", da.seed, "Random seed");
  da.model.sigma0_sq = 1e-7;
  da.model.tol = 1e-4;
  da.model.max_iter = 200;
  da.model.add_to(denoise);

  MetricsArgs ma;
  auto* metrics = app.add_subcommand("metrics", "PSNR, SSIM, ERGAS and SAM of an estimate");
  metrics->add_option("--ref", ma.ref, "Reference tensor (.npy)")->required();
  metrics->add_option("--est", ma.est, "Estimated tensor (.npy)")->required();
  metrics->add_option("--out", ma.out, "Output JSON ('-' or empty: stdout)");
  metrics->add_option("--ergas-scale", ma.ergas_scale, "ERGAS resolution ratio");

  std::vector<std::string> args(argv, argv + argc);
  try {
    args = expand_config(std::move(args));
  } catch (const lmhbrtf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  lmhbrtf::set_num_threads(resolve_threads(threads));
  try {
    if (*synth) return cmd_synth(sa);
    if (*corrupt) return cmd_corrupt(ca);
    if (*denoise) return cmd_denoise(da);
    if (*metrics) return cmd_metrics(ma);
  } catch (const lmhbrtf::ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
