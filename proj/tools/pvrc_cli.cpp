#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pvrc/data.hpp"
#include "pvrc/eval.hpp"
#include "pvrc/selftest.hpp"

namespace {

// Exit codes: 0 success, 1 validation error, 2 runtime error, 3 selftest
// failure.
constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitSelftest = 3;

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

struct EvalOptions {
  std::string manifest;
  std::string scheme = "loo";
  int n = 2;
  std::string classifiers = "nn,pvrc";
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";
  std::string pvrc_norm = "derived";
  double src_lambda = 1e-3;
  double src_tol = 1e-8;
  int src_iters = 5000;
  std::string tptssr_k = "1";
  int threads = 1;
};

int run_eval(const EvalOptions& opt) {
  if (opt.scheme != "loo" && opt.scheme != "first-n") {
    std::cerr << "error: --scheme must be loo or first-n\n";
    return kExitValidation;
  }
  if (opt.scheme == "first-n" && opt.n < 2) {
    std::cerr << "error: first-n needs --n >= 2 (classifiers need at least "
                 "two prototypes per class)\n";
    return kExitValidation;
  }
  if (opt.format != "json" && opt.format != "csv") {
    std::cerr << "error: --format must be json or csv\n";
    return kExitValidation;
  }
  if (opt.threads < 1) {
    std::cerr << "error: --threads must be >= 1\n";
    return kExitValidation;
  }

  pvrc::PvrcNorm norm;
  if (opt.pvrc_norm == "derived") norm = pvrc::PvrcNorm::derived;
  else if (opt.pvrc_norm == "paper") norm = pvrc::PvrcNorm::paper_literal;
  else {
    std::cerr << "error: --pvrc-norm must be derived or paper\n";
    return kExitValidation;
  }

  // --tptssr-k accepts a single k or an inclusive range "a-b".
  int k_from = 0, k_to = 0;
  {
    const auto dash = opt.tptssr_k.find('-');
    try {
      if (dash == std::string::npos) {
        k_from = k_to = std::stoi(opt.tptssr_k);
      } else {
        k_from = std::stoi(opt.tptssr_k.substr(0, dash));
        k_to = std::stoi(opt.tptssr_k.substr(dash + 1));
      }
    } catch (const std::exception&) {
      k_from = k_to = 0;
    }
    if (k_from < 1 || k_to < k_from) {
      std::cerr << "error: --tptssr-k must be a positive k or a range a-b\n";
      return kExitValidation;
    }
  }

  std::vector<pvrc::eval::ClassifierSpec> specs;
  bool sweep = false;
  for (const auto& name : split_commas(opt.classifiers)) {
    const auto& valid = pvrc::eval::classifier_names();
    if (std::find(valid.begin(), valid.end(), name) == valid.end()) {
      std::string list;
      for (const auto& v : valid) list += (list.empty() ? "" : ", ") + v;
      std::cerr << "error: unknown classifier '" << name
                << "'; valid names: " << list << "\n";
      return kExitValidation;
    }
    pvrc::eval::ClassifierSpec spec;
    spec.name = name;
    spec.src.lambda_scale = opt.src_lambda;
    spec.src.tol = opt.src_tol;
    spec.src.max_iters = opt.src_iters;
    spec.tptssr_k = k_from;
    spec.pvrc_norm = norm;
    if (name == "tptssr" && k_to > k_from) sweep = true;
    specs.push_back(std::move(spec));
  }
  if (specs.empty()) {
    std::cerr << "error: --classifiers must name at least one classifier\n";
    return kExitValidation;
  }

  const auto samples = pvrc::data::load_manifest(opt.manifest);
  const auto manifest = pvrc::data::parse_manifest(opt.manifest);
  pvrc::eval::Protocol protocol;
  protocol.kind = opt.scheme == "loo" ? pvrc::eval::ProtocolKind::leave_one_out
                                      : pvrc::eval::ProtocolKind::first_n;
  protocol.n = opt.n;

  // A sweep evaluates tptssr separately over the k range and reports the
  // best k alongside the other classifiers' single run.
  std::vector<pvrc::eval::ClassifierSpec> plain;
  for (const auto& s : specs)
    if (!(sweep && s.name == "tptssr")) plain.push_back(s);

  pvrc::eval::EvalReport report;
  if (!plain.empty()) {
    report = pvrc::eval::run_protocol(manifest.name, samples, protocol, plain,
                                      opt.threads);
  } else {
    report.dataset = manifest.name;
    report.protocol = protocol;
    report.environment = pvrc::eval::environment_note();
  }
  if (sweep) {
    const auto runs = pvrc::eval::sweep_tptssr(manifest.name, samples, protocol,
                                               k_from, k_to, opt.threads);
    const pvrc::eval::ClassifierResult* best = nullptr;
    int best_k = 0;
    for (const auto& [k, r] : runs) {
      const auto& cr = r.classifiers.front();
      if (!best || cr.recognition_rate > best->recognition_rate) {
        best = &cr;
        best_k = k;
      }
    }
    pvrc::eval::ClassifierResult chosen = *best;
    chosen.flags["tptssr_best_k"] = best_k;
    report.classifiers.push_back(std::move(chosen));
  }

  const std::string payload = opt.format == "json" ? pvrc::eval::to_json(report)
                                                   : pvrc::eval::to_csv(report);
  if (!opt.out.empty()) {
    std::ofstream f(opt.out);
    if (!f) {
      std::cerr << "error: cannot write " << opt.out << "\n";
      return kExitRuntime;
    }
    f << payload;
  }
  std::cout << pvrc::eval::to_table(report);
  if (opt.out.empty()) std::cout << payload;
  return kExitOk;
}

int run_selftest() {
  const auto checks = pvrc::run_selftest();
  bool all_ok = true;
  for (const auto& c : checks) {
    std::cout << (c.passed ? "PASS" : "FAIL") << "  " << c.name << " — "
              << c.detail << "\n";
    all_ok = all_ok && c.passed;
  }
  return all_ok ? kExitOk : kExitSelftest;
}

struct SynthOptions {
  std::string out = "synth";
  int classes = 10;
  int per_class = 6;
  int subspace_dim = 3;
  int ambient_q = 50;
  double noise_sigma = 0.01;
  std::uint64_t seed = 1;
};

int run_synth(const SynthOptions& opt) {
  pvrc::data::SynthParams p;
  p.num_classes = opt.classes;
  p.per_class = opt.per_class;
  p.subspace_dim = opt.subspace_dim;
  p.ambient_q = opt.ambient_q;
  p.noise_sigma = opt.noise_sigma;
  p.seed = opt.seed;
  const auto manifest = pvrc::data::write_synth_dataset(opt.out, p);
  std::cout << "wrote " << manifest.string() << " and "
            << (opt.out + ".csv") << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polyhedron volume ratio classifier benchmark harness"};
  app.require_subcommand(1);
  app.set_config("--config");

  EvalOptions eopt;
  auto* eval_cmd =
      app.add_subcommand("eval", "Run an evaluation protocol on a dataset");
  eval_cmd->add_option("--manifest", eopt.manifest, "Dataset manifest path")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--scheme", eopt.scheme, "loo or first-n");
  eval_cmd->add_option("--n", eopt.n, "Prototype count for first-n");
  eval_cmd->add_option("--classifiers", eopt.classifiers,
                       "Comma list: nn,cm,lrc,crc,src,tptssr,pvrc");
  eval_cmd->add_option("--seed", eopt.seed, "Random seed recorded in the run");
  eval_cmd->add_option("--out", eopt.out, "Report output path");
  eval_cmd->add_option("--format", eopt.format, "json or csv");
  eval_cmd->add_option("--pvrc-norm", eopt.pvrc_norm, "derived or paper");
  eval_cmd->add_option("--src-lambda", eopt.src_lambda,
                       "SRC penalty scale (times ||X^T x||_inf)");
  eval_cmd->add_option("--src-tol", eopt.src_tol, "SRC convergence tolerance");
  eval_cmd->add_option("--src-iters", eopt.src_iters, "SRC iteration cap");
  eval_cmd->add_option("--tptssr-k", eopt.tptssr_k,
                       "TPTSSR kept-column count, single k or range a-b");
  eval_cmd->add_option("--threads", eopt.threads, "Worker thread cap");

  auto* selftest_cmd =
      app.add_subcommand("selftest", "Run the embedded verification suite");

  SynthOptions sopt;
  auto* synth_cmd =
      app.add_subcommand("synth", "Generate a synthetic subspace dataset");
  synth_cmd->add_option("--out", sopt.out, "Output stem (<stem>.csv/.manifest)");
  synth_cmd->add_option("--classes", sopt.classes, "Number of classes");
  synth_cmd->add_option("--per-class", sopt.per_class, "Samples per class");
  synth_cmd->add_option("--subspace-dim", sopt.subspace_dim,
                        "Affine subspace dimension");
  synth_cmd->add_option("--ambient-q", sopt.ambient_q, "Feature dimension");
  synth_cmd->add_option("--noise-sigma", sopt.noise_sigma, "Gaussian noise");
  synth_cmd->add_option("--seed", sopt.seed, "Generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (eval_cmd->parsed()) return run_eval(eopt);
    if (selftest_cmd->parsed()) return run_selftest();
    if (synth_cmd->parsed()) return run_synth(sopt);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitValidation;
}
