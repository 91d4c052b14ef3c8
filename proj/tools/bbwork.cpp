// Copyright 2026 The bbwork Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// bbwork: command-line front end.
//
// Exit status: 0 on success, 2 on invalid input or a failed precondition,
// 3 when a solve did not converge (the result is still written).

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "bbwork/error.hpp"
#include "bbwork/hypothesis.hpp"
#include "bbwork/serialization.hpp"
#include "bbwork/thermal_ops.hpp"
#include "bbwork/thermo.hpp"
#include "bbwork/tomography.hpp"
#include "bbwork/version.hpp"
#include "bbwork/work.hpp"

namespace {

using namespace bbwork;

constexpr int kExitOk = 0;
constexpr int kExitError = 2;
constexpr int kExitUnconverged = 3;

struct Common {
  std::string input;
  double epsilon = 0.05;
  double beta = 1.0;
  std::string base = "nats";
  std::uint64_t seed = 0;
  int budget = 100000;
  unsigned workers = 0;
  std::string out;
  std::string format;
  bool epsilon_set = false;
  bool beta_set = false;
};

void add_common(CLI::App* cmd, Common& c, const std::string& input_help) {
  cmd->add_option("input", c.input, input_help)->required()->check(CLI::ExistingFile);
  cmd->add_option("--epsilon", c.epsilon, "Type-I error (default 0.05, or the file's value)");
  cmd->add_option("--beta", c.beta, "Inverse temperature (default 1, or the file's value)");
  cmd->add_option("--base", c.base, "Log base")->check(CLI::IsMember({"nats", "bits"}));
  cmd->add_option("--seed", c.seed, "Master RNG seed");
  cmd->add_option("--budget", c.budget, "Solver iteration budget")->check(CLI::PositiveNumber);
  cmd->add_option("--workers", c.workers, "Worker threads (0 = available cores)");
  cmd->add_option("--out", c.out, "Output path (default stdout)");
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
}

LogBase log_base(const Common& c) { return c.base == "bits" ? LogBase::kBits : LogBase::kNats; }

unsigned resolved_workers(const Common& c) {
  if (c.workers > 0) return c.workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

double pick(bool flag_set, double flag_value, const std::optional<double>& file_value, double fallback) {
  if (flag_set) return flag_value;
  return file_value.value_or(fallback);
}

SolverOptions solver_options(const Common& c) {
  SolverOptions o;
  o.max_iterations = c.budget;
  o.base = log_base(c);
  return o;
}

Json config_echo(const std::string& command, const Common& c, double epsilon, double beta) {
  Json j;
  j["command"] = command;
  j["input"] = c.input;
  j["epsilon"] = epsilon;
  j["beta"] = beta;
  j["base"] = c.base;
  j["seed"] = c.seed;
  j["budget"] = c.budget;
  j["workers"] = c.workers;
  return j;
}

std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// What a command produced before it is wrapped for output.
struct Outcome {
  Json result;
  /// Rows for CSV output; empty for JSON-only commands.
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;
  std::string status = "ok";
  int exit_code = kExitOk;
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError(path + ": cannot open for writing");
  out << text;
}

/// JSON output carries the wall time inline. CSV output carries the
/// reproducible metadata as '#' lines and the wall time in a sidecar
/// <out>.meta.json (stderr when writing to stdout), so reruns with the same
/// configuration give byte-identical CSV files.
void emit(const std::string& command, const Common& c, const std::string& default_format, const Json& config,
          Outcome& outcome, double wall) {
  const std::string format = c.format.empty() ? default_format : c.format;
  Json meta;
  meta["tool"] = "bbwork";
  meta["version"] = kVersion;
  meta["command"] = command;
  meta["config"] = config;
  meta["base"] = c.base;
  meta["status"] = outcome.status;
  if (format == "json") {
    meta["wall_time_seconds"] = wall;
    meta["result"] = outcome.result;
    write_text(c.out, meta.dump(2) + "\n");
    return;
  }
  if (outcome.csv_header.empty()) throw ArgumentError("--format csv is not available for " + command);
  std::ostringstream csv;
  csv << "# bbwork " << kVersion << " " << command << "\n";
  csv << "# config: " << config.dump() << "\n";
  csv << "# base: " << c.base << "\n";
  csv << "# status: " << outcome.status << "\n";
  for (std::size_t i = 0; i < outcome.csv_header.size(); ++i) csv << (i ? "," : "") << outcome.csv_header[i];
  csv << "\n";
  for (const auto& row : outcome.csv_rows) {
    for (std::size_t i = 0; i < row.size(); ++i) csv << (i ? "," : "") << row[i];
    csv << "\n";
  }
  write_text(c.out, csv.str());
  meta["wall_time_seconds"] = wall;
  meta["summary"] = outcome.result;
  if (c.out.empty()) {
    std::cerr << meta.dump() << "\n";
  } else {
    write_text(c.out + ".meta.json", meta.dump(2) + "\n");
  }
}

void mark_unconverged(Outcome& o, SolveStatus s) {
  if (s == SolveStatus::kUnconverged) {
    o.status = "unconverged";
    o.exit_code = kExitUnconverged;
  } else if (o.status == "ok") {
    o.status = "converged";
  }
}

ThermalContext context_for(const BoxProblem& p, double beta) { return gibbs_state(p.hamiltonian, beta); }

// ---- commands -------------------------------------------------------------

Outcome cmd_dh(const Common& c, double& eps, double& beta) {
  const Json j = read_json_file(c.input);
  HTProblem problem = ht_problem_from_json(j);
  eps = pick(c.epsilon_set, c.epsilon, problem.epsilon, 0.05);
  beta = 0.0;
  problem.epsilon = eps;
  validate(problem);
  const HTResult r = dh_epsilon(problem, solver_options(c));
  Outcome o;
  o.result = to_json(r);
  mark_unconverged(o, r.status);
  return o;
}

struct WorkFlags {
  std::string regime = "gpo";
  bool channel = false;
};

Outcome cmd_work(const Common& c, const WorkFlags& f, double& eps, double& beta) {
  const BoxProblem p = box_problem_from_json(read_json_file(c.input));
  eps = pick(c.epsilon_set, c.epsilon, p.epsilon, 0.05);
  beta = pick(c.beta_set, c.beta, p.beta, 1.0);
  const ThermalContext ctx = context_for(p, beta);
  const Regime regime = parse_regime(f.regime);
  const WorkResult w = regime == Regime::kGpo ? one_shot_work_gpo(p.box, ctx, eps, solver_options(c))
                                              : one_shot_work_gpc(p.box, ctx, eps, solver_options(c));
  Outcome o;
  o.result = to_json(w);
  if (f.channel) {
    const ExtractionChannel ch = build_extraction_channel(w.ht_result.test_operator, ctx);
    Json cj;
    cj["m"] = ch.m;
    cj["test_operator"] = to_json(ch.test_operator);
    cj["worst_case_fidelity"] = worst_case_fidelity(ch, p.box);
    cj["gibbs_image"] = to_json(ch.apply(ctx.gibbs));
    cj["choi"] = to_json(choi(ch));
    o.result["channel"] = std::move(cj);
  }
  mark_unconverged(o, w.ht_result.status);
  return o;
}

struct RateFlags {
  std::vector<int> n_list{1, 2, 3, 4};
  std::string regime = "gpo";
  std::string family = "iid";
};

Outcome cmd_rate(const Common& c, const RateFlags& f, double& eps, double& beta) {
  const BoxProblem p = box_problem_from_json(read_json_file(c.input));
  eps = pick(c.epsilon_set, c.epsilon, p.epsilon, 0.05);
  beta = pick(c.beta_set, c.beta, p.beta, 1.0);
  const ThermalContext ctx = context_for(p, beta);
  RateOptions options;
  options.solver = solver_options(c);
  options.family = parse_box_family(f.family);
  options.workers = resolved_workers(c);
  const RateSequence seq = rate_sequence(p.box, ctx, eps, f.n_list, parse_regime(f.regime), options);
  Outcome o;
  o.csv_header = {"n", "r_n", "target", "gap", "status", "path"};
  Json points = Json::array();
  for (const RatePoint& pt : seq.points) {
    o.csv_rows.push_back({std::to_string(pt.n), csv_number(pt.rate), csv_number(seq.target), csv_number(pt.gap),
                          std::string(to_string(pt.status)), pt.path});
    Json pj;
    pj["n"] = pt.n;
    pj["r_n"] = pt.rate;
    pj["gap"] = pt.gap;
    pj["status"] = std::string(to_string(pt.status));
    pj["path"] = pt.path;
    points.push_back(std::move(pj));
    mark_unconverged(o, pt.status);
  }
  o.result["regime"] = std::string(to_string(seq.regime));
  o.result["family"] = std::string(to_string(seq.family));
  o.result["epsilon"] = seq.epsilon;
  o.result["target"] = seq.target;
  o.result["complete"] = seq.complete;
  o.result["diagnostic"] = seq.diagnostic;
  o.result["points"] = std::move(points);
  if (!seq.complete) {
    std::cerr << "bbwork: " << seq.diagnostic << "\n";
    o.status = "incomplete";
    o.exit_code = kExitError;
  }
  return o;
}

Outcome cmd_pinch(const Common& c, int copies, double& eps, double& beta) {
  const BoxProblem p = box_problem_from_json(read_json_file(c.input));
  eps = 0.0;
  beta = 0.0;
  if (copies < 1) throw ArgumentError("--copies must be >= 1");
  const Hamiltonian hn = nfold_hamiltonian(p.hamiltonian, copies);
  const EnergyBlockStructure& blocks = hn.blocks();
  Outcome o;
  o.result["copies"] = copies;
  o.result["blocks"] = blocks.size();
  o.result["ambiguous_grouping"] = blocks.ambiguous;
  Json states = Json::array();
  std::vector<DensityMatrix> pinched;
  for (const auto& rho : p.box.states()) {
    pinched.push_back(pinch(kron_power(rho, copies), blocks));
    states.push_back(to_json(pinched.back()));
  }
  Json distances = Json::array();
  for (std::size_t i = 0; i < pinched.size(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < pinched.size(); ++k) row.push_back(trace_distance(pinched[i], pinched[k]));
    distances.push_back(std::move(row));
  }
  o.result["trace_distances"] = std::move(distances);
  o.result["states"] = std::move(states);
  return o;
}

Outcome cmd_reconstruct(const Common& c, int copies, double& eps, double& beta) {
  const Json j = read_json_file(c.input);
  eps = 0.0;
  beta = 0.0;
  const auto d = static_cast<Index>(number_field(j, "dim", "$"));
  const HermitianOperator pinched = hermitian_from_json(field(j, "pinched", "$"), "$.pinched");
  const CyclicProductTable table = cyclic_products(pinched, d);
  Outcome o;
  o.result["table"] = to_json(table);
  o.result["complete"] = table.complete();
  o.result["copies"] = copies;
  o.result["reconstructed"] = to_json(reconstruct_pinched(table, copies));
  return o;
}

struct IdentifyFlags {
  std::string estimate;
  long true_index = -1;
  std::uint64_t samples = 0;
};

Outcome cmd_identify(const Common& c, const IdentifyFlags& f, double& eps, double& beta) {
  const BoxProblem p = box_problem_from_json(read_json_file(c.input));
  eps = 0.0;
  beta = 0.0;
  const std::vector<DensityMatrix> refs = pinched_references(p.box, p.hamiltonian);
  std::optional<std::size_t> truth;
  if (f.true_index >= 0) {
    if (static_cast<std::size_t>(f.true_index) >= p.box.size()) throw ArgumentError("--true-index out of range");
    truth = static_cast<std::size_t>(f.true_index);
  }
  DensityMatrix estimate;
  Outcome o;
  if (!f.estimate.empty()) {
    estimate = density_from_json(field(read_json_file(f.estimate), "estimate", "$"), "$.estimate");
  } else {
    if (!truth || f.samples == 0) {
      throw ArgumentError("identify needs --estimate FILE, or --true-index and --samples to simulate tomography");
    }
    Rng rng = make_rng(c.seed);
    const TomographyEstimate est = simulate_incoherent_tomography(p.box[*truth], p.hamiltonian, f.samples, rng);
    estimate = est.estimate;
    o.result["samples"] = est.samples;
    o.result["settings"] = est.settings;
    o.result["scheme"] = est.scheme;
  }
  const IdentificationOutcome id = identify(estimate, refs, truth);
  o.result["chosen_index"] = id.chosen;
  o.result["distances"] = id.distances;
  o.result["delta"] = std::isfinite(id.delta) ? Json(id.delta) : Json("inf");
  if (id.success) o.result["success"] = *id.success;
  return o;
}

struct ProtocolFlags {
  std::int64_t n = 0;
  std::size_t trials = 1;
  double delta_prime = 0.0;
  double p_e = 0.1;
  double constant = 1.0;
  bool exact = false;
  long true_index = -1;
  std::string reference;
};

Outcome cmd_protocol(const Common& c, const ProtocolFlags& f, Json& extra, double& eps, double& beta) {
  const BoxProblem p = box_problem_from_json(read_json_file(c.input));
  eps = pick(c.epsilon_set, c.epsilon, p.epsilon, 0.05);
  beta = pick(c.beta_set, c.beta, p.beta, 1.0);
  const ThermalContext ctx = context_for(p, beta);
  const Hamiltonian reference = f.reference.empty()
                                    ? p.hamiltonian
                                    : hamiltonian_from_json(read_json_file(f.reference), "$");
  ProtocolConfig config;
  config.n = f.n;
  config.epsilon = eps;
  config.delta_prime = f.delta_prime;
  config.p_e = f.p_e;
  config.constant = f.constant;
  config.base = log_base(c);
  config.exact_sampling = f.exact;
  extra["n"] = f.n;
  extra["trials"] = f.trials;
  extra["delta_prime"] = f.delta_prime;
  extra["p_e"] = f.p_e;
  extra["constant"] = f.constant;
  extra["exact"] = f.exact;
  extra["true_index"] = f.true_index;
  extra["reference"] = f.reference;
  const Protocol protocol(p.box, ctx, reference, config);
  std::optional<std::size_t> truth;
  if (f.true_index >= 0) truth = static_cast<std::size_t>(f.true_index);
  const std::vector<ProtocolReport> reports = protocol.run_trials(f.trials, c.seed, truth, resolved_workers(c));
  Outcome o;
  o.csv_header = {"trial", "true_index", "chosen_index", "success", "k", "copies_used",
                  "n",     "delta",      "delta_prime",  "rate",    "overhead"};
  Json rows = Json::array();
  std::size_t failures = 0;
  for (std::size_t t = 0; t < reports.size(); ++t) {
    const ProtocolReport& r = reports[t];
    failures += r.success ? 0 : 1;
    o.csv_rows.push_back({std::to_string(t), std::to_string(r.true_index), std::to_string(r.chosen_index),
                          r.success ? "1" : "0", std::to_string(r.k), std::to_string(r.copies_used),
                          std::to_string(r.n), csv_number(r.delta), csv_number(r.delta_prime), csv_number(r.rate),
                          csv_number(r.overhead)});
    rows.push_back(to_json(r));
  }
  o.result["trials"] = reports.size();
  o.result["failures"] = failures;
  o.result["failure_rate"] = reports.empty() ? 0.0 : static_cast<double>(failures) / static_cast<double>(reports.size());
  o.result["k"] = protocol.k();
  o.result["reports"] = std::move(rows);
  return o;
}

Outcome cmd_mix(const Common& c, double& eps, double& beta) {
  const Json j = read_json_file(c.input);
  eps = 0.0;
  const Json& list = field(j, "ops", "$");
  if (!list.is_array()) throw ArgumentError("$.ops: expected an array");
  std::vector<std::pair<double, DilatedThermalOp>> ops;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "$.ops[" + std::to_string(i) + "]";
    ops.emplace_back(number_field(list[i], "p", path), thermal_op_from_json(field(list[i], "op", path), path + ".op"));
  }
  const MixedThermalOp mixed = mix_thermal_ops(ops);
  beta = mixed.op.beta();
  HermitianOperator expected = HermitianOperator::zero(mixed.op.input_dim() * mixed.op.output_dim());
  for (const auto& [p, op] : ops) expected = expected + choi(op).matrix * p;
  Outcome o;
  o.result["op"] = to_json(mixed.op);
  o.result["shifts"] = mixed.shifts;
  o.result["block_of"] = mixed.block_of;
  o.result["ancilla_gibbs"] = to_json(mixed.op.ancilla_gibbs());
  o.result["commutator_defect"] = mixed.op.commutator_defect();
  o.result["choi_linearity_error"] = max_abs(choi(mixed.op).matrix.matrix() - expected.matrix());
  return o;
}

Outcome cmd_compile_icpto(const Common& c, double& eps, double& beta) {
  const Json j = read_json_file(c.input);
  eps = 0.0;
  const IncoherentProjectivePOVM povm = povm_from_json(field(j, "povm", "$"), "$.povm");
  const Json& list = field(j, "ops", "$");
  if (!list.is_array() || list.empty()) throw ArgumentError("$.ops: expected a non-empty array");
  std::vector<DilatedThermalOp> ops;
  for (std::size_t i = 0; i < list.size(); ++i) ops.push_back(thermal_op_from_json(list[i], "$.ops[" + std::to_string(i) + "]"));
  const DilatedThermalOp compiled = compile_icpto(povm, ops);
  beta = compiled.beta();
  Outcome o;
  o.result["op"] = to_json(compiled);
  o.result["unitarity_defect"] = compiled.unitarity_defect();
  o.result["commutator_defect"] = compiled.commutator_defect();
  o.result["choi_distance"] = choi_distance(choi(compiled), conditional_choi(povm, ops));
  return o;
}

Outcome cmd_verify_dilation(const Common& c, double& eps, double& beta) {
  const DilatedThermalOp op = thermal_op_from_json(read_json_file(c.input), "$");
  eps = 0.0;
  beta = op.beta();
  Outcome o;
  o.result["unitarity_defect"] = op.unitarity_defect();
  o.result["commutator_defect"] = op.commutator_defect();
  o.result["input_dims"] = op.input_dims();
  o.result["output_dims"] = op.output_dims();
  o.result["gibbs_preservation_error"] =
      max_abs(dilation_apply(op, op.input_gibbs()).matrix() - op.output_gibbs().matrix());
  o.result["output_hamiltonian"] = to_json(op.output_hamiltonian());
  o.result["choi"] = to_json(choi(op));
  return o;
}

int run(int argc, char** argv) {
  CLI::App app{"Work extraction from black-box quantum states"};
  app.set_version_flag("--version", std::string("bbwork ") + kVersion);
  app.require_subcommand(1);

  Common c;
  WorkFlags work_flags;
  RateFlags rate_flags;
  IdentifyFlags identify_flags;
  ProtocolFlags protocol_flags;
  int copies = 1;

  auto* dh = app.add_subcommand("dh", "Hypothesis-testing divergence of an HTProblem file");
  add_common(dh, c, "HTProblem JSON");
  auto* work = app.add_subcommand("work", "One-shot extractable work of a black box");
  add_common(work, c, "Black-box JSON");
  work->add_option("--regime", work_flags.regime, "gpo or gpc")->check(CLI::IsMember({"gpo", "gpc"}));
  work->add_flag("--channel", work_flags.channel, "Also emit the extraction channel");
  auto* rate = app.add_subcommand("rate", "Finite-n work rates and the asymptotic target");
  add_common(rate, c, "Black-box JSON");
  rate->add_option("--n", rate_flags.n_list, "Block lengths")->delimiter(',');
  rate->add_option("--regime", rate_flags.regime, "gpo or gpc")->check(CLI::IsMember({"gpo", "gpc"}));
  rate->add_option("--family", rate_flags.family, "iid or tensor")->check(CLI::IsMember({"iid", "tensor"}));
  auto* pinch_cmd = app.add_subcommand("pinch", "Pinched n-copy states of a black box");
  add_common(pinch_cmd, c, "Black-box JSON");
  pinch_cmd->add_option("--copies", copies, "Number of copies");
  auto* reconstruct = app.add_subcommand("reconstruct", "Rebuild P(rho^n) from P(rho^d)");
  add_common(reconstruct, c, "JSON with \"dim\" and \"pinched\"");
  reconstruct->add_option("--copies", copies, "Number of copies to rebuild");
  auto* identify_cmd = app.add_subcommand("identify", "Nearest pinched reference to a tomography estimate");
  add_common(identify_cmd, c, "Black-box JSON");
  identify_cmd->add_option("--estimate", identify_flags.estimate, "JSON with \"estimate\"")->check(CLI::ExistingFile);
  identify_cmd->add_option("--true-index", identify_flags.true_index, "Index of the supplied state");
  identify_cmd->add_option("--samples", identify_flags.samples, "Simulated tomography samples");
  auto* protocol = app.add_subcommand("protocol", "Tomography-then-extract trials");
  add_common(protocol, c, "Black-box JSON");
  protocol->add_option("--n", protocol_flags.n, "Single-system copies per trial")->required();
  protocol->add_option("--trials", protocol_flags.trials, "Number of trials");
  protocol->add_option("--delta-prime", protocol_flags.delta_prime, "Tomography accuracy (default delta/2)");
  protocol->add_option("--p-e", protocol_flags.p_e, "Target identification failure probability");
  protocol->add_option("--constant", protocol_flags.constant, "Sample-count constant C");
  protocol->add_flag("--exact", protocol_flags.exact, "Use exact outcome probabilities");
  protocol->add_option("--true-index", protocol_flags.true_index, "Fix the supplied state (default trial mod |S|)");
  protocol->add_option("--reference", protocol_flags.reference, "Hamiltonian JSON used for pinching")
      ->check(CLI::ExistingFile);
  auto* mix = app.add_subcommand("mix", "Convex mixture of thermal operations");
  add_common(mix, c, "JSON with \"ops\": [{\"p\", \"op\"}]");
  auto* compile = app.add_subcommand("compile-icpto", "Compile a measurement-conditioned thermal operation");
  add_common(compile, c, "JSON with \"povm\" and \"ops\"");
  auto* verify = app.add_subcommand("verify-dilation", "Check a thermal-operation dilation");
  add_common(verify, c, "DilatedThermalOp JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  CLI::App* cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  c.epsilon_set = cmd->count("--epsilon") > 0;
  c.beta_set = cmd->count("--beta") > 0;
  const auto start = std::chrono::steady_clock::now();
  double eps = 0.0, beta = 0.0;
  Json extra;
  Outcome outcome;
  std::string default_format = "json";
  if (name == "dh") {
    outcome = cmd_dh(c, eps, beta);
  } else if (name == "work") {
    extra["regime"] = work_flags.regime;
    extra["channel"] = work_flags.channel;
    outcome = cmd_work(c, work_flags, eps, beta);
  } else if (name == "rate") {
    extra["n"] = rate_flags.n_list;
    extra["regime"] = rate_flags.regime;
    extra["family"] = rate_flags.family;
    outcome = cmd_rate(c, rate_flags, eps, beta);
    default_format = "csv";
  } else if (name == "pinch") {
    extra["copies"] = copies;
    outcome = cmd_pinch(c, copies, eps, beta);
  } else if (name == "reconstruct") {
    extra["copies"] = copies;
    outcome = cmd_reconstruct(c, copies, eps, beta);
  } else if (name == "identify") {
    extra["estimate"] = identify_flags.estimate;
    extra["true_index"] = identify_flags.true_index;
    extra["samples"] = identify_flags.samples;
    outcome = cmd_identify(c, identify_flags, eps, beta);
  } else if (name == "protocol") {
    outcome = cmd_protocol(c, protocol_flags, extra, eps, beta);
    default_format = "csv";
  } else if (name == "mix") {
    outcome = cmd_mix(c, eps, beta);
  } else if (name == "compile-icpto") {
    outcome = cmd_compile_icpto(c, eps, beta);
  } else {
    outcome = cmd_verify_dilation(c, eps, beta);
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Json config = config_echo(name, c, eps, beta);
  for (auto& [key, value] : extra.items()) config[key] = value;
  emit(name, c, default_format, config, outcome, wall);
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const bbwork::ConvergenceError& e) {
    std::cerr << "bbwork: unconverged: " << e.what() << "\n";
    return kExitUnconverged;
  } catch (const bbwork::Error& e) {
    std::cerr << "bbwork: error: " << e.what() << "\n";
    return kExitError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "bbwork: error: malformed input: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "bbwork: error: " << e.what() << "\n";
    return kExitError;
  }
}
