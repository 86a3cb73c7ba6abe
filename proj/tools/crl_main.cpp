// crl: curvature of random walks on finite metric spaces and their
// Wasserstein lifts. JSON in, JSON/CSV out; see README for the file formats.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "crl/concentration.hpp"
#include "crl/curvature.hpp"
#include "crl/dynamics.hpp"
#include "crl/gromov_hausdorff.hpp"
#include "crl/io.hpp"
#include "crl/lifting.hpp"
#include "crl/logging.hpp"
#include "crl/parallel.hpp"
#include "crl/version.hpp"

namespace {

using crl::log::info;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitAssertion = 2;

struct CommonOpts {
  double p = 1.0;
  int grid = 2;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  int threads = static_cast<int>(crl::default_thread_count());
  std::string out;
  std::string format = "json";
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--p", opts.p, "Wasserstein exponent (1 <= p < inf)");
  cmd->add_option("--grid", opts.grid, "simplex grid denominator N");
  cmd->add_option("--tol", opts.tol, "tolerance for iterative/verification steps");
  cmd->add_option("--seed", opts.seed, "RNG seed");
  cmd->add_option("--threads", opts.threads, "thread budget (1 = serial)");
  cmd->add_option("--out", opts.out, "output path (default: stdout)");
  cmd->add_option("--format", opts.format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
}

json config_header(const std::string& command, const CommonOpts& opts,
                   const std::string& input) {
  json cfg;
  cfg["command"] = command;
  cfg["input"] = input;
  cfg["p"] = opts.p;
  cfg["grid"] = opts.grid;
  cfg["tol"] = opts.tol;
  cfg["seed"] = opts.seed;
  cfg["format"] = opts.format;
  json envelope;
  envelope["config"] = std::move(cfg);
  envelope["version"] = crl::kVersion;
  envelope["tolerances"] = {{"mass", crl::tol::kMass},
                            {"marginal", crl::tol::kMarginal},
                            {"dual_gap", crl::tol::kDualGap},
                            {"oracle", crl::tol::kOracle},
                            {"contraction", crl::tol::kContraction},
                            {"lifted_metric", crl::tol::kLiftedMetric}};
  return envelope;
}

void emit(const std::string& content, const CommonOpts& opts) {
  if (opts.out.empty()) std::cout << content;
  else crl::write_file(opts.out, content);
}

// CSV exports carry the run configuration as comment lines, mirroring what
// the JSON envelope embeds.
std::string csv_header(const std::string& command, const CommonOpts& opts,
                       const std::string& input) {
  std::ostringstream os;
  os << "# crl " << crl::kVersion << " command=" << command << " input=" << input
     << " p=" << crl::format_double(opts.p) << " grid=" << opts.grid
     << " tol=" << crl::format_double(opts.tol) << " seed=" << opts.seed << "\n";
  return os.str();
}

void require_exponent(const CommonOpts& opts) {
  if (!std::isfinite(opts.p) || opts.p < 1.0) throw crl::UnsupportedExponent(opts.p);
  if (opts.grid < 1) throw crl::BadConfig("--grid must be >= 1");
  if (!(opts.tol > 0.0)) throw crl::BadConfig("--tol must be positive");
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw crl::FileNotFound(path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw crl::BadConfig("failed to parse " + path + ": " + e.what());
  }
  return doc;
}

crl::RandomWalkKernel require_kernel(const crl::SpaceFile& file) {
  if (!file.kernel) throw crl::BadConfig("this command needs a \"kernel\" in the space file");
  return *file.kernel;
}

int cmd_validate(const std::string& input, const CommonOpts& opts) {
  json doc = load_json_file(input);
  json report = config_header("validate", opts, input);
  try {
    crl::SpaceFile file = crl::parse_space_json(doc);
    report["result"] = {{"valid", true},
                        {"points", file.space->size()},
                        {"diameter", file.space->diameter()},
                        {"has_kernel", file.kernel.has_value()}};
    emit(crl::dump_json(report), opts);
    return kExitOk;
  } catch (const crl::ValidationError& e) {
    json violations = json::array();
    for (const auto& v : e.violations()) violations.push_back(v.describe());
    report["result"] = {{"valid", false}, {"violations", std::move(violations)}};
    emit(crl::dump_json(report), opts);
    return kExitInput;
  }
}

int cmd_curvature(const std::string& input, const CommonOpts& opts) {
  require_exponent(opts);
  crl::SpaceFile file = crl::load_space_file(input);
  auto kernel = require_kernel(file);
  auto report = crl::curvature_report(kernel, opts.p, opts.threads);
  if (opts.format == "csv") {
    emit(csv_header("curvature", opts, input) +
             crl::curvature_report_to_csv(report, file.space),
         opts);
  } else {
    json out = config_header("curvature", opts, input);
    out["result"] = crl::curvature_report_to_json(report, file.space);
    emit(crl::dump_json(out), opts);
  }
  return kExitOk;
}

int cmd_lift(const std::string& input, const CommonOpts& opts, bool verify,
             const std::string& export_space) {
  require_exponent(opts);
  crl::SpaceFile file = crl::load_space_file(input);
  auto kernel = require_kernel(file);
  auto base_report = crl::curvature_report(kernel, opts.p, opts.threads);
  auto lifted = crl::build_lifted_space(file.space, kernel, opts.p, opts.grid, {},
                                        opts.threads);
  auto lifted_kernel = crl::lift_kernel(lifted);
  auto lifted_report = crl::lifted_curvature_report(lifted_kernel, opts.p, opts.threads);

  json out = config_header("lift", opts, input);
  out["result"]["lifted_points"] = lifted->size();
  out["result"]["base"] = crl::curvature_report_to_json(base_report, file.space);
  out["result"]["lifted"] = {{"kappa_inf", lifted_report.kappa_inf},
                             {"kappa_sup", lifted_report.kappa_sup},
                             {"argmin_pair", {lifted_report.argmin_pair.first,
                                              lifted_report.argmin_pair.second}},
                             {"argmin_labels",
                              {lifted->metric->label(lifted_report.argmin_pair.first),
                               lifted->metric->label(lifted_report.argmin_pair.second)}}};

  int code = kExitOk;
  if (verify) {
    auto theorem = crl::verify_lift_theorem(base_report, lifted_report, opts.tol);
    out["result"]["verify"] = {{"holds", theorem.holds},
                               {"base_inf", theorem.base_inf},
                               {"lifted_inf", theorem.lifted_inf},
                               {"witness", {theorem.witness.first, theorem.witness.second}}};
    if (!theorem.holds) code = kExitAssertion;
  }
  if (!export_space.empty())
    crl::write_file(export_space, crl::dump_json(crl::lifted_space_to_json(lifted_kernel)));
  emit(crl::dump_json(out), opts);
  return code;
}

int cmd_invariant(const std::string& input, const CommonOpts& opts, std::size_t max_iter) {
  require_exponent(opts);
  crl::SpaceFile file = crl::load_space_file(input);
  auto kernel = require_kernel(file);
  auto base_report = crl::curvature_report(kernel, opts.p, opts.threads);
  if (base_report.kappa_inf <= 0.0)
    crl::log::warn("curvature infimum is not positive; convergence is best-effort");

  auto inv = crl::invariant_measure(kernel, opts.p, opts.tol, max_iter);
  json out = config_header("invariant", opts, input);
  out["result"]["measure"] = inv.measure.weights();
  out["result"]["iterations"] = inv.iterations;
  out["result"]["residual"] = inv.residual;
  out["result"]["kappa_inf"] = base_report.kappa_inf;

  // The computed measure is invariant only to the iteration tolerance, so
  // detailed-balance verdicts widen with it.
  double balance_tol = std::max(crl::tol::kDetailedBalance, 10.0 * inv.residual);
  auto base_rev = crl::reversibility_check(kernel, inv.measure, balance_tol);
  out["result"]["base_reversible"] = base_rev.reversible;
  out["result"]["base_balance_residual"] = base_rev.max_residual;

  int code = kExitOk;
  auto lifted = crl::build_lifted_space(file.space, kernel, opts.p, opts.grid, {},
                                        opts.threads);
  auto lifted_kernel = crl::lift_kernel(lifted);
  try {
    auto inv_check = crl::lifted_invariant_check(lifted_kernel, inv.measure,
                                                 std::max(opts.tol, 10.0 * inv.residual));
    out["result"]["lifted_invariant"] = inv_check.holds;
    out["result"]["lifted_residual"] = inv_check.lifted_residual;
    if (!inv_check.holds) code = kExitAssertion;
  } catch (const crl::NotInvariantInput& e) {
    out["result"]["lifted_invariant"] = false;
    out["result"]["error"] = e.what();
    code = kExitAssertion;
  }
  auto lifted_nu = crl::lift_measure(*lifted, inv.measure);
  auto lifted_rev = crl::lifted_reversibility_check(lifted_kernel, lifted_nu, balance_tol);
  out["result"]["lifted_reversible"] = lifted_rev.reversible;
  out["result"]["lifted_balance_residual"] = lifted_rev.max_residual;
  // Reversibility must transfer: base reversible and lifted not is a bug.
  if (base_rev.reversible && !lifted_rev.reversible) code = kExitAssertion;

  emit(crl::dump_json(out), opts);
  return code;
}

int cmd_dynamics(const std::string& input, const CommonOpts& opts, std::uint64_t steps,
                 std::size_t max_iter) {
  require_exponent(opts);
  crl::SpaceFile file = crl::load_space_file(input);
  auto kernel = require_kernel(file);
  auto base_report = crl::curvature_report(kernel, opts.p, opts.threads);
  auto inv = crl::invariant_measure(kernel, opts.p, opts.tol, max_iter);

  auto mu0 = file.measure ? *file.measure : crl::DiscreteMeasure::dirac(file.space, 0);
  auto trace =
      crl::convergence_trace(kernel, mu0, inv.measure, opts.p, steps, base_report.kappa_inf);
  crl::RateTrace lifted_trace;
  bool have_lifted = base_report.kappa_inf > 0.0;
  if (have_lifted)
    lifted_trace =
        crl::lifted_rate_check(kernel, inv.measure, opts.p, steps, base_report.kappa_inf);

  if (opts.format == "csv") {
    emit(csv_header("dynamics", opts, input) + crl::rate_trace_to_csv(trace), opts);
    return trace.within_envelope && (!have_lifted || lifted_trace.within_envelope)
               ? kExitOk
               : kExitAssertion;
  }
  json out = config_header("dynamics", opts, input);
  out["result"]["kappa_inf"] = base_report.kappa_inf;
  out["result"]["trace"] = crl::rate_trace_to_json(trace);
  if (have_lifted) out["result"]["lifted_trace"] = crl::rate_trace_to_json(lifted_trace);
  emit(crl::dump_json(out), opts);
  return trace.within_envelope && (!have_lifted || lifted_trace.within_envelope)
             ? kExitOk
             : kExitAssertion;
}

std::vector<crl::WalkFamilyMember> family_from_config(const json& doc) {
  std::string family = doc.value("family", "");
  if (family == "cycle") {
    auto sizes = doc.value("sizes", std::vector<int>{});
    double laziness = doc.contains("walk") ? doc["walk"].value("laziness", 0.5) : 0.5;
    return crl::make_cycle_family(sizes, laziness);
  }
  if (family == "path") {
    auto sizes = doc.value("sizes", std::vector<int>{});
    return crl::make_path_drift_family(sizes);
  }
  if (family == "custom") {
    if (!doc.contains("members") || !doc["members"].is_array())
      throw crl::BadConfig("custom family needs a \"members\" array");
    // Last member doubles as the target space.
    std::vector<crl::SpaceFile> files;
    for (const auto& m : doc["members"]) files.push_back(crl::parse_space_json(m));
    crl::SpacePtr target = files.back().space;
    std::vector<crl::WalkFamilyMember> members;
    for (std::size_t i = 0; i < files.size(); ++i) {
      if (!files[i].kernel) throw crl::BadConfig("custom member without kernel");
      std::vector<std::size_t> assign;
      const json& mdoc = doc["members"][i];
      if (mdoc.contains("map")) {
        assign = mdoc["map"].get<std::vector<std::size_t>>();
      } else if (files[i].space->size() == target->size()) {
        assign.resize(target->size());
        for (std::size_t q = 0; q < assign.size(); ++q) assign[q] = q;
      } else {
        throw crl::BadConfig("custom member needs a \"map\" onto the last member");
      }
      members.push_back({files[i].space, *files[i].kernel,
                         crl::make_approximation_map(files[i].space, target, assign),
                         "member" + std::to_string(i)});
    }
    return members;
  }
  throw crl::BadConfig("family must be cycle, path, or custom");
}

int cmd_gh(const std::string& input, const CommonOpts& opts) {
  require_exponent(opts);
  json doc = load_json_file(input);
  auto family = family_from_config(doc);
  double kappa0 = doc.value("kappa0", 0.0);
  bool expect_failure = doc.value("expect_cauchy_failure", false);

  auto report = crl::stability_experiment(family, opts.p, kappa0, opts.tol, opts.threads);

  json out = config_header("gh", opts, input);
  out["result"]["kappa0"] = report.kappa0;
  out["result"]["member_infs"] = report.member_infs;
  out["result"]["epsilons"] = report.convergence.epsilons;
  out["result"]["cauchy_pass"] = report.convergence.cauchy_pass;
  out["result"]["final_modulus"] = report.convergence.final_modulus;
  out["result"]["best_subsequence"] = report.convergence.best_subsequence;
  json moduli = json::array();
  for (const auto& row : report.convergence.moduli) moduli.push_back(row);
  out["result"]["moduli"] = std::move(moduli);
  if (report.convergence.cauchy_pass) {
    out["result"]["limit_inf"] = report.limit_inf;
    out["result"]["tolerance"] = report.tolerance;
    out["result"]["holds"] = report.holds;
  }
  emit(crl::dump_json(out), opts);

  bool success = expect_failure ? !report.convergence.cauchy_pass
                                : (report.convergence.cauchy_pass && report.holds);
  return success ? kExitOk : kExitAssertion;
}

int cmd_obsdiam(const std::string& input, const CommonOpts& opts, double kappa,
                const std::string& strategy, std::size_t budget, bool scalar) {
  crl::SpaceFile file = crl::load_space_file(input);
  auto mu = file.measure ? *file.measure : crl::DiscreteMeasure::uniform(file.space);
  json out = config_header("obsdiam", opts, input);
  out["config"]["kappa"] = kappa;
  out["config"]["strategy"] = strategy;
  out["config"]["budget"] = budget;

  auto estimate = crl::obs_diam(file.space, mu, kappa,
                                crl::obs_strategy_from_string(strategy), budget, opts.seed);
  out["result"]["kappa"] = estimate.kappa;
  out["result"]["value"] = estimate.value;
  out["result"]["witness"] = estimate.witness;
  out["result"]["strategy"] = crl::to_string(estimate.strategy);
  out["result"]["grid_optimal"] = estimate.grid_optimal;
  if (scalar) {
    auto s = crl::obs_diam_scalar(file.space, mu, budget, opts.seed);
    out["result"]["scalar"] = {{"value", s.value},
                               {"kappa_at_min", s.kappa_at_min},
                               {"grid_points", s.grid_points}};
  }
  emit(crl::dump_json(out), opts);
  return kExitOk;
}

int cmd_levy(const std::string& input, const CommonOpts& opts, double kappa,
             const std::string& strategy, std::size_t budget) {
  json doc = load_json_file(input);
  std::vector<crl::LevyFamilyMember> family;
  std::string kind = doc.value("family", "custom");
  if (kind == "complete_lazy") {
    auto sizes = doc.value("sizes", std::vector<int>{});
    double laziness = doc.contains("walk") ? doc["walk"].value("laziness", 0.5) : 0.5;
    for (int n : sizes) {
      if (n < 2) throw crl::BadConfig("complete graph sizes must be >= 2");
      std::vector<double> d(static_cast<std::size_t>(n) * n, 1.0);
      for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i) * n + i] = 0.0;
      auto space = crl::FiniteMetricSpace::create(std::move(d));
      std::vector<double> rows(static_cast<std::size_t>(n) * n,
                               (1.0 - laziness) / static_cast<double>(n));
      for (int i = 0; i < n; ++i)
        rows[static_cast<std::size_t>(i) * n + i] += laziness;
      family.push_back({space, crl::DiscreteMeasure::uniform(space),
                        crl::RandomWalkKernel(space, std::move(rows)),
                        "K" + std::to_string(n)});
    }
  } else if (kind == "custom") {
    if (!doc.contains("members")) throw crl::BadConfig("levy config needs members");
    std::size_t i = 0;
    for (const auto& m : doc["members"]) {
      auto file = crl::parse_space_json(m);
      if (!file.kernel) throw crl::BadConfig("levy member without kernel");
      auto mu = file.measure ? *file.measure : crl::DiscreteMeasure::uniform(file.space);
      family.push_back({file.space, mu, *file.kernel, "member" + std::to_string(i++)});
    }
  } else {
    throw crl::BadConfig("levy family must be complete_lazy or custom");
  }

  double kappa0 = doc.value("kappa0", 0.0);
  auto report = crl::levy_experiment(family, kappa0, opts.grid, kappa,
                                     crl::obs_strategy_from_string(strategy), budget,
                                     opts.seed, opts.threads);
  json out = config_header("levy", opts, input);
  out["config"]["kappa"] = kappa;
  out["config"]["strategy"] = strategy;
  out["config"]["budget"] = budget;
  out["result"]["kappa0"] = report.kappa0;
  out["result"]["contraction"] = report.contraction;
  json members = json::array();
  for (const auto& m : report.members) {
    json row;
    row["name"] = m.name;
    row["kappa_inf"] = m.kappa_inf;
    row["base_value"] = m.base.value;
    row["base_witness"] = m.base.witness;
    row["scaled_from_witness"] = m.scaled_from_witness;
    row["scaled_native_value"] = m.scaled_native.value;
    row["lifted_value"] = m.lifted.value;
    row["lifted_witness"] = m.lifted.witness;
    row["pullback_lipschitz"] = m.pullback_lipschitz;
    row["scalar_base"] = m.scalar_base;
    row["scalar_lifted"] = m.scalar_lifted;
    row["lifted_le_scaled_raw"] = m.lifted_le_scaled_raw;
    members.push_back(std::move(row));
  }
  out["result"]["members"] = std::move(members);
  emit(crl::dump_json(out), opts);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coarse Ricci curvature of random walks and their Wasserstein lifts"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string input;
  bool verify = false;
  std::string export_space;
  std::size_t max_iter = 100000;
  std::uint64_t steps = 50;
  double kappa = 0.1;
  std::string strategy = "mcshane_random";
  std::size_t budget = 256;
  bool scalar = false;

  auto* validate = app.add_subcommand("validate", "check metric axioms of a space file");
  validate->add_option("input", input)->required();
  add_common(validate, opts);

  auto* curvature = app.add_subcommand("curvature", "kappa_p over all pairs");
  curvature->add_option("input", input)->required();
  add_common(curvature, opts);

  auto* lift = app.add_subcommand("lift", "build the discretized Wasserstein lift");
  lift->add_option("input", input)->required();
  lift->add_flag("--verify", verify, "check the curvature-infimum equality");
  lift->add_option("--export-space", export_space, "write the lift as a space file");
  add_common(lift, opts);

  auto* invariant = app.add_subcommand("invariant", "invariant measure + lifted checks");
  invariant->add_option("input", input)->required();
  invariant->add_option("--max-iter", max_iter, "iteration budget");
  add_common(invariant, opts);

  auto* dynamics = app.add_subcommand("dynamics", "convergence-rate traces");
  dynamics->add_option("input", input)->required();
  dynamics->add_option("--steps", steps, "trace length T");
  dynamics->add_option("--max-iter", max_iter, "iteration budget");
  add_common(dynamics, opts);

  auto* gh = app.add_subcommand("gh", "approximation maps + curvature stability");
  gh->add_option("input", input)->required();
  add_common(gh, opts);

  auto* obsdiam = app.add_subcommand("obsdiam", "observable diameter lower bounds");
  obsdiam->add_option("input", input)->required();
  obsdiam->add_option("--kappa", kappa, "concentration parameter");
  obsdiam->add_option("--strategy", strategy,
                      "distance_family|mcshane_random|local_search|exhaustive_tiny");
  obsdiam->add_option("--budget", budget, "witness search budget");
  obsdiam->add_flag("--scalar", scalar, "also scan the observable-diameter scalar");
  add_common(obsdiam, opts);

  auto* levy = app.add_subcommand("levy", "lifted Levy-family experiment");
  levy->add_option("input", input)->required();
  levy->add_option("--kappa", kappa, "concentration parameter");
  levy->add_option("--strategy", strategy, "witness strategy");
  levy->add_option("--budget", budget, "witness search budget");
  add_common(levy, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInput;
  }

  try {
    if (validate->parsed()) return cmd_validate(input, opts);
    if (curvature->parsed()) return cmd_curvature(input, opts);
    if (lift->parsed()) return cmd_lift(input, opts, verify, export_space);
    if (invariant->parsed()) return cmd_invariant(input, opts, max_iter);
    if (dynamics->parsed()) return cmd_dynamics(input, opts, steps, max_iter);
    if (gh->parsed()) return cmd_gh(input, opts);
    if (obsdiam->parsed()) return cmd_obsdiam(input, opts, kappa, strategy, budget, scalar);
    if (levy->parsed()) return cmd_levy(input, opts, kappa, strategy, budget);
    throw crl::UnknownCommand("none");
  } catch (const crl::ValidationError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const crl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
