#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "sfa/config.hpp"
#include "sfa/errors.hpp"
#include "sfa/experiments/experiments.hpp"
#include "sfa/json_io.hpp"
#include "sfa/kernels/kernels.hpp"

namespace {

using namespace sfa;

// Exit codes.
constexpr int kOk = 0;
constexpr int kCheckFailed = 1;  // an audit, Bellman check or rollout certificate failed
constexpr int kInfeasible = 2;   // synthesize-transition found no controller
constexpr int kBadInput = 3;     // unreadable or invalid configuration
constexpr int kInternal = 4;

struct Common {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool verbose = false;
};

void add_common(CLI::App* sub, Common& c, bool config_required = true) {
  auto* cfg = sub->add_option("--config", c.config, "Input JSON");
  if (config_required) cfg->required();
  cfg->check(CLI::ExistingFile);
  sub->add_option("--out", c.out, "Output path");
  sub->add_option("--seed", c.seed, "Seed for audits and rollouts")->capture_default_str();
  sub->add_option("--threads", c.threads, "Worker threads")->check(CLI::Range(1u, 1024u))->capture_default_str();
  sub->add_flag("--verbose", c.verbose, "Progress and diagnostics on stderr");
}

AuditOptions audit_options(std::uint64_t seed) {
  AuditOptions ao;
  ao.seed ^= seed * 0x9e3779b97f4a7c15ull;
  return ao;
}

void log(const Common& c, const std::string& msg) {
  if (c.verbose) std::cerr << msg << '\n';
}

void progress_to_stderr(BuildOptions& bo, const Common& c) {
  if (!c.verbose) return;
  bo.progress = [](std::size_t done, std::size_t total) {
    if (done == total || done % 16 == 0) std::fprintf(stderr, "\rsource cells %zu/%zu", done, total);
    if (done == total) std::fprintf(stderr, "\n");
  };
}

// Re-audits every edge and checks the Bellman inequality; prints what failed.
bool certify_graph(const AbstractionGraph& g, const ValueFunction& vf, const Common& c) {
  bool ok = true;
  const EdgeAuditSummary audit = audit_all_edges(g, audit_options(c.seed ^ 0xa0d17), c.threads);
  log(c, "re-audited " + std::to_string(audit.edges) + " edges, worst membership " +
             format_number(audit.worst_membership));
  if (audit.failed) {
    ok = false;
    std::cerr << audit.failed << " edges failed the audit\n";
    for (const auto& f : audit.failures) std::cerr << "  " << f << '\n';
  }
  const BellmanReport rep = check_bellman(g, vf);
  if (!rep.passed) {
    ok = false;
    std::cerr << "Bellman check failed on " << rep.violations.size() << " cells\n";
    for (std::size_t i = 0; i < rep.violations.size() && i < 20; ++i) std::cerr << "  " << rep.violations[i] << '\n';
  }
  return ok;
}

std::size_t finite_cells(const ValueFunction& vf) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < vf.values.size(); ++i) n += vf.finite(i);
  return n;
}

int cmd_synthesize(const Common& c, const std::string& dump_sdp) {
  const TransitionProblem p = transition_problem_from_json(read_json_file(c.config));
  if (!dump_sdp.empty()) write_json_file(dump_sdp, sdp::to_json(assemble_cost_program(p.data, p.cost)));
  const SynthesisResult res = synthesize_transition(p.data, p.cost);
  nlohmann::json out;
  out["status"] = sdp::to_string(res.status);
  out["message"] = res.diagnostics.message;
  out["phase1_margin"] = res.diagnostics.phase1_margin;
  int code = kInfeasible;
  if (res.status == sdp::SdpStatus::NumericalFailure) code = kCheckFailed;
  if (res.controller) {
    const AuditReport rep = audit_transition(*res.controller, p.data, p.cost, audit_options(c.seed));
    out["controller"] = controller_to_json(*res.controller);
    out["spectral_radius"] = closed_loop_spectral_radius(p.data.mode, res.controller->K);
    out["audit"] = {{"passed", rep.passed},
                    {"samples", rep.samples},
                    {"worst_membership", rep.worst_membership},
                    {"worst_input", rep.worst_input},
                    {"worst_cost_excess", rep.worst_cost_excess},
                    {"failure", rep.failure}};
    code = rep.passed ? kOk : kCheckFailed;
    std::printf("%s: cost bound %.10g, spectral radius %.6g, audit %s\n", sdp::to_string(res.status),
                res.controller->cost_bound, out["spectral_radius"].get<double>(), rep.passed ? "passed" : "FAILED");
  } else {
    std::printf("%s: %s\n", sdp::to_string(res.status), res.diagnostics.message.c_str());
  }
  if (c.out.empty()) {
    if (c.verbose) std::cerr << out.dump(2) << '\n';
  } else {
    write_json_file(c.out, out);
  }
  return code;
}

int cmd_build(const Common& c) {
  const Scenario sc = scenario_from_json(read_json_file(c.config));
  BuildOptions bo;
  bo.threads = c.threads;
  bo.audit = audit_options(c.seed);
  progress_to_stderr(bo, c);
  const AbstractionGraph g = build_abstraction(sc.system, sc.cost, build_cover(sc.system.domain(), sc.cell_radius),
                                               sc.goal, sc.obstacles, bo);
  if (!c.out.empty()) save_abstraction(g, c.out);
  for (const auto& w : g.warnings) log(c, "warning: " + w);
  const ValueFunction vf = reverse_dijkstra(g);
  const BellmanReport rep = check_bellman(g, vf);
  std::printf("cells %zu, edges %zu, goal cells %zu, blocked %zu, finite values %zu, %.2f s\n", g.cover.size(),
              g.edges.size(), g.goal_ids.size(), g.blocked_ids.size(), finite_cells(vf), g.stats.seconds);
  std::printf("candidate pairs %zu, infeasible %zu, solver failures %zu, audit rejections %zu, Bellman %s\n",
              g.stats.candidate_pairs, g.stats.infeasible, g.stats.numerical_failures, g.stats.audit_rejections,
              rep.passed ? "passed" : "FAILED");
  return g.stats.audit_rejections == 0 && rep.passed ? kOk : kCheckFailed;
}

int cmd_plan(const Common& c) {
  const AbstractionGraph g = load_abstraction(c.config);
  const ValueFunction vf = reverse_dijkstra(g);
  if (!c.out.empty()) write_values_csv(vf, g.cover, c.out);
  const bool ok = certify_graph(g, vf, c);
  std::printf("cells %zu, finite values %zu, checks %s\n", g.cover.size(), finite_cells(vf), ok ? "passed" : "FAILED");
  return ok ? kOk : kCheckFailed;
}

struct SimulateArgs {
  std::string abstraction;
  std::string values;
  std::optional<std::size_t> rollouts;
  std::vector<double> x0;
  std::string noise = "uniform";
  std::string dynamics = "cell";
  std::size_t max_steps = 1000;
};

int cmd_simulate(const Common& c, const SimulateArgs& a) {
  const Scenario sc = scenario_from_json(read_json_file(c.config));
  const AbstractionGraph g = [&] {
    if (!a.abstraction.empty()) return load_abstraction(a.abstraction);
    BuildOptions bo;
    bo.threads = c.threads;
    bo.audit = audit_options(c.seed);
    progress_to_stderr(bo, c);
    return build_abstraction(sc.system, sc.cost, build_cover(sc.system.domain(), sc.cell_radius), sc.goal,
                             sc.obstacles, bo);
  }();
  const ValueFunction vf = a.values.empty() ? reverse_dijkstra(g) : read_values_csv(a.values, g);
  bool ok = certify_graph(g, vf, c);

  Vector x0 = sc.x0;
  if (!a.x0.empty()) {
    if (a.x0.size() != static_cast<std::size_t>(x0.size())) throw ConfigError("--x0: wrong dimension");
    for (std::size_t i = 0; i < a.x0.size(); ++i) x0(static_cast<Eigen::Index>(i)) = a.x0[i];
  }
  RolloutOptions ro;
  ro.max_steps = a.max_steps;
  ro.noise = a.noise == "adversarial" ? NoiseMode::Adversarial : NoiseMode::Uniform;
  ro.dynamics = a.dynamics == "state" ? DynamicsMode::StateMode : DynamicsMode::CellMode;
  const double v0 = concretize_value(vf, g.cover, x0);
  if (!std::isfinite(v0)) {
    std::cerr << "x0 has no finite value\n";
    return kCheckFailed;
  }
  const auto records = run_rollouts(g, vf, x0, c.seed, a.rollouts.value_or(sc.rollouts), ro, c.threads);
  if (!c.out.empty()) write_csv(trajectories_table(records), c.out);
  std::size_t certified = 0;
  double worst = 0;
  for (const auto& r : records) {
    certified += r.certified;
    worst = std::max(worst, r.rollout.total_cost);
    if (!r.certified) std::cerr << "seed " << r.seed << ": " << r.failure << '\n';
  }
  ok = ok && certified == records.size();
  std::printf("v(x0) %.10g, rollouts %zu, certified %zu, max true cost %.10g\n", v0, records.size(), certified, worst);
  return ok ? kOk : kCheckFailed;
}

int cmd_sweep(const Common& c) {
  const SweepSpec spec = c.config.empty() ? SweepSpec{} : sweep_spec_from_json(read_json_file(c.config));
  const auto rows = run_single_transition_sweep(spec, audit_options(c.seed));
  const Table t = sweep_table(rows);
  if (c.out.empty()) {
    std::cout << table_to_csv(t);
  } else {
    write_csv(t, c.out);
  }
  std::size_t feasible = 0, audited = 0;
  for (const auto& r : rows) {
    feasible += r.feasible();
    audited += r.feasible() && r.audit_passed;
  }
  const SweepTrends tr = check_sweep_trends(spec, rows);
  std::fprintf(stderr, "%zu points, %zu feasible, %zu audited; monotone in nu %s, in eta %s, spectrum shrinks %s\n",
               rows.size(), feasible, audited, tr.monotone_in_nu ? "yes" : "no", tr.monotone_in_eta ? "yes" : "no",
               tr.spectrum_shrinks ? "yes" : "no");
  for (const auto& f : tr.failures) log(c, "  " + f);
  return audited == feasible ? kOk : kCheckFailed;
}

int cmd_optimal_control(const Common& c) {
  const Scenario sc = scenario_from_json(read_json_file(c.config));
  ExperimentOptions opt;
  opt.threads = c.threads;
  opt.seed = c.seed;
  opt.build.audit = audit_options(c.seed);
  progress_to_stderr(opt.build, c);
  const ExperimentResult res = run_optimal_control_experiment(sc, opt);
  write_experiment_artifacts(res, c.out.empty() ? "optimal_control_out" : c.out);
  std::size_t certified = 0;
  double worst = 0;
  for (const auto& r : res.rollouts) {
    certified += r.certified;
    worst = std::max(worst, r.rollout.total_cost);
  }
  std::printf("edges %zu, build %.2f s, v(x0) %.10g, rollouts %zu/%zu certified, max true cost %.10g\n",
              res.graph.edges.size(), res.graph.stats.seconds, res.value_at_x0, certified, res.rollouts.size(), worst);
  for (const auto& f : res.failures) std::cerr << "failure: " << f << '\n';
  return res.passed() ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"State-feedback abstractions of noisy piecewise-affine systems"};
  app.require_subcommand(1);

  Common synth_c, build_c, plan_c, sim_c, sweep_c, oc_c;
  std::string dump_sdp;
  SimulateArgs sim_a;

  auto* synth = app.add_subcommand("synthesize-transition", "Synthesize and audit one transition controller");
  add_common(synth, synth_c);
  synth->add_option("--dump-sdp", dump_sdp, "Write the assembled cost program as JSON");

  auto* build = app.add_subcommand("build-abstraction", "Build the abstraction graph of a scenario");
  add_common(build, build_c);

  auto* plan = app.add_subcommand("plan", "Value function of a stored abstraction (values CSV)");
  add_common(plan, plan_c);

  auto* sim = app.add_subcommand("simulate", "Closed-loop rollouts under the abstraction policy");
  add_common(sim, sim_c);
  sim->add_option("--abstraction", sim_a.abstraction, "Stored abstraction (built from --config if absent)")
      ->check(CLI::ExistingFile);
  sim->add_option("--values", sim_a.values, "Values CSV from `plan`")->check(CLI::ExistingFile);
  sim->add_option("--rollouts", sim_a.rollouts, "Number of seeds (default: scenario 'seeds')");
  sim->add_option("--x0", sim_a.x0, "Initial state (default: scenario 'x0')")->delimiter(',');
  sim->add_option("--noise", sim_a.noise, "uniform or adversarial")
      ->check(CLI::IsMember({"uniform", "adversarial"}))
      ->capture_default_str();
  sim->add_option("--dynamics", sim_a.dynamics, "cell (mode of the policy cell) or state (mode of x)")
      ->check(CLI::IsMember({"cell", "state"}))
      ->capture_default_str();
  sim->add_option("--max-steps", sim_a.max_steps, "Step limit per rollout")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Single-transition sweep over nu, eta and omega_max");
  add_common(sweep, sweep_c, false);

  auto* oc = app.add_subcommand("optimal-control", "Build, plan, simulate and write all artifacts");
  add_common(oc, oc_c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kBadInput;
  }

  const Common* active = nullptr;
  for (const Common* c : {&synth_c, &build_c, &plan_c, &sim_c, &sweep_c, &oc_c}) {
    if (c->verbose) active = c;
  }
  if (active) std::cerr << "kernels: " << kernels::backend_name(kernels::active_backend()) << '\n';

  try {
    if (*synth) return cmd_synthesize(synth_c, dump_sdp);
    if (*build) return cmd_build(build_c);
    if (*plan) return cmd_plan(plan_c);
    if (*sim) return cmd_simulate(sim_c, sim_a);
    if (*sweep) return cmd_sweep(sweep_c);
    if (*oc) return cmd_optimal_control(oc_c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kBadInput;
  } catch (const StorageError& e) {
    std::cerr << "storage error: " << e.what() << '\n';
    return kBadInput;
  } catch (const CertificationError& e) {
    std::cerr << "certification error: " << e.what() << '\n';
    return kCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
