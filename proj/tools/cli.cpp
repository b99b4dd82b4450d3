#include "cochainflow_cli/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cochainflow/complex.hpp"
#include "cochainflow/experiments.hpp"
#include "cochainflow/flow.hpp"
#include "cochainflow/form_parser.hpp"
#include "cochainflow/hodge.hpp"
#include "cochainflow/mesh_io.hpp"
#include "cochainflow/whitney.hpp"

namespace cochainflow {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json num_json(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

struct Globals {
  std::string metric = "whitney";
  int quadrature_degree = 8;
  double tolerance = 1e-8;
  int threads = 1;
  std::uint64_t seed = 0;

  QuadratureOptions quadrature() const {
    QuadratureOptions q;
    q.degree = quadrature_degree;
    q.tolerance = tolerance;
    return q;
  }
  ExperimentOptions experiment() const {
    ExperimentOptions o;
    o.metric = parse_metric(metric);
    o.quadrature = quadrature();
    o.threads = threads;
    return o;
  }
};

/// Where a mesh comes from: a file, a generated torus, or the icosahedron.
struct MeshSource {
  std::string in;
  int torus = 0;
  int dim = 2;
  bool icosahedron = false;
  int subdivide = 0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--in", in, "Mesh file");
    cmd->add_option("--torus", torus, "Generate the flat unit torus with N cells per axis")->check(CLI::PositiveNumber);
    cmd->add_option("--dim", dim, "Torus dimension (2 or 3)")->check(CLI::Range(2, 3));
    cmd->add_flag("--icosahedron", icosahedron, "Use the icosahedral 2-sphere");
    cmd->add_option("--subdivide", subdivide, "Midpoint subdivisions applied after loading")->check(CLI::NonNegativeNumber);
  }

  SimplicialComplex load() const {
    const int sources = (in.empty() ? 0 : 1) + (torus > 0 ? 1 : 0) + (icosahedron ? 1 : 0);
    if (sources != 1) throw ValidationError("give exactly one of --in, --torus, --icosahedron");
    SimplicialComplex complex = !in.empty() ? load_complex(in)
                                : torus > 0 ? build_flat_torus(torus, dim)
                                            : build_icosahedron();
    for (int i = 0; i < subdivide; ++i) complex = cochainflow::subdivide(complex);
    return complex;
  }
};

/// A destination that is either a file or the given stream ("-").
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw ValidationError("cannot open '" + path + "' for writing");
      stream_ = file_.get();
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

struct Context {
  std::vector<std::string> invocation;
  std::ostream& out;
  std::ostream& err;
  Globals globals;
};

json summary_header(const Context& ctx, const std::string& kind) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["tool"] = "cochain-flow";
  j["version"] = COCHAINFLOW_VERSION;
  j["kind"] = kind;
  j["invocation"] = ctx.invocation;
  j["metric"] = ctx.globals.metric;
  j["quadrature_degree"] = ctx.globals.quadrature_degree;
  j["tolerance"] = ctx.globals.tolerance;
  return j;
}

/// --summary if given, else stdout when the CSV went to a file, else stderr.
void write_summary(Context& ctx, const json& j, const std::string& summary_path, const std::string& out_path) {
  const bool csv_on_stdout = out_path.empty() || out_path == "-";
  if (!summary_path.empty()) {
    Sink sink(summary_path, ctx.out);
    *sink << j.dump(2) << "\n";
  } else {
    (csv_on_stdout ? ctx.err : ctx.out) << j.dump(2) << "\n";
  }
}

void csv_preamble(std::ostream& os, const std::string& kind, const std::string& header) {
  os << "# cochain-flow " << kind << " schema " << kSchemaVersion << "\n" << header << "\n";
}

json fit_json(const RefinementStudy& study) {
  json j;
  j["slope"] = study.fit.valid ? json(study.fit.slope) : json(nullptr);
  j["intercept"] = study.fit.valid ? json(study.fit.intercept) : json(nullptr);
  j["points_used"] = study.fit.points_used;
  j["exact"] = study.exact;
  return j;
}

json counts_json(const SimplicialComplex& complex) {
  json counts = json::array();
  for (int k = 0; k <= complex.dim(); ++k) counts.push_back(complex.size(k));
  return counts;
}

std::vector<NamedForm> test_forms(const std::vector<std::string>& exprs, int dim) {
  if (exprs.empty()) return default_test_forms();
  std::vector<NamedForm> out;
  for (const auto& e : exprs) out.push_back({e, parse_form(e, dim)});
  return out;
}

json oracle_json(const OracleCheck& o) {
  return json{{"dd_zero", o.dd_zero},
              {"codifferential_squared_zero", o.codifferential_squared_zero},
              {"reference_coclosed", o.reference_coclosed},
              {"projection_idempotent", o.projection_idempotent},
              {"nonlinear_term_exact", o.nonlinear_term_exact},
              {"purely_viscous", o.purely_viscous},
              {"reference", o.reference.to_string()}};
}

void write_weak_csv(std::ostream& os, const std::string& kind, const std::vector<WeakRow>& rows) {
  csv_preamble(os, kind, "resolution,eta,test_form_id,discrete_pairing,reference_pairing,gap");
  for (const auto& r : rows) {
    os << r.resolution << "," << num(r.eta) << "," << csv_quote(r.test_id) << "," << num(r.discrete) << ","
       << num(r.reference) << "," << num(r.gap) << "\n";
  }
}

// ---------------------------------------------------------------- mesh

struct MeshCommand {
  MeshSource source;
  std::string out;
  std::string report;
  bool info = false;

  int run(Context& ctx) const {
    const SimplicialComplex complex = source.load();
    if (!out.empty()) save_complex(out, complex);
    json j = summary_header(ctx, "mesh");
    j["dim"] = complex.dim();
    j["ambient_dim"] = complex.ambient_dim();
    j["periodic"] = complex.periodic();
    j["counts"] = counts_json(complex);
    j["euler_characteristic"] = complex.euler_characteristic();
    j["closed"] = complex.is_closed();
    j["components"] = complex.component_count();
    std::optional<MeshQuality> quality;
    if (complex.embedded()) {
      quality = mesh_quality(complex);
      j["eta"] = quality->eta;
      j["fullness"] = quality->fullness;
      j["min_edge_length"] = min_edge_length(complex);
    }
    if (!report.empty()) {
      Sink sink(report, ctx.out);
      *sink << j.dump(2) << "\n";
    }
    if (info || (out.empty() && report.empty())) {
      static const char* names[] = {"V", "E", "F", "T"};
      std::ostream& os = ctx.out;
      os << "dim " << complex.dim() << " ambient " << complex.ambient_dim()
         << (complex.periodic() ? " periodic" : "") << "\n";
      for (int k = 0; k <= complex.dim(); ++k) os << (k ? " " : "") << names[k] << "=" << complex.size(k);
      os << "\n";
      os << "euler_characteristic " << complex.euler_characteristic() << "\n";
      os << "closed " << (complex.is_closed() ? "yes" : "no") << "\n";
      os << "components " << complex.component_count() << "\n";
      if (quality) os << "eta " << num(quality->eta) << "\nfullness " << num(quality->fullness) << "\n";
    }
    return kExitOk;
  }
};

// ---------------------------------------------------------------- hodge

struct HodgeCommand {
  MeshSource source;
  std::string report;
  int samples = 3;

  int run(Context& ctx) const {
    const SimplicialComplex complex = source.load();
    const InnerProductModel model(complex, parse_metric(ctx.globals.metric));
    const CoclosedProjector projector(model);
    json j = summary_header(ctx, "hodge");
    j["counts"] = counts_json(complex);

    const HarmonicBasis basis = harmonic_basis(model);
    j["harmonic_dimension"] = basis.vectors.size();
    j["eigenvalues"] = basis.eigenvalues;
    j["largest_eigenvalue"] = basis.largest_eigenvalue;
    j["threshold"] = basis.threshold;
    j["spectral_gap"] = num_json(basis.gap);
    double harmonic_delta = 0, harmonic_adjoint = 0;
    for (const auto& h : basis.vectors) {
      harmonic_delta = std::max(harmonic_delta, model.norm(2, model.coboundary(1) * h.values()));
      harmonic_adjoint = std::max(harmonic_adjoint, model.norm(0, model.adjoint_coboundary(0, h.values())));
    }

    double reconstruction = 0, orthogonality = 0, projection = 0, idempotence = 0;
    int cg_iterations = 0;
    for (int s = 0; s < samples; ++s) {
      const Cochain c(complex, 1, seeded_uniform(complex.size(1), ctx.globals.seed + static_cast<std::uint64_t>(s)));
      const double norm = model.norm(c);
      const HodgeDecomposition h = hodge_decompose(projector, c);
      cg_iterations = std::max(cg_iterations, h.cg_iterations);
      const Eigen::VectorXd sum = h.exact.values() + h.coexact.values() + h.harmonic.values();
      reconstruction = std::max(reconstruction, model.norm(1, Eigen::VectorXd(sum - c.values())) / norm);
      const double n2 = norm * norm;
      orthogonality = std::max({orthogonality, std::abs(model.inner(h.exact, h.coexact)) / n2,
                                std::abs(model.inner(h.exact, h.harmonic)) / n2,
                                std::abs(model.inner(h.coexact, h.harmonic)) / n2});
      const Eigen::VectorXd p = projector.project(c.values());
      projection = std::max(projection, model.norm(0, model.adjoint_coboundary(0, p)) / norm);
      idempotence = std::max(idempotence, model.norm(1, Eigen::VectorXd(projector.project(p) - p)) / norm);
    }
    j["residuals"] = {{"samples", samples},
                      {"reconstruction", reconstruction},
                      {"orthogonality", orthogonality},
                      {"projection_delta_star", projection},
                      {"projection_idempotence", idempotence},
                      {"harmonic_delta", harmonic_delta},
                      {"harmonic_delta_star", harmonic_adjoint},
                      {"cg_iterations", cg_iterations}};
    Sink sink(report, ctx.out);
    *sink << j.dump(2) << "\n";
    return kExitOk;
  }
};

// ---------------------------------------------------------------- simulate

struct SimulateCommand {
  MeshSource source;
  double nu = 0.0;
  double dt = 0.0;
  double t_final = 1.0;
  std::string init;
  std::string integrator = "rk4";
  int reproject = 1;
  int stride = 1;
  std::string out = "-";
  std::string state_out;
  std::string summary;

  int run(Context& ctx) const {
    const SimplicialComplex complex = source.load();
    const InnerProductModel model(complex, parse_metric(ctx.globals.metric));
    const FlowSystem system(model);
    FlowParams params;
    params.nu = nu;
    params.dt = dt > 0 ? dt : default_time_step(complex, nu);
    params.t_final = t_final;
    params.integrator = parse_integrator(integrator);
    params.reprojection_period = reproject;
    params.stride = stride;
    params.record_states = !state_out.empty();
    params.validate();
    const std::string init_text = init.empty() ? "random:" + std::to_string(ctx.globals.seed) : init;
    const Cochain initial = initial_condition(system, init_text);
    const Trajectory traj = system.run(initial, params);

    {
      Sink sink(out, ctx.out);
      csv_preamble(*sink, "simulate", "t,energy,vorticity_sq,steady_residual,coclosed_residual");
      for (const auto& r : traj.diagnostics) {
        *sink << num(r.t) << "," << num(r.energy) << "," << num(r.vorticity_sq) << "," << num(r.steady_residual)
              << "," << num(r.coclosed_residual) << "\n";
      }
    }
    if (!state_out.empty()) {
      json s;
      s["schema_version"] = kSchemaVersion;
      s["degree"] = 1;
      s["size"] = complex.size(1);
      s["states"] = json::array();
      for (const auto& st : traj.states) {
        s["states"].push_back({{"t", st.t}, {"values", std::vector<double>(st.c.data(), st.c.data() + st.c.size())}});
      }
      Sink sink(state_out, ctx.out);
      *sink << s.dump() << "\n";
    }

    json j = summary_header(ctx, "simulate");
    j["nu"] = nu;
    j["dt"] = params.dt;
    j["t_final"] = t_final;
    j["integrator"] = to_string(params.integrator);
    j["init"] = init_text;
    j["steps"] = traj.steps;
    j["blew_up"] = traj.blew_up;
    if (traj.blew_up) j["error"] = traj.error;
    const double e0 = traj.diagnostics.front().energy;
    const double e1 = traj.diagnostics.back().energy;
    j["initial_energy"] = e0;
    j["final_energy"] = e1;
    j["relative_energy_change"] = e0 > 0 ? json((e1 - e0) / e0) : json(nullptr);
    write_summary(ctx, j, summary, out);
    if (traj.blew_up) {
      ctx.err << "error: " << traj.error << "\n";
      return kExitNumerical;
    }
    return kExitOk;
  }
};

// ---------------------------------------------------------------- studies

struct StudyOutput {
  std::vector<int> resolutions{4, 8, 16, 32};
  std::string out = "-";
  std::string summary;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--resolutions", resolutions, "Torus resolutions, e.g. 4,8,16,32")->delimiter(',');
    cmd->add_option("--out", out, "CSV output ('-' for stdout)");
    cmd->add_option("--summary", summary, "JSON summary output");
  }
};

void write_study(Context& ctx, const RefinementStudy& study, const StudyOutput& o, json j) {
  {
    Sink sink(o.out, ctx.out);
    csv_preamble(*sink, study.kind, "resolution,eta,error");
    for (const auto& p : study.points) *sink << p.resolution << "," << num(p.eta) << "," << num(p.error) << "\n";
  }
  j.update(fit_json(study));
  write_summary(ctx, j, o.summary, o.out);
}

struct ConvergeWrCommand {
  std::string form;
  StudyOutput output;

  int run(Context& ctx) const {
    const AnalyticForm w = parse_form(form, 2);
    const RefinementStudy study = converge_wr(w, output.resolutions, ctx.globals.experiment());
    json j = summary_header(ctx, study.kind);
    j["form"] = w.to_string();
    write_study(ctx, study, output, j);
    return kExitOk;
  }
};

struct ConvergeCupCommand {
  std::string form1;
  std::string form2;
  StudyOutput output;

  int run(Context& ctx) const {
    const AnalyticForm a = parse_form(form1, 2);
    const AnalyticForm b = parse_form(form2, 2);
    const RefinementStudy study = converge_cup(a, b, output.resolutions, ctx.globals.experiment());
    json j = summary_header(ctx, study.kind);
    j["form1"] = a.to_string();
    j["form2"] = b.to_string();
    write_study(ctx, study, output, j);
    return kExitOk;
  }
};

struct ConvergeWeakCommand {
  std::string form = "taylor-green";
  double nu = 0.01;
  double wobble = 0.05;
  std::vector<std::string> tests;
  StudyOutput output;

  int run(Context& ctx) const {
    const AnalyticForm w = parse_form(form, 2);
    const auto battery = test_forms(tests, 2);
    const WeakConvergenceReport report =
        converge_weak_flow(w, nu, battery, output.resolutions, ctx.globals.experiment(), wobble);
    {
      Sink sink(output.out, ctx.out);
      write_weak_csv(*sink, "converge-weak", report.rows);
    }
    json j = summary_header(ctx, "converge-weak");
    j["form"] = w.to_string();
    j["nu"] = nu;
    j["wobble"] = wobble;
    j["oracle"] = oracle_json(report.oracle);
    json mono = json::object();
    for (std::size_t t = 0; t < battery.size(); ++t) mono[battery[t].id] = static_cast<bool>(report.monotone[t]);
    j["monotone"] = mono;
    j["all_monotone"] = report.all_monotone();
    write_summary(ctx, j, output.summary, output.out);
    return kExitOk;
  }
};

struct SteadyCommand {
  std::string form;
  double nu = 0.0;
  std::vector<std::string> tests;
  std::string pairings_out;
  StudyOutput output;

  int run(Context& ctx) const {
    const AnalyticForm w = parse_form(form, 2);
    const auto battery = test_forms(tests, 2);
    const SteadyScanReport report = steady_state_scan(w, nu, output.resolutions, battery, ctx.globals.experiment());
    {
      Sink sink(output.out, ctx.out);
      csv_preamble(*sink, "steady", "resolution,eta,residual,relative_residual");
      for (const auto& r : report.rows) {
        *sink << r.resolution << "," << num(r.eta) << "," << num(r.residual) << "," << num(r.relative_residual) << "\n";
      }
    }
    if (!pairings_out.empty()) {
      Sink sink(pairings_out, ctx.out);
      write_weak_csv(*sink, "steady-pairings", report.pairings);
    }
    json j = summary_header(ctx, "steady");
    j["form"] = w.to_string();
    j["nu"] = nu;
    j["oracle"] = oracle_json(report.oracle);
    j["smooth_residual"] = report.smooth_residual;
    write_summary(ctx, j, output.summary, output.out);
    return kExitOk;
  }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite cochain models of incompressible flow on simplicial complexes", "cochain-flow"};
  app.set_version_flag("--version", std::string(COCHAINFLOW_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  Context ctx{std::vector<std::string>(args.begin() + (args.empty() ? 0 : 1), args.end()), out, err, {}};
  Globals& g = ctx.globals;
  app.add_option("--metric", g.metric, "Inner product model")->check(CLI::IsMember({"toy", "whitney"}));
  app.add_option("--quadrature-degree", g.quadrature_degree, "Starting quadrature exactness degree")
      ->check(CLI::Range(1, 64));
  app.add_option("--tolerance", g.tolerance, "Relative quadrature tolerance under degree doubling")
      ->check(CLI::PositiveNumber);
  app.add_option("--threads", g.threads, "Meshes processed concurrently in studies")->check(CLI::Range(1, 64));
  app.add_option("--seed", g.seed, "Seed for random cochains");

  MeshCommand mesh;
  auto* mesh_cmd = app.add_subcommand("mesh", "Generate, convert or inspect a mesh");
  mesh.source.add_to(mesh_cmd);
  mesh_cmd->add_option("--out", mesh.out, "Write the mesh to this file");
  mesh_cmd->add_option("--report", mesh.report, "Write a JSON report ('-' for stdout)");
  mesh_cmd->add_flag("--info", mesh.info, "Print simplex counts and quality");

  HodgeCommand hodge;
  auto* hodge_cmd = app.add_subcommand("hodge", "Harmonic space and Hodge decomposition residuals");
  hodge.source.add_to(hodge_cmd);
  hodge_cmd->add_option("--report", hodge.report, "JSON report ('-' for stdout)");
  hodge_cmd->add_option("--samples", hodge.samples, "Random cochains decomposed for the residuals")
      ->check(CLI::Range(1, 1000));

  SimulateCommand sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Integrate the cochain flow");
  sim.source.add_to(sim_cmd);
  sim_cmd->add_option("--nu", sim.nu, "Viscosity")->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--dt", sim.dt, "Time step (default 0.1 h^2 / max(nu, h))");
  sim_cmd->add_option("--t-final", sim.t_final, "Final time")->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--init", sim.init, "taylor-green | random:SEED | harmonic:K | form expression");
  sim_cmd->add_option("--integrator", sim.integrator, "rk4 or euler")->check(CLI::IsMember({"rk4", "euler"}));
  sim_cmd->add_option("--reproject", sim.reproject, "Reproject every N steps")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--stride", sim.stride, "Diagnostics every N steps")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--out", sim.out, "Diagnostics CSV ('-' for stdout)");
  sim_cmd->add_option("--state-out", sim.state_out, "States JSON at every recorded time");
  sim_cmd->add_option("--summary", sim.summary, "JSON summary output");

  SteadyCommand steady;
  auto* steady_cmd = app.add_subcommand("steady", "Steady-state residual of R(w) under refinement");
  steady_cmd->add_option("--form", steady.form, "1-form expression")->required();
  steady_cmd->add_option("--nu", steady.nu, "Viscosity")->check(CLI::NonNegativeNumber);
  steady_cmd->add_option("--test-form", steady.tests, "Test form for weak pairings (repeatable)");
  steady_cmd->add_option("--pairings-out", steady.pairings_out, "Weak pairings CSV");
  steady.output.add_to(steady_cmd);

  ConvergeWrCommand wr;
  auto* wr_cmd = app.add_subcommand("converge-wr", "Refinement study of |WRw - w|");
  wr_cmd->add_option("--form", wr.form, "Form expression")->required();
  wr.output.add_to(wr_cmd);

  ConvergeCupCommand cupc;
  auto* cup_cmd = app.add_subcommand("converge-cup", "Refinement study of |W(Ra u Rb) - a ^ b|");
  cup_cmd->add_option("--form1", cupc.form1, "First form")->required();
  cup_cmd->add_option("--form2", cupc.form2, "Second form")->required();
  cupc.output.add_to(cup_cmd);

  ConvergeWeakCommand weak;
  auto* weak_cmd = app.add_subcommand("converge-weak", "Weak convergence of the discrete flow vector");
  weak_cmd->add_option("--form", weak.form, "1-form expression");
  weak_cmd->add_option("--nu", weak.nu, "Viscosity")->check(CLI::NonNegativeNumber);
  weak_cmd->add_option("--test-form", weak.tests, "Test form (repeatable; default battery of four)");
  weak_cmd->add_option("--wobble", weak.wobble, "Relative slack at the coarsest pair")->check(CLI::NonNegativeNumber);
  weak.output.add_to(weak_cmd);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  try {
    if (mesh_cmd->parsed()) return mesh.run(ctx);
    if (hodge_cmd->parsed()) return hodge.run(ctx);
    if (sim_cmd->parsed()) return sim.run(ctx);
    if (steady_cmd->parsed()) return steady.run(ctx);
    if (wr_cmd->parsed()) return wr.run(ctx);
    if (cup_cmd->parsed()) return cupc.run(ctx);
    if (weak_cmd->parsed()) return weak.run(ctx);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  err << app.help();
  return kExitValidation;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace cochainflow
