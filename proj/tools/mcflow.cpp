// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "mcflow/analysis.hpp"
#include "mcflow/error.hpp"
#include "mcflow/flow.hpp"
#include "mcflow/gronwall.hpp"
#include "mcflow/io.hpp"
#include "mcflow/mesh_gen.hpp"
#include "mcflow/monitors.hpp"
#include "mcflow/oracle.hpp"
#include "mcflow/rescale.hpp"
#include "mcflow/svg.hpp"
#include "mcflow/trajectory_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mcflow;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void emit(const json& report, const std::string& out) {
  const std::string text = report.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
    return;
  }
  const fs::path p(out);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  io::write_text(p, text);
}

int verdict(bool pass) { return pass ? 0 : kExitFail; }

Vec3 to_vec3(const std::vector<double>& v) {
  if (v.size() != 3) raise(ErrorKind::InvalidArgument, "expected three comma-separated coordinates");
  return {v[0], v[1], v[2]};
}

// const | random | a | a2 | path to a CSV column.
ScalarField make_field(const std::string& spec, const DiscreteHypersurface& s, std::mt19937_64& rng) {
  if (spec == "const") return ScalarField::constant(s.vertex_count(), 1.0);
  if (spec == "random") return random_field(s, rng);
  if (spec == "a") return ScalarField(std::vector<double>(s.a_norm().begin(), s.a_norm().end()));
  if (spec == "a2") return ScalarField(std::vector<double>(s.a_squared().begin(), s.a_squared().end()));
  return io::read_field_csv(spec);
}

std::vector<DiscreteHypersurface> read_meshes(const std::vector<std::string>& paths) {
  std::vector<DiscreteHypersurface> out;
  for (const auto& p : paths) out.push_back(io::read_surface(p));
  return out;
}

std::vector<FunctionalSpec> parse_functionals(const std::vector<std::string>& names) {
  std::vector<FunctionalSpec> out;
  for (const auto& n : names) {
    FunctionalSpec s = FunctionalSpec::parse(n);
    s.validate();
    out.push_back(s);
  }
  return out;
}

struct FlowOptions {
  std::string input;
  std::string out;
  bool until_singular = false;
  double t_end = std::numeric_limits<double>::infinity();
  std::string scheme = "semi-implicit";
  FlowConfig config;
  bool no_remesh = false;
  std::vector<std::string> functionals{"mixed:4,4", "sublog", "super"};
  AnalysisParams analysis;
  std::uint64_t seed = 0;
};

void add_analysis_options(CLI::App* cmd, AnalysisParams& a) {
  cmd->add_option("--cn", a.c_n, "Sobolev constant c_n")->capture_default_str();
  cmd->add_option("--c0", a.c0, "smallness constant c0")->capture_default_str();
  cmd->add_option("--c", a.c, "Gronwall constant c (<= 0 selects the keybound estimate)")->capture_default_str();
  cmd->add_option("--tau1", a.tau1, "start time of the Gronwall chain")->capture_default_str();
  cmd->add_option("--q-sob", a.q_sob, "Sobolev exponent for n = 2")->capture_default_str();
}

int flow_run(FlowOptions& o) {
  FlowConfig cfg = o.config;
  cfg.scheme = parse_scheme(o.scheme);
  cfg.t_end = o.until_singular ? std::numeric_limits<double>::infinity() : o.t_end;
  if (o.no_remesh) cfg.remesh.enabled = false;
  cfg.validate();
  parse_functionals(o.functionals);
  const DiscreteHypersurface initial = io::read_surface(o.input);

  fs::create_directories(o.out);
  DirectoryLock lock(o.out);
  FlowTrajectory t = run(initial, cfg);
  if (t.status == TerminalStatus::SingularityDetected) {
    try {
      t.singular_fit = estimate_singular_time(t);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientData) throw;
    }
  }
  RunManifest m;
  m.analysis = o.analysis;
  m.functionals = o.functionals;
  m.inputs.push_back({fs::absolute(o.input).lexically_normal().string(), io::sha256_file(o.input)});
  m.provenance["command"] = "flow run";
  m.provenance["seed"] = std::to_string(o.seed);
  write_trajectory(o.out, t, m);

  json summary{{"out", o.out},
               {"status", to_string(t.status)},
               {"final_time", t.final_time()},
               {"records", t.records.size()},
               {"remesh_events", t.remesh_events.size()}};
  summary["estimated_T"] = t.singular_fit ? json(t.singular_fit->singular_time) : json(nullptr);
  if (t.singular_fit) summary["rate_exponent"] = t.singular_fit->rate_exponent;
  emit(summary, "");
  return 0;
}

struct MonitorOptions {
  std::string traj;
  std::vector<std::string> functionals;
  double threshold = 0.5;
  double lambda = 0.0;
  double c_lambda = 0.0;
  std::string csv_dir;
  std::string out;
};

int flow_monitor(const MonitorOptions& o) {
  const LoadedTrajectory loaded = read_trajectory(o.traj);
  const FlowTrajectory& t = loaded.trajectory;
  const auto specs = parse_functionals(o.functionals.empty() ? loaded.manifest.functionals : o.functionals);
  json report{{"trajectory", o.traj}, {"dimension", t.dimension}, {"monitors", json::array()}};
  for (const auto& spec : specs) {
    const MonitorReport m = monitor(t, spec, o.threshold);
    json s = m.summary();
    s["criticality"] = spec.kind == FunctionalKind::MixedNorm ? json(to_string(criticality(t.dimension, spec.p, spec.q)))
                                                              : json(nullptr);
    report["monitors"].push_back(s);
    if (!o.csv_dir.empty()) {
      fs::create_directories(o.csv_dir);
      std::string name = spec.name();
      std::replace(name.begin(), name.end(), ':', '_');
      std::replace(name.begin(), name.end(), ',', '_');
      io::write_text(fs::path(o.csv_dir) / (name + ".csv"), m.csv());
    }
  }
  if (o.lambda > 0.0) {
    const double c = o.c_lambda > 0.0 ? o.c_lambda : default_c_lambda(o.lambda, loaded.manifest.analysis.c0);
    report["keybound"] = keybound_check(t, o.lambda, c).summary();
  }
  emit(report, o.out);
  return 0;
}

struct RescaleOptions {
  std::string traj;
  std::string out;
  double factor = 0.0;
  double normalize = 0.0;
  bool unit_time = false;
  double horizon = 0.0;
};

int flow_rescale(const RescaleOptions& o) {
  const int modes = (o.factor > 0.0) + (o.normalize > 0.0) + o.unit_time;
  if (modes != 1) raise(ErrorKind::InvalidArgument, "choose exactly one of --factor, --normalize, --unit-time");
  const LoadedTrajectory loaded = read_trajectory(o.traj);
  const FlowTrajectory& t = loaded.trajectory;
  RescaleSpec spec;
  if (o.factor > 0.0) {
    spec.mode = RescaleMode::Explicit;
    spec.factor = o.factor;
  } else if (o.normalize > 0.0) {
    spec.mode = RescaleMode::Normalizing;
    spec.c0 = o.normalize;
  } else {
    spec.mode = RescaleMode::UnitTime;
    spec.unit_time = o.horizon;
  }
  const double q = resolve_factor(t, spec);
  const FlowTrajectory scaled = rescale_trajectory(t, q);

  fs::create_directories(o.out);
  DirectoryLock lock(o.out);
  RunManifest m = loaded.manifest;
  m.provenance["command"] = "flow rescale";
  m.provenance["source"] = fs::absolute(o.traj).lexically_normal().string();
  m.provenance["factor"] = nlohmann::json(q).dump();
  m.provenance["mode"] = to_string(spec.mode);
  write_trajectory(o.out, scaled, m);

  json report{{"source", o.traj}, {"out", o.out}, {"factor", q}, {"mode", to_string(spec.mode)}};
  report["invariance"] = invariance_report(t, q).summary();
  if (spec.mode == RescaleMode::Normalizing) {
    // sup over 1/2 <= t <= 1 of sup|A| on the normalized flow
    double peak = 0.0;
    for (const StateRecord& r : scaled.records)
      if (r.time >= 0.5 && r.time <= 1.0) peak = std::max(peak, r.sup_a);
    report["normalized_mass"] = supercritical(scaled).final_cumulative();
    report["sup_a_on_half_unit"] = peak;
    report["smallness"] = smallness_scan(t).summary();
  }
  io::write_text(fs::path(o.out) / "rescale.json", report.dump(2) + "\n");
  emit(report, "");
  return 0;
}

struct GronwallOptions {
  std::string traj;
  std::optional<double> c;
  std::optional<double> tau1;
  double threshold = 0.5;
  bool series = false;
  std::string out;
};

int flow_gronwall(const GronwallOptions& o) {
  const LoadedTrajectory loaded = read_trajectory(o.traj);
  const double c = o.c.value_or(loaded.manifest.analysis.c);
  const double tau1 = o.tau1.value_or(loaded.manifest.analysis.tau1);
  const ExtensionReport r = extension_verdict(loaded.trajectory, c, tau1, o.threshold);
  json j = r.summary();
  if (!o.series) {
    for (const char* key : {"time", "f", "G", "h", "psi_tilde_h", "chain_lhs", "chain_rhs"}) j["gronwall"].erase(key);
  }
  j["trajectory"] = o.traj;
  j["pass"] = r.state.f_below_h && r.state.chain_holds;
  emit(j, o.out);
  return verdict(r.state.f_below_h && r.state.chain_holds);
}

struct VerifyOptions {
  std::vector<std::string> meshes;
  std::vector<std::string> trajs;
  std::string field;
  int trials = 200;
  std::uint64_t seed = 0;
  double c_n = 1.0;
  double q_sob = 10.0;
  bool estimate = false;
  std::vector<double> eps;
  double r = 4.0, s = 8.0, t = 2.0;
  std::vector<double> center;
  int centers = 0;
  double beta = 0.0;
  double q = 0.0;
  std::string out;
};

int verify_michael_simon(const VerifyOptions& o) {
  const auto surfaces = read_meshes(o.meshes);
  json j{{"c_n", o.c_n}};
  double worst = 0.0;
  if (!o.field.empty()) {
    std::mt19937_64 rng(o.seed);
    json per = json::array();
    for (std::size_t k = 0; k < surfaces.size(); ++k) {
      const double ratio = michael_simon_ratio(surfaces[k], make_field(o.field, surfaces[k], rng));
      per.push_back({{"mesh", o.meshes[k]}, {"ratio", ratio}});
      worst = std::max(worst, ratio);
    }
    j["field"] = o.field;
    j["results"] = per;
    j["ratio"] = worst;
  } else {
    const BatteryResult b = michael_simon_battery(surfaces, o.trials, o.seed);
    j["battery"] = b.to_json();
    j["seed"] = o.seed;
    worst = b.max;
  }
  const bool pass = worst <= o.c_n;
  j["pass"] = pass;
  emit(j, o.out);
  return verdict(pass);
}

int verify_lemma21(const VerifyOptions& o) {
  const auto surfaces = read_meshes(o.meshes);
  json j{{"c_n", o.c_n}, {"q_sob", o.q_sob}, {"mode", o.estimate ? "estimate" : "check"}};
  double minimal = 0.0;
  if (!o.field.empty()) {
    std::mt19937_64 rng(o.seed);
    json per = json::array();
    for (std::size_t k = 0; k < surfaces.size(); ++k) {
      const Lemma21Terms t = lemma21_terms(surfaces[k], make_field(o.field, surfaces[k], rng), o.q_sob);
      per.push_back({{"mesh", o.meshes[k]},
                     {"lhs", t.lhs},
                     {"gradient", t.gradient},
                     {"h_factor", t.h_factor},
                     {"l2_squared", t.l2_squared},
                     {"gap", t.gap(o.c_n)},
                     {"minimal_c_n", finite_or_null(t.minimal_constant())}});
      minimal = std::max(minimal, t.minimal_constant());
    }
    j["results"] = per;
  } else {
    const BatteryResult b = lemma21_battery(surfaces, o.trials, o.q_sob, o.seed);
    j["battery"] = b.to_json();
    j["seed"] = o.seed;
    minimal = b.max;
  }
  j["minimal_c_n"] = finite_or_null(minimal);
  const bool pass = o.estimate ? std::isfinite(minimal) : minimal <= o.c_n;
  j["pass"] = pass;
  emit(j, o.out);
  return verdict(pass);
}

int verify_interpolation(const VerifyOptions& o) {
  const auto surfaces = read_meshes(o.meshes);
  std::vector<double> eps = o.eps;
  if (eps.empty())
    for (int k = -6; k <= 6; ++k) eps.push_back(std::pow(10.0, 0.5 * k));
  constexpr double kSlack = 1e-9;
  json j{{"r", o.r}, {"s", o.s}, {"t", o.t}, {"eps", eps}, {"tolerance", kSlack}};
  double worst = std::numeric_limits<double>::infinity();
  if (!o.field.empty()) {
    std::mt19937_64 rng(o.seed);
    json per = json::array();
    for (std::size_t k = 0; k < surfaces.size(); ++k) {
      const ScalarField f = make_field(o.field, surfaces[k], rng);
      for (double e : eps) {
        const InterpolationTerms t = interpolation_terms(surfaces[k], f, e, o.r, o.s, o.t);
        per.push_back({{"mesh", o.meshes[k]}, {"eps", e}, {"gap", t.gap}, {"norm_r", t.norm_r}});
        worst = std::min(worst, t.norm_r > 0.0 ? t.gap / t.norm_r : t.gap);
      }
    }
    j["results"] = per;
  } else {
    const BatteryResult b = interpolation_battery(surfaces, o.trials, eps, o.r, o.s, o.t, o.seed);
    j["battery"] = b.to_json();
    j["seed"] = o.seed;
    worst = b.min;
  }
  j["min_relative_gap"] = worst;
  const bool pass = worst >= -kSlack;
  j["pass"] = pass;
  emit(j, o.out);
  return verdict(pass);
}

int verify_parabolic_sobolev(const VerifyOptions& o) {
  std::vector<LoadedTrajectory> loaded;
  for (const auto& p : o.trajs) loaded.push_back(read_trajectory(p));
  json j{{"c_n", o.c_n}, {"mode", o.estimate ? "estimate" : "check"}};
  double minimal = 0.0;
  if (o.field == "a") {
    json per = json::array();
    for (std::size_t k = 0; k < loaded.size(); ++k) {
      const FlowTrajectory& t = loaded[k].trajectory;
      const ParabolicSobolevTerms terms = parabolic_sobolev_terms(t, a_norm_series(t));
      per.push_back({{"trajectory", o.trajs[k]},
                     {"lhs", terms.lhs},
                     {"rhs_unit", terms.rhs_unit()},
                     {"gap", terms.gap(o.c_n)},
                     {"minimal_c_n", finite_or_null(terms.minimal_constant())}});
      minimal = std::max(minimal, terms.minimal_constant());
    }
    j["results"] = per;
  } else {
    if (!o.field.empty() && o.field != "random") raise(ErrorKind::InvalidArgument, "field must be 'a' or 'random'");
    std::vector<const FlowTrajectory*> ptrs;
    for (const auto& l : loaded) ptrs.push_back(&l.trajectory);
    const BatteryResult b = parabolic_sobolev_battery(ptrs, o.trials, o.seed);
    j["battery"] = b.to_json();
    j["seed"] = o.seed;
    minimal = b.max;
  }
  j["minimal_c_n"] = finite_or_null(minimal);
  const bool pass = o.estimate ? std::isfinite(minimal) : minimal <= o.c_n;
  j["pass"] = pass;
  emit(j, o.out);
  return verdict(pass);
}

// Random vertices of the snapshot nearest t = 1/2.
std::vector<Vec3> sample_centers(const FlowTrajectory& t, int count, std::mt19937_64& rng) {
  std::size_t best = 0;
  for (std::size_t k = 0; k < t.snapshots.size(); ++k)
    if (std::fabs(t.snapshots[k].time - 0.5) < std::fabs(t.snapshots[best].time - 0.5)) best = k;
  const auto& p = t.snapshots[best].positions;
  std::uniform_int_distribution<std::size_t> pick(0, p.size() - 1);
  std::vector<Vec3> out;
  for (int i = 0; i < count; ++i) out.push_back(p[pick(rng)]);
  return out;
}

int verify_harnack(const VerifyOptions& o) {
  if (o.center.empty() && o.centers <= 0) raise(ErrorKind::InvalidArgument, "give --center or --centers");
  std::mt19937_64 rng(o.seed);
  json per = json::array();
  bool pass = true;
  double minimal = 0.0;
  for (const auto& path : o.trajs) {
    const FlowTrajectory t = read_trajectory(path).trajectory;
    const int n = t.dimension;
    const double beta = o.beta > 0.0 ? o.beta : n + 3.0;
    const double q = o.q > 0.0 ? o.q : 0.5 * (n + 3);
    const auto surfaces = snapshot_surfaces(t);
    std::vector<Vec3> centers;
    if (!o.center.empty()) centers.push_back(to_vec3(o.center));
    else centers = sample_centers(t, o.centers, rng);
    for (const Vec3& c : centers) {
      json r = harnack_check(t, surfaces, c, beta, q, o.c_n).to_json();
      r["trajectory"] = path;
      pass = pass && r["pass"].get<bool>();
      if (r["minimal_c_n"].is_number()) minimal = std::max(minimal, r["minimal_c_n"].get<double>());
      per.push_back(r);
    }
  }
  json j{{"c_n", o.c_n}, {"results", per}, {"minimal_c_n", minimal}, {"pass", pass}};
  emit(j, o.out);
  return verdict(pass);
}

struct ConstantsOptions {
  int n = 2;
  double q = 2.5;
  double c0 = 1.0;
  double c1 = 1.0;
  double c_n = 1.0;
  double beta = 0.0;
  std::string traj;
  std::string out;
};

int constants(const ConstantsOptions& o) {
  const MoserConstants m = moser_constants(o.n, o.q, o.c0, o.c1, o.c_n);
  json j = m.to_json(o.beta > 0.0 ? std::optional<double>(o.beta) : std::nullopt);
  int code = 0;
  if (!o.traj.empty()) {
    const C1Bound b = c1_from_c0_bound(read_trajectory(o.traj).trajectory);
    j["c1_bound"] = b.to_json();
    code = verdict(b.pass);
  }
  emit(j, o.out);
  return code;
}

struct OracleOptions {
  int n = 2;
  double r0 = 1.0;
  double t = 0.0;
  std::vector<std::string> functionals{"supA", "mixed:4,4", "super", "sublog"};
  std::string traj;
  std::string out;
};

int oracle_sphere(const OracleOptions& o) {
  SphereSolution s{o.n, o.r0};
  s.validate();
  json j{{"n", o.n},
         {"r0", o.r0},
         {"t", o.t},
         {"singular_time", s.singular_time()},
         {"radius", s.radius(o.t)},
         {"mean_curvature", s.mean_curvature(o.t)},
         {"a_norm", s.a_norm(o.t)},
         {"measure", s.measure(o.t)}};
  json f = json::object();
  for (const auto& spec : parse_functionals(o.functionals))
    f[spec.name()] = {{"instantaneous", sphere_functional(s, o.t, spec, false)},
                      {"cumulative", sphere_functional(s, o.t, spec, true)}};
  j["functionals"] = f;
  emit(j, o.out);
  return 0;
}

int oracle_compare(const OracleOptions& o) {
  const FlowTrajectory t = read_trajectory(o.traj).trajectory;
  json j = compare(t, SphereSolution{t.dimension, o.r0}).summary();
  j["trajectory"] = o.traj;
  emit(j, o.out);
  return 0;
}

struct PlotOptions {
  std::string traj;
  std::string out;
  std::vector<std::string> functionals;
  int silhouettes = 6;
};

int report_plot(const PlotOptions& o) {
  const LoadedTrajectory loaded = read_trajectory(o.traj);
  const FlowTrajectory& t = loaded.trajectory;
  fs::create_directories(o.out);
  DirectoryLock lock(o.out);

  svg::Series sup{"sup|A|", {}, {}};
  for (const auto& r : t.records) {
    sup.x.push_back(r.time);
    sup.y.push_back(r.sup_a);
  }
  io::write_text(fs::path(o.out) / "sup_a.svg",
                 svg::line_chart({sup}, {.title = "sup |A|", .y_label = "sup|A|", .log_y = true}));

  std::vector<svg::Series> cumulative, instantaneous;
  for (const auto& spec : parse_functionals(o.functionals.empty() ? loaded.manifest.functionals : o.functionals)) {
    const MonitorReport m = monitor(t, spec);
    cumulative.push_back({spec.name(), m.time, m.cumulative});
    instantaneous.push_back({spec.name(), m.time, m.instantaneous});
  }
  io::write_text(fs::path(o.out) / "cumulative.svg",
                 svg::line_chart(cumulative, {.title = "cumulative monitors", .y_label = "value", .log_y = true}));
  io::write_text(fs::path(o.out) / "instantaneous.svg",
                 svg::line_chart(instantaneous, {.title = "spatial integrals", .y_label = "value", .log_y = true}));

  std::vector<std::size_t> picks;
  const std::size_t count = t.snapshots.size();
  const int k = std::max(1, o.silhouettes);
  for (int i = 0; i < k && count > 0; ++i) {
    const std::size_t idx = k == 1 ? 0 : (count - 1) * static_cast<std::size_t>(i) / static_cast<std::size_t>(k - 1);
    if (picks.empty() || picks.back() != idx) picks.push_back(idx);
  }
  io::write_text(fs::path(o.out) / "silhouettes.svg", svg::silhouettes(t, picks, "snapshot outlines"));
  emit({{"out", o.out}, {"files", {"sup_a.svg", "cumulative.svg", "instantaneous.svg", "silhouettes.svg"}}}, "");
  return 0;
}

struct GenerateOptions {
  std::string shape = "icosphere";
  int level = 4;
  int vertices = 2000;
  double radius = 1.0;
  std::vector<double> axes{1.0, 0.8, 0.6};
  double amplitude = 0.1;
  std::uint64_t seed = 0;
  std::string out;
};

int generate(const GenerateOptions& o) {
  DiscreteHypersurface s = [&] {
    if (o.shape == "icosphere") return make_icosphere(o.level, o.radius);
    if (o.shape == "ellipsoid") return make_ellipsoid(o.level, to_vec3(o.axes));
    if (o.shape == "bumpy") return make_bumpy_sphere(o.level, o.radius, o.amplitude, o.seed);
    if (o.shape == "circle") return make_circle(o.vertices, o.radius);
    if (o.shape == "ellipse") {
      if (o.axes.size() < 2) raise(ErrorKind::InvalidArgument, "ellipse needs two semi-axes");
      return make_ellipse(o.vertices, o.axes[0], o.axes[1]);
    }
    raise(ErrorKind::InvalidArgument, "unknown shape '" + o.shape + "'");
  }();
  const fs::path p(o.out);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  io::write_surface(p, s);
  emit({{"out", o.out}, {"dimension", s.dimension()}, {"vertices", s.vertex_count()}}, "");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean curvature flow simulation and verification toolkit"};
  app.set_config("--config", "", "TOML-style configuration file");
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  std::function<int()> action;

  // flow
  auto* flow = app.add_subcommand("flow", "run and post-process flows");
  flow->require_subcommand(1);

  FlowOptions fo;
  auto* run_cmd = flow->add_subcommand("run", "evolve a surface or curve and write a trajectory directory");
  run_cmd->add_option("--input", fo.input, "initial surface (.obj mesh or .curve.json)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", fo.out, "output trajectory directory")->required();
  auto* until = run_cmd->add_flag("--until-singular", fo.until_singular, "run until the curvature threshold is hit");
  run_cmd->add_option("--t-end", fo.t_end, "stop time")->excludes(until);
  run_cmd->add_option("--scheme", fo.scheme, "semi-implicit or explicit")->capture_default_str();
  run_cmd->add_option("--dt-max", fo.config.dt_max, "largest time step")->capture_default_str();
  run_cmd->add_option("--dt-min", fo.config.dt_min, "step underflow threshold")->capture_default_str();
  run_cmd->add_option("--c-stab", fo.config.c_stab, "step factor on 1 / max|A|^2")->capture_default_str();
  run_cmd->add_option("--a-max", fo.config.a_max, "absolute sup|A| threshold (0: use --a-max-factor)");
  run_cmd->add_option("--a-max-factor", fo.config.a_max_factor, "threshold relative to the initial sup|A|")
      ->capture_default_str();
  run_cmd->add_flag("--no-remesh", fo.no_remesh, "disable adaptive remeshing");
  run_cmd->add_option("--remesh-fraction", fo.config.remesh.target_fraction, "remesh sizing constant (0: derive)");
  run_cmd->add_option("--snapshot-stride", fo.config.snapshot_stride, "keep every k-th snapshot (1: all)")
      ->capture_default_str();
  run_cmd->add_option("--powers", fo.config.powers, "recorded powers of |A|")->delimiter(',')->capture_default_str();
  run_cmd->add_option("--functional", fo.functionals, "functionals recorded in the manifest")->delimiter(',');
  run_cmd->add_option("--seed", fo.seed, "seed recorded in the manifest")->capture_default_str();
  add_analysis_options(run_cmd, fo.analysis);
  run_cmd->callback([&] { action = [&] { return flow_run(fo); }; });

  MonitorOptions mo;
  auto* mon = flow->add_subcommand("monitor", "evaluate functionals and growth fits on a trajectory");
  mon->add_option("--traj", mo.traj, "trajectory directory")->required()->check(CLI::ExistingDirectory);
  mon->add_option("--functional", mo.functionals, "mixed:P,Q | sublog | sublog1 | super | supA")->delimiter(';');
  mon->add_option("--threshold", mo.threshold, "divergence threshold on the decay exponent")->capture_default_str();
  mon->add_option("--lambda", mo.lambda, "also run the keybound check from this time");
  mon->add_option("--c-lambda", mo.c_lambda, "keybound constant (0: default)");
  mon->add_option("--csv-dir", mo.csv_dir, "write one CSV series per functional here");
  mon->add_option("--out", mo.out, "JSON report path (default: stdout)");
  mon->callback([&] { action = [&] { return flow_monitor(mo); }; });

  RescaleOptions ro;
  auto* resc = flow->add_subcommand("rescale", "parabolically rescale a recorded trajectory");
  resc->add_option("--traj", ro.traj, "source trajectory directory")->required()->check(CLI::ExistingDirectory);
  resc->add_option("--out", ro.out, "output trajectory directory")->required();
  auto* g_mode = resc->add_option_group("mode", "rescaling mode");
  g_mode->add_option("--factor", ro.factor, "explicit factor Q");
  g_mode->add_option("--normalize", ro.normalize, "normalize supercritical mass to this c0");
  g_mode->add_flag("--unit-time", ro.unit_time, "map the horizon (default: final time) to 1");
  g_mode->require_option(1);
  resc->add_option("--horizon", ro.horizon, "horizon mapped to 1 by --unit-time");
  resc->callback([&] { action = [&] { return flow_rescale(ro); }; });

  GronwallOptions go;
  auto* gron = flow->add_subcommand("gronwall", "Gronwall comparison chain and extension verdict");
  gron->add_option("--traj", go.traj, "trajectory directory")->required()->check(CLI::ExistingDirectory);
  gron->add_option("--c", go.c, "comparison constant (default: manifest; <= 0 selects keybound)");
  gron->add_option("--tau1", go.tau1, "chain start time (default: manifest)");
  gron->add_option("--threshold", go.threshold, "divergence threshold on the decay exponent")->capture_default_str();
  gron->add_flag("--series", go.series, "include the full time series");
  gron->add_option("--out", go.out, "JSON report path (default: stdout)");
  gron->callback([&] { action = [&] { return flow_gronwall(go); }; });

  // verify
  auto* verify = app.add_subcommand("verify", "check inequalities on discrete data");
  verify->require_subcommand(1);
  VerifyOptions vo;
  auto add_common = [&](CLI::App* c) {
    c->add_option("--seed", vo.seed, "random seed")->capture_default_str();
    c->add_option("--out", vo.out, "JSON report path (default: stdout)");
  };
  auto add_mesh_field = [&](CLI::App* c) {
    c->add_option("--mesh", vo.meshes, "surface files")->required()->check(CLI::ExistingFile);
    c->add_option("--field", vo.field, "const | random | a | a2 | CSV path (omit for a random battery)");
    c->add_option("--trials", vo.trials, "random fields per surface")->capture_default_str();
  };

  auto* ms = verify->add_subcommand("michael-simon", "Michael-Simon Sobolev inequality");
  add_mesh_field(ms);
  add_common(ms);
  ms->add_option("--cn", vo.c_n, "constant the ratio is checked against")->capture_default_str();
  ms->callback([&] { action = [&] { return verify_michael_simon(vo); }; });

  auto* l21 = verify->add_subcommand("lemma21", "L^(2Q) Sobolev bound with the mean curvature term (n = 2)");
  add_mesh_field(l21);
  add_common(l21);
  l21->add_option("--cn", vo.c_n, "constant to check")->capture_default_str();
  l21->add_option("--q-sob", vo.q_sob, "Sobolev exponent")->capture_default_str();
  l21->add_flag("--estimate", vo.estimate, "report the minimal constant; pass iff finite");
  l21->callback([&] { action = [&] { return verify_lemma21(vo); }; });

  auto* ps = verify->add_subcommand("parabolic-sobolev", "spacetime Sobolev inequality on trajectories (n = 2)");
  ps->add_option("--traj", vo.trajs, "trajectory directories")->required()->check(CLI::ExistingDirectory);
  ps->add_option("--field", vo.field, "a (v = |A|) or random (battery)");
  ps->add_option("--trials", vo.trials, "random field series per trajectory")->capture_default_str();
  ps->add_option("--cn", vo.c_n, "constant to check")->capture_default_str();
  ps->add_flag("--estimate", vo.estimate, "report the minimal constant; pass iff finite");
  add_common(ps);
  ps->callback([&] { action = [&] { return verify_parabolic_sobolev(vo); }; });

  auto* ip = verify->add_subcommand("interpolation", "L^p interpolation inequality over an eps sweep");
  add_mesh_field(ip);
  add_common(ip);
  ip->add_option("--eps", vo.eps, "eps values (default: 10^(k/2), k = -6..6)")->delimiter(',');
  ip->add_option("--r", vo.r, "middle exponent")->capture_default_str();
  ip->add_option("--s", vo.s, "upper exponent")->capture_default_str();
  ip->add_option("--t", vo.t, "lower exponent")->capture_default_str();
  ip->callback([&] { action = [&] { return verify_interpolation(vo); }; });

  auto* hk = verify->add_subcommand("harnack", "sup bound on the inner region by the outer L^beta norm");
  hk->add_option("--traj", vo.trajs, "rescaled trajectory directories covering [0, 1]")
      ->required()
      ->check(CLI::ExistingDirectory);
  auto* hk_c = hk->add_option("--center", vo.center, "center x,y,z")->delimiter(',');
  hk->add_option("--centers", vo.centers, "number of random centers on the surface")->excludes(hk_c);
  hk->add_option("--beta", vo.beta, "norm exponent (default n + 3)");
  hk->add_option("--q", vo.q, "integrability of f (default (n + 3)/2)");
  hk->add_option("--cn", vo.c_n, "Sobolev constant")->capture_default_str();
  add_common(hk);
  hk->callback([&] { action = [&] { return verify_harnack(vo); }; });

  // constants
  ConstantsOptions co;
  auto* cst = app.add_subcommand("constants", "closed-form iteration constants");
  cst->add_option("--n", co.n, "dimension")->capture_default_str();
  cst->add_option("--q", co.q, "integrability exponent")->capture_default_str();
  cst->add_option("--c0", co.c0, "C0")->capture_default_str();
  cst->add_option("--c1", co.c1, "C1")->capture_default_str();
  cst->add_option("--cn", co.c_n, "c_n")->capture_default_str();
  cst->add_option("--beta", co.beta, "also evaluate C_b(beta)");
  cst->add_option("--traj", co.traj, "also check the C1 bound on this trajectory")->check(CLI::ExistingDirectory);
  cst->add_option("--out", co.out, "JSON report path (default: stdout)");
  cst->callback([&] { action = [&] { return constants(co); }; });

  // oracle
  auto* orc = app.add_subcommand("oracle", "shrinking sphere closed forms");
  orc->require_subcommand(1);
  OracleOptions oo;
  auto* sph = orc->add_subcommand("sphere", "closed-form values at time t");
  sph->add_option("--n", oo.n, "dimension")->capture_default_str();
  sph->add_option("--r0", oo.r0, "initial radius")->capture_default_str();
  sph->add_option("--t", oo.t, "time")->capture_default_str();
  sph->add_option("--functional", oo.functionals, "functionals")->delimiter(';');
  sph->add_option("--out", oo.out, "JSON report path (default: stdout)");
  sph->callback([&] { action = [&] { return oracle_sphere(oo); }; });
  auto* cmp = orc->add_subcommand("compare", "compare a sphere trajectory with the exact solution");
  cmp->add_option("--traj", oo.traj, "trajectory directory")->required()->check(CLI::ExistingDirectory);
  cmp->add_option("--r0", oo.r0, "initial radius")->capture_default_str();
  cmp->add_option("--out", oo.out, "JSON report path (default: stdout)");
  cmp->callback([&] { action = [&] { return oracle_compare(oo); }; });

  // report
  auto* rep = app.add_subcommand("report", "plots");
  rep->require_subcommand(1);
  PlotOptions po;
  auto* plot = rep->add_subcommand("plot", "SVG charts of monitors and snapshot outlines");
  plot->add_option("--traj", po.traj, "trajectory directory")->required()->check(CLI::ExistingDirectory);
  plot->add_option("--out", po.out, "output directory")->required();
  plot->add_option("--functional", po.functionals, "functionals (default: manifest)")->delimiter(';');
  plot->add_option("--silhouettes", po.silhouettes, "number of outlines")->capture_default_str();
  plot->callback([&] { action = [&] { return report_plot(po); }; });

  // generate
  GenerateOptions ge;
  auto* gen = app.add_subcommand("generate", "write a test surface");
  gen->add_option("--shape", ge.shape, "icosphere | ellipsoid | bumpy | circle | ellipse")->capture_default_str();
  gen->add_option("--level", ge.level, "subdivision level for meshes")->capture_default_str();
  gen->add_option("--vertices", ge.vertices, "vertex count for curves")->capture_default_str();
  gen->add_option("--radius", ge.radius, "radius")->capture_default_str();
  gen->add_option("--axes", ge.axes, "semi-axes")->delimiter(',');
  gen->add_option("--amplitude", ge.amplitude, "bump amplitude")->capture_default_str();
  gen->add_option("--seed", ge.seed, "bump seed")->capture_default_str();
  gen->add_option("--out", ge.out, "output file")->required();
  gen->callback([&] { action = [&] { return generate(ge); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  try {
    return action ? action() : kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
