// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcflow/trajectory_io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <limits>

#include "mcflow/error.hpp"
#include "mcflow/io.hpp"
#include "mcflow/monitors.hpp"

namespace mcflow {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or(const json& j, const char* key, double fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return it->get<double>();
}

std::string snapshot_name(std::size_t record, int dimension) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "t_%06zu", record);
  return std::string(buf) + io::surface_extension(dimension);
}

json record_json(const StateRecord& r) {
  return {{"time", r.time},
          {"dt", r.dt},
          {"vertex_count", r.vertex_count},
          {"sup_a", r.sup_a},
          {"sup_h", r.sup_h},
          {"measure", r.measure},
          {"power_integrals", r.power_integrals},
          {"log2_integral", r.log2_integral},
          {"log1_integral", r.log1_integral},
          {"supercritical_integral", r.supercritical_integral},
          {"h_integral", r.h_integral}};
}

StateRecord record_from_json(const json& j) {
  StateRecord r;
  r.time = j.at("time").get<double>();
  r.dt = j.at("dt").get<double>();
  r.vertex_count = j.at("vertex_count").get<std::size_t>();
  r.sup_a = j.at("sup_a").get<double>();
  r.sup_h = j.at("sup_h").get<double>();
  r.measure = j.at("measure").get<double>();
  r.power_integrals = j.at("power_integrals").get<std::vector<double>>();
  r.log2_integral = j.at("log2_integral").get<double>();
  r.log1_integral = j.at("log1_integral").get<double>();
  r.supercritical_integral = j.at("supercritical_integral").get<double>();
  r.h_integral = j.at("h_integral").get<double>();
  return r;
}

}  // namespace

json to_json(const FlowConfig& c) {
  return {{"scheme", to_string(c.scheme)},
          {"c_stab", c.c_stab},
          {"dt_max", c.dt_max},
          {"dt_min", c.dt_min},
          {"a_max", c.a_max},
          {"a_max_factor", c.a_max_factor},
          {"t_end", finite_or_null(c.t_end)},
          {"remesh",
           {{"enabled", c.remesh.enabled},
            {"target_fraction", c.remesh.target_fraction},
            {"split_ratio", c.remesh.split_ratio},
            {"collapse_ratio", c.remesh.collapse_ratio},
            {"relax_iterations", c.remesh.relax_iterations},
            {"max_vertices", c.remesh.max_vertices}}},
          {"snapshot_stride", c.snapshot_stride},
          {"powers", c.powers}};
}

FlowConfig flow_config_from_json(const json& j) {
  FlowConfig c;
  if (j.contains("scheme")) c.scheme = parse_scheme(j.at("scheme").get<std::string>());
  c.c_stab = number_or(j, "c_stab", c.c_stab);
  c.dt_max = number_or(j, "dt_max", c.dt_max);
  c.dt_min = number_or(j, "dt_min", c.dt_min);
  c.a_max = number_or(j, "a_max", c.a_max);
  c.a_max_factor = number_or(j, "a_max_factor", c.a_max_factor);
  c.t_end = number_or(j, "t_end", std::numeric_limits<double>::infinity());
  if (j.contains("remesh")) {
    const json& r = j.at("remesh");
    c.remesh.enabled = r.value("enabled", c.remesh.enabled);
    c.remesh.target_fraction = number_or(r, "target_fraction", c.remesh.target_fraction);
    c.remesh.split_ratio = number_or(r, "split_ratio", c.remesh.split_ratio);
    c.remesh.collapse_ratio = number_or(r, "collapse_ratio", c.remesh.collapse_ratio);
    c.remesh.relax_iterations = r.value("relax_iterations", c.remesh.relax_iterations);
    c.remesh.max_vertices = r.value("max_vertices", c.remesh.max_vertices);
  }
  c.snapshot_stride = j.value("snapshot_stride", c.snapshot_stride);
  if (j.contains("powers")) c.powers = j.at("powers").get<std::vector<double>>();
  return c;
}

json to_json(const AnalysisParams& a) {
  return {{"c_n", a.c_n}, {"c0", a.c0}, {"c", a.c}, {"tau1", a.tau1}, {"q_sob", a.q_sob}};
}

AnalysisParams analysis_params_from_json(const json& j) {
  AnalysisParams a;
  a.c_n = number_or(j, "c_n", a.c_n);
  a.c0 = number_or(j, "c0", a.c0);
  a.c = number_or(j, "c", a.c);
  a.tau1 = number_or(j, "tau1", a.tau1);
  a.q_sob = number_or(j, "q_sob", a.q_sob);
  return a;
}

json manifest_json(const FlowTrajectory& t, const RunManifest& m) {
  json j;
  j["tool_version"] = m.tool_version;
  j["config"] = to_json(t.config);
  j["analysis"] = to_json(m.analysis);
  j["functionals"] = m.functionals;
  j["inputs"] = json::array();
  for (const auto& in : m.inputs) j["inputs"].push_back({{"path", in.path}, {"sha256", in.sha256}});
  j["provenance"] = m.provenance;
  j["dimension"] = t.dimension;
  j["powers"] = t.powers;
  j["status"] = to_string(t.status);
  j["status_detail"] = t.status_detail;
  j["a_max_threshold"] = t.a_max_threshold;
  j["remesh_target_fraction"] = t.remesh_target_fraction;
  if (t.singular_fit) {
    j["estimated_T"] = t.singular_fit->singular_time;
    j["singular_fit"] = {{"singular_time", t.singular_fit->singular_time},
                         {"rate_exponent", t.singular_fit->rate_exponent},
                         {"log_prefactor", t.singular_fit->log_prefactor},
                         {"residual", t.singular_fit->residual},
                         {"samples", t.singular_fit->samples}};
  } else {
    j["estimated_T"] = nullptr;
    j["singular_fit"] = nullptr;
  }
  j["records"] = json::array();
  for (const auto& r : t.records) j["records"].push_back(record_json(r));

  json cumulative = json::object();
  json monitors = json::object();
  for (const auto& name : m.functionals) {
    try {
      MonitorReport rep = monitor(t, FunctionalSpec::parse(name));
      cumulative[name] = rep.cumulative;
      monitors[name] = rep.summary();
    } catch (const Error&) {
      cumulative[name] = nullptr;
      monitors[name] = nullptr;
    }
  }
  j["cumulative"] = cumulative;
  j["monitors"] = monitors;

  j["remesh_events"] = json::array();
  for (const auto& e : t.remesh_events)
    j["remesh_events"].push_back({{"record", e.record},
                                  {"splits", e.splits},
                                  {"collapses", e.collapses},
                                  {"vertices_before", e.vertices_before},
                                  {"vertices_after", e.vertices_after},
                                  {"integrals_before", e.integrals_before},
                                  {"integrals_after", e.integrals_after},
                                  {"max_relative_change", e.max_relative_change}});
  j["snapshots"] = json::array();
  for (const auto& s : t.snapshots)
    j["snapshots"].push_back(
        {{"record", s.record}, {"time", s.time}, {"file", "snapshots/" + snapshot_name(s.record, t.dimension)}});
  return j;
}

std::string series_csv(const FlowTrajectory& t) {
  std::string out = "t,dt,vertices,sup_a,sup_h,measure";
  for (double p : t.powers) {
    char buf[48];
    std::snprintf(buf, sizeof buf, ",int_a%g", p);
    out += buf;
  }
  out += ",log2_integral,log1_integral,supercritical_integral,h_integral\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, ",%.17g", v);
    out += buf;
  };
  for (const auto& r : t.records) {
    std::snprintf(buf, sizeof buf, "%.17g", r.time);
    out += buf;
    put(r.dt);
    out += "," + std::to_string(r.vertex_count);
    put(r.sup_a);
    put(r.sup_h);
    put(r.measure);
    for (double v : r.power_integrals) put(v);
    put(r.log2_integral);
    put(r.log1_integral);
    put(r.supercritical_integral);
    put(r.h_integral);
    out += "\n";
  }
  return out;
}

void write_trajectory(const fs::path& dir, const FlowTrajectory& t, const RunManifest& m) {
  fs::create_directories(dir / "snapshots");
  for (const auto& s : t.snapshots)
    io::write_surface(dir / "snapshots" / snapshot_name(s.record, t.dimension), s.surface());
  io::write_text(dir / "series.csv", series_csv(t));
  io::write_text(dir / "manifest.json", manifest_json(t, m).dump(1) + "\n");
}

LoadedTrajectory read_trajectory(const fs::path& dir) {
  json j;
  try {
    j = json::parse(io::read_text(dir / "manifest.json"));
  } catch (const json::exception& e) {
    raise(ErrorKind::Io, "malformed manifest in " + dir.string() + ": " + e.what());
  }
  LoadedTrajectory out;
  try {
    RunManifest& m = out.manifest;
    m.tool_version = j.at("tool_version").get<std::string>();
    m.analysis = analysis_params_from_json(j.at("analysis"));
    m.functionals = j.at("functionals").get<std::vector<std::string>>();
    for (const auto& in : j.at("inputs"))
      m.inputs.push_back({in.at("path").get<std::string>(), in.at("sha256").get<std::string>()});
    m.provenance = j.at("provenance").get<std::map<std::string, std::string>>();

    FlowTrajectory& t = out.trajectory;
    t.config = flow_config_from_json(j.at("config"));
    t.dimension = j.at("dimension").get<int>();
    t.powers = j.at("powers").get<std::vector<double>>();
    t.status = parse_status(j.at("status").get<std::string>());
    t.status_detail = j.at("status_detail").get<std::string>();
    t.a_max_threshold = j.at("a_max_threshold").get<double>();
    t.remesh_target_fraction = j.at("remesh_target_fraction").get<double>();
    if (!j.at("singular_fit").is_null()) {
      const json& f = j.at("singular_fit");
      t.singular_fit = SingularTimeFit{f.at("singular_time").get<double>(), f.at("rate_exponent").get<double>(),
                                       f.at("log_prefactor").get<double>(), f.at("residual").get<double>(),
                                       f.at("samples").get<std::size_t>()};
    }
    for (const auto& r : j.at("records")) t.records.push_back(record_from_json(r));
    for (const auto& e : j.at("remesh_events")) {
      RemeshEvent ev;
      ev.record = e.at("record").get<std::size_t>();
      ev.splits = e.at("splits").get<int>();
      ev.collapses = e.at("collapses").get<int>();
      ev.vertices_before = e.at("vertices_before").get<std::size_t>();
      ev.vertices_after = e.at("vertices_after").get<std::size_t>();
      ev.integrals_before = e.at("integrals_before").get<std::vector<double>>();
      ev.integrals_after = e.at("integrals_after").get<std::vector<double>>();
      ev.max_relative_change = e.at("max_relative_change").get<double>();
      t.remesh_events.push_back(std::move(ev));
    }
    std::shared_ptr<const FaceList> previous;
    for (const auto& s : j.at("snapshots")) {
      DiscreteHypersurface surf = io::read_surface(dir / s.at("file").get<std::string>());
      std::shared_ptr<const FaceList> faces = surf.shared_faces();
      if (previous && *previous == *faces) faces = previous;
      previous = faces;
      t.snapshots.push_back(Snapshot{s.at("record").get<std::size_t>(), s.at("time").get<double>(),
                                     surf.positions(), faces});
    }
  } catch (const json::exception& e) {
    raise(ErrorKind::Io, "malformed manifest in " + dir.string() + ": " + e.what());
  }
  return out;
}

DirectoryLock::DirectoryLock(const fs::path& dir) : lock_path_(dir / ".mcflow.lock") {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) raise(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
  fd_ = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd_ < 0) raise(ErrorKind::Io, "output directory " + dir.string() + " is locked by another invocation");
  const std::string pid = std::to_string(::getpid()) + "\n";
  if (::write(fd_, pid.data(), pid.size()) < 0) {
    // The lock is held by existence; the pid is informational.
  }
}

DirectoryLock::~DirectoryLock() {
  if (fd_ >= 0) {
    ::close(fd_);
    std::error_code ec;
    fs::remove(lock_path_, ec);
  }
}

}  // namespace mcflow
