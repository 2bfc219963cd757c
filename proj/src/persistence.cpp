#include <json.hpp>

#include <fstream>
#include <sstream>

#include "nldiff/io.hpp"

namespace nldiff {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string() + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << contents;
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string timeseries_header() {
  return "t,dt,l1,l2,l2pd,linf,mass_balance_residual,picard_iters,picard_ratio,weighted_h2,"
         "monotone_ok,positive_ok,potential_bounds_ok,tail_ok,status\n";
}

std::string timeseries_row(const StepReport& rep) {
  std::string row;
  row.reserve(256);
  const auto num = [&](double v) {
    row += format_double(v);
    row += ',';
  };
  const auto flag = [&](bool b) {
    row += b ? '1' : '0';
    row += ',';
  };
  num(rep.t);
  num(rep.dt);
  num(rep.l1);
  num(rep.l2);
  num(rep.l2pd);
  num(rep.linf);
  num(rep.mass_balance_residual);
  row += std::to_string(rep.picard_iters);
  row += ',';
  num(rep.picard_ratio);
  num(rep.weighted_h2);
  flag(rep.monotone_ok);
  flag(rep.positive_ok);
  flag(rep.potential_bounds_ok);
  flag(rep.tail_ok);
  row += to_string(rep.status);
  row += '\n';
  return row;
}

std::string format_timeseries(const Trajectory& traj) {
  std::string out = timeseries_header();
  for (const auto& rep : traj.reports) out += timeseries_row(rep);
  return out;
}

void emit_timeseries(const Trajectory& traj, const std::filesystem::path& path) {
  write_file(path, format_timeseries(traj));
}

namespace {

json stats_to_json(const InitialStats& s) {
  return json{{"l1", s.l1},         {"l2", s.l2},         {"l2pd", s.l2pd},
              {"linf", s.linf},     {"weighted_h2", s.weighted_h2},
              {"d2_est", s.d2_est}, {"tracked", s.tracked}};
}

InitialStats stats_from_json(const json& j) {
  InitialStats s;
  s.l1 = j.at("l1").get<double>();
  s.l2 = j.at("l2").get<double>();
  s.l2pd = j.at("l2pd").get<double>();
  s.linf = j.at("linf").get<double>();
  s.weighted_h2 = j.at("weighted_h2").get<double>();
  s.d2_est = j.at("d2_est").get<double>();
  s.tracked = j.at("tracked").get<std::vector<double>>();
  return s;
}

}  // namespace

std::string format_snapshot(const SolverState& state, const InitialStats& u0_stats,
                            const RunConfig& cfg) {
  if (!state.u.finite()) {
    throw std::invalid_argument("snapshot of a non-finite field is not representable");
  }
  const auto& grid = state.u.grid();
  json j;
  j["format"] = "nldiff-snapshot";
  j["version"] = kSnapshotVersion;
  j["config_hash"] = config_hash(cfg);
  j["grid"] = {{"domain", to_string(grid.kind())}, {"n", grid.size()}, {"R", grid.radius()}};
  j["t"] = state.t;
  j["dt"] = state.dt;
  j["step"] = state.step;
  j["clean_steps"] = state.clean_steps;
  j["square_integral"] = state.square_integral;
  j["u0_stats"] = stats_to_json(u0_stats);
  j["values"] = std::vector<double>(state.u.values().begin(), state.u.values().end());
  return j.dump() + "\n";
}

void emit_snapshot(const SolverState& state, const InitialStats& u0_stats, const RunConfig& cfg,
                   const std::filesystem::path& path) {
  // Write-then-rename so an interrupted write never replaces a good snapshot.
  auto tmp = path;
  tmp += ".tmp";
  write_file(tmp, format_snapshot(state, u0_stats, cfg));
  std::filesystem::rename(tmp, path);
}

Snapshot parse_snapshot(const std::string& text, const RunConfig& cfg) {
  using Kind = SnapshotError::Kind;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SnapshotError(Kind::Corrupt, std::string("corrupt snapshot: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "nldiff-snapshot") {
      throw SnapshotError(Kind::Corrupt, "not a snapshot record");
    }
    const int version = j.at("version").get<int>();
    if (version != kSnapshotVersion) {
      throw SnapshotError(Kind::VersionMismatch, "snapshot version " + std::to_string(version) +
                                                     " != supported " + std::to_string(kSnapshotVersion));
    }
    Snapshot snap;
    snap.config_hash = j.at("config_hash").get<std::string>();
    const std::string expected = config_hash(cfg);
    if (snap.config_hash != expected) {
      throw SnapshotError(Kind::HashMismatch, "config hash mismatch: snapshot " + snap.config_hash +
                                                  ", current config " + expected);
    }
    const auto& g = j.at("grid");
    GridPtr grid = make_grid(domain_kind_from_string(g.at("domain").get<std::string>()),
                             g.at("n").get<std::size_t>(), g.at("R").get<double>());
    snap.state.u = RadialField(grid, j.at("values").get<std::vector<double>>());
    snap.state.t = j.at("t").get<double>();
    snap.state.dt = j.at("dt").get<double>();
    snap.state.step = j.at("step").get<std::size_t>();
    snap.state.clean_steps = j.at("clean_steps").get<int>();
    snap.state.square_integral = j.at("square_integral").get<double>();
    snap.u0_stats = stats_from_json(j.at("u0_stats"));
    return snap;
  } catch (const SnapshotError&) {
    throw;
  } catch (const std::exception& e) {
    throw SnapshotError(Kind::Corrupt, std::string("corrupt snapshot: ") + e.what());
  }
}

Snapshot load_snapshot(const std::filesystem::path& path, const RunConfig& cfg) {
  return parse_snapshot(read_file(path), cfg);
}

std::string emit_manifest(const RunManifest& m) {
  json outputs = json::array();
  for (const auto& o : m.outputs) outputs.push_back({{"path", o.path}, {"checksum", o.checksum}});
  json j{{"version", m.version},
         {"config", emit_config(m.config)},
         {"config_hash", config_hash(m.config)},
         {"outputs", outputs},
         {"terminal_status", {{"status", to_string(m.terminal_status)},
                              {"reason", m.reason},
                              {"wall_seconds", m.wall_seconds}}}};
  return j.dump(2) + "\n";
}

RunManifest parse_manifest(const std::string& text) {
  const json j = json::parse(text);
  RunManifest m;
  m.version = j.at("version").get<std::string>();
  m.config = parse_config(j.at("config").get<std::string>());
  for (const auto& o : j.at("outputs")) {
    m.outputs.push_back({o.at("path").get<std::string>(), o.at("checksum").get<std::string>()});
  }
  const auto& status = j.at("terminal_status");
  m.terminal_status = step_status_from_string(status.at("status").get<std::string>());
  m.reason = status.at("reason").get<std::string>();
  m.wall_seconds = status.at("wall_seconds").get<double>();
  return m;
}

OutputRecord record_output(const std::filesystem::path& path) {
  return {path.filename().string(), hex64(fnv1a64(read_file(path)))};
}

}  // namespace nldiff
