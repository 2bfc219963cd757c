#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nldiff/scenarios.hpp"
#include "nldiff/trajectory.hpp"

namespace nldiff {

struct GridSpec {
  DomainKind kind = DomainKind::WholeSpaceTruncated;
  std::size_t n = 1025;
  double radius = 8.0;

  bool operator==(const GridSpec&) const = default;
};

/// Everything a run document can set.
struct RunConfig {
  SolverConfig solver;
  GridSpec grid;
  InitialDataSpec data;

  bool operator==(const RunConfig&) const = default;
};

/// Parses a YAML (or JSON) mapping with flat keys, e.g. `{alpha: 0.4, family: gaussian}`.
/// Missing keys take their defaults; unknown keys and invalid values throw ConfigError
/// naming the key ("document" for syntax errors).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical YAML with every key, numbers in shortest round-trip form.
std::string emit_config(const RunConfig& cfg);

/// FNV-1a 64 over the canonical form of every dynamics-relevant field
/// (everything except t_end and snapshot_stride), as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

// Time series --------------------------------------------------------------

inline constexpr std::size_t kTimeseriesColumns = 15;

std::string timeseries_header();
std::string timeseries_row(const StepReport& rep);
std::string format_timeseries(const Trajectory& traj);
/// Writes header + one row per report. Throws std::runtime_error on I/O failure.
void emit_timeseries(const Trajectory& traj, const std::filesystem::path& path);

// Snapshots ------------------------------------------------------------------

inline constexpr int kSnapshotVersion = 1;

class SnapshotError : public std::runtime_error {
 public:
  enum class Kind { VersionMismatch, HashMismatch, Corrupt };
  SnapshotError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct Snapshot {
  SolverState state;
  InitialStats u0_stats;
  std::string config_hash;
};

std::string format_snapshot(const SolverState& state, const InitialStats& u0_stats,
                            const RunConfig& cfg);
void emit_snapshot(const SolverState& state, const InitialStats& u0_stats, const RunConfig& cfg,
                   const std::filesystem::path& path);

/// Parses a snapshot and checks its version and that it was produced under `cfg`.
Snapshot parse_snapshot(const std::string& text, const RunConfig& cfg);
Snapshot load_snapshot(const std::filesystem::path& path, const RunConfig& cfg);

// Manifest -------------------------------------------------------------------

inline constexpr const char* kManifestVersion = "1";

struct OutputRecord {
  std::string path;
  std::string checksum;  ///< fnv1a64 of the file bytes

  bool operator==(const OutputRecord&) const = default;
};

struct RunManifest {
  std::string version = kManifestVersion;
  RunConfig config;
  std::vector<OutputRecord> outputs;
  StepStatus terminal_status = StepStatus::Ok;
  std::string reason;
  double wall_seconds = 0.0;

  bool operator==(const RunManifest&) const = default;
};

std::string emit_manifest(const RunManifest& manifest);
RunManifest parse_manifest(const std::string& text);

OutputRecord record_output(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace nldiff
