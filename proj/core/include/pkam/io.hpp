#pragma once

// Torus files (JSON), run configuration (TOML) and iteration logs (CSV).

#include "pkam/diophantine.hpp"
#include "pkam/fourier.hpp"
#include "pkam/geometry.hpp"
#include "pkam/models.hpp"
#include "pkam/newton.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pkam {

/// Serializes K. Only modes k lexicographically >= 0 are written.
std::string torus_to_json(const TorusEmbedding& K);

/// Parses a torus document. Missing "rho" defaults to 0 and appends a
/// message to `warnings` (or stderr when null). Throws SchemaError or
/// DimensionMismatch.
TorusEmbedding torus_from_json(const std::string& text,
                               std::vector<std::string>* warnings = nullptr);

void save_torus(const std::string& path, const TorusEmbedding& K);
TorusEmbedding load_torus(const std::string& path, std::vector<std::string>* warnings = nullptr);

struct FamilySpec {
  std::string name = "coupled_standard";
  double strength = 0.0;
  double coupling = 0.0;
  double drift = 0.0;
  double y_bound = 50.0;
  Vec lambda0;
  Vec lambda_ref;  ///< parameters of the exact reference map
};

/// "coupled_standard" (analytic Jacobians) or "coupled_standard_fd" (the
/// same map wrapped with finite-difference Jacobians).
MapFamily make_family(const FamilySpec& spec);

/// Families with analytic Jacobians.
std::vector<std::string> builtin_families();

struct StructureSpec {
  bool standard_J = true;
  Mat J;
  bool standard_primitive = true;  ///< alpha = sum y dx
  Mat P;                           ///< a(u) = P u otherwise
};

PresymplecticStructure make_structure(const StructureSpec& spec, int d, int n);

struct RunConfig {
  int d = 1;
  int n = 1;
  FamilySpec family;
  StructureSpec structure;
  Vec omega;
  double sigma = 0.0;
  int scan_radius = 0;
  std::vector<int> truncation;
  Vec y0;
  double rho = 0.0;
  std::string initial_torus;  ///< torus file to start from, empty for flat

  SolveConfig solve;

  std::string knob = "strength";
  std::vector<double> schedule;

  std::uint64_t seed = 1;
  int threads = 0;

  Frequency frequency;  ///< filled by the load-time scan
};

/// Parses and validates a TOML run config; relative paths resolve against
/// base_dir. Runs the Diophantine scan and rejects resonant frequencies.
RunConfig parse_run_config(const std::string& toml_text, const std::string& base_dir = ".");
RunConfig load_run_config(const std::string& path);

/// Fully defaulted configuration as TOML.
std::string echo_config(const RunConfig& config);

/// The starting torus of a run: the configured file or the flat torus.
TorusEmbedding initial_torus(const RunConfig& config);

/// The family with `knob` set to `value`.
MapFamily family_at(const RunConfig& config, double value);

/// CSV log: "# "-prefixed header comment lines, then one row per step.
std::string csv_columns();
std::string csv_row(const StepReport& report);
void write_csv_log(std::ostream& out, const std::string& header,
                   const std::vector<StepReport>& reports);

}  // namespace pkam
