#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ringform/analysis.hpp"
#include "ringform/linearization.hpp"

namespace ringform::app {

using Json = nlohmann::ordered_json;

enum class Verb { Simulate, Sweep, ClassifyEquilibrium, BoundAudit };

/// "simulate", "sweep", "classify-eq", "bound-audit". Throws ConfigError.
Verb parse_verb(const std::string& name);
std::string to_string(Verb v);

struct SimulateSpec {
  SimConfig sim;
  double classify_tol = 1e-3;
  bool plot = true;
};

struct SweepSpec {
  SimulateSpec base;
  std::uint64_t seed_first = 1;
  std::size_t seed_count = 1;
};

struct ClassifySpec {
  enum class Equilibrium { Antipodal, Cyclic, Equispaced, Custom };
  std::size_t n = 5;
  bool directed = false;
  Equilibrium equilibrium = Equilibrium::Equispaced;
  double alpha = 0.0;               // Equispaced
  std::vector<double> step_angles;  // Custom: n - 1 steps along the equator
  double zero_tol = 1e-8;
};

struct AuditSpec {
  std::size_t n = 5;
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  SearchOptions search;
};

using ExperimentSpec = std::variant<SimulateSpec, SweepSpec, ClassifySpec, AuditSpec>;

/// Reads a config file: one flat JSON object (comments allowed). Throws
/// ConfigError when the file is missing or malformed.
Json load_config(const std::filesystem::path& path);

/// Builds the spec for `verb` from a flat config object. Every key is typed
/// and unknown keys are rejected (ConfigError). `seed_override` replaces the
/// config's seed (the first seed for sweeps).
ExperimentSpec parse_spec(Verb verb, const Json& config,
                          std::optional<std::uint64_t> seed_override = std::nullopt);

// Output writers, exposed for tests and bindings.

/// Header plus one row per recorded step: t, psi_1..n, phi_1..n, W, V,
/// omega_1..n. Every value uses 17 significant digits.
void write_trajectory_csv(const Trajectory& tr, std::ostream& out);

/// Orthographic views of the two hemispheres side by side; agent paths with
/// a star at the start and a circle at the end. Angles labeled in degrees.
std::string render_paths_svg(const Trajectory& tr, const std::string& title);

/// Summary of one finished simulation.
Json simulation_summary(const SimulateSpec& spec, const Trajectory& tr);

Json spectrum_json(const SpectrumReport& r);

/// Runs the experiment, writing its files into out_dir (created if needed).
/// Progress goes to `log` unless it is null. Returns the summary document.
/// Throws ConfigError, DomainError, SamplingError or NumericalError.
Json run(const ExperimentSpec& spec, const std::filesystem::path& out_dir, std::ostream* log);

}  // namespace ringform::app
