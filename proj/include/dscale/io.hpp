#pragma once
// Experiment orchestration: JSON run configurations, the scenario presets,
// the run driver that moves a configured solver from t = 0 to t_max while
// emitting a ledger CSV / snapshots / a JSON summary, and the summary schema
// plus its validator.  Configs are strict: exactly the fields relevant to the
// chosen family are accepted, everything else is rejected with the offending
// JSON path, and a parsed config re-serializes to a canonical document with
// every default resolved (so parse -> serialize is idempotent).  Runs are
// deterministic: the same config writes bit-identical CSV files.

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dscale/energy.hpp"
#include "dscale/errors.hpp"
#include "dscale/fluid.hpp"

namespace dscale {

/// Which experiment a config drives.
///   tau_only          integrate the scaling factor and report its residuals
///   nls_original      lab-frame split-step Schroedinger run
///   nls_rescaled      self-similar-frame run with confinement + pseudo-energy
///   fluid_regularized 1D regularized compressible flow in the scaled frame
///   korteweg_scatter  lab-frame run tracked through the fluid-side
///                     functionals (momentum-corrected energy, dispersive
///                     profile distances)
enum class RunFamily {
  tau_only,
  nls_original,
  nls_rescaled,
  fluid_regularized,
  korteweg_scatter,
};

std::string family_name(RunFamily f);
RunFamily family_from_name(const std::string& name);  // throws ConfigError

/// Initial state specification.
///   gaussian  wave: packet (pi w^2)^{-d/4} e^{-|x-c|^2/2w^2} e^{i b|x-c|^2/eps},
///             normalized to unit mass unless `normalize` is false.
///             fluid: density = floor profile + amplitude * e^{-(y-c)^2/2w^2},
///             velocity 2*b*y (the fluid image of the quadratic phase).
///   wkb       amplitude a0 = Gaussian of width `a0_width` (unit mass) and
///             eps-independent phase phi0 = phase_quad * |x-c|^2, realized as
///             a0 * exp(i phi0 / eps).
///   custom_file  CSV columns y,re,im (wave) or y,R,M (fluid), one row per
///             grid point.
struct InitialData {
  enum class Kind { gaussian, wkb, custom_file };
  Kind kind = Kind::gaussian;
  double center = 0.0;
  double width = 1.0;        // gaussian width / wkb a0 width
  double phase_b = 0.0;      // gaussian quadratic phase (wave) / shear (fluid)
  double phase_quad = 0.0;   // wkb phase coefficient
  double amplitude = 1.0;    // fluid bump height
  bool normalize = true;     // wave gaussian only
  bool floor_equilibrium = true;  // fluid: cold-confinement equilibrium floor
  double floor_value = 0.0;       // fluid: constant floor when not equilibrium
  std::string path;               // custom_file
};

struct PhysicalConfig {
  int dim = 1;
  double gamma = 0.0;   ///< adiabatic exponent (fluid side); linked to sigma
  double sigma = 0.0;   ///< nonlinearity power (wave side)
  double lambda = 0.0;  ///< defocusing coupling
  double eps = 1.0;     ///< semiclassical parameter
  double nu = 0.0;      ///< viscosity (fluid family)
  double alpha = 1.0;   ///< dilation exponent
  bool has_gamma = false, has_sigma = false, has_lambda = false;
};

struct GridConfig {
  int n = 0;
  double half_length = 0.0;
};

struct SchemeConfig {
  std::string dt_policy = "fixed";  ///< "fixed" | "adaptive" (fluid only)
  double dt = 0.0;        ///< step (wave, fixed fluid) or cap (adaptive fluid)
  double t_max = 0.0;
  double tol = 1e-10;     ///< trajectory solve tolerance (tau family)
  int samples = 512;      ///< ledger rows (tau family)
  double ledger_dt = 0.0;         ///< ledger cadence; parse resolves 0 = auto
  double snapshot_start = 1.0;    ///< first snapshot time
  double snapshot_factor = 1.4142135623730951;  ///< geometric cadence (x sqrt2)
  double fit_lo = -1.0, fit_hi = -1.0;  ///< decay-fit window; parse resolves
  double cfl_fraction = 0.8;      ///< adaptive fluid: dt = fraction * bound
  bool dealias = false;           ///< wave nonlinear sub-step filter
};

struct OutputConfig {
  std::string dir;  ///< resolved against the env output root when relative
  bool ledger = true;
  bool snapshots = true;
  bool summary = true;
  bool binary_snapshots = false;  ///< also write raw little-endian f64 dumps
};

/// A fully resolved run description.  Build one via parse_config / preset;
/// hand-built configs are revalidated on entry to run().
struct RunConfig {
  RunFamily family = RunFamily::tau_only;
  PhysicalConfig phys;
  GridConfig grid;
  SchemeConfig scheme;
  RegParams reg;      // fluid family; phys.{gamma,nu,eps,alpha} are merged in
  InitialData init;
  OutputConfig output;
  long long seed = 0;  // reserved for randomized perturbations; recorded

  /// Canonical JSON document containing exactly the fields relevant to the
  /// family, every default resolved.  parse_config(to_json()) round-trips.
  nlohmann::json to_json() const;
};

/// Parse + validate a config document.  Throws ConfigError carrying the JSON
/// path of the offense; a missing required field reports the first one in
/// schema order, an unknown field is rejected by its path.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(const std::string& text);

/// Scenario presets with documented desk-scale grids:
///   long_range          rescaled run at sigma = 0.4 (long-range power)
///   semiclassical_sweep rescaled WKB run; see preset_sweep for the eps sweep
///   korteweg_scatter    lab-frame gamma = 4 run with scattering diagnostics
///   viscous_decay       regularized fluid, gamma = 2, nu = 0.1, alpha = 1
///   isothermal_edge     regularized fluid near gamma = 1 (gamma = 1.2)
/// Unknown names throw ConfigError listing the known presets.
RunConfig preset(const std::string& name);
const std::vector<std::string>& preset_names();

/// The sweep behind `semiclassical_sweep`: three configs identical except for
/// eps in {1, 0.1, 0.01}.  Other presets return their single config.
std::vector<RunConfig> preset_sweep(const std::string& name);

/// Everything a run reports.  `times`/`series` mirror the ledger CSV columns;
/// `scalars` holds named end-of-run quantities (drifts, residuals, extrema);
/// decay/profile are filled when the run produces them.
struct RunSummary {
  RunConfig config;
  double wall_seconds = 0.0;

  std::vector<double> times;
  std::vector<std::pair<std::string, std::vector<double>>> series;
  std::map<std::string, double> scalars;

  DecayFit decay;
  bool has_decay = false;
  ProfileConvergence profile;
  bool has_profile = false;

  bool flag_boundary = false;    ///< significant mass reached the box edge
  bool flag_positivity = false;  ///< fluid density approached vacuum
  int cfl_rejections = 0;        ///< adaptive steps retried on rejection
  bool conforming = true;        ///< no boundary/positivity flag raised

  std::string output_dir;    ///< resolved absolute-ish output directory
  std::string summary_path;  ///< written summary.json (empty if disabled)
  std::vector<std::string> artifacts;  ///< files written, relative to dir

  const std::vector<double>& column(const std::string& name) const;
  nlohmann::json to_json() const;
};

/// Drive a run end to end.  Writes ledger/snapshots/summary according to the
/// output toggles and returns the in-memory summary.  Deterministic: a config
/// run twice produces bit-identical CSV output.  Solver failures write
/// failure.json into the output directory and rethrow.
RunSummary run(const RunConfig& cfg);

/// The published schema every emitted summary validates against (a JSON
/// Schema subset: type / required / properties / items / enum / minimum).
nlohmann::json summary_schema();

/// Validate a summary document against summary_schema().  Throws
/// InvalidInputError naming the offending path.
void validate_summary(const nlohmann::json& summary);

/// Human-readable verdict table for `report <summary.json>`.
void write_report(std::ostream& os, const nlohmann::json& summary);

/// Output root: $DSCALE_OUT_ROOT when set and nonempty, else ".".
std::string output_root();

}  // namespace dscale
