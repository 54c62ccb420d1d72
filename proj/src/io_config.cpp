// Config parsing, validation, canonical serialization, the scenario presets,
// and the summary schema + validator.  The schema discipline: every family
// owns an explicit list of allowed JSON paths and an ordered list of required
// ones, so a malformed document reports the first missing field and any
// stray field is rejected by path.  parse_config resolves every default, and
// to_json emits exactly the allowed fields, which makes parse -> serialize
// idempotent and keeps presets honest (they are themselves parsed documents).

#include "dscale/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

namespace dscale {

using nlohmann::json;

std::string family_name(RunFamily f) {
  switch (f) {
    case RunFamily::tau_only: return "tau_only";
    case RunFamily::nls_original: return "nls_original";
    case RunFamily::nls_rescaled: return "nls_rescaled";
    case RunFamily::fluid_regularized: return "fluid_regularized";
    case RunFamily::korteweg_scatter: return "korteweg_scatter";
  }
  throw InvalidInputError("family_name: unhandled family");
}

RunFamily family_from_name(const std::string& name) {
  if (name == "tau_only") return RunFamily::tau_only;
  if (name == "nls_original") return RunFamily::nls_original;
  if (name == "nls_rescaled") return RunFamily::nls_rescaled;
  if (name == "fluid_regularized") return RunFamily::fluid_regularized;
  if (name == "korteweg_scatter") return RunFamily::korteweg_scatter;
  throw ConfigError("unknown family '" + name +
                        "' (one of tau_only, nls_original, nls_rescaled, "
                        "fluid_regularized, korteweg_scatter)",
                    "family");
}

namespace {

bool is_wave_family(RunFamily f) {
  return f == RunFamily::nls_original || f == RunFamily::nls_rescaled ||
         f == RunFamily::korteweg_scatter;
}

// ---------------------------------------------------------------- JSON paths

const json* find_path(const json& doc, const std::string& path) {
  const json* cur = &doc;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(
        start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!cur->is_object() || !cur->contains(key)) return nullptr;
    cur = &cur->at(key);
    if (dot == std::string::npos) return cur;
    start = dot + 1;
  }
}

void collect_leaf_paths(const json& node, const std::string& prefix,
                        std::vector<std::string>& out) {
  if (node.is_object()) {
    for (const auto& kv : node.items())
      collect_leaf_paths(kv.value(),
                         prefix.empty() ? kv.key() : prefix + "." + kv.key(),
                         out);
    if (node.empty() && !prefix.empty()) out.push_back(prefix);
  } else {
    out.push_back(prefix);
  }
}

// ------------------------------------------------------------ typed getters

double get_num(const json& doc, const std::string& path, double def) {
  const json* v = find_path(doc, path);
  if (!v) return def;
  if (!v->is_number()) throw ConfigError("expected a number", path);
  return v->get<double>();
}

long long get_int(const json& doc, const std::string& path, long long def) {
  const json* v = find_path(doc, path);
  if (!v) return def;
  if (!v->is_number_integer()) throw ConfigError("expected an integer", path);
  return v->get<long long>();
}

bool get_bool(const json& doc, const std::string& path, bool def) {
  const json* v = find_path(doc, path);
  if (!v) return def;
  if (!v->is_boolean()) throw ConfigError("expected a boolean", path);
  return v->get<bool>();
}

std::string get_str(const json& doc, const std::string& path,
                    const std::string& def) {
  const json* v = find_path(doc, path);
  if (!v) return def;
  if (!v->is_string()) throw ConfigError("expected a string", path);
  return v->get<std::string>();
}

void require_range(bool ok, const std::string& what, const std::string& path) {
  if (!ok) throw ConfigError(what, path);
}

// ----------------------------------------------------- allowed field tables

void add(std::set<std::string>& s, std::initializer_list<const char*> paths) {
  for (const char* p : paths) s.insert(p);
}

std::set<std::string> allowed_paths(RunFamily fam, InitialData::Kind kind) {
  std::set<std::string> a;
  add(a, {"family", "seed", "output.dir", "output.ledger", "output.snapshots",
          "output.summary", "output.binary_snapshots"});
  switch (fam) {
    case RunFamily::tau_only:
      add(a, {"physical.alpha", "scheme.t_max", "scheme.tol",
              "scheme.samples"});
      return a;
    case RunFamily::nls_original:
    case RunFamily::nls_rescaled:
    case RunFamily::korteweg_scatter:
      add(a, {"physical.dim", "physical.sigma", "physical.lambda",
              "physical.eps", "grid.n", "grid.half_length", "scheme.dt",
              "scheme.t_max", "scheme.ledger_dt", "scheme.snapshot_start",
              "scheme.snapshot_factor", "scheme.dealias",
              "scheme.dt_policy"});
      if (fam == RunFamily::nls_rescaled)
        add(a, {"physical.alpha", "scheme.fit_window"});
      if (fam == RunFamily::korteweg_scatter) add(a, {"physical.gamma"});
      break;
    case RunFamily::fluid_regularized:
      add(a, {"physical.dim", "physical.gamma", "physical.sigma",
              "physical.nu", "physical.eps", "physical.alpha", "grid.n",
              "grid.half_length", "scheme.dt", "scheme.dt_policy",
              "scheme.t_max", "scheme.cfl_fraction", "scheme.ledger_dt",
              "scheme.snapshot_start", "scheme.snapshot_factor",
              "scheme.fit_window", "reg.r0", "reg.r1", "reg.delta1",
              "reg.delta2", "reg.eta1", "reg.eta2", "reg.k_cold", "reg.m",
              "reg.dealias"});
      break;
  }
  add(a, {"initial_data.kind"});
  const bool fluid = fam == RunFamily::fluid_regularized;
  switch (kind) {
    case InitialData::Kind::gaussian:
      if (fluid)
        add(a, {"initial_data.center", "initial_data.width",
                "initial_data.amplitude", "initial_data.phase_b",
                "initial_data.floor"});
      else
        add(a, {"initial_data.center", "initial_data.width",
                "initial_data.phase_b", "initial_data.normalize"});
      break;
    case InitialData::Kind::wkb:
      add(a, {"initial_data.center", "initial_data.a0_width",
              "initial_data.phase_quad"});
      break;
    case InitialData::Kind::custom_file:
      add(a, {"initial_data.path"});
      break;
  }
  return a;
}

std::vector<std::string> required_paths(RunFamily fam, const json& doc) {
  std::vector<std::string> r = {"family"};
  auto has = [&doc](const char* p) { return find_path(doc, p) != nullptr; };
  switch (fam) {
    case RunFamily::tau_only:
      r.insert(r.end(), {"physical.alpha", "scheme.t_max"});
      return r;
    case RunFamily::nls_original:
    case RunFamily::nls_rescaled:
    case RunFamily::korteweg_scatter:
      r.push_back("physical.dim");
      // sigma may be given directly or (korteweg) through gamma.
      if (!(has("physical.sigma") ||
            (fam == RunFamily::korteweg_scatter && has("physical.gamma"))))
        r.push_back("physical.sigma");
      if (fam != RunFamily::korteweg_scatter) r.push_back("physical.lambda");
      r.push_back("physical.eps");
      if (fam == RunFamily::nls_rescaled) r.push_back("physical.alpha");
      break;
    case RunFamily::fluid_regularized:
      if (!(has("physical.gamma") || has("physical.sigma")))
        r.push_back("physical.gamma");
      r.insert(r.end(), {"physical.nu", "physical.eps", "physical.alpha"});
      break;
  }
  r.insert(r.end(), {"grid.n", "grid.half_length", "scheme.dt",
                     "scheme.t_max", "initial_data.kind"});
  const std::string kind = get_str(doc, "initial_data.kind", "");
  if (kind == "wkb") r.push_back("initial_data.phase_quad");
  if (kind == "custom_file") r.push_back("initial_data.path");
  return r;
}

InitialData::Kind kind_from_name(const std::string& name, RunFamily fam) {
  if (name == "gaussian") return InitialData::Kind::gaussian;
  if (name == "wkb") {
    if (fam == RunFamily::fluid_regularized)
      throw ConfigError("wkb data is wave-side only", "initial_data.kind");
    return InitialData::Kind::wkb;
  }
  if (name == "custom_file") return InitialData::Kind::custom_file;
  throw ConfigError("unknown kind '" + name +
                        "' (one of gaussian, wkb, custom_file)",
                    "initial_data.kind");
}

}  // namespace

RunConfig parse_config(const json& doc) {
  if (!doc.is_object())
    throw ConfigError("config must be a JSON object", "<root>");
  if (!doc.contains("family"))
    throw ConfigError("missing required field", "family");
  if (!doc.at("family").is_string())
    throw ConfigError("expected a string", "family");

  RunConfig c;
  c.family = family_from_name(doc.at("family").get<std::string>());

  // Required fields, in schema order: report the first absent one.
  for (const std::string& p : required_paths(c.family, doc))
    if (!find_path(doc, p)) throw ConfigError("missing required field", p);

  // Initial-data kind gates which fields are allowed.
  if (c.family != RunFamily::tau_only)
    c.init.kind =
        kind_from_name(get_str(doc, "initial_data.kind", ""), c.family);

  // Reject everything outside the family's schema.
  const std::set<std::string> allowed = allowed_paths(c.family, c.init.kind);
  std::vector<std::string> present;
  collect_leaf_paths(doc, "", present);
  for (const std::string& p : present)
    if (!allowed.count(p)) throw ConfigError("unknown field", p);

  // ---- physical ----
  PhysicalConfig& ph = c.phys;
  ph.dim = static_cast<int>(get_int(doc, "physical.dim", 1));
  require_range(ph.dim == 1 || ph.dim == 2, "must be 1 or 2", "physical.dim");
  if (c.family == RunFamily::fluid_regularized)
    require_range(ph.dim == 1, "the fluid solver is one-dimensional",
                  "physical.dim");

  ph.has_sigma = find_path(doc, "physical.sigma") != nullptr;
  ph.has_gamma = find_path(doc, "physical.gamma") != nullptr;
  ph.has_lambda = find_path(doc, "physical.lambda") != nullptr;
  if (ph.has_sigma) ph.sigma = get_num(doc, "physical.sigma", 0.0);
  if (ph.has_gamma) ph.gamma = get_num(doc, "physical.gamma", 0.0);
  if (ph.has_sigma) require_range(ph.sigma > 0.0, "must be > 0",
                                  "physical.sigma");
  if (ph.has_gamma) require_range(ph.gamma > 1.0, "must be > 1",
                                  "physical.gamma");
  // gamma = 2 sigma + 1 links the pressure law to the nonlinearity power.
  if (ph.has_sigma && ph.has_gamma) {
    if (std::abs(ph.gamma - (2.0 * ph.sigma + 1.0)) >
        1e-9 * (1.0 + std::abs(ph.gamma)))
      throw ConfigError("inconsistent with sigma: gamma must equal 2*sigma+1",
                        "physical.gamma");
  } else if (ph.has_sigma) {
    ph.gamma = 2.0 * ph.sigma + 1.0;
  } else if (ph.has_gamma) {
    ph.sigma = 0.5 * (ph.gamma - 1.0);
  }

  ph.eps = get_num(doc, "physical.eps", 1.0);
  ph.nu = get_num(doc, "physical.nu", 0.0);
  ph.alpha = get_num(doc, "physical.alpha", 1.0);
  ph.lambda = get_num(doc, "physical.lambda", 0.0);
  if (c.family == RunFamily::korteweg_scatter) {
    const double linked = ph.gamma / (ph.gamma - 1.0);
    if (ph.has_lambda) {
      if (std::abs(ph.lambda - linked) > 1e-9 * (1.0 + std::abs(linked)))
        throw ConfigError(
            "inconsistent with gamma: lambda must equal gamma/(gamma-1)",
            "physical.lambda");
    } else {
      ph.lambda = linked;
      ph.has_lambda = true;
    }
  }
  if (is_wave_family(c.family)) {
    require_range(ph.eps > 0.0, "must be > 0", "physical.eps");
    require_range(ph.lambda >= 0.0, "must be >= 0 (defocusing)",
                  "physical.lambda");
  }
  if (c.family == RunFamily::fluid_regularized) {
    require_range(ph.eps >= 0.0, "must be >= 0", "physical.eps");
    require_range(ph.nu >= 0.0, "must be >= 0", "physical.nu");
  }
  if (c.family != RunFamily::nls_original &&
      c.family != RunFamily::korteweg_scatter)
    require_range(ph.alpha > 0.0, "must be > 0", "physical.alpha");

  // ---- grid ----
  if (c.family != RunFamily::tau_only) {
    c.grid.n = static_cast<int>(get_int(doc, "grid.n", 0));
    c.grid.half_length = get_num(doc, "grid.half_length", 0.0);
    require_range(c.grid.n >= 8 && c.grid.n % 2 == 0,
                  "must be an even integer >= 8", "grid.n");
    require_range(c.grid.half_length > 0.0, "must be > 0", "grid.half_length");
  }

  // ---- scheme ----
  SchemeConfig& sc = c.scheme;
  sc.t_max = get_num(doc, "scheme.t_max", 0.0);
  require_range(sc.t_max > 0.0, "must be > 0", "scheme.t_max");
  if (c.family == RunFamily::tau_only) {
    sc.tol = get_num(doc, "scheme.tol", 1e-10);
    require_range(sc.tol > 0.0 && sc.tol <= 1e-2, "must be in (0, 1e-2]",
                  "scheme.tol");
    sc.samples = static_cast<int>(get_int(doc, "scheme.samples", 512));
    require_range(sc.samples >= 2, "must be >= 2", "scheme.samples");
    sc.dt = 0.0;
    sc.dt_policy = "fixed";
  } else {
    sc.dt = get_num(doc, "scheme.dt", 0.0);
    require_range(sc.dt > 0.0 && sc.dt <= sc.t_max,
                  "must be in (0, t_max]", "scheme.dt");
    sc.dt_policy = get_str(doc, "scheme.dt_policy",
                           c.family == RunFamily::fluid_regularized
                               ? "adaptive"
                               : "fixed");
    if (c.family == RunFamily::fluid_regularized)
      require_range(sc.dt_policy == "fixed" || sc.dt_policy == "adaptive",
                    "must be 'fixed' or 'adaptive'", "scheme.dt_policy");
    else
      require_range(sc.dt_policy == "fixed",
                    "wave runs use a fixed step", "scheme.dt_policy");
    sc.cfl_fraction = get_num(doc, "scheme.cfl_fraction", 0.8);
    require_range(sc.cfl_fraction > 0.0 && sc.cfl_fraction <= 1.0,
                  "must be in (0, 1]", "scheme.cfl_fraction");
    sc.ledger_dt = get_num(doc, "scheme.ledger_dt", 0.0);
    require_range(sc.ledger_dt >= 0.0, "must be >= 0", "scheme.ledger_dt");
    if (sc.ledger_dt == 0.0)
      sc.ledger_dt = std::max(is_wave_family(c.family) ? sc.dt : 0.0,
                              sc.t_max / 1024.0);
    sc.snapshot_start = get_num(doc, "scheme.snapshot_start", 1.0);
    require_range(sc.snapshot_start > 0.0, "must be > 0",
                  "scheme.snapshot_start");
    sc.snapshot_factor = get_num(doc, "scheme.snapshot_factor",
                                 1.4142135623730951);
    require_range(sc.snapshot_factor > 1.0001, "must be > 1",
                  "scheme.snapshot_factor");
    sc.dealias = get_bool(doc, "scheme.dealias", false);
    // Decay-fit window (rescaled wave and fluid runs).
    const bool fits = c.family == RunFamily::nls_rescaled ||
                      c.family == RunFamily::fluid_regularized;
    if (fits) {
      const double lo_def =
          std::min(c.family == RunFamily::nls_rescaled ? 5.0 : 10.0,
                   0.5 * sc.t_max);
      sc.fit_lo = lo_def;
      sc.fit_hi = sc.t_max;
      if (const json* w = find_path(doc, "scheme.fit_window")) {
        if (!w->is_array() || w->size() != 2 || !(*w)[0].is_number() ||
            !(*w)[1].is_number())
          throw ConfigError("expected [t_lo, t_hi]", "scheme.fit_window");
        sc.fit_lo = (*w)[0].get<double>();
        sc.fit_hi = (*w)[1].get<double>();
        require_range(sc.fit_lo > 0.0 && sc.fit_lo < sc.fit_hi &&
                          sc.fit_hi <= sc.t_max,
                      "window must satisfy 0 < t_lo < t_hi <= t_max",
                      "scheme.fit_window");
      }
    }
  }

  // ---- regularization (fluid) ----
  if (c.family == RunFamily::fluid_regularized) {
    RegParams& rp = c.reg;
    rp.gamma = ph.gamma;
    rp.nu = ph.nu;
    rp.eps = ph.eps;
    rp.alpha = ph.alpha;
    rp.r0 = get_num(doc, "reg.r0", rp.r0);
    rp.r1 = get_num(doc, "reg.r1", rp.r1);
    rp.delta1 = get_num(doc, "reg.delta1", rp.delta1);
    rp.delta2 = get_num(doc, "reg.delta2", rp.delta2);
    rp.eta1 = get_num(doc, "reg.eta1", rp.eta1);
    rp.eta2 = get_num(doc, "reg.eta2", rp.eta2);
    rp.k_cold = get_num(doc, "reg.k_cold", rp.k_cold);
    rp.m = static_cast<int>(get_int(doc, "reg.m", rp.m));
    rp.dealias = get_bool(doc, "reg.dealias", rp.dealias);
    try {
      rp.validate();
    } catch (const InvalidInputError& e) {
      throw ConfigError(e.what(), "reg");
    }
  }

  // ---- initial data ----
  if (c.family != RunFamily::tau_only) {
    InitialData& in = c.init;
    switch (in.kind) {
      case InitialData::Kind::gaussian:
        in.center = get_num(doc, "initial_data.center", 0.0);
        in.width = get_num(doc, "initial_data.width", 1.0);
        require_range(in.width > 0.0, "must be > 0", "initial_data.width");
        in.phase_b = get_num(doc, "initial_data.phase_b", 0.0);
        if (c.family == RunFamily::fluid_regularized) {
          in.amplitude = get_num(doc, "initial_data.amplitude", 1.0);
          require_range(in.amplitude >= 0.0, "must be >= 0",
                        "initial_data.amplitude");
          if (const json* fl = find_path(doc, "initial_data.floor")) {
            if (fl->is_string()) {
              require_range(fl->get<std::string>() == "equilibrium",
                            "must be 'equilibrium' or a positive number",
                            "initial_data.floor");
              in.floor_equilibrium = true;
            } else if (fl->is_number()) {
              in.floor_equilibrium = false;
              in.floor_value = fl->get<double>();
              require_range(in.floor_value > 0.0, "must be > 0",
                            "initial_data.floor");
            } else {
              throw ConfigError("must be 'equilibrium' or a positive number",
                                "initial_data.floor");
            }
          }
        } else {
          in.normalize = get_bool(doc, "initial_data.normalize", true);
        }
        break;
      case InitialData::Kind::wkb:
        in.center = get_num(doc, "initial_data.center", 0.0);
        in.width = get_num(doc, "initial_data.a0_width", 1.0);
        require_range(in.width > 0.0, "must be > 0", "initial_data.a0_width");
        in.phase_quad = get_num(doc, "initial_data.phase_quad", 0.0);
        break;
      case InitialData::Kind::custom_file:
        in.path = get_str(doc, "initial_data.path", "");
        require_range(!in.path.empty(), "must be a nonempty path",
                      "initial_data.path");
        break;
    }
  }

  // ---- output / seed ----
  c.output.dir = get_str(doc, "output.dir", "runs/" + family_name(c.family));
  require_range(!c.output.dir.empty(), "must be a nonempty path",
                "output.dir");
  c.output.ledger = get_bool(doc, "output.ledger", true);
  c.output.snapshots = get_bool(doc, "output.snapshots", true);
  c.output.summary = get_bool(doc, "output.summary", true);
  c.output.binary_snapshots = get_bool(doc, "output.binary_snapshots", false);
  c.seed = get_int(doc, "seed", 0);
  return c;
}

RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what(), "<root>");
  }
  return parse_config(doc);
}

json RunConfig::to_json() const {
  json j;
  j["family"] = family_name(family);
  json& ph = j["physical"];
  json& sc = j["scheme"];
  sc["t_max"] = scheme.t_max;
  const bool wave = is_wave_family(family);
  if (family == RunFamily::tau_only) {
    ph["alpha"] = phys.alpha;
    sc["tol"] = scheme.tol;
    sc["samples"] = scheme.samples;
  } else {
    j["grid"]["n"] = grid.n;
    j["grid"]["half_length"] = grid.half_length;
    sc["dt"] = scheme.dt;
    sc["ledger_dt"] = scheme.ledger_dt;
    sc["snapshot_start"] = scheme.snapshot_start;
    sc["snapshot_factor"] = scheme.snapshot_factor;
    ph["dim"] = phys.dim;
    ph["eps"] = phys.eps;
    if (wave) {
      ph["sigma"] = phys.sigma;
      ph["lambda"] = phys.lambda;
      sc["dealias"] = scheme.dealias;
      sc["dt_policy"] = "fixed";
    }
    if (family == RunFamily::korteweg_scatter) ph["gamma"] = phys.gamma;
    if (family == RunFamily::nls_rescaled) ph["alpha"] = phys.alpha;
    if (family == RunFamily::fluid_regularized) {
      ph["gamma"] = phys.gamma;
      ph["sigma"] = phys.sigma;
      ph["nu"] = phys.nu;
      ph["alpha"] = phys.alpha;
      sc["dt_policy"] = scheme.dt_policy;
      sc["cfl_fraction"] = scheme.cfl_fraction;
      json& rg = j["reg"];
      rg["r0"] = reg.r0;
      rg["r1"] = reg.r1;
      rg["delta1"] = reg.delta1;
      rg["delta2"] = reg.delta2;
      rg["eta1"] = reg.eta1;
      rg["eta2"] = reg.eta2;
      rg["k_cold"] = reg.k_cold;
      rg["m"] = reg.m;
      rg["dealias"] = reg.dealias;
    }
    if (family == RunFamily::nls_rescaled ||
        family == RunFamily::fluid_regularized)
      sc["fit_window"] = json::array({scheme.fit_lo, scheme.fit_hi});
    json& in = j["initial_data"];
    switch (init.kind) {
      case InitialData::Kind::gaussian:
        in["kind"] = "gaussian";
        in["center"] = init.center;
        in["width"] = init.width;
        in["phase_b"] = init.phase_b;
        if (family == RunFamily::fluid_regularized) {
          in["amplitude"] = init.amplitude;
          in["floor"] = init.floor_equilibrium ? json("equilibrium")
                                               : json(init.floor_value);
        } else {
          in["normalize"] = init.normalize;
        }
        break;
      case InitialData::Kind::wkb:
        in["kind"] = "wkb";
        in["center"] = init.center;
        in["a0_width"] = init.width;
        in["phase_quad"] = init.phase_quad;
        break;
      case InitialData::Kind::custom_file:
        in["kind"] = "custom_file";
        in["path"] = init.path;
        break;
    }
  }
  j["output"]["dir"] = output.dir;
  j["output"]["ledger"] = output.ledger;
  j["output"]["snapshots"] = output.snapshots;
  j["output"]["summary"] = output.summary;
  j["output"]["binary_snapshots"] = output.binary_snapshots;
  j["seed"] = seed;
  return j;
}

// ------------------------------------------------------------------ presets

namespace {

json preset_doc(const std::string& name) {
  json j;
  if (name == "long_range") {
    j["family"] = "nls_rescaled";
    // alpha = dim * sigma balances confinement against the nonlinearity at
    // the same tau power, so the rescaled density relaxes to a stationary
    // profile instead of slowly concentrating; the initial width matches
    // that profile's second moment to keep breathing oscillations small.
    j["physical"] = {{"dim", 1}, {"sigma", 0.4}, {"lambda", 1.0},
                     {"eps", 1.0}, {"alpha", 0.4}};
    j["grid"] = {{"n", 1024}, {"half_length", 24.0}};
    j["scheme"] = {{"dt", 2e-3}, {"t_max", 100.0}, {"snapshot_start", 5.0}};
    j["initial_data"] = {{"kind", "gaussian"}, {"width", 1.3}};
  } else if (name == "semiclassical_sweep") {
    j["family"] = "nls_rescaled";
    j["physical"] = {{"dim", 1}, {"sigma", 0.8}, {"lambda", 1.0},
                     {"eps", 1.0}, {"alpha", 0.4}};
    j["grid"] = {{"n", 4096}, {"half_length", 20.0}};
    j["scheme"] = {{"dt", 2e-4}, {"t_max", 10.0}, {"snapshot_start", 1.0}};
    // Expanding quadratic phase: the eps-independent velocity field +y/2
    // dominates the transport at every eps, so the sweep members stay close;
    // a compressive phase would pass near a caustic whose strength depends
    // on eps at order one.
    j["initial_data"] = {{"kind", "wkb"}, {"a0_width", 1.0},
                         {"phase_quad", 0.25}};
  } else if (name == "korteweg_scatter") {
    j["family"] = "korteweg_scatter";
    j["physical"] = {{"dim", 1}, {"sigma", 1.5}, {"gamma", 4.0},
                     {"eps", 1.0}};
    j["grid"] = {{"n", 8192}, {"half_length", 512.0}};
    j["scheme"] = {{"dt", 2e-3}, {"t_max", 80.0}, {"snapshot_start", 10.0}};
    // A broad packet keeps the accumulated nonlinear phase curvature small,
    // so the distance to the dispersive profile is dominated by the
    // width-mismatch term ~ w^4 / (2 t^2) and decays quadratically through
    // the window instead of flattening onto the ~1/t phase-curvature floor.
    j["initial_data"] = {{"kind", "gaussian"}, {"width", 2.0}};
  } else if (name == "viscous_decay") {
    j["family"] = "fluid_regularized";
    j["physical"] = {{"dim", 1}, {"gamma", 2.0}, {"nu", 0.1}, {"eps", 0.0},
                     {"alpha", 1.0}};
    j["grid"] = {{"n", 256}, {"half_length", 6.0}};
    j["scheme"] = {{"dt", 0.01}, {"dt_policy", "adaptive"}, {"t_max", 100.0},
                   {"snapshot_start", 1.0}};
    // eta1 sets the vacuum-repellent floor (~0.1 at the box edge); delta1 and
    // delta2 are raised from their defaults because long runs otherwise grow
    // a grid-scale sawtooth where waves wash over the periodic seam and the
    // cold-pressure stiffness amplifies it.
    j["reg"] = {{"eta1", 1e-4}, {"delta1", 1e-3}, {"delta2", 1e-5}};
    j["initial_data"] = {{"kind", "gaussian"}, {"amplitude", 0.8},
                         {"width", 0.8}};
  } else if (name == "isothermal_edge") {
    j["family"] = "fluid_regularized";
    j["physical"] = {{"dim", 1}, {"gamma", 1.2}, {"nu", 0.05}, {"eps", 0.05},
                     {"alpha", 0.2}};  // alpha = dim * (gamma - 1)
    j["grid"] = {{"n", 256}, {"half_length", 6.0}};
    j["scheme"] = {{"dt", 0.01}, {"dt_policy", "adaptive"}, {"t_max", 50.0},
                   {"snapshot_start", 1.0}};
    // The soft gamma = 1.2 pressure plus the quantum stress need a stronger
    // fourth-order smoother and a gentler bump than the gamma = 2 preset.
    j["reg"] = {{"eta1", 1e-4}, {"delta1", 1e-3}, {"delta2", 1e-4}};
    j["initial_data"] = {{"kind", "gaussian"}, {"amplitude", 0.4},
                         {"width", 0.8}};
  } else {
    std::string names;
    for (const std::string& n : preset_names())
      names += (names.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + name + "' (known: " + names + ")",
                      "preset");
  }
  j["output"] = {{"dir", "runs/" + name}};
  return j;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "long_range", "semiclassical_sweep", "korteweg_scatter",
      "viscous_decay", "isothermal_edge"};
  return names;
}

RunConfig preset(const std::string& name) {
  return parse_config(preset_doc(name));
}

std::vector<RunConfig> preset_sweep(const std::string& name) {
  std::vector<RunConfig> out;
  if (name == "semiclassical_sweep") {
    for (double eps : {1.0, 0.1, 0.01}) {
      json j = preset_doc(name);
      j["physical"]["eps"] = eps;
      out.push_back(parse_config(j));
    }
  } else {
    out.push_back(preset(name));
  }
  return out;
}

// --------------------------------------------------- summary schema + check

namespace {

json typed(const char* type) {
  json j;
  j["type"] = type;
  return j;
}

json typed_min(const char* type, double min) {
  json j = typed(type);
  j["minimum"] = min;
  return j;
}

json array_of(const json& items) {
  json j = typed("array");
  j["items"] = items;
  return j;
}

void schema_fail(const std::string& path, const std::string& why) {
  throw InvalidInputError("summary schema violation at " +
                          (path.empty() ? std::string("<root>") : path) +
                          ": " + why);
}

void check_schema(const json& doc, const json& schema,
                  const std::string& path) {
  if (schema.contains("type")) {
    const std::string t = schema.at("type").get<std::string>();
    const bool ok = (t == "object" && doc.is_object()) ||
                    (t == "array" && doc.is_array()) ||
                    (t == "number" && doc.is_number()) ||
                    (t == "integer" && doc.is_number_integer()) ||
                    (t == "string" && doc.is_string()) ||
                    (t == "boolean" && doc.is_boolean());
    if (!ok) schema_fail(path, "expected " + t);
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& v : schema.at("enum")) ok = ok || v == doc;
    if (!ok) schema_fail(path, "value not in the allowed set");
  }
  if (schema.contains("minimum") && doc.is_number() &&
      doc.get<double>() < schema.at("minimum").get<double>())
    schema_fail(path, "below the allowed minimum");
  if (doc.is_object()) {
    if (schema.contains("required"))
      for (const auto& k : schema.at("required"))
        if (!doc.contains(k.get<std::string>()))
          schema_fail(path, "missing member " + k.get<std::string>());
    const json* props =
        schema.contains("properties") ? &schema.at("properties") : nullptr;
    for (const auto& kv : doc.items()) {
      const std::string sub =
          path.empty() ? kv.key() : path + "." + kv.key();
      if (props && props->contains(kv.key()))
        check_schema(kv.value(), props->at(kv.key()), sub);
      else if (schema.contains("additionalProperties"))
        check_schema(kv.value(), schema.at("additionalProperties"), sub);
    }
  }
  if (doc.is_array() && schema.contains("items")) {
    std::size_t i = 0;
    for (const auto& el : doc)
      check_schema(el, schema.at("items"), path + "[" + std::to_string(i++) +
                                               "]");
  }
}

}  // namespace

json summary_schema() {
  json fam = typed("string");
  fam["enum"] = json::array({"tau_only", "nls_original", "nls_rescaled",
                             "fluid_regularized", "korteweg_scatter"});
  json version = typed("integer");
  version["enum"] = json::array({1});

  json flags = typed("object");
  flags["required"] = json::array({"boundary_contamination",
                                   "positivity_violation", "cfl_rejections",
                                   "conforming"});
  flags["properties"]["boundary_contamination"] = typed("boolean");
  flags["properties"]["positivity_violation"] = typed("boolean");
  flags["properties"]["cfl_rejections"] = typed_min("integer", 0);
  flags["properties"]["conforming"] = typed("boolean");

  json decay = typed("object");
  decay["required"] = json::array(
      {"exponent", "intercept", "t_lo", "t_hi", "residual", "count"});
  for (const char* k : {"exponent", "intercept", "t_lo", "t_hi", "residual"})
    decay["properties"][k] = typed("number");
  decay["properties"]["count"] = typed_min("integer", 0);

  json profile = typed("object");
  profile["required"] = json::array({"reference_time", "times", "distances",
                                     "cauchy_flag", "last_decade_max"});
  profile["properties"]["reference_time"] = typed("number");
  profile["properties"]["times"] = array_of(typed("number"));
  profile["properties"]["distances"] = array_of(typed("number"));
  profile["properties"]["cauchy_flag"] = typed("boolean");
  profile["properties"]["last_decade_max"] = typed("number");

  json scalars = typed("object");
  scalars["additionalProperties"] = typed("number");

  json s = typed("object");
  s["$id"] = "dscale-run-summary.v1";
  s["required"] = json::array({"schema_version", "family", "config",
                               "wall_seconds", "scalars", "flags",
                               "ledger_columns", "output_dir", "artifacts"});
  s["properties"]["schema_version"] = version;
  s["properties"]["family"] = fam;
  s["properties"]["config"] = typed("object");
  s["properties"]["wall_seconds"] = typed_min("number", 0.0);
  s["properties"]["scalars"] = scalars;
  s["properties"]["flags"] = flags;
  s["properties"]["decay"] = decay;
  s["properties"]["profile"] = profile;
  s["properties"]["ledger_columns"] = array_of(typed("string"));
  s["properties"]["output_dir"] = typed("string");
  s["properties"]["summary_path"] = typed("string");
  s["properties"]["artifacts"] = array_of(typed("string"));
  return s;
}

void validate_summary(const json& summary) {
  check_schema(summary, summary_schema(), "");
}

std::string output_root() {
  const char* root = std::getenv("DSCALE_OUT_ROOT");
  if (root && *root) return root;
  return ".";
}

}  // namespace dscale
