// Release gate: twelve numbered end-to-end checks, one PASS/FAIL line each.
// Every check pins its tolerances here in code and derives its expectation
// either from a closed form (scaling factor, free Gaussian) or from
// mesh-independent structure (dt-halving orders, cross-eps uniformity,
// monotone profile distances, decay exponents), so the binary passes only
// when the solvers, the diagnostics, and the run driver agree end to end.
//
// Usage: acceptance [ids...]   (no arguments runs all twelve)

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include <numbers>

#include "dscale/errors.hpp"
#include "dscale/grid.hpp"
#include "dscale/io.hpp"
#include "dscale/madelung.hpp"
#include "dscale/tau.hpp"
#include "dscale/wave.hpp"

using namespace dscale;
using json = nlohmann::json;
using std::numbers::pi;

namespace {

int g_failures = 0;

double now_s() {
  using clk = std::chrono::steady_clock;
  return std::chrono::duration<double>(clk::now().time_since_epoch()).count();
}

std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

void report(int id, bool pass, double wall, const std::string& detail) {
  if (!pass) ++g_failures;
  std::printf("criterion %02d: %s  [%6.1f s]  %s\n", id,
              pass ? "PASS" : "FAIL", wall, detail.c_str());
  std::fflush(stdout);
}

/// Wrap a check body so an escaping exception counts as a FAIL with its
/// message rather than aborting the whole gate.
template <typename Fn>
void guarded(int id, Fn&& body) {
  const double t0 = now_s();
  try {
    body(t0);
  } catch (const std::exception& e) {
    report(id, false, now_s() - t0, fmt("exception: %s", e.what()));
  }
}

RunSummary run_doc(json doc, const std::string& dir) {
  doc["output"]["dir"] = "acceptance_artifacts/" + dir;
  return run(parse_config(doc));
}

// ------------------------------------------------------------------ checks

// Scaling factor against its alpha = 2 closed form sqrt(1 + t^2), plus the
// first-integral residual taudot^2 - (1 - tau^-alpha) for three alphas.
void c01(double t0) {
  const TauTrajectory t2 = solve_tau(2.0, 100.0);
  double errmax = 0.0;
  for (int i = 0; i <= 4096; ++i) {
    const double t = 100.0 * i / 4096.0;
    errmax = std::max(errmax,
                      std::abs(t2.eval(t).tau - std::sqrt(1.0 + t * t)));
  }
  double resmax = 0.0;
  for (double alpha : {0.5, 1.0, 2.0}) {
    const TauTrajectory tr = solve_tau(alpha, 100.0);
    for (int i = 0; i <= 4096; ++i)
      resmax = std::max(resmax, tr.residual(100.0 * i / 4096.0));
  }
  const double wall = now_s() - t0;
  report(1, errmax <= 1e-8 && resmax <= 1e-10 && wall < 1.0, wall,
         fmt("closed-form max err %.3e (<=1e-8), first-integral max %.3e "
             "(<=1e-10)",
             errmax, resmax));
}

// Large-time asymptotics at t = 1000: tau/t in [0.99, 1.01] and taudot in
// [0.999, 1] for alpha in {0.5, 1, 2}. The approach to the asymptote is
// O(t^-alpha), so the alpha = 0.5 deficit at t = 1000 is ~3.4e-2 and this
// leg fails by construction of the window; it is reported honestly.
void c02(double t0) {
  bool pass = true;
  std::string detail;
  for (double alpha : {0.5, 1.0, 2.0}) {
    const TauPoint p = solve_tau(alpha, 1000.0).eval(1000.0);
    const double ratio = p.tau / 1000.0;
    const bool ok = ratio >= 0.99 && ratio <= 1.01 && p.taudot >= 0.999 &&
                    p.taudot <= 1.0;
    pass = pass && ok;
    detail += fmt("%salpha=%.1f ratio=%.6f taudot=%.7f%s", detail.empty() ? "" : "; ",
                  alpha, ratio, p.taudot, ok ? "" : " <-out of window");
  }
  const double wall = now_s() - t0;
  report(2, pass && wall < 1.0, wall, detail);
}

// Free Gaussian against the exact dispersive solution
// pi^{-1/4} (1+it)^{-1/2} exp(-x^2 / (2(1+it))) at t = 1.
void c03(double t0) {
  Grid g{1, 512, 20.0};
  SpectralWorkspace W(g);
  WaveField psi = gaussian_packet(g, 1.0);
  const double mass0 = mass(psi);
  NlsParams p;
  p.sigma = 1.0;
  p.lambda = 0.0;
  p.eps = 1.0;
  const double dt = 1e-3;
  for (int i = 0; i < 1000; ++i) step_original(W, psi, dt, p);
  double err2 = 0.0;
  const std::complex<double> z(1.0, 1.0);  // 1 + i t at t = 1
  for (int i = 0; i < g.n; ++i) {
    const double x = g.coord1d(i);
    const cplx exact = std::pow(pi, -0.25) / std::sqrt(z) *
                       std::exp(-x * x / (2.0 * z));
    err2 += std::norm(psi.values[i] - exact);
  }
  const double l2 = std::sqrt(err2 * g.cell_volume());
  const double drift = std::abs(mass(psi) - mass0) / mass0;
  const double wall = now_s() - t0;
  report(3, l2 <= 1e-6 && drift <= 1e-10 && wall < 10.0, wall,
         fmt("L2 err %.3e (<=1e-6), mass drift %.3e (<=1e-10)", l2, drift));
}

// Shared pair of rescaled defocusing runs (sigma = 1, alpha = 1) at dt and
// dt/2, reused by checks 4 and 5.
json rescaled_doc(double dt) {
  return json{
      {"family", "nls_rescaled"},
      {"physical",
       {{"dim", 1}, {"sigma", 1.0}, {"lambda", 1.0}, {"eps", 1.0}, {"alpha", 1.0}}},
      {"grid", {{"n", 512}, {"half_length", 16.0}}},
      {"scheme", {{"dt", dt}, {"t_max", 50.0}, {"fit_window", {5.0, 50.0}}}},
      {"initial_data", {{"kind", "gaussian"}}},
      {"output", {{"snapshots", false}}}};
}

struct SharedRescaled {
  RunSummary coarse, fine;
  bool ready = false;
};

SharedRescaled& rescaled_pair() {
  static SharedRescaled s;
  if (!s.ready) {
    s.coarse = run_doc(rescaled_doc(2e-3), "rescaled_dt2e-3");
    s.fine = run_doc(rescaled_doc(1e-3), "rescaled_dt1e-3");
    s.ready = true;
  }
  return s;
}

// Second-order pseudo-energy identity: the integrated residual of
// d(total)/dt + dissipation = 0 drops by ~4x when dt halves.
void c04(double t0) {
  const SharedRescaled& s = rescaled_pair();
  const double rc = s.coarse.scalars.at("energy_residual_integrated");
  const double rf = s.fine.scalars.at("energy_residual_integrated");
  const double ratio = rc / rf;
  const double wall = now_s() - t0;
  report(4,
         ratio >= 3.5 && ratio <= 4.5 && s.coarse.conforming &&
             s.fine.conforming && wall < 60.0,
         wall,
         fmt("residual %.3e -> %.3e, ratio %.3f (want [3.5, 4.5])", rc, rf,
             ratio));
}

// Pseudo-energy decay: fitted exponent vs tau within 15% of -1 over
// t in [5, 50], and pointwise E(t) <= 1.05 E(0) / tau.
void c05(double t0) {
  const SharedRescaled& s = rescaled_pair();
  const double expo = s.coarse.has_decay ? s.coarse.decay.exponent : 0.0;
  const double env = s.coarse.scalars.at("envelope_max_ratio");
  const double wall = now_s() - t0;
  report(5,
         s.coarse.has_decay && std::abs(expo - (-1.0)) <= 0.15 &&
             env <= 1.05 && wall < 120.0,
         wall,
         fmt("fit exponent %.4f (want -1 +- 0.15), envelope max ratio %.4f "
             "(<=1.05)",
             expo, env));
}

// Long-range profile convergence: the rescaled density settles in W1.
void c06(double t0) {
  json doc = preset("long_range").to_json();
  const RunSummary s = run_doc(doc, "long_range");
  const bool hp = s.has_profile;
  const double last = hp ? s.profile.last_decade_max : 1e300;
  const double wall = now_s() - t0;
  report(6,
         s.conforming && hp && s.profile.cauchy_flag && last <= 0.05 &&
             wall < 300.0,
         wall,
         fmt("settled %s, last-decade max W1 %.4f (<=0.05)",
             hp && s.profile.cauchy_flag ? "yes" : "no", last));
}

// Short-range scattering: L1 distance of |psi(t)|^2 to the dispersive
// profile of the back-propagated final state decreases monotonically over
// [10, 80] and ends below 0.1x its initial value.
void c07(double t0) {
  json doc = preset("korteweg_scatter").to_json();
  const RunSummary s = run_doc(doc, "korteweg_scatter");
  bool mono = s.has_profile && !s.profile.distances.empty();
  double ratio = 1e300;
  if (mono) {
    const std::vector<double>& d = s.profile.distances;
    for (std::size_t k = 1; k < d.size(); ++k)
      mono = mono && d[k] <= d[k - 1] * (1.0 + 1e-6);
    ratio = d.back() / d.front();
  }
  const double wall = now_s() - t0;
  report(7, s.conforming && mono && ratio <= 0.1 && wall < 300.0, wall,
         fmt("monotone %s, final/initial %.4f (<=0.1)", mono ? "yes" : "no",
             ratio));
}

// Semiclassical uniformity: sup_t (moment2 + ||Psi||^{2s+2}_{L^{2s+2}})
// varies by at most 2x across eps in {1, 0.1, 0.01}.
void c08(double t0) {
  double lo = 1e300, hi = 0.0;
  std::string detail;
  bool conforming = true;
  for (RunConfig cfg : preset_sweep("semiclassical_sweep")) {
    json doc = cfg.to_json();
    const double eps = doc["physical"]["eps"].get<double>();
    const RunSummary s = run_doc(doc, fmt("sweep_eps%g", eps));
    const double sup = s.scalars.at("sup_moment2_plus_pnorm");
    lo = std::min(lo, sup);
    hi = std::max(hi, sup);
    conforming = conforming && s.conforming;
    detail += fmt("%seps=%g sup=%.4f", detail.empty() ? "" : ", ", eps, sup);
  }
  const double ratio = hi / lo;
  const double wall = now_s() - t0;
  report(8, conforming && ratio <= 2.0 && wall < 600.0, wall,
         detail + fmt("; ratio %.4f (<=2)", ratio));
}

// Fluid energy inequality and its dt^2 defect: the signed identity defect
// at three fixed steps isolates the O(dt^2) term by successive differences.
void c09(double t0) {
  auto fluid_doc = [](double dt) {
    json doc = preset("viscous_decay").to_json();
    doc["scheme"]["dt_policy"] = "fixed";
    doc["scheme"]["dt"] = dt;
    doc["scheme"]["t_max"] = 20.0;
    doc["scheme"]["fit_window"] = {10.0, 20.0};
    doc["output"]["snapshots"] = false;
    return doc;
  };
  const RunSummary r8 = run_doc(fluid_doc(8e-4), "fluid_dt8e-4");
  const RunSummary r4 = run_doc(fluid_doc(4e-4), "fluid_dt4e-4");
  const RunSummary r2 = run_doc(fluid_doc(2e-4), "fluid_dt2e-4");
  bool base = true;
  double drift = 0.0, slack = -1e300, minr = 1e300;
  for (const RunSummary* s : {&r8, &r4, &r2}) {
    base = base && s->conforming;
    drift = std::max(drift, s->scalars.at("mass_drift_rel"));
    slack = std::max(slack, s->scalars.at("energy_slack"));
    minr = std::min(minr, s->scalars.at("min_density_run"));
  }
  const double s8 = r8.scalars.at("energy_defect_signed");
  const double s4 = r4.scalars.at("energy_defect_signed");
  const double s2 = r2.scalars.at("energy_defect_signed");
  const double ratio = (s8 - s4) / (s4 - s2);
  const double wall = now_s() - t0;
  report(9,
         base && drift <= 1e-10 && slack <= 1e-9 && minr >= 1e-3 &&
             ratio >= 3.5 && ratio <= 4.5 && wall < 300.0,
         wall,
         fmt("slack max %.3e (<=0), dt^2 defect ratio %.3f (want [3.5, 4.5]), "
             "mass drift %.1e, min density %.3f",
             slack, ratio, drift, minr));
}

// Fluid decay: fitted regularized-energy exponent vs tau within 25% of -1
// over [10, 100], and the second moment never exceeds 1.1x its t = 1 value.
void c10(double t0) {
  json doc = preset("viscous_decay").to_json();
  const RunSummary s = run_doc(doc, "viscous_decay");
  const double expo = s.has_decay ? s.decay.exponent : 0.0;
  const double m2a = s.scalars.at("moment2_at_1");
  const double m2m = s.scalars.at("moment2_max_from_1");
  const double wall = now_s() - t0;
  report(10,
         s.conforming && s.has_decay && std::abs(expo - (-1.0)) <= 0.25 &&
             m2m <= 1.1 * m2a && wall < 600.0,
         wall,
         fmt("fit exponent %.4f (want -1 +- 0.25), moment2 max/at1 %.4f "
             "(<=1.1)",
             expo, m2m / m2a));
}

// Smooth random vacuum-free field: low-frequency random spectrum over a
// constant background (same construction as the unit tests).
WaveField random_smooth_state(const Grid& g, unsigned seed) {
  SpectralWorkspace W(g);
  std::mt19937 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  WaveField f(g, 1.0, Frame::original);
  std::vector<cplx> hat(g.size(), cplx(0, 0));
  const int n = g.n;
  auto fold = [n](int j) { return j <= n / 2 ? j : j - n; };
  for (int j = 0; j < n; ++j)
    if (std::abs(fold(j)) <= n / 12) hat[j] = cplx(N(rng), N(rng));
  W.inverse(hat);
  double amp = 0.0;
  for (const auto& v : hat) amp = std::max(amp, std::abs(v));
  for (std::size_t i = 0; i < hat.size(); ++i)
    f.values[i] = cplx(5.0 * amp, 0.0) + hat[i];
  return f;
}

// Wave <-> fluid consistency: the kinetic-energy identity on randomized
// vacuum-free states, and the dilation commuting with the transform.
void c11(double t0) {
  Grid g{1, 256, 12.0};
  SpectralWorkspace W(g);
  double worst = 0.0;
  for (unsigned seed = 0; seed < 20; ++seed)
    worst = std::max(worst,
                     kinetic_identity_residual(W, random_smooth_state(g, 4000 + seed)));

  Grid g2{1, 512, 20.0};
  SpectralWorkspace W2(g2);
  WaveField f = gaussian_packet(g2, 1.0, 1.0, 0.0, 0.2);
  const double tau = 1.5, taudot = 0.6;
  const MadelungState via_wave =
      madelung_forward(W2, rescale_wave(W2, f, tau, taudot));
  const MadelungState via_fluid =
      rescale_fluid(W2, madelung_forward(W2, f), tau, taudot);
  double comm = 0.0;
  for (std::size_t i = 0; i < via_wave.rho.size(); ++i) {
    comm = std::max(comm, std::abs(via_wave.rho[i] - via_fluid.rho[i]));
    comm = std::max(comm,
                    std::abs(via_wave.momentum[0][i] - via_fluid.momentum[0][i]));
  }
  const double wall = now_s() - t0;
  report(11, worst <= 1e-6 && comm <= 1e-8, wall,
         fmt("kinetic identity worst of 20: %.3e (<=1e-6); rescale "
             "commutation %.3e (<=1e-8)",
             worst, comm));
}

// Momentum-corrected functional in the lab frame (sigma = 1, i.e. gamma = 3):
// B(t) (1+t)^min(2, d(gamma-1)) never exceeds 1.2x its value at the start of
// the window [1, 50] -- the fitted constant stays bounded, i.e. B decays at
// least at its expected rate with no late re-growth.
void c12(double t0) {
  json doc = {
      {"family", "korteweg_scatter"},
      {"physical",
       {{"dim", 1}, {"sigma", 1.0}, {"gamma", 3.0}, {"lambda", 1.5}, {"eps", 1.0}}},
      {"grid", {{"n", 8192}, {"half_length", 512.0}}},
      {"scheme", {{"dt", 2e-3}, {"t_max", 50.0}, {"snapshot_start", 10.0}}},
      {"initial_data", {{"kind", "gaussian"}}},
      {"output", {{"snapshots", false}}}};
  const RunSummary s = run_doc(doc, "korteweg_constant");
  const double q =
      std::min(2.0, 1.0 * (doc["physical"]["gamma"].get<double>() - 1.0));
  const std::vector<double>& B = s.column("B");
  double cref = -1.0, cmax = 0.0;
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    const double t = s.times[i];
    if (t < 1.0 || t > 50.0) continue;
    const double c = B[i] * std::pow(1.0 + t, q);
    if (cref < 0.0) cref = c;
    cmax = std::max(cmax, c);
  }
  const double wall = now_s() - t0;
  report(12,
         s.conforming && cref > 0.0 && cmax <= 1.2 * cref && wall < 120.0,
         wall,
         fmt("B(t)(1+t)^%g: window start %.4f, max %.4f, max/start %.4f "
             "(<=1.2)",
             q, cref, cmax, cmax / cref));
}

}  // namespace

int main(int argc, char** argv) {
  using CheckFn = void (*)(double);
  const CheckFn checks[12] = {c01, c02, c03, c04, c05, c06,
                              c07, c08, c09, c10, c11, c12};
  std::vector<bool> wanted(12, argc <= 1);
  for (int a = 1; a < argc; ++a) {
    const int id = std::atoi(argv[a]);
    if (id >= 1 && id <= 12) wanted[id - 1] = true;
  }
  for (int i = 0; i < 12; ++i)
    if (wanted[i]) guarded(i + 1, checks[i]);
  int ran = 0;
  for (int i = 0; i < 12; ++i) ran += wanted[i];
  std::printf("acceptance: %d/%d passed\n", ran - g_failures, ran);
  return g_failures == 0 ? 0 : 1;
}
