// Diagnostics tests.  Oracles:
//  * closed-form energies: uniform density on the torus has E = 1/(2L) for
//    gamma = 2, a unit Gaussian has gradient energy eps^2/4 and second
//    moment 1/2, and the product Gaussian covers the 2D paths.
//  * the free-packet spreading law: a Gaussian evolving freely has
//    kinetic + gradient part of the momentum-corrected functional exactly
//    1/(4 t^2), so the fitted decay exponent against tau = sqrt(1+t^2)
//    lands on -2.
//  * Wasserstein-1 of grid-aligned translated bumps telescopes to the exact
//    translation distance; symmetry, normalization invariance and the
//    triangle inequality hold to roundoff.
//  * decay fitting recovers exact power laws to 1e-10 and is robust to 1%
//    multiplicative ripple.
//  * profile convergence flags a settling width sequence and rejects an
//    alternating one.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "dscale/diagnostics.hpp"
#include "dscale/errors.hpp"
#include "dscale/madelung.hpp"
#include "dscale/tau.hpp"

using namespace dscale;
using std::numbers::pi;

namespace {

MadelungState gaussian_state(const Grid& g, double width_sq, double center,
                             Frame fr) {
  MadelungState s(g, 1.0, fr);
  for (int i = 0; i < g.n; ++i) {
    const double y = g.coord1d(i) - center;
    s.rho[i] = std::exp(-y * y / width_sq) / std::sqrt(pi * width_sq);
  }
  return s;
}

}  // namespace

TEST_CASE("original-frame energy closed forms") {
  SUBCASE("uniform density, gamma = 2: only pressure, E = 1/(2L)") {
    Grid g{1, 64, 3.0};
    SpectralWorkspace W(g);
    MadelungState s(g, 1.0, Frame::original);
    for (auto& v : s.rho) v = 1.0 / (2.0 * g.half_length);
    EnergyBreakdown e = energy_original(W, s, 0.0, 2.0);
    CHECK(e.kinetic == 0.0);
    CHECK(e.gradient == 0.0);
    CHECK(e.potential ==
          doctest::Approx(1.0 / (2.0 * g.half_length)).epsilon(1e-14));
    CHECK(e.total == doctest::Approx(e.potential).epsilon(1e-14));
  }

  SUBCASE("unit Gaussian: gradient = eps^2/4, kinetic = c^2/4 for u = c y") {
    Grid g{1, 256, 8.0};
    SpectralWorkspace W(g);
    MadelungState s = gaussian_state(g, 1.0, 0.0, Frame::original);
    const double c = 0.3;
    for (int i = 0; i < g.n; ++i)
      s.momentum[0][i] = s.rho[i] * c * g.coord1d(i);
    const double eps = 0.8;
    EnergyBreakdown e = energy_original(W, s, eps, 2.0);
    CHECK(e.gradient == doctest::Approx(0.25 * eps * eps).epsilon(1e-8));
    CHECK(e.kinetic == doctest::Approx(0.25 * c * c).epsilon(1e-8));
    CHECK(e.total ==
          doctest::Approx(e.kinetic + e.gradient + e.potential).epsilon(1e-14));
  }

  SUBCASE("2D product Gaussian: gradient = 1/2, pressure = 1/(2 pi)") {
    Grid g{2, 64, 6.0};
    SpectralWorkspace W(g);
    MadelungState s(g, 1.0, Frame::original);
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j) {
        const double x = g.coord1d(i), y = g.coord1d(j);
        s.rho[std::size_t(i) * g.n + j] = std::exp(-x * x - y * y) / pi;
      }
    EnergyBreakdown e = energy_original(W, s, 1.0, 2.0);
    CHECK(e.gradient == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(e.potential == doctest::Approx(1.0 / (2.0 * pi)).epsilon(1e-8));
  }

  SUBCASE("validation") {
    Grid g{1, 64, 3.0};
    SpectralWorkspace W(g);
    MadelungState s(g, 1.0, Frame::rescaled);
    for (auto& v : s.rho) v = 0.1;
    CHECK_THROWS_AS(energy_original(W, s, 1.0, 2.0), InvalidInputError);
    s.frame = Frame::original;
    CHECK_THROWS_AS(energy_original(W, s, -1.0, 2.0), InvalidInputError);
    CHECK_THROWS_AS(energy_original(W, s, 1.0, 1.0), InvalidInputError);
  }
}

TEST_CASE("momentum-corrected functional") {
  Grid g{1, 256, 8.0};
  SpectralWorkspace W(g);

  SUBCASE("u = x/t kills the kinetic part") {
    const double t = 2.5;
    MadelungState s = gaussian_state(g, 1.0, 0.0, Frame::original);
    for (int i = 0; i < g.n; ++i)
      s.momentum[0][i] = s.rho[i] * g.coord1d(i) / t;
    BFunctional b = b_functional(W, s, t, 1.0, 2.0);
    CHECK(std::abs(b.kinetic) <= 1e-10);
    CHECK(b.gradient > 0.0);
  }

  SUBCASE("uniform density with u = x/t and eps = 0: pressure only") {
    const double t = 4.0;
    MadelungState s(g, 1.0, Frame::original);
    for (int i = 0; i < g.n; ++i) {
      s.rho[i] = 1.0 / (2.0 * g.half_length);
      s.momentum[0][i] = s.rho[i] * g.coord1d(i) / t;
    }
    BFunctional b = b_functional(W, s, t, 0.0, 2.0);
    CHECK(b.kinetic == 0.0);
    CHECK(b.b == doctest::Approx(1.0 / (2.0 * g.half_length)).epsilon(1e-14));
    CHECK(b.a == doctest::Approx(t * t * b.b).epsilon(1e-15));
  }

  SUBCASE("free Gaussian spreading: kinetic + gradient = 1/(4 t^2)") {
    // |psi(t)|^2 for the free evolution of pi^{-1/4} e^{-x^2/2} is a
    // Gaussian of squared width 1 + t^2 with velocity u = x t/(1+t^2);
    // u - x/t = -x/(t(1+t^2)) makes kinetic + gradient exactly 1/(4 t^2).
    Grid gw{1, 1024, 100.0};
    SpectralWorkspace Ww(gw);
    std::vector<double> times, values;
    for (int k = 0; k <= 8; ++k) {
      const double t = 5.0 * std::pow(4.0, k / 8.0);
      const double s2 = 1.0 + t * t;
      MadelungState s = gaussian_state(gw, s2, 0.0, Frame::original);
      for (int i = 0; i < gw.n; ++i)
        s.momentum[0][i] = s.rho[i] * gw.coord1d(i) * t / s2;
      BFunctional b = b_functional(Ww, s, t, 1.0, 2.0);
      const double v = b.kinetic + b.gradient;
      CHECK(v == doctest::Approx(0.25 / (t * t)).epsilon(1e-6));
      times.push_back(t);
      values.push_back(v);
    }
    TauTrajectory traj = solve_tau(2.0, 25.0);
    DecayFit f = fit_decay(times, values, traj, 5.0, 20.0);
    CHECK(f.count == 9);
    CHECK(std::abs(f.exponent + 2.0) <= 0.2);
    CHECK(f.residual <= 0.05);
  }

  SUBCASE("validation") {
    MadelungState s = gaussian_state(g, 1.0, 0.0, Frame::original);
    CHECK_THROWS_AS(b_functional(W, s, 0.0, 1.0, 2.0), InvalidInputError);
    CHECK_THROWS_AS(b_functional(W, s, -1.0, 1.0, 2.0), InvalidInputError);
    s.frame = Frame::rescaled;
    CHECK_THROWS_AS(b_functional(W, s, 1.0, 1.0, 2.0), InvalidInputError);
  }
}

TEST_CASE("rescaled pseudo-energy") {
  Grid g{1, 256, 8.0};
  SpectralWorkspace W(g);
  const double alpha = 1.0;
  TauTrajectory traj = solve_tau(alpha, 5.0);

  MadelungState s = gaussian_state(g, 1.0, 0.0, Frame::rescaled);
  for (int i = 0; i < g.n; ++i)
    s.momentum[0][i] = s.rho[i] * 0.2 * std::sin(pi * g.coord1d(i) / 8.0);

  SUBCASE("tau = 1, taudot = 0, nu = 0: no dissipation") {
    EnergyBreakdown e = pseudo_energy_fluid(W, s, traj, 0.0, 0.5, 0.0, 2.0,
                                            alpha);
    CHECK(e.dissipation_total == 0.0);
    CHECK(e.total > 0.0);
  }

  SUBCASE("at t = 0 the pseudo-energy is the original energy + confinement") {
    MadelungState so = s;
    so.frame = Frame::original;
    const double eps = 0.5;
    EnergyBreakdown ep = pseudo_energy_fluid(W, s, traj, 0.0, eps, 0.0, 2.0,
                                             alpha);
    EnergyBreakdown eo = energy_original(W, so, eps, 2.0);
    CHECK(ep.kinetic == doctest::Approx(eo.kinetic).epsilon(1e-13));
    CHECK(ep.gradient == doctest::Approx(eo.gradient).epsilon(1e-13));
    CHECK(ep.potential == doctest::Approx(eo.potential).epsilon(1e-13));
    CHECK(ep.total ==
          doctest::Approx(eo.total + ep.confinement).epsilon(1e-12));
    CHECK(ep.confinement > 0.0);
  }

  SUBCASE("expanding state: every dissipation entry is nonnegative") {
    EnergyBreakdown e = pseudo_energy_fluid(W, s, traj, 2.0, 0.5, 0.3, 2.0,
                                            alpha);
    REQUIRE(e.dissipation.count("viscous") == 1);
    for (const auto& kv : e.dissipation) {
      CAPTURE(kv.first);
      CHECK(kv.second >= 0.0);
    }
    CHECK(e.dissipation_total > 0.0);
  }

  SUBCASE("validation") {
    CHECK_THROWS_AS(pseudo_energy_fluid(W, s, traj, 0.0, 0.5, 0.0, 2.0, 1.5),
                    InvalidInputError);
    MadelungState so = s;
    so.frame = Frame::original;
    CHECK_THROWS_AS(pseudo_energy_fluid(W, so, traj, 0.0, 0.5, 0.0, 2.0,
                                        alpha),
                    InvalidInputError);
  }
}

TEST_CASE("decay-exponent fitting") {
  TauTrajectory traj = solve_tau(2.0, 110.0);
  std::vector<double> times;
  for (int k = 0; k < 20; ++k)
    times.push_back(std::pow(10.0, 2.0 * k / 19.0));  // 1 .. 100

  SUBCASE("exact power law is recovered to 1e-10") {
    std::vector<double> values;
    for (double t : times) {
      const double tau = traj.eval(t).tau;
      values.push_back(1.0 / (tau * tau));
    }
    DecayFit f = fit_decay(times, values, traj, 1.0, 100.0);
    CHECK(std::abs(f.exponent + 2.0) <= 1e-10);
    CHECK(f.residual <= 1e-12);
    CHECK(f.count == 20);
  }

  SUBCASE("1% multiplicative ripple moves the exponent by < 0.02") {
    std::vector<double> values;
    for (double t : times)
      values.push_back(3.0 / traj.eval(t).tau * (1.0 + 0.01 * std::sin(t)));
    DecayFit f = fit_decay(times, values, traj, 1.0, 100.0);
    CHECK(std::abs(f.exponent + 1.0) <= 0.02);
  }

  SUBCASE("constant series fits exponent 0") {
    std::vector<double> values(times.size(), 2.7);
    DecayFit f = fit_decay(times, values, traj, 1.0, 100.0);
    CHECK(std::abs(f.exponent) <= 1e-10);
  }

  SUBCASE("validation") {
    std::vector<double> values(times.size(), 1.0);
    values[5] = 0.0;
    CHECK_THROWS_AS(fit_decay(times, values, traj, 1.0, 100.0),
                    InvalidInputError);
    std::vector<double> t7(times.begin(), times.begin() + 7);
    std::vector<double> v7(7, 1.0);
    CHECK_THROWS_AS(fit_decay(t7, v7, traj, 1.0, 100.0), InvalidInputError);
    // 20 samples, but only 7 inside the window
    CHECK_THROWS_AS(fit_decay(times, std::vector<double>(times.size(), 1.0),
                              traj, 25.0, 100.0),
                    InvalidInputError);
    CHECK_THROWS_AS(fit_decay(times, std::vector<double>(times.size(), 1.0),
                              traj, 5.0, 5.0),
                    InvalidInputError);
  }
}

TEST_CASE("Wasserstein-1 on the line") {
  Grid g{1, 512, 8.0};
  const double h = g.spacing();
  auto bump = [&](double center, double width_sq) {
    std::vector<double> r(g.size());
    for (int i = 0; i < g.n; ++i) {
      const double y = g.coord1d(i) - center;
      r[i] = std::exp(-y * y / width_sq);
    }
    return r;
  };

  SUBCASE("identical densities, and scale invariance") {
    std::vector<double> a = bump(-1.0, 0.5);
    CHECK(wasserstein1_1d(a, a, g) == 0.0);
    std::vector<double> b = a;
    for (auto& v : b) v *= 5.0;
    CHECK(wasserstein1_1d(a, b, g) <= 1e-14);
  }

  SUBCASE("grid-aligned translation: distance is exact") {
    const double a = 41.0 * h;
    std::vector<double> r1 = bump(-2.0, 0.01);
    std::vector<double> r2 = bump(-2.0 + a, 0.01);
    CHECK(wasserstein1_1d(r1, r2, g) == doctest::Approx(a).epsilon(1e-12));
  }

  SUBCASE("generic translation: distance within one spacing") {
    std::vector<double> r1 = bump(-2.0, 0.01);
    std::vector<double> r2 = bump(-0.7, 0.01);
    CHECK(std::abs(wasserstein1_1d(r1, r2, g) - 1.3) <= h);
  }

  SUBCASE("symmetry and triangle inequality") {
    std::vector<double> r1 = bump(-2.0, 0.3);
    std::vector<double> r2 = bump(0.5, 0.8);
    std::vector<double> r3 = bump(1.5, 0.2);
    for (int i = 0; i < g.n; ++i) r3[i] += 0.4 * r1[i];
    CHECK(wasserstein1_1d(r1, r2, g) == wasserstein1_1d(r2, r1, g));
    const double d12 = wasserstein1_1d(r1, r2, g);
    const double d23 = wasserstein1_1d(r2, r3, g);
    const double d13 = wasserstein1_1d(r1, r3, g);
    CHECK(d13 <= d12 + d23 + 1e-14);
  }

  SUBCASE("validation") {
    std::vector<double> zero(g.size(), 0.0);
    std::vector<double> a = bump(0.0, 0.5);
    CHECK_THROWS_AS(wasserstein1_1d(a, zero, g), InvalidInputError);
    Grid g2{2, 16, 1.0};
    std::vector<double> flat(g2.size(), 1.0);
    CHECK_THROWS_AS(wasserstein1_1d(flat, flat, g2), InvalidInputError);
  }
}

TEST_CASE("profile convergence detection") {
  Grid g{1, 512, 8.0};
  auto gaussian = [&](double width_sq) {
    std::vector<double> r(g.size());
    for (int i = 0; i < g.n; ++i) {
      const double y = g.coord1d(i);
      r[i] = std::exp(-y * y / width_sq) / std::sqrt(pi * width_sq);
    }
    return r;
  };

  SUBCASE("stationary sequence: all distances zero, flag set") {
    std::vector<double> times{1.0, 3.0, 6.0, 12.0};
    std::vector<std::vector<double>> snaps(4, gaussian(1.0));
    ProfileConvergence pc = profile_converge(times, snaps, g);
    for (double d : pc.distances) CHECK(d == 0.0);
    CHECK(pc.cauchy_flag);
    CHECK(pc.reference_time == 12.0);
  }

  SUBCASE("settling width sequence from the spreading packet") {
    // Rescaling the freely spreading Gaussian of initial width w by
    // tau = sqrt(1+t^2) leaves a profile of squared width
    // (w^2 + t^2/w^2)/(1+t^2) -> 1/w^2: the snapshots settle.
    const double w2 = 1.44;
    std::vector<double> times{1.0, 2.0, 5.0, 10.0, 20.0, 40.0};
    std::vector<std::vector<double>> snaps;
    for (double t : times)
      snaps.push_back(gaussian((w2 + t * t / w2) / (1.0 + t * t)));
    ProfileConvergence pc = profile_converge(times, snaps, g);
    for (std::size_t i = 1; i < pc.distances.size(); ++i)
      CHECK(pc.distances[i] <= pc.distances[i - 1] + 1e-14);
    CHECK(pc.cauchy_flag);
    CHECK(pc.last_decade_max <= 0.01);
  }

  SUBCASE("alternating bumps are rejected") {
    auto shifted = [&](double c) {
      std::vector<double> r(g.size());
      for (int i = 0; i < g.n; ++i) {
        const double y = g.coord1d(i) - c;
        r[i] = std::exp(-y * y / 0.25);
      }
      return r;
    };
    std::vector<double> times{1.0, 2.0, 5.0, 12.0};
    std::vector<std::vector<double>> snaps{shifted(1.0), shifted(-1.0),
                                           shifted(1.0), shifted(-1.0)};
    ProfileConvergence pc = profile_converge(times, snaps, g);
    CHECK_FALSE(pc.cauchy_flag);
  }

  SUBCASE("validation") {
    std::vector<std::vector<double>> three(3, gaussian(1.0));
    CHECK_THROWS_AS(
        profile_converge(std::vector<double>{1.0, 2.0, 11.0}, three, g),
        InvalidInputError);
    std::vector<std::vector<double>> four(4, gaussian(1.0));
    CHECK_THROWS_AS(
        profile_converge(std::vector<double>{1.0, 2.0, 3.0, 5.0}, four, g),
        InvalidInputError);
  }
}

TEST_CASE("moment monitors") {
  SUBCASE("unit Gaussian: mass 1, centered, second moment 1/2") {
    Grid g{1, 256, 8.0};
    std::vector<double> rho(g.size());
    for (int i = 0; i < g.n; ++i) {
      const double y = g.coord1d(i);
      rho[i] = std::exp(-y * y) / std::sqrt(pi);
    }
    const std::array<double, 3> m = moments(rho, g);
    CHECK(m[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(m[1]) <= 1e-12);
    CHECK(m[2] == doctest::Approx(0.5).epsilon(1e-10));
  }

  SUBCASE("shifted bump: signed first moment = center * mass") {
    Grid g{1, 256, 8.0};
    const double c = 32.0 * g.spacing();
    std::vector<double> rho(g.size());
    for (int i = 0; i < g.n; ++i) {
      const double y = g.coord1d(i) - c;
      rho[i] = std::exp(-y * y) / std::sqrt(pi);
    }
    const std::array<double, 3> m = moments(rho, g);
    CHECK(m[1] == doctest::Approx(c * m[0]).epsilon(1e-12));
  }

  SUBCASE("2D product Gaussian: mass 1, second moment 1") {
    Grid g{2, 64, 6.0};
    std::vector<double> rho(g.size());
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j) {
        const double x = g.coord1d(i), y = g.coord1d(j);
        rho[std::size_t(i) * g.n + j] = std::exp(-x * x - y * y) / pi;
      }
    const std::array<double, 3> m = moments(rho, g);
    CHECK(m[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(m[1]) <= 1e-10);
    CHECK(m[2] == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("large-time energy envelope") {
  SUBCASE("shape closed forms, including the log branch") {
    CHECK(h4_shape(3.0, 1.5, 0.2) ==
          doctest::Approx(std::pow(4.0, -1.5) + 0.05).epsilon(1e-15));
    const double t = std::exp(1.0) - 1.0;
    CHECK(h4_shape(t, 1.0, 0.3) ==
          doctest::Approx(1.3 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(h4_shape(5.0, 2.0, 0.0) ==
          doctest::Approx(1.0 / 36.0).epsilon(1e-15));
  }

  SUBCASE("envelope constant is the tight maximum over the run") {
    EnergyLedger led;
    const double alpha = 1.0, nu = 0.1;
    for (int k = 0; k <= 10; ++k) {
      const double t = 10.0 * k;
      EnergyBreakdown e;
      // 0.8 * shape at t = 0, decaying strictly faster afterwards
      e.kinetic = 0.8 * h4_shape(t, alpha, nu) / (1.0 + 0.05 * k);
      e.finalize();
      led.append(t, e, 1.0, 0.0, 1.0);
    }
    const double c0 = h4_envelope(led, alpha, nu);
    CHECK(c0 == doctest::Approx(0.8).epsilon(1e-14));
    REQUIRE(led.h4_bound.size() == led.size());
    for (std::size_t i = 0; i < led.size(); ++i)
      CHECK(led.rows[i].total <= led.h4_bound[i] * (1.0 + 1e-14));
  }

  SUBCASE("empty ledger is rejected") {
    EnergyLedger led;
    CHECK_THROWS_AS(h4_envelope(led, 1.0, 0.1), InvalidInputError);
  }
}
