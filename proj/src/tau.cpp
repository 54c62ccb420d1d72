#include "dscale/tau.hpp"

#include <algorithm>
#include <cmath>

namespace dscale {

namespace {

struct State {
  double tau, v;
};

inline double accel(double tau, double alpha) {
  return 0.5 * alpha * std::pow(tau, -1.0 - alpha);
}

inline State rk4(const State& y, double h, double alpha) {
  const double k1t = y.v, k1v = accel(y.tau, alpha);
  const double k2t = y.v + 0.5 * h * k1v, k2v = accel(y.tau + 0.5 * h * k1t, alpha);
  const double k3t = y.v + 0.5 * h * k2v, k3v = accel(y.tau + 0.5 * h * k2t, alpha);
  const double k4t = y.v + h * k3v, k4v = accel(y.tau + h * k3t, alpha);
  return {y.tau + h / 6.0 * (k1t + 2 * k2t + 2 * k3t + k4t),
          y.v + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)};
}

inline double first_integral_residual(double tau, double v, double alpha) {
  return std::abs(v * v - (1.0 - std::pow(tau, -alpha)));
}

// Quintic Hermite in s = (t-a)/h from endpoint (value, d/dt, d2/dt2).
inline double quintic(double s, double h, double p0, double v0, double a0, double p1, double v1,
                      double a1) {
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  const double H0 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
  const double H1 = s - 6 * s3 + 8 * s4 - 3 * s5;
  const double H2 = 0.5 * (s2 - 3 * s3 + 3 * s4 - s5);
  const double H3 = 10 * s3 - 15 * s4 + 6 * s5;
  const double H4 = -4 * s3 + 7 * s4 - 3 * s5;
  const double H5 = 0.5 * (s3 - 2 * s4 + s5);
  return p0 * H0 + h * v0 * H1 + h * h * a0 * H2 + p1 * H3 + h * v1 * H4 + h * h * a1 * H5;
}

// Cubic Hermite in s from endpoint (value, d/dt).
inline double cubic(double s, double h, double p0, double m0, double p1, double m1) {
  const double s2 = s * s, s3 = s2 * s;
  return p0 * (2 * s3 - 3 * s2 + 1) + h * m0 * (s3 - 2 * s2 + s) + p1 * (-2 * s3 + 3 * s2) +
         h * m1 * (s3 - s2);
}

struct Interval {
  double a, h;
  State ya, yb;
  double fa, fb;  // tau'' at the endpoints
};

inline TauPoint eval_interval(const Interval& I, double t, double alpha) {
  const double s = (t - I.a) / I.h;
  TauPoint p;
  p.tau = quintic(s, I.h, I.ya.tau, I.ya.v, I.fa, I.yb.tau, I.yb.v, I.fb);
  p.taudot = cubic(s, I.h, I.ya.v, I.fa, I.yb.v, I.fb);
  p.tauddot = accel(p.tau, alpha);
  return p;
}

// 5-point Gauss-Legendre on [-1, 1]
constexpr double kGLx[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                            0.9061798459386640};
constexpr double kGLw[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                            0.2369268850561891, 0.2369268850561891};

}  // namespace

std::size_t TauTrajectory::locate(double t) const {
  // first knot with knot.t >= t, then step back to the interval start
  auto it = std::lower_bound(knots_.begin(), knots_.end(), t,
                             [](const Knot& k, double x) { return k.t < x; });
  std::size_t i = std::size_t(it - knots_.begin());
  if (i > 0) --i;
  if (i + 1 >= knots_.size()) i = knots_.size() - 2;
  return i;
}

TauPoint TauTrajectory::eval(double t) const {
  if (!std::isfinite(t) || t < 0.0 || t > t_max_ * (1.0 + 1e-14) + 1e-300)
    throw OutOfRangeError("tau evaluation outside solved range");
  t = std::min(t, t_max_);
  const std::size_t i = locate(t);
  const Knot& a = knots_[i];
  const Knot& b = knots_[i + 1];
  Interval I{a.t, b.t - a.t, {a.tau, a.taudot}, {b.tau, b.taudot}, accel(a.tau, alpha_),
             accel(b.tau, alpha_)};
  return eval_interval(I, t, alpha_);
}

double TauTrajectory::residual(double t) const {
  const TauPoint p = eval(t);
  return first_integral_residual(p.tau, p.taudot, alpha_);
}

double TauTrajectory::phase_integral(double t1, double t2, double p) const {
  if (!std::isfinite(t1) || !std::isfinite(t2) || !std::isfinite(p))
    throw InvalidInputError("phase_integral arguments must be finite");
  if (t1 > t2) throw InvalidInputError("phase_integral needs t1 <= t2");
  if (t1 < 0.0 || t2 > t_max_ * (1.0 + 1e-14))
    throw OutOfRangeError("phase_integral outside solved range");
  if (t1 == t2) return 0.0;
  t2 = std::min(t2, t_max_);

  double total = 0.0;
  double a = t1;
  std::size_t i = locate(t1);
  while (a < t2) {
    while (i + 2 < knots_.size() && a >= knots_[i + 1].t) ++i;
    const double b = std::min(t2, knots_[i + 1].t);
    const Knot& ka = knots_[i];
    const Knot& kb = knots_[i + 1];
    Interval I{ka.t, kb.t - ka.t, {ka.tau, ka.taudot}, {kb.tau, kb.taudot},
               accel(ka.tau, alpha_), accel(kb.tau, alpha_)};
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int q = 0; q < 5; ++q) {
      const TauPoint pt = eval_interval(I, mid + half * kGLx[q], alpha_);
      acc += kGLw[q] * std::pow(pt.tau, -p);
    }
    total += acc * half;
    a = b;
  }
  return total;
}

TauTrajectory solve_tau(double alpha, double t_max, double tol) {
  if (!std::isfinite(alpha) || alpha <= 0.0)
    throw InvalidInputError("alpha must be positive and finite");
  if (!std::isfinite(t_max) || t_max <= 0.0)
    throw InvalidInputError("t_max must be positive and finite");
  if (!std::isfinite(tol) || tol < 1e-14 || tol > 1e-2)
    throw InvalidInputError("tol must lie in [1e-14, 1e-2]");

  TauTrajectory traj;
  traj.alpha_ = alpha;
  traj.tol_ = tol;
  traj.t_max_ = t_max;
  traj.knots_.push_back({0.0, 1.0, 0.0});

  // error budgets (see header): knot residual, dense-output midpoint error,
  // per-step local truncation error
  const double res_budget = 0.25 * tol;
  const double herm_budget = 0.25 * tol;
  const double sd_budget = tol / 64.0;

  // ---- Taylor bootstrap over the degenerate corner at t = 0 --------------
  // tau is even in t; through h^4:
  //   tau(h)  = 1 + (alpha/4) h^2 - (alpha^2 (1+alpha)/96) h^4
  //   tau'(h) =     (alpha/2) h   - (alpha^2 (1+alpha)/24) h^3
  double h0 = std::min(5e-3, t_max / 8.0);
  State y{};
  double t = 0.0;
  for (;;) {
    const double h2 = h0 * h0;
    y.tau = 1.0 + 0.25 * alpha * h2 - alpha * alpha * (1.0 + alpha) / 96.0 * h2 * h2;
    y.v = 0.5 * alpha * h0 - alpha * alpha * (1.0 + alpha) / 24.0 * h0 * h2;
    if (first_integral_residual(y.tau, y.v, alpha) <= res_budget) break;
    h0 *= 0.5;
    if (h0 < 1e-10) throw ConvergenceError("tau bootstrap failed", 0.0);
  }
  if (h0 >= t_max) {  // degenerate tiny-horizon case: single Taylor interval
    const double h = t_max, h2 = h * h;
    y.tau = 1.0 + 0.25 * alpha * h2 - alpha * alpha * (1.0 + alpha) / 96.0 * h2 * h2;
    y.v = 0.5 * alpha * h - alpha * alpha * (1.0 + alpha) / 24.0 * h * h2;
    traj.knots_.push_back({t_max, y.tau, y.v});
    return traj;
  }
  t = h0;
  traj.knots_.push_back({t, y.tau, y.v});

  // ---- adaptive RK4 main loop --------------------------------------------
  double h = h0;
  int rejections_in_a_row = 0;
  while (t < t_max) {
    h = std::min(h, t_max - t);
    const State y_full = rk4(y, h, alpha);
    const State y_mid = rk4(y, 0.5 * h, alpha);
    const State y_half = rk4(y_mid, 0.5 * h, alpha);

    const double sd_err =
        std::max(std::abs(y_full.tau - y_half.tau), std::abs(y_full.v - y_half.v)) / 15.0;
    const double res_err = first_integral_residual(y_half.tau, y_half.v, alpha);
    Interval I{t, h, y, y_half, accel(y.tau, alpha), accel(y_half.tau, alpha)};
    const TauPoint interp = eval_interval(I, t + 0.5 * h, alpha);
    const double herm_err =
        std::max(std::abs(interp.tau - y_mid.tau), std::abs(interp.taudot - y_mid.v));

    const double ratio = std::max({sd_err / sd_budget, res_err / res_budget,
                                   herm_err / herm_budget});
    if (ratio <= 1.0) {
      t += h;
      y = y_half;
      traj.knots_.push_back({t, y.tau, y.v});
      const double grow = (ratio > 0.0) ? 0.85 * std::pow(ratio, -0.2) : 2.0;
      h *= std::clamp(grow, 0.3, 2.0);
      rejections_in_a_row = 0;
    } else {
      h *= 0.5;
      if (++rejections_in_a_row > 60 || h < 1e-12 * (1.0 + t))
        throw ConvergenceError("tau step control stalled", t);
    }
  }
  return traj;
}

}  // namespace dscale
