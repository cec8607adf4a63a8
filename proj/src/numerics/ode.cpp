#include "fgeo/numerics/ode.hpp"

#include <algorithm>
#include <cmath>

#include "fgeo/common.hpp"

namespace fgeo::num {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output weights (Hairer's contd5).
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

void check_finite(const std::vector<double>& v) {
  for (double x : v)
    require(std::isfinite(x), "integrate_ode: NaN/Inf in field evaluation");
}

}  // namespace

void IntegratorConfig::validate() const {
  require(abs_tol > 0 && rel_tol > 0,
          "IntegratorConfig: tolerances must be strictly positive");
  require(max_steps >= 1, "IntegratorConfig: max step count must be >= 1");
  if (method == Method::fixed_rk4)
    require(fixed_step > 0, "IntegratorConfig: fixed step must be positive");
}

std::vector<double> Trajectory::at(double t) const {
  std::vector<double> y;
  eval(t, y);
  return y;
}

void Trajectory::eval(double t, std::vector<double>& y) const {
  require(!seg_t_.empty(), "Trajectory: empty");
  const double lo = std::min(t0_, t1_), hi = std::max(t0_, t1_);
  require(t >= lo - 1e-9 * (1 + std::abs(lo)) && t <= hi + 1e-9 * (1 + std::abs(hi)),
          "Trajectory: evaluation outside [t0, t1]");
  t = std::clamp(t, lo, hi);
  // locate segment (seg_t_ is monotone in integration direction)
  std::size_t nseg = seg_t_.size() - 1;
  std::size_t i;
  if (t1_ >= t0_) {
    i = std::upper_bound(seg_t_.begin(), seg_t_.end(), t) - seg_t_.begin();
    i = (i == 0) ? 0 : i - 1;
  } else {
    i = std::upper_bound(seg_t_.begin(), seg_t_.end(), t, std::greater<>()) -
        seg_t_.begin();
    i = (i == 0) ? 0 : i - 1;
  }
  if (i >= nseg) i = nseg - 1;
  const double h = seg_t_[i + 1] - seg_t_[i];
  const double theta = (t - seg_t_[i]) / h;
  const double th1 = 1.0 - theta;
  const double* c = cont_[i].data();
  y.resize(dim_);
  for (std::size_t k = 0; k < dim_; ++k) {
    const double c0 = c[k], c1 = c[dim_ + k], c2 = c[2 * dim_ + k],
                 c3 = c[3 * dim_ + k], c4 = c[4 * dim_ + k];
    y[k] = c0 + theta * (c1 + th1 * (c2 + theta * (c3 + th1 * c4)));
  }
}

std::vector<std::vector<double>> Trajectory::sample(std::size_t n) const {
  require(n >= 2, "Trajectory::sample: need at least 2 samples");
  std::vector<std::vector<double>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double t = t0_ + (t1_ - t0_) * static_cast<double>(i) / (n - 1);
    out[i] = at(t);
  }
  return out;
}

Trajectory integrate_ode(const VectorField& field, const std::vector<double>& y0,
                         double t_begin, double t_end,
                         const IntegratorConfig& cfg) {
  cfg.validate();
  require(t_end != t_begin, "integrate_ode: empty time span");
  const std::size_t n = y0.size();
  require(n >= 1, "integrate_ode: empty state");

  Trajectory traj;
  traj.t0_ = t_begin;
  traj.t1_ = t_end;
  traj.dim_ = n;

  const double dir = (t_end > t_begin) ? 1.0 : -1.0;
  const double span = std::abs(t_end - t_begin);

  std::vector<double> y = y0, ynew(n), k1(n), k2(n), k3(n), k4(n), k5(n), k6(n),
                      k7(n), ytmp(n), err(n);
  double t = t_begin;
  field(t, y, k1);
  check_finite(k1);

  if (cfg.method == IntegratorConfig::Method::fixed_rk4) {
    std::size_t nsteps = static_cast<std::size_t>(std::ceil(span / cfg.fixed_step));
    nsteps = std::max<std::size_t>(nsteps, 1);
    require(nsteps <= cfg.max_steps, "integrate_ode: step count exceeded");
    const double h = (t_end - t_begin) / static_cast<double>(nsteps);
    traj.seg_t_.push_back(t);
    for (std::size_t s = 0; s < nsteps; ++s) {
      // classic RK4 with cubic Hermite dense data
      field(t, y, k1);
      for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + 0.5 * h * k1[i];
      field(t + 0.5 * h, ytmp, k2);
      for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + 0.5 * h * k2[i];
      field(t + 0.5 * h, ytmp, k3);
      for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * k3[i];
      field(t + h, ytmp, k4);
      for (std::size_t i = 0; i < n; ++i)
        ynew[i] = y[i] + h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
      check_finite(ynew);
      field(t + h, ynew, k7);
      // Hermite in the same 5-coefficient layout (c4 = 0)
      std::vector<double> c(5 * n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        double ydiff = ynew[i] - y[i];
        c[i] = y[i];
        c[n + i] = ydiff;
        c[2 * n + i] = h * k1[i] - ydiff;
        c[3 * n + i] = ydiff - h * k7[i] - c[2 * n + i];
      }
      traj.cont_.push_back(std::move(c));
      t += h;
      traj.seg_t_.push_back(t);
      y = ynew;
    }
    traj.seg_t_.back() = t_end;
    traj.y1_ = y;
    return traj;
  }

  // adaptive Dormand-Prince 5(4), FSAL
  double h = dir * std::min(span, 1e-2);
  traj.seg_t_.push_back(t);
  std::size_t steps = 0;
  bool last = false;
  while (!last) {
    require(steps++ < cfg.max_steps, "integrate_ode: step count exceeded");
    if (dir * (t + h - t_end) >= 0.0) {
      h = t_end - t;
      last = true;
    }
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    field(t + h / 5, ytmp, k2);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    field(t + 3 * h / 10, ytmp, k3);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    field(t + 4 * h / 5, ytmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    field(t + 8 * h / 9, ytmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                            a64 * k4[i] + a65 * k5[i]);
    field(t + h, ytmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                            b6 * k6[i]);
    field(t + h, ynew, k7);
    check_finite(ynew);
    check_finite(k7);

    double err_norm = 0;
    for (std::size_t i = 0; i < n; ++i) {
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                    e6 * k6[i] + e7 * k7[i]);
      double sc = cfg.abs_tol +
                  cfg.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err_norm += (err[i] / sc) * (err[i] / sc);
    }
    err_norm = std::sqrt(err_norm / n);

    if (err_norm <= 1.0) {
      std::vector<double> c(5 * n);
      for (std::size_t i = 0; i < n; ++i) {
        double ydiff = ynew[i] - y[i];
        double bspl = h * k1[i] - ydiff;
        c[i] = y[i];
        c[n + i] = ydiff;
        c[2 * n + i] = bspl;
        c[3 * n + i] = ydiff - h * k7[i] - bspl;
        c[4 * n + i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                            d6 * k6[i] + d7 * k7[i]);
      }
      traj.cont_.push_back(std::move(c));
      t += h;
      traj.seg_t_.push_back(t);
      y.swap(ynew);
      k1.swap(k7);
    } else {
      last = false;
    }
    double fac = 0.9 * std::pow(std::max(err_norm, 1e-16), -0.2);
    fac = std::clamp(fac, 0.2, 5.0);
    h *= fac;
    if (std::abs(h) < 1e-14 * (1.0 + std::abs(t)))
      throw error("integrate_ode: step size underflow");
  }
  traj.seg_t_.back() = t_end;
  traj.y1_ = y;
  return traj;
}

}  // namespace fgeo::num
