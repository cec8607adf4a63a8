#pragma once

#include <functional>
#include <vector>

namespace fgeo::num {

using VectorField =
    std::function<void(double t, const std::vector<double>& y, std::vector<double>& dy)>;

struct IntegratorConfig {
  enum class Method { adaptive_rk45, fixed_rk4 };
  Method method = Method::adaptive_rk45;
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  std::size_t max_steps = 2'000'000;
  double fixed_step = 1e-3;  // fixed_rk4 only

  void validate() const;
};

// Dense trajectory from an adaptive RK integration. Interpolable anywhere in
// [t0, t1] via the 4th-order interpolant of the accepted steps (fixed_rk4
// stores cubic Hermite data instead).
class Trajectory {
 public:
  double t0() const { return t0_; }
  double t1() const { return t1_; }
  std::size_t dim() const { return dim_; }
  std::size_t steps() const { return seg_t_.empty() ? 0 : seg_t_.size() - 1; }

  std::vector<double> at(double t) const;
  void eval(double t, std::vector<double>& y) const;
  const std::vector<double>& final_state() const { return y1_; }

  // Uniform resampling, n >= 2 samples including both endpoints.
  std::vector<std::vector<double>> sample(std::size_t n) const;

 private:
  friend Trajectory integrate_ode(const VectorField&, const std::vector<double>&,
                                  double, double, const IntegratorConfig&);
  double t0_ = 0, t1_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> seg_t_;            // accepted step boundaries, size steps+1
  std::vector<std::vector<double>> cont_;  // 5 contiguous blocks per step
  std::vector<double> y1_;
};

Trajectory integrate_ode(const VectorField& field, const std::vector<double>& y0,
                         double t_begin, double t_end,
                         const IntegratorConfig& cfg = {});

}  // namespace fgeo::num
