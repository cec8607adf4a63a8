#pragma once

// Small shared kernel: fixed-size vectors in R^2/R^3/C^2, 2x2 real matrices,
// deterministic sampling, and a tiny parallel_for used by the shooting grids.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace fgeo {

using Cx = std::complex<double>;
using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct error : std::runtime_error {
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw error(msg);
}

// ---- R^3 helpers -----------------------------------------------------------

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}
inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator*(double s, const Vec3& a) {
  return {s * a[0], s * a[1], s * a[2]};
}
inline Vec3 normalized(const Vec3& a) {
  double n = norm(a);
  require(n > 0.0, "normalized: zero vector");
  return (1.0 / n) * a;
}
// Component of a orthogonal to unit vector u.
inline Vec3 reject(const Vec3& a, const Vec3& u) { return a - dot(a, u) * u; }

inline double dot2(const Vec2& a, const Vec2& b) {
  return a[0] * b[0] + a[1] * b[1];
}
inline double norm2(const Vec2& a) { return std::hypot(a[0], a[1]); }

// ---- 2x2 real matrices (symplectic paths, fibre Hessians) ------------------

struct Mat2 {
  double m00 = 0, m01 = 0, m10 = 0, m11 = 0;

  static Mat2 identity() { return {1, 0, 0, 1}; }
  double det() const { return m00 * m11 - m01 * m10; }
  Vec2 operator*(const Vec2& v) const {
    return {m00 * v[0] + m01 * v[1], m10 * v[0] + m11 * v[1]};
  }
  Mat2 operator*(const Mat2& b) const {
    return {m00 * b.m00 + m01 * b.m10, m00 * b.m01 + m01 * b.m11,
            m10 * b.m00 + m11 * b.m10, m10 * b.m01 + m11 * b.m11};
  }
};

// ---- C^2 points (S^3 = SU(2)) ----------------------------------------------

struct C2 {
  Cx w1, w2;
};

inline C2 operator+(const C2& a, const C2& b) { return {a.w1 + b.w1, a.w2 + b.w2}; }
inline C2 operator-(const C2& a, const C2& b) { return {a.w1 - b.w1, a.w2 - b.w2}; }
inline C2 operator*(double s, const C2& a) { return {s * a.w1, s * a.w2}; }
// Real (R^4) inner product.
inline double rdot(const C2& a, const C2& b) {
  return std::real(a.w1 * std::conj(b.w1)) + std::real(a.w2 * std::conj(b.w2));
}
inline double norm(const C2& a) { return std::sqrt(rdot(a, a)); }

// ---- deterministic sampling -------------------------------------------------

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }
  Vec3 unit3() {
    Vec3 v{normal(), normal(), normal()};
    double n = norm(v);
    while (n < 1e-6) {
      v = {normal(), normal(), normal()};
      n = norm(v);
    }
    return (1.0 / n) * v;
  }
  C2 unit_c2() {
    Cx w1{normal(), normal()}, w2{normal(), normal()};
    double n = std::sqrt(std::norm(w1) + std::norm(w2));
    while (n < 1e-6) {
      w1 = {normal(), normal()};
      w2 = {normal(), normal()};
      n = std::sqrt(std::norm(w1) + std::norm(w2));
    }
    return {w1 / n, w2 / n};
  }

 private:
  std::mt19937_64 gen_;
};

// ---- parallel_for ------------------------------------------------------------

// Thread count: FGEO_THREADS if set, else hardware concurrency. Results must be
// written to preassigned slots so output order is deterministic.
unsigned thread_count();
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fgeo
