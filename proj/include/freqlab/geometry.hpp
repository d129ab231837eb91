#pragma once

#include <array>
#include <cmath>
#include <string>

#include "freqlab/errors.hpp"

namespace freqlab {

/// A point (or vector) in R^n, n in {2, 3}. The third coordinate is
/// ignored when n == 2.
struct Point {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  int n = 2;

  Point() = default;
  Point(double a, double b) : x{a, b, 0.0}, n(2) {}
  Point(double a, double b, double c) : x{a, b, c}, n(3) {}

  double operator[](int i) const { return x[static_cast<size_t>(i)]; }
  double& operator[](int i) { return x[static_cast<size_t>(i)]; }
};

inline Point operator+(const Point& a, const Point& b) {
  Point r = a;
  for (int i = 0; i < a.n; ++i) r[i] += b[i];
  return r;
}

inline Point operator-(const Point& a, const Point& b) {
  Point r = a;
  for (int i = 0; i < a.n; ++i) r[i] -= b[i];
  return r;
}

inline Point operator*(double s, const Point& a) {
  Point r = a;
  for (int i = 0; i < a.n; ++i) r[i] *= s;
  return r;
}

inline double dot(const Point& a, const Point& b) {
  double s = 0.0;
  for (int i = 0; i < a.n; ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Point& a) { return std::sqrt(dot(a, a)); }

inline void require_dim(int n, const char* where) {
  if (n != 2 && n != 3) throw ParameterError(std::string(where) + ": dimension must be 2 or 3");
}

/// Row-major n x n matrix stored in a 3x3 block; used for Hessians.
struct Mat3 {
  std::array<double, 9> a{0, 0, 0, 0, 0, 0, 0, 0, 0};
  double operator()(int i, int j) const { return a[static_cast<size_t>(3 * i + j)]; }
  double& operator()(int i, int j) { return a[static_cast<size_t>(3 * i + j)]; }
};

/// v^T M v over the first n coordinates.
inline double quad_form(const Mat3& m, const Point& v) {
  double s = 0.0;
  for (int i = 0; i < v.n; ++i)
    for (int j = 0; j < v.n; ++j) s += v[i] * m(i, j) * v[j];
  return s;
}

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Surface measure of the unit sphere boundary in R^n (2*pi or 4*pi).
inline double unit_sphere_area(int n) { return n == 2 ? 2.0 * kPi : 4.0 * kPi; }

/// |∂B_r| in R^n.
inline double sphere_area(int n, double r) {
  return unit_sphere_area(n) * std::pow(r, n - 1);
}

/// |B_r| in R^n.
inline double ball_volume(int n, double r) {
  return n == 2 ? kPi * r * r : 4.0 / 3.0 * kPi * r * r * r;
}

}  // namespace freqlab
