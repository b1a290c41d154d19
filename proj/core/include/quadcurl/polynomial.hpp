#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace quadcurl {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// 2D cross product u x w = u1 w2 - u2 w1.
inline double cross(const Vec2& u, const Vec2& w) { return u.x() * w.y() - u.y() * w.x(); }

/// Rotation x -> x^perp = (-x2, x1).
inline Vec2 perp(const Vec2& x) { return {-x.y(), x.x()}; }

/// Position of x^a y^b in the graded monomial ordering
/// 1, x, y, x^2, xy, y^2, x^3, ...
constexpr int monomial_index(int a, int b) {
  const int k = a + b;
  return k * (k + 1) / 2 + b;
}
constexpr int monomial_count(int degree) { return (degree + 1) * (degree + 2) / 2; }

/// Dense bivariate polynomial sum_{a+b<=d} c_ab x^a y^b.
class Poly2 {
 public:
  Poly2() : Poly2(0) {}
  explicit Poly2(int degree);

  static Poly2 constant(double c);
  static Poly2 monomial(int a, int b, double c = 1.0);
  static Poly2 x() { return monomial(1, 0); }
  static Poly2 y() { return monomial(0, 1); }

  int degree() const { return degree_; }
  /// Largest k such that some coefficient of total degree k exceeds tol in magnitude.
  int effective_degree(double tol = 0.0) const;

  double coeff(int a, int b) const;
  void set_coeff(int a, int b, double value);
  const std::vector<double>& coefficients() const { return c_; }

  double operator()(double x, double y) const;
  double operator()(const Vec2& p) const { return (*this)(p.x(), p.y()); }

  Poly2 dx() const;
  Poly2 dy() const;
  Poly2 derivative(int i, int j) const;

  /// Returns q(d) = p(A d).
  Poly2 compose_linear(const Mat2& A) const;
  /// Returns q(x, y) = p(x + sx, y + sy).
  Poly2 shifted(double sx, double sy) const;

  Poly2& operator+=(const Poly2& o);
  Poly2& operator-=(const Poly2& o);
  Poly2& operator*=(double s);

  friend Poly2 operator+(Poly2 a, const Poly2& b) { return a += b; }
  friend Poly2 operator-(Poly2 a, const Poly2& b) { return a -= b; }
  friend Poly2 operator-(Poly2 a) { return a *= -1.0; }
  friend Poly2 operator*(Poly2 a, double s) { return a *= s; }
  friend Poly2 operator*(double s, Poly2 a) { return a *= s; }
  friend Poly2 operator*(const Poly2& a, const Poly2& b);

  Poly2 pow(int e) const;

 private:
  void grow(int degree);

  int degree_;
  std::vector<double> c_;
};

/// Vector field with polynomial components.
struct PolyVec2 {
  Poly2 u1, u2;

  Vec2 operator()(const Vec2& p) const { return {u1(p), u2(p)}; }
  /// Scalar curl du2/dx - du1/dy.
  Poly2 curl() const { return u2.dx() - u1.dy(); }
  Poly2 div() const { return u1.dx() + u2.dy(); }
  int degree() const { return std::max(u1.degree(), u2.degree()); }

  PolyVec2& operator+=(const PolyVec2& o) {
    u1 += o.u1;
    u2 += o.u2;
    return *this;
  }
  friend PolyVec2 operator*(double s, PolyVec2 v) {
    v.u1 *= s;
    v.u2 *= s;
    return v;
  }
};

/// Vector curl of a scalar: (dv/dy, -dv/dx).
inline PolyVec2 vector_curl(const Poly2& v) { return {v.dy(), -v.dx()}; }

}  // namespace quadcurl
