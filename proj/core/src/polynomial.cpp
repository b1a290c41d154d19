#include "quadcurl/polynomial.hpp"

#include <cmath>
#include <stdexcept>

namespace quadcurl {

Poly2::Poly2(int degree) : degree_(degree), c_(monomial_count(degree), 0.0) {
  if (degree < 0) throw std::invalid_argument("Poly2: negative degree");
}

Poly2 Poly2::constant(double c) {
  Poly2 p(0);
  p.c_[0] = c;
  return p;
}

Poly2 Poly2::monomial(int a, int b, double c) {
  Poly2 p(a + b);
  p.set_coeff(a, b, c);
  return p;
}

int Poly2::effective_degree(double tol) const {
  for (int k = degree_; k > 0; --k) {
    for (int b = 0; b <= k; ++b) {
      if (std::abs(c_[monomial_index(k - b, b)]) > tol) return k;
    }
  }
  return 0;
}

double Poly2::coeff(int a, int b) const {
  if (a < 0 || b < 0 || a + b > degree_) return 0.0;
  return c_[monomial_index(a, b)];
}

void Poly2::set_coeff(int a, int b, double value) {
  if (a < 0 || b < 0) throw std::invalid_argument("Poly2: negative exponent");
  if (a + b > degree_) grow(a + b);
  c_[monomial_index(a, b)] = value;
}

void Poly2::grow(int degree) {
  if (degree <= degree_) return;
  c_.resize(monomial_count(degree), 0.0);
  degree_ = degree;
}

double Poly2::operator()(double x, double y) const {
  if (degree_ >= 32) throw std::domain_error("Poly2: evaluation limited to degree < 32");
  double result = 0.0;
  double xa = 1.0;
  std::array<double, 32> ypow{};
  ypow[0] = 1.0;
  for (int b = 1; b <= degree_; ++b) ypow[b] = ypow[b - 1] * y;
  for (int a = 0; a <= degree_; ++a) {
    for (int b = 0; a + b <= degree_; ++b) result += c_[monomial_index(a, b)] * xa * ypow[b];
    xa *= x;
  }
  return result;
}

Poly2 Poly2::dx() const { return derivative(1, 0); }
Poly2 Poly2::dy() const { return derivative(0, 1); }

Poly2 Poly2::derivative(int i, int j) const {
  const int d = std::max(0, degree_ - i - j);
  Poly2 out(d);
  for (int a = i; a <= degree_; ++a) {
    for (int b = j; a + b <= degree_; ++b) {
      double f = c_[monomial_index(a, b)];
      if (f == 0.0) continue;
      for (int k = 0; k < i; ++k) f *= a - k;
      for (int k = 0; k < j; ++k) f *= b - k;
      out.c_[monomial_index(a - i, b - j)] += f;
    }
  }
  return out;
}

Poly2 Poly2::compose_linear(const Mat2& A) const {
  const Poly2 xs = A(0, 0) * Poly2::x() + A(0, 1) * Poly2::y();
  const Poly2 ys = A(1, 0) * Poly2::x() + A(1, 1) * Poly2::y();
  std::vector<Poly2> xp{Poly2::constant(1.0)}, yp{Poly2::constant(1.0)};
  for (int k = 1; k <= degree_; ++k) {
    xp.push_back(xp.back() * xs);
    yp.push_back(yp.back() * ys);
  }
  Poly2 out(degree_);
  for (int a = 0; a <= degree_; ++a) {
    for (int b = 0; a + b <= degree_; ++b) {
      const double c = c_[monomial_index(a, b)];
      if (c != 0.0) out += c * (xp[a] * yp[b]);
    }
  }
  return out;
}

Poly2 Poly2::shifted(double sx, double sy) const {
  const Poly2 xs = Poly2::x() + Poly2::constant(sx);
  const Poly2 ys = Poly2::y() + Poly2::constant(sy);
  Poly2 out(degree_);
  for (int a = 0; a <= degree_; ++a) {
    for (int b = 0; a + b <= degree_; ++b) {
      const double c = c_[monomial_index(a, b)];
      if (c != 0.0) out += c * (xs.pow(a) * ys.pow(b));
    }
  }
  return out;
}

Poly2& Poly2::operator+=(const Poly2& o) {
  grow(o.degree_);
  for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

Poly2& Poly2::operator-=(const Poly2& o) {
  grow(o.degree_);
  for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

Poly2& Poly2::operator*=(double s) {
  for (double& c : c_) c *= s;
  return *this;
}

Poly2 operator*(const Poly2& p, const Poly2& q) {
  Poly2 out(p.degree_ + q.degree_);
  for (int a = 0; a <= p.degree_; ++a) {
    for (int b = 0; a + b <= p.degree_; ++b) {
      const double cp = p.c_[monomial_index(a, b)];
      if (cp == 0.0) continue;
      for (int c = 0; c <= q.degree_; ++c) {
        for (int d = 0; c + d <= q.degree_; ++d) {
          out.c_[monomial_index(a + c, b + d)] += cp * q.c_[monomial_index(c, d)];
        }
      }
    }
  }
  return out;
}

Poly2 Poly2::pow(int e) const {
  if (e < 0) throw std::invalid_argument("Poly2::pow: negative exponent");
  Poly2 out = Poly2::constant(1.0);
  for (int k = 0; k < e; ++k) out = out * *this;
  return out;
}

}  // namespace quadcurl
