#pragma once
// Special functions and quadrature rules.

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlse {

constexpr double kEulerGamma = 0.5772156649015328606;

double erf(double x);
double erfc(double x);

// Exponential integral E1(r) = int_r^inf e^{-t}/t dt, r > 0.
double exp_e1(double r);
// e^r E1(r), finite for large r.
double exp_e1_scaled(double r);

// Modified Bessel function I0 and the overflow-free e^{-x} I0(x), x >= 0.
double bessel_i0(double x);
double bessel_i0_scaled(double x);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double a = -1.0, b = 1.0;
  std::size_t size() const { return nodes.size(); }
};

QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& msg, double estimate, double error)
      : std::runtime_error(msg), estimate_(estimate), error_(error) {}
  double estimate() const { return estimate_; }
  double error() const { return error_; }

 private:
  double estimate_, error_;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

// Globally adaptive Gauss-Kronrod 7/15 quadrature. b (or a) may be infinite:
// the unbounded piece beyond |s| = 1 is mapped by s -> 1/t.
// Converged when the error estimate is below max(tol, tol*|I|).
QuadResult adaptive_gk15_full(const std::function<double(double)>& f, double a, double b, double tol,
                              int max_intervals = 4000);
double adaptive_gk15(const std::function<double(double)>& f, double a, double b, double tol);

}  // namespace nlse
