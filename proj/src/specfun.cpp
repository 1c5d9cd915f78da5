#include "nlse/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

namespace nlse {

double erf(double x) { return std::erf(x); }
double erfc(double x) { return std::erfc(x); }

namespace {

// Power series, accurate for 0 < r < 1.
double e1_series(double r) {
  double sum = 0.0, term = 1.0;
  for (int k = 1; k < 60; ++k) {
    term *= -r / k;
    const double add = term / k;
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) break;
  }
  return -kEulerGamma - std::log(r) - sum;
}

// Continued fraction for e^r E1(r), r >= 1 (modified Lentz).
double e1_cf_scaled(double r) {
  constexpr double tiny = 1e-300;
  double b = r + 1.0, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h;
}

}  // namespace

double exp_e1(double r) {
  if (!(r > 0.0)) throw std::domain_error("exp_e1: argument must be positive");
  if (r < 1.0) return e1_series(r);
  return std::exp(-r) * e1_cf_scaled(r);
}

double exp_e1_scaled(double r) {
  if (!(r > 0.0)) throw std::domain_error("exp_e1_scaled: argument must be positive");
  if (r < 1.0) return std::exp(r) * e1_series(r);
  return e1_cf_scaled(r);
}

double bessel_i0_scaled(double x) {
  if (x < 0.0) throw std::domain_error("bessel_i0: argument must be nonnegative");
  if (x <= 20.0) {
    const double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 200; ++k) {
      term *= q / (static_cast<double>(k) * k);
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return std::exp(-x) * sum;
  }
  // Asymptotic series; its smallest term is far below roundoff for x > 20.
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    const double f = 2.0 * k - 1.0;
    term *= f * f / (8.0 * k * x);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

double bessel_i0(double x) {
  if (x > 700.0) throw std::domain_error("bessel_i0: argument overflows; use bessel_i0_scaled");
  return bessel_i0_scaled(x) * std::exp(x);
}

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  if (!(a < b)) throw std::invalid_argument("gauss_legendre: need a < b");
  QuadratureRule q;
  q.a = a;
  q.b = b;
  q.nodes.resize(n);
  q.weights.resize(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? z : p1, pn1 = n == 1 ? 1.0 : p0;
      dp = n * (z * pn - pn1) / (z * z - 1.0);
      const double dz = pn / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    {
      // Recompute the derivative at the converged node.
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n == 1 ? 1.0 : n * (z * p1 - p0) / (z * z - 1.0);
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    q.nodes[i] = mid - half * z;
    q.nodes[n - 1 - i] = mid + half * z;
    q.weights[i] = q.weights[n - 1 - i] = half * w;
  }
  if (n % 2 == 1) q.nodes[n / 2] = mid;
  return q;
}

namespace {

constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                           0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                           0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                           0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                           0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                           0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                           0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                          0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error, floor;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), hl = 0.5 * (b - a);
  const double fc = f(c);
  double resg = fc * wg[3], resk = fc * wgk[7], resabs = std::abs(resk);
  double fv1[7], fv2[7];
  for (int j = 0; j < 3; ++j) {
    const int jt = 2 * j + 1;
    const double dx = hl * xgk[jt];
    const double f1 = f(c - dx), f2 = f(c + dx);
    fv1[jt] = f1;
    fv2[jt] = f2;
    resg += wg[j] * (f1 + f2);
    resk += wgk[jt] * (f1 + f2);
    resabs += wgk[jt] * (std::abs(f1) + std::abs(f2));
  }
  for (int j = 0; j < 4; ++j) {
    const int jt = 2 * j;
    const double dx = hl * xgk[jt];
    const double f1 = f(c - dx), f2 = f(c + dx);
    fv1[jt] = f1;
    fv2[jt] = f2;
    resk += wgk[jt] * (f1 + f2);
    resabs += wgk[jt] * (std::abs(f1) + std::abs(f2));
  }
  const double reskh = 0.5 * resk;
  double resasc = wgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j) resasc += wgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
  const double ahl = std::abs(hl);
  resk *= hl;
  resabs *= ahl;
  resasc *= ahl;
  double err = std::abs((resk - resg * hl));
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  // Roundoff floor; tracked separately so tight tolerances still terminate.
  const double floor = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
  return {a, b, resk, err, floor};
}

QuadResult adapt_finite(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_intervals) {
  std::priority_queue<Segment> heap;
  Segment s = gk15(f, a, b);
  heap.push(s);
  double total = s.value, err = s.error, floor = s.floor;
  int evals = 15, n = 1;
  while (err > std::max({tol, tol * std::abs(total), floor})) {
    if (n >= max_intervals) {
      throw QuadratureError("adaptive_gk15: no convergence within interval limit", total, err);
    }
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw QuadratureError("adaptive_gk15: interval too small", total, err);
    }
    Segment l = gk15(f, worst.a, mid), r = gk15(f, mid, worst.b);
    evals += 30;
    ++n;
    total += l.value + r.value - worst.value;
    err += l.error + r.error - worst.error;
    floor += l.floor + r.floor - worst.floor;
    heap.push(l);
    heap.push(r);
    if (n % 64 == 0) {
      // Resum to shed accumulated cancellation in the running totals.
      auto copy = heap;
      total = 0.0;
      err = 0.0;
      floor = 0.0;
      while (!copy.empty()) {
        total += copy.top().value;
        err += copy.top().error;
        floor += copy.top().floor;
        copy.pop();
      }
    }
  }
  return {total, err, evals};
}

}  // namespace

QuadResult adaptive_gk15_full(const std::function<double(double)>& f, double a, double b, double tol,
                              int max_intervals) {
  if (!(tol > 0.0)) throw std::invalid_argument("adaptive_gk15: tol must be positive");
  if (a == b) return {};
  if (a > b) {
    auto r = adaptive_gk15_full(f, b, a, tol, max_intervals);
    r.value = -r.value;
    return r;
  }
  const bool ainf = std::isinf(a), binf = std::isinf(b);
  if (!ainf && !binf) return adapt_finite(f, a, b, tol, max_intervals);
  if (ainf && binf) {
    auto g = [&](double s) { return f(s) + f(-s); };
    return adaptive_gk15_full(g, 0.0, kInf, tol, max_intervals);
  }
  if (ainf) {
    auto g = [&](double s) { return f(-s); };
    return adaptive_gk15_full(g, -b, kInf, tol, max_intervals);
  }
  // [a, inf): finite piece up to 1 (if any), then s = 1/t on the tail.
  const double split = std::max(a, 1.0);
  auto tail = [&](double t) { return f(1.0 / t) / (t * t); };
  QuadResult out;
  if (a < split) {
    auto r = adapt_finite(f, a, split, tol * 0.5, max_intervals);
    out.value += r.value;
    out.error += r.error;
    out.evaluations += r.evaluations;
  }
  auto r = adapt_finite(tail, 0.0, 1.0 / split, tol * 0.5, max_intervals);
  out.value += r.value;
  out.error += r.error;
  out.evaluations += r.evaluations;
  return out;
}

double adaptive_gk15(const std::function<double(double)>& f, double a, double b, double tol) {
  return adaptive_gk15_full(f, a, b, tol).value;
}

}  // namespace nlse
