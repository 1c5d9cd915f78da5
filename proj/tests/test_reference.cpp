#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "nlse/reference.hpp"
#include "nlse/specfun.hpp"

using namespace nlse;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Brute-force convolution (1/2pi) int rho(y)/|x-y| dy in polar coordinates about x.
double coulomb2d_brute(const GaussianDensitySpec& s, double x, double y) {
  auto outer = [&](double th) {
    const double c = std::cos(th), sn = std::sin(th);
    return adaptive_gk15([&](double r) { return s({x + r * c, y + r * sn, 0.0}); }, 0.0, kInf, 1e-14);
  };
  return adaptive_gk15(outer, 0.0, 2 * kPi, 1e-13) / (2 * kPi);
}

// Brute-force (1/4pi) int rho(y)/|x-y| dy in spherical coordinates about x.
double coulomb3d_brute(const GaussianDensitySpec& s, const std::array<double, 3>& x) {
  auto over_mu = [&](double phi) {
    return adaptive_gk15(
        [&](double mu) {
          const double st = std::sqrt(1 - mu * mu);
          const double w0 = st * std::cos(phi), w1 = st * std::sin(phi);
          return adaptive_gk15([&](double r) { return r * s({x[0] + r * w0, x[1] + r * w1, x[2] + r * mu}); }, 0.0,
                               kInf, 1e-14);
        },
        -1.0, 1.0, 1e-13);
  };
  return adaptive_gk15(over_mu, 0.0, 2 * kPi, 1e-12) / (4 * kPi);
}

// Fourth-order central second difference along one axis.
template <class F>
double d2(F&& f, std::array<double, 3> x, int axis, double h) {
  auto at = [&](double d) {
    auto y = x;
    y[axis] += d;
    return f(y);
  };
  return (-at(2 * h) + 16 * at(h) - 30 * at(0) + 16 * at(-h) - at(-2 * h)) / (12 * h * h);
}

}  // namespace

TEST_CASE("3D Coulomb of a round Gaussian") {
  GaussianDensitySpec s{1.1, 1.0, 3};
  CHECK(std::abs(coulomb3d_exact(s, {0, 0, 0}) - 0.605) < 1e-15);
  CHECK(std::abs(coulomb3d_exact(s, {1e-9, 0, 0}) - 0.605) < 1e-15);
  const double far = 40.0;
  CHECK(rel(coulomb3d_exact(s, {far, 0, 0}), std::pow(1.1, 3) * std::sqrt(kPi) / (4 * far)) < 1e-15);
  // Rotation invariance.
  const double a = coulomb3d_exact(s, {1.3, 0, 0});
  CHECK(rel(coulomb3d_exact(s, {1.3 / std::sqrt(3.0), 1.3 / std::sqrt(3.0), 1.3 / std::sqrt(3.0)}), a) < 1e-14);
  // The anisotropic quadrature path at gamma = 1 must agree with the closed form.
  GaussianDensitySpec near1{1.1, 1.0 + 1e-12, 3};
  CHECK(rel(coulomb3d_exact(near1, {0.7, -0.4, 1.2}), coulomb3d_exact(s, {0.7, -0.4, 1.2})) < 1e-11);
  // -Laplacian u = rho.
  auto u = [&](const std::array<double, 3>& x) { return coulomb3d_exact(s, x); };
  for (std::array<double, 3> x : {std::array<double, 3>{0.5, 0.2, -0.3}, {1.0, 1.0, 0.4}, {2.0, 0.1, 0.0}}) {
    const double lap = d2(u, x, 0, 1e-2) + d2(u, x, 1, 1e-2) + d2(u, x, 2, 1e-2);
    CHECK(std::abs(-lap - s(x)) < 1e-6);
  }
}

TEST_CASE("3D Coulomb of an anisotropic Gaussian") {
  GaussianDensitySpec s{1.0, 2.0, 3};
  // Origin value in closed form: (sigma^2/2) atan(sqrt(g^2-1))/sqrt(g^2-1).
  const double q = std::sqrt(3.0);
  CHECK(rel(coulomb3d_exact(s, {0, 0, 0}), 0.5 * std::atan(q) / q) < 1e-13);
  const std::array<double, 3> x0{0, 0, 0};
  CHECK(std::abs(coulomb3d_exact(s, x0) - coulomb3d_brute(s, x0)) < 1e-9);
  const std::array<double, 3> x1{0.6, -0.3, 0.45};
  CHECK(std::abs(coulomb3d_exact(s, x1) - coulomb3d_brute(s, x1)) < 1e-9);
  auto u = [&](const std::array<double, 3>& x) { return coulomb3d_exact(s, x); };
  const double lap = d2(u, x1, 0, 1e-2) + d2(u, x1, 1, 1e-2) + d2(u, x1, 2, 1e-2);
  CHECK(std::abs(-lap - s(x1)) < 1e-6);
}

TEST_CASE("2D Coulomb of Gaussians") {
  const double sig = std::sqrt(1.2);
  GaussianDensitySpec s{sig, 1.0, 2};
  CHECK(std::abs(coulomb2d_exact(s, {0, 0}) - std::sqrt(kPi) * sig / 2) < 1e-15);
  // Far field: sqrt(pi) sigma/2 e^{-a} I0(a) ~ mass/(2 pi r) (1 + sigma^2/(4 r^2) + 9 sigma^4/(64 r^4) + ...)
  const double r = 20.0, a = r * r / (2 * sig * sig);
  double ser = 0, t = 1;
  for (int k = 0; k < 12; ++k) {
    ser += t;
    t *= (2 * k + 1.0) * (2 * k + 1.0) / (8.0 * (k + 1) * a);
  }
  const double asym = std::sqrt(kPi) * sig / 2 * ser / std::sqrt(2 * kPi * a);
  CHECK(std::isfinite(coulomb2d_exact(s, {r, 0})));
  CHECK(rel(coulomb2d_exact(s, {r, 0}), asym) < 1e-12);
  // Leading term mass/(2 pi r) = sigma^2/(2r).
  CHECK(rel(coulomb2d_exact(s, {r, 0}), sig * sig / (2 * r)) < 1e-3);
  CHECK(rel(coulomb2d_exact(s, {0.3, 0.4}), coulomb2d_exact(s, {0.5, 0.0})) < 1e-14);
  CHECK(std::abs(coulomb2d_exact(s, {0.9, -0.2}) - coulomb2d_brute(s, 0.9, -0.2)) < 1e-10);

  GaussianDensitySpec s4{1.0, 4.0, 2};
  CHECK(std::abs(coulomb2d_exact(s4, {0, 0}) - coulomb2d_brute(s4, 0, 0)) < 1e-9);
  CHECK(std::abs(coulomb2d_exact(s4, {0.5, 0.1}) - coulomb2d_brute(s4, 0.5, 0.1)) < 1e-9);
  GaussianDensitySpec near1{sig, 1.0 + 1e-12, 2};
  CHECK(rel(coulomb2d_exact(near1, {1.1, 0.3}), coulomb2d_exact(s, {1.1, 0.3})) < 1e-11);
}

TEST_CASE("2D and 1D Poisson of Gaussians") {
  const double s0 = std::sqrt(1.3);
  CHECK(std::abs(poisson2d_exact(s0, {0, 0}) - 1.3 * (kEulerGamma - std::log(1.3)) / 4) < 1e-15);
  CHECK(std::abs(poisson2d_exact(s0, {0, 0}) - 0.1023267) < 1e-7);
  CHECK(std::abs(poisson2d_exact(s0, {1e-5, 0}) - poisson2d_exact(s0, {0, 0})) < 1e-9);
  CHECK(std::abs(poisson2d_exact(s0, {30, 0}) + 1.3 / 2 * std::log(30.0)) < 1e-14);
  CHECK(std::abs(poisson2d_exact(s0, {0.6, 0.8}) - poisson2d_exact(s0, {1.0, 0.0})) < 1e-15);
  GaussianDensitySpec g{s0, 1.0, 2};
  auto u = [&](const std::array<double, 3>& x) { return poisson2d_exact(s0, {x[0], x[1]}); };
  for (std::array<double, 3> x : {std::array<double, 3>{0.3, 0.1, 0}, {1.5, -0.7, 0}}) {
    const double lap = d2(u, x, 0, 1e-2) + d2(u, x, 1, 1e-2);
    CHECK(std::abs(-lap - g(x)) < 1e-6);
  }
  // 1D: brute-force -1/2 int |x-y| rho(y) dy.
  for (double x : {0.0, 0.7, -2.5}) {
    const double b = -0.5 * (adaptive_gk15([&](double y) { return std::abs(x - y) * std::exp(-y * y / 1.3); }, -kInf,
                                           x, 1e-15) +
                             adaptive_gk15([&](double y) { return std::abs(x - y) * std::exp(-y * y / 1.3); }, x,
                                           kInf, 1e-15));
    CHECK(std::abs(poisson1d_exact(s0, x) - b) < 1e-13);
  }
}

TEST_CASE("error metric") {
  RVec u{1.0, -0.5, 0.25}, v = u;
  CHECK(error_eh(u, v) == 0.0);
  for (auto& x : v) x += 1e-3;
  CHECK(std::abs(error_eh(u, v) - 1e-3) < 1e-15);
  CHECK_THROWS(error_eh(RVec{0.0, 0.0}, RVec{1.0, 1.0}));
  CHECK_THROWS(error_eh(RVec{1.0}, RVec{1.0, 1.0}));
}

TEST_CASE("exact field sampling and disk cache") {
  auto g = make_grid(2, {4.0, 4.0}, {16, 16});
  GaussianDensitySpec s{1.0, 2.0, 2};
  const auto dir = std::filesystem::temp_directory_path() / "nlse_ref_cache_test";
  std::filesystem::remove_all(dir);
  setenv("NLSE_NONLOCAL_CACHE", dir.c_str(), 1);
  auto a = exact_potential(KernelFamily::Coulomb2D, s, g);
  CHECK(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator{}) == 1);
  auto b = exact_potential(KernelFamily::Coulomb2D, s, g);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  CHECK(a[5 * 16 + 7] == coulomb2d_exact(s, {g.x(0, 5), g.x(1, 7)}));
  unsetenv("NLSE_NONLOCAL_CACHE");
  std::filesystem::remove_all(dir);
  CHECK_THROWS(exact_potential(KernelFamily::Coulomb3D, s, g));
  CHECK_THROWS(exact_potential(KernelFamily::Confined2D, s, g));
  auto rho = gaussian_density(s, g);
  CHECK(rho[8 * 16 + 8] == 1.0);
}
