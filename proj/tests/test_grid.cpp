#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <random>

#include "nlse/grid.hpp"

using namespace nlse;

namespace {

// Direct continuum-normalized DFT: (1/N) sum_j f_j exp(-i k_m x_j), FFT order.
CVec direct_dft(const UniformGrid& g, const CVec& f) {
  CVec c(g.size(), cplx(0, 0));
  const int n0 = g.n[0], n1 = g.dim > 1 ? g.n[1] : 1;
  for (int m0 = 0; m0 < n0; ++m0)
    for (int m1 = 0; m1 < n1; ++m1) {
      cplx s(0, 0);
      for (int j0 = 0; j0 < n0; ++j0)
        for (int j1 = 0; j1 < n1; ++j1) {
          double ph = g.k(0, m0) * g.x(0, j0) + (g.dim > 1 ? g.k(1, m1) * g.x(1, j1) : 0.0);
          s += f[j0 * n1 + j1] * std::polar(1.0, -ph);
        }
      c[m0 * n1 + m1] = s / static_cast<double>(g.size());
    }
  return c;
}

CVec random_field(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  CVec f(n);
  for (auto& v : f) v = cplx(u(rng), u(rng));
  return f;
}

double max_abs_diff(const CVec& a, const CVec& b) {
  double e = 0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

}  // namespace

TEST_CASE("make_grid spacing and bandwidth") {
  auto g1 = make_grid(1, {8}, {32});
  CHECK(g1.h[0] == doctest::Approx(0.5));
  CHECK(g1.bandwidth(0) == doctest::Approx(2 * kPi));
  auto g3 = make_grid(3, {8, 8, 8}, {64, 64, 64});
  for (int a = 0; a < 3; ++a) CHECK(g3.h[a] == 0.25);
  auto g2 = make_grid(2, {8, 4}, {64, 64});
  CHECK(g2.h[0] == 0.25);
  CHECK(g2.h[1] == 0.125);
  CHECK(g3.x(0, 32) == 0.0);
}

TEST_CASE("make_grid rejects invalid input") {
  CHECK_THROWS_WITH_AS(make_grid(1, {8}, {31}), "npoints must be even", std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1, {8}, {2}), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1, {0.0}, {8}), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(2, {1.0}, {8}), std::invalid_argument);
}

TEST_CASE("fft_forward matches direct sum and round-trips") {
  auto g = make_grid(2, {3.0, 5.0}, {16, 12});
  auto f = random_field(g.size(), 1);
  auto c = fft_forward(g, f);
  CHECK(max_abs_diff(c, direct_dft(g, f)) < 1e-14);
  auto back = fft_backward(g, c);
  CHECK(max_abs_diff(back, f) < 1e-13);
}

TEST_CASE("fft_forward of constants and single modes") {
  auto g = make_grid(1, {4.0}, {32});
  CVec one(g.size(), cplx(1, 0));
  auto c = fft_forward(g, one);
  CHECK(std::abs(c[0] - 1.0) < 1e-15);
  for (std::size_t i = 1; i < c.size(); ++i) CHECK(std::abs(c[i]) < 1e-15);
  CVec e(g.size());
  for (int j = 0; j < 32; ++j) e[j] = std::polar(1.0, g.k(0, 1) * g.x(0, j));
  c = fft_forward(g, e);
  CHECK(std::abs(c[1] - 1.0) < 1e-14);
  c[1] = 0;
  for (auto v : c) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("Parseval identity") {
  auto g = make_grid(3, {2.0, 3.0, 4.0}, {8, 12, 16});
  auto f = random_field(g.size(), 7);
  auto c = fft_forward(g, f);
  double lhs = 0, rhs = 0;
  for (auto v : f) lhs += std::norm(v);
  lhs *= g.cell_volume();
  for (auto v : c) rhs += std::norm(v);
  rhs *= g.box_volume();
  CHECK(std::abs(lhs - rhs) <= 1e-12 * lhs);
}

TEST_CASE("dst basis function, eigenrelation and round trip") {
  auto g = make_grid(1, {3.0}, {16});
  RVec f(g.size());
  for (int j = 0; j < 16; ++j) f[j] = std::sin(kPi * (g.x(0, j) + g.L[0]) / (2 * g.L[0]));
  auto s = dst_forward(g, f);
  CHECK(s[0] == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(std::abs(s[i]) < 1e-14);
  auto lam = dst_eigenvalues(g);
  CHECK(lam[0] == doctest::Approx(std::pow(kPi / (2 * g.L[0]), 2)));

  auto g2 = make_grid(2, {1.0, 2.0}, {8, 10});
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  RVec r(g2.size(), 0.0);
  for (int i = 1; i < 8; ++i)
    for (int j = 1; j < 10; ++j) r[i * 10 + j] = u(rng);
  auto sr = dst_forward(g2, r);
  // Direct sine-sum oracle for the inverse.
  RVec direct(g2.size(), 0.0);
  for (int i = 1; i < 8; ++i)
    for (int j = 1; j < 10; ++j) {
      double v = 0;
      for (int m = 1; m < 8; ++m)
        for (int n = 1; n < 10; ++n)
          v += sr[(m - 1) * 9 + (n - 1)] * std::sin(kPi * m * i / 8.0) * std::sin(kPi * n * j / 10.0);
      direct[i * 10 + j] = v;
    }
  auto back = dst_backward(g2, sr);
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(std::abs(back[i] - r[i]) < 1e-13);
    CHECK(std::abs(direct[i] - r[i]) < 1e-13);
  }
}

TEST_CASE("spectral gradient") {
  auto g = make_grid(1, {8.0}, {64});
  CVec f(g.size());
  for (int j = 0; j < 64; ++j) f[j] = std::exp(-0.5 * g.x(0, j) * g.x(0, j));
  auto d = spectral_gradient(g, f)[0];
  double err = 0;
  for (int j = 0; j < 64; ++j) {
    const double x = g.x(0, j);
    err = std::max(err, std::abs(d[j] - (-x * std::exp(-0.5 * x * x))));
  }
  CHECK(err <= 1e-12);
  CVec c(g.size(), cplx(2.5, -1));
  auto dc = spectral_gradient(g, c);
  for (auto v : dc[0]) CHECK(std::abs(v) < 1e-14);
  CVec e(g.size());
  for (int j = 0; j < 64; ++j) e[j] = std::polar(1.0, g.k(0, 3) * g.x(0, j));
  auto de = spectral_gradient(g, e)[0];
  for (int j = 0; j < 64; ++j) CHECK(std::abs(de[j] - cplx(0, g.k(0, 3)) * e[j]) < 1e-13);
}

TEST_CASE("field dump round trip") {
  auto g = make_grid(2, {2.0, 3.5}, {8, 6});
  auto f = sample<double>(g, FieldKind::Density, [](const std::array<double, 3>& x) { return x[0] + 2 * x[1]; });
  const std::string path = "test_grid_dump.bin";
  write_field(path, f);
  auto r = read_field(path);
  CHECK(r.grid == g);
  CHECK(r.kind == FieldKind::Density);
  CHECK_FALSE(r.is_complex);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(r.real[i] == f[i]);
  ComplexField z(g, FieldKind::Wavefunction, random_field(g.size(), 11));
  write_field(path, z);
  auto rz = read_field(path);
  CHECK(rz.is_complex);
  for (std::size_t i = 0; i < z.size(); ++i) CHECK(rz.complex[i] == z[i]);
  std::remove(path.c_str());
}

TEST_CASE("spectral upsampling and restriction") {
  // A trigonometric polynomial below the coarse Nyquist mode is reproduced exactly.
  const auto gc = make_grid(2, {4.0, 3.0}, {16, 12});
  const auto gf = make_grid(2, {4.0, 3.0}, {64, 24});
  auto trig = [](const std::array<double, 3>& x) {
    return std::cos(kPi * 3 * x[0] / 4.0) + 0.5 * std::sin(kPi * 2 * x[1] / 3.0 + 0.3) * std::cos(kPi * x[0] / 4.0);
  };
  const auto fc = sample<double>(gc, FieldKind::Density, trig);
  const auto ff = sample<double>(gf, FieldKind::Density, trig);
  const RVec up = spectral_upsample(gc, fc.values, gf);
  double e = 0;
  for (std::size_t i = 0; i < up.size(); ++i) e = std::max(e, std::abs(up[i] - ff[i]));
  CHECK(e <= 1e-13);

  // A resolved Gaussian: interpolation error at spectral level.
  const auto g1 = make_grid(1, {12.0}, {64}), g2 = make_grid(1, {12.0}, {256});
  auto gauss = [](const std::array<double, 3>& x) { return std::exp(-x[0] * x[0] / 4.0); };
  const RVec u1 = spectral_upsample(g1, sample<double>(g1, FieldKind::Density, gauss).values, g2);
  const auto s2 = sample<double>(g2, FieldKind::Density, gauss);
  e = 0;
  for (std::size_t i = 0; i < u1.size(); ++i) e = std::max(e, std::abs(u1[i] - s2[i]));
  CHECK(e <= 1e-14);

  // Restriction picks coincident points, also from a larger box.
  const auto big = make_grid(2, {8.0, 6.0}, {128, 48});
  const auto fb = sample<double>(big, FieldKind::Density, trig);
  const RVec r = restrict_to_grid(big, fb.values, gc);
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(r[i] == doctest::Approx(fc[i]).epsilon(1e-14));
  CHECK_THROWS(restrict_to_grid(gc, fc.values, big));
  CHECK_THROWS(restrict_to_grid(big, fb.values, make_grid(2, {4.0, 3.0}, {14, 12})));
  CHECK_THROWS(spectral_upsample(gf, ff.values, gc));
}
