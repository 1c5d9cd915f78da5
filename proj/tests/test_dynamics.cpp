#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nlse/dynamics.hpp"

using namespace nlse;

namespace {

double max_abs(const CVec& a, const CVec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

DynamicsConfig coulomb2d(double L, int n, double beta, int order) {
  DynamicsConfig c;
  c.kernel = make_kernel(KernelFamily::Coulomb2D);
  c.grid = make_grid(2, {L, L}, {n, n});
  c.beta = beta;
  c.scheme = SplittingScheme::of_order(order);
  return c;
}

}  // namespace

TEST_CASE("splitting coefficients") {
  const auto s2 = SplittingScheme::strang();
  CHECK(s2.order == 2);
  CHECK(s2.weights == std::vector<double>{1.0});
  const auto s4 = SplittingScheme::fourth_order();
  REQUIRE(s4.weights.size() == 3);
  CHECK(s4.weights[0] == doctest::Approx(1.0 / (2.0 - std::cbrt(2.0))));
  CHECK(s4.weights[1] < 0.0);
  CHECK(std::abs(s4.weights[0] + s4.weights[1] + s4.weights[2] - 1.0) <= 1e-15);
  // Third-order condition of the triple jump.
  CHECK(std::abs(2 * std::pow(s4.weights[0], 3) + std::pow(s4.weights[1], 3)) <= 1e-14);
  CHECK_THROWS_AS(SplittingScheme::of_order(3), std::invalid_argument);
}

TEST_CASE("kinetic substep") {
  SUBCASE("free Gaussian against the closed form") {
    // psi(x, t) = (1 + i t)^{-1/2} exp(-x^2 / (2 (1 + i t))), summed over periodic images:
    // at t = 0.5 the free solution is still 7.6e-12 at x = +-8, so its image is not negligible.
    const auto g = make_grid(1, {8.0}, {128});
    ComplexField psi = gaussian_wavepacket(g);
    const double t = 0.5;
    kinetic_substep(psi, t);
    const cplx a(1.0, t);
    double err = 0.0;
    for (int j = 0; j < g.n[0]; ++j) {
      cplx exact = 0.0;
      for (int m = -3; m <= 3; ++m) {
        const double x = g.x(0, j) + 16.0 * m;
        exact += std::exp(-x * x / (2.0 * a)) / std::sqrt(a);
      }
      err = std::max(err, std::abs(psi[j] - exact));
    }
    CHECK(err <= 1e-13);
  }
  SUBCASE("s = 0 is the identity and mass is preserved") {
    const auto g = make_grid(2, {6.0, 4.0}, {32, 16});
    ComplexField psi(g, FieldKind::Wavefunction);
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = cplx(std::sin(0.37 * i), std::cos(1.3 * i));
    ComplexField same = psi;
    kinetic_substep(same, 0.0);
    CHECK(max_abs(same.values, psi.values) == 0.0);
    const double m0 = mass(psi);
    kinetic_substep(psi, 0.73);
    CHECK(std::abs(mass(psi) - m0) <= 1e-13 * m0);
  }
  SUBCASE("sine eigenfunction picks up its phase") {
    const auto g = make_grid(2, {4.0, 4.0}, {32, 32});
    const int m1 = 3, m2 = 5;
    auto mode = sample<double>(g, FieldKind::Wavefunction, [&](const auto& x) {
      return std::sin(kPi * m1 * (x[0] + 4.0) / 8.0) * std::sin(kPi * m2 * (x[1] + 4.0) / 8.0);
    });
    ComplexField psi(g, FieldKind::Wavefunction);
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = mode[i];
    const double s = 0.4, lam = std::pow(kPi * m1 / 8.0, 2) + std::pow(kPi * m2 / 8.0, 2);
    kinetic_substep_dst(psi, s);
    double err = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) err = std::max(err, std::abs(psi[i] - mode[i] * std::polar(1.0, -0.5 * lam * s)));
    CHECK(err <= 1e-13);
  }
}

TEST_CASE("potential substep") {
  auto c = coulomb2d(8, 32, 0.0, 2);
  c.tau = 1e-2;
  SplittingIntegrator integ(c);
  ComplexField psi = gaussian_wavepacket(c.grid);
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= std::polar(1.0, 0.1 * i);
  const auto V = c.V.sample(c.grid);

  SUBCASE("beta = 0 is the external phase") {
    ComplexField p = psi;
    integ.potential_substep(p, 0.3);
    double err = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) err = std::max(err, std::abs(p[i] - psi[i] * std::polar(1.0, -0.3 * V[i])));
    CHECK(err <= 1e-15);
  }
  SUBCASE("modulus invariance and composition of half steps") {
    c.beta = -5.0;
    SplittingIntegrator nl(c);
    ComplexField full = psi, half = psi;
    nl.potential_substep(full, 0.2);
    nl.potential_substep(half, 0.1);
    nl.potential_substep(half, 0.1);
    double dmod = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) dmod = std::max(dmod, std::abs(std::abs(full[i]) - std::abs(psi[i])));
    CHECK(dmod <= 1e-15);
    CHECK(max_abs(full.values, half.values) <= 1e-13);
  }
}

TEST_CASE("harmonic ground state is stationary") {
  // beta = 0, V = |x|^2/2: e^{-|x|^2/2} evolves by the phase e^{-i t} in 2D.
  auto c = coulomb2d(8, 64, 0.0, 4);
  c.tau = 1e-3;
  c.t_end = 0.5;
  const ComplexField psi0 = gaussian_wavepacket(c.grid);
  const auto r = evolve(psi0, c);
  CVec exact = psi0.values;
  for (auto& z : exact) z *= std::polar(1.0, -0.5);
  CHECK(relative_max_error(r.psi.values, exact) <= 1e-12);
  CHECK(r.steps == 500);
  REQUIRE(r.trace.samples.size() == 2);
  CHECK(std::abs(r.trace.samples.back().e_total - r.trace.samples.front().e_total) <= 1e-12);
}

TEST_CASE("mass is conserved over 1000 steps") {
  for (int order : {2, 4}) {
    for (auto method : {PotentialMethod::NufftFull, PotentialMethod::Dst, PotentialMethod::Fft}) {
      CAPTURE(order);
      CAPTURE(to_string(method));
      auto c = coulomb2d(8, 32, -5.0, order);
      c.method = method;
      c.tau = 1e-3;
      c.t_end = 1.0;
      c.trace_every = 100;
      c.trace_energy = false;
      const auto r = evolve(gaussian_wavepacket(c.grid), c);
      REQUIRE(r.trace.samples.size() == 11);
      const double m0 = r.trace.samples.front().mass;
      double drift = 0.0;
      for (const auto& s : r.trace.samples) drift = std::max(drift, std::abs(s.mass - m0));
      CHECK(drift <= 1e-12 * m0);
      for (std::size_t i = 1; i < r.trace.samples.size(); ++i) CHECK(r.trace.samples[i].t > r.trace.samples[i - 1].t);
    }
  }
}

TEST_CASE("energy is nearly conserved") {
  auto c = coulomb2d(8, 64, 5.0, 4);
  c.tau = 1e-4;
  c.t_end = 0.5;
  c.trace_every = 1000;
  const auto r = evolve(gaussian_wavepacket(c.grid), c);
  const double e0 = r.trace.samples.front().e_total;
  double drift = 0.0;
  for (const auto& s : r.trace.samples) drift = std::max(drift, std::abs(s.e_total - e0));
  CHECK(drift <= 1e-8 * std::abs(e0));
}

TEST_CASE("snapshots, step counts and configuration errors") {
  auto c = coulomb2d(8, 16, 1.0, 2);
  c.tau = 0.01;
  c.t_end = 0.1;
  c.snapshot_times = {0.0, 0.05, 0.1};
  const auto r = evolve(gaussian_wavepacket(c.grid), c);
  REQUIRE(r.snapshots.size() == 3);
  CHECK(r.snapshots[1].t == doctest::Approx(0.05));
  CHECK(r.snapshots[0].density.kind == FieldKind::Density);

  auto bad = c;
  bad.t_end = 0.105;
  CHECK_THROWS_AS(evolve(gaussian_wavepacket(c.grid), bad), std::invalid_argument);
  bad = c;
  bad.snapshot_times = {0.2};
  CHECK_THROWS_AS(evolve(gaussian_wavepacket(c.grid), bad), std::invalid_argument);
  bad = c;
  bad.kernel = make_kernel(KernelFamily::Coulomb3D);
  CHECK_THROWS_AS(evolve(gaussian_wavepacket(c.grid), bad), std::invalid_argument);
  CHECK_THROWS_AS(evolve(gaussian_wavepacket(make_grid(2, {8, 8}, {32, 32})), c), std::invalid_argument);
}

TEST_CASE("state comparison restricts the reference") {
  const auto coarse = make_grid(2, {4, 4}, {16, 16});
  const auto fine = make_grid(2, {8, 8}, {64, 64});
  const auto psi = gaussian_wavepacket(coarse), ref = gaussian_wavepacket(fine);
  RealField phi(coarse, FieldKind::Potential, RVec(coarse.size(), 1.0));
  RealField rphi(fine, FieldKind::Potential, RVec(fine.size(), 2.0));
  const auto e = compare_states(psi, phi, ref, rphi);
  CHECK(e.e_psi <= 1e-15);
  CHECK(e.e_rho <= 1e-15);
  CHECK(e.e_phi == doctest::Approx(0.5));
}

TEST_CASE("honeycomb demo configuration") {
  const auto d = HoneycombDemo{};
  const auto c = d.config();
  CHECK(c.grid.n[0] == 512);
  CHECK(c.snapshot_times.size() == 3);
  const auto f = HoneycombDemo::full().config();
  CHECK(f.grid.n[0] == 1024);
  REQUIRE(f.snapshot_times.size() == 8);
  CHECK(f.snapshot_times.back() == doctest::Approx(3.5));
  CHECK(f.steps() == 35000);
}
