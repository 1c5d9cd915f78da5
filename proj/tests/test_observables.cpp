#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "nlse/observables.hpp"
#include "nlse/reference.hpp"

using namespace nlse;

namespace {

UniformGrid cube(int dim, double L, int n) {
  return make_grid(dim, std::vector<double>(dim, L), std::vector<int>(dim, n));
}

// Harmonic-oscillator ground state prod_a (g_a/pi)^{1/4} e^{-g_a x_a^2/2}.
ComplexField ho_ground(const UniformGrid& g, std::array<double, 3> gam) {
  auto f = sample<double>(g, FieldKind::Wavefunction, [&](const std::array<double, 3>& x) {
    double v = 1.0;
    for (int a = 0; a < g.dim; ++a) v *= std::pow(gam[a] / kPi, 0.25) * std::exp(-0.5 * gam[a] * x[a] * x[a]);
    return v;
  });
  ComplexField psi(g, FieldKind::Wavefunction);
  for (std::size_t i = 0; i < f.size(); ++i) psi[i] = f[i];
  return psi;
}

RealField zeros(const UniformGrid& g) { return RealField(g, FieldKind::Potential); }

}  // namespace

TEST_CASE("mass") {
  const auto g = cube(3, 8, 64);
  const auto psi = ho_ground(g, {1, 1, 1});
  CHECK(std::abs(mass(psi) - 1.0) <= 1e-13);
  CHECK(mass(ComplexField(g, FieldKind::Wavefunction)) == 0.0);
  ComplexField scaled = psi;
  const cplx c(0.6, -1.3);
  for (auto& z : scaled.values) z *= c;
  CHECK(std::abs(mass(scaled) - std::norm(c) * mass(psi)) <= 1e-13 * std::norm(c));
}

TEST_CASE("energy of the harmonic-oscillator ground state") {
  SUBCASE("isotropic 3D") {
    const auto g = cube(3, 8, 64);
    const auto psi = ho_ground(g, {1, 1, 1});
    const auto V = harmonic_trap().sample(g);
    const auto r = energy(psi, V, 0.0, zeros(g), VirialCheck{KernelFamily::Coulomb3D, true});
    CHECK(std::abs(r.e_kin - 0.75) <= 1e-12);
    CHECK(std::abs(r.e_pot - 0.75) <= 1e-12);
    CHECK(r.e_int == 0.0);
    CHECK(std::abs(r.e_total - 1.5) <= 1e-12);
    CHECK(std::abs(r.virial_residual) <= 1e-12);
  }
  SUBCASE("anisotropic 2D") {
    const auto g = make_grid(2, {8, 6}, {64, 96});
    const std::array<double, 3> gam{1.0, 2.0, 1.0};
    const auto psi = ho_ground(g, gam);
    const auto r = energy(psi, harmonic_trap(gam).sample(g), 0.0, zeros(g));
    // Each axis contributes gamma_a / 4 to both energies.
    CHECK(std::abs(r.e_kin - 0.75) <= 1e-12);
    CHECK(std::abs(r.e_pot - 0.75) <= 1e-12);
    CHECK(std::isnan(r.virial_residual));
  }
}

TEST_CASE("interaction energy of a Gaussian against the closed form") {
  // |psi|^2 = pi^{-3/2} e^{-r^2}: int int rho rho / (4 pi |x - y|) = sqrt(2/pi) / (4 pi).
  const auto g = cube(3, 8, 64);
  const auto psi = ho_ground(g, {1, 1, 1});
  const double A = std::pow(kPi, -1.5);
  auto phi = exact_potential(KernelFamily::Coulomb3D, {1.0, 1.0, 3}, g);
  for (auto& v : phi.values) v *= A;
  const double beta = -7.0;
  const auto V = harmonic_trap().sample(g);
  const auto r = energy(psi, V, beta, phi);
  CHECK(std::abs(r.e_int - beta / 2 * std::sqrt(2 / kPi) / (4 * kPi)) <= 1e-12);
  CHECK(std::abs((r.mu - r.e_total) - r.e_int) <= 1e-15);
  CHECK(std::abs(r.e_total - (r.e_kin + r.e_pot + r.e_int)) <= 1e-15);

  // Global phase does not change any energy.
  ComplexField rot = psi;
  for (auto& z : rot.values) z *= std::polar(1.0, 0.7);
  const auto r2 = energy(rot, V, beta, phi);
  CHECK(std::abs(r2.e_kin - r.e_kin) <= 1e-14);
  CHECK(std::abs(r2.e_pot - r.e_pot) <= 1e-14);
  CHECK(std::abs(r2.e_int - r.e_int) <= 1e-14);

  // Real-field overload agrees.
  RealField re(g, FieldKind::Wavefunction);
  for (std::size_t i = 0; i < re.size(); ++i) re[i] = psi[i].real();
  CHECK(std::abs(energy(re, V, beta, phi).e_total - r.e_total) <= 1e-14);
}

TEST_CASE("virial requests are validated") {
  const auto g = cube(2, 8, 32);
  ComplexField psi(g, FieldKind::Wavefunction);
  const auto V = harmonic_trap().sample(g);
  CHECK_THROWS_AS(energy(psi, V, 1.0, zeros(g), VirialCheck{KernelFamily::Confined2D, true}), std::invalid_argument);
  CHECK_THROWS_AS(energy(psi, V, 1.0, zeros(g), VirialCheck{KernelFamily::Coulomb2D, false}), std::invalid_argument);
  // 2D Laplace uses beta / (4 pi) in place of E_int.
  const auto r = energy(psi, V, 4.0 * kPi, zeros(g), VirialCheck{KernelFamily::LaplaceGreen2D, true});
  CHECK(std::abs(r.virial_residual - 1.0) <= 1e-15);
  CHECK_THROWS_AS(energy(psi, V, 1.0, zeros(cube(2, 8, 16))), std::invalid_argument);
}

TEST_CASE("honeycomb potential") {
  CHECK(std::abs(honeycomb_potential({0.0, 0.0}) - 30.0) <= 1e-15);
  const double a = 8.0 / std::sqrt(3.0);
  for (auto p : {std::array<double, 2>{0.3, -1.7}, std::array<double, 2>{5.2, 2.4}, std::array<double, 2>{-3.1, 7.7}}) {
    CHECK(std::abs(honeycomb_potential(p) - honeycomb_potential({-p[0], -p[1]})) <= 1e-13);
    CHECK(std::abs(honeycomb_potential(p) - honeycomb_potential({p[0] + a, p[1]})) <= 1e-12);
  }
  ExternalPotential hc;
  hc.kind = ExternalPotential::Kind::Honeycomb;
  CHECK(hc({0, 0, 0}, 2) == 30.0);
  CHECK_THROWS(hc({0, 0, 0}, 3));
  CHECK_FALSE(hc.harmonic());
}

TEST_CASE("relative max error") {
  RVec a{1.0, 2.0, -3.0}, b{1.0, 2.0, -4.0};
  CHECK(relative_max_error(a, b) == doctest::Approx(0.25));
  CHECK_THROWS(relative_max_error(a, RVec{0.0, 0.0, 0.0}));
  CHECK_THROWS(relative_max_error(a, RVec{1.0}));
}
