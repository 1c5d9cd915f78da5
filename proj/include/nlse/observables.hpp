#pragma once
// Mass, energy split, chemical potential and virial residual of a state.

#include <array>
#include <optional>
#include <string>

#include "nlse/grid.hpp"
#include "nlse/kernels.hpp"

namespace nlse {

// External potential V(x).
struct ExternalPotential {
  enum class Kind { Zero, Harmonic, Honeycomb };
  Kind kind = Kind::Harmonic;
  // Harmonic: V = sum_a gamma_a^2 x_a^2 / 2.
  std::array<double, 3> gamma{1.0, 1.0, 1.0};
  // Honeycomb: amplitude of the three-cosine lattice (2D only).
  double amplitude = 10.0;

  double operator()(const std::array<double, 3>& x, int dim) const;
  RealField sample(const UniformGrid& g) const;
  bool harmonic() const { return kind == Kind::Harmonic; }
  std::string describe() const;
};

ExternalPotential harmonic_trap(std::array<double, 3> gamma = {1.0, 1.0, 1.0});
// 10 [cos(b1.x) + cos(b2.x) + cos((b1+b2).x)], b1 = (pi/4)(sqrt3, 1), b2 = (pi/4)(-sqrt3, 1).
double honeycomb_potential(const std::array<double, 2>& x, double amplitude = 10.0);

struct EnergyReport {
  double e_kin = 0.0, e_pot = 0.0, e_int = 0.0, e_total = 0.0, mu = 0.0;
  // NaN unless a virial check was requested.
  double virial_residual = 0.0;
};

// h^d sum |psi|^2
double mass(const ComplexField& psi);
double mass(const RealField& phi);

// Which virial identity applies; requesting one for a kernel without an identity,
// or for a non-harmonic V, throws std::invalid_argument.
struct VirialCheck {
  KernelFamily family = KernelFamily::Coulomb3D;
  bool harmonic = true;
};

// E_kin = (1/2) int |grad psi|^2 (spectral gradient), E_pot = int V |psi|^2,
// E_int = (beta/2) int phi |psi|^2, mu = E + E_int. phi must be U * |psi|^2.
// Virial residual: 2E_kin - 2E_pot + E_int (Coulomb) or 2E_kin - 2E_pot + beta/(4 pi) (2D Laplace).
EnergyReport energy(const ComplexField& psi, const RealField& V, double beta, const RealField& phi,
                    std::optional<VirialCheck> virial = std::nullopt);
EnergyReport energy(const RealField& phi_state, const RealField& V, double beta, const RealField& phi,
                    std::optional<VirialCheck> virial = std::nullopt);

// Relative max-norm difference max|a - b| / max|b| (b is the reference).
double relative_max_error(const RVec& a, const RVec& b);
double relative_max_error(const CVec& a, const CVec& b);

}  // namespace nlse
