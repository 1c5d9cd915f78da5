#include "nlse/observables.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nlse {

double ExternalPotential::operator()(const std::array<double, 3>& x, int dim) const {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::Harmonic: {
      double v = 0.0;
      for (int a = 0; a < dim; ++a) v += gamma[a] * gamma[a] * x[a] * x[a];
      return 0.5 * v;
    }
    case Kind::Honeycomb:
      if (dim != 2) throw std::invalid_argument("honeycomb potential is two-dimensional");
      return honeycomb_potential({x[0], x[1]}, amplitude);
  }
  return 0.0;
}

RealField ExternalPotential::sample(const UniformGrid& g) const {
  return nlse::sample<double>(g, FieldKind::Potential, [&](const std::array<double, 3>& x) { return (*this)(x, g.dim); });
}

std::string ExternalPotential::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Zero: os << "zero"; break;
    case Kind::Harmonic: os << "harmonic(" << gamma[0] << ',' << gamma[1] << ',' << gamma[2] << ')'; break;
    case Kind::Honeycomb: os << "honeycomb(" << amplitude << ')'; break;
  }
  return os.str();
}

ExternalPotential harmonic_trap(std::array<double, 3> gamma) {
  ExternalPotential v;
  v.kind = ExternalPotential::Kind::Harmonic;
  v.gamma = gamma;
  return v;
}

double honeycomb_potential(const std::array<double, 2>& x, double amplitude) {
  const double s3 = std::sqrt(3.0), q = kPi / 4.0;
  const double b1x = q * s3, b1y = q, b2x = -q * s3, b2y = q;
  const double d1 = b1x * x[0] + b1y * x[1];
  const double d2 = b2x * x[0] + b2y * x[1];
  return amplitude * (std::cos(d1) + std::cos(d2) + std::cos(d1 + d2));
}

double mass(const ComplexField& psi) {
  double s = 0.0;
  for (const cplx& z : psi.values) s += std::norm(z);
  return s * psi.grid.cell_volume();
}

double mass(const RealField& phi) {
  double s = 0.0;
  for (double v : phi.values) s += v * v;
  return s * phi.grid.cell_volume();
}

namespace {

double virial_term(const VirialCheck& v, double beta, double e_int) {
  if (!v.harmonic) throw std::invalid_argument("virial identity needs a harmonic external potential");
  switch (v.family) {
    case KernelFamily::Coulomb3D:
    case KernelFamily::LaplaceGreen3D:
    case KernelFamily::Coulomb2D: return e_int;
    case KernelFamily::LaplaceGreen2D: return beta / (4.0 * kPi);
    default:
      throw std::invalid_argument(std::string("no virial identity for kernel ") + to_string(v.family));
  }
}

}  // namespace

EnergyReport energy(const ComplexField& psi, const RealField& V, double beta, const RealField& phi,
                    std::optional<VirialCheck> virial) {
  const UniformGrid& g = psi.grid;
  if (V.grid != g || phi.grid != g) throw std::invalid_argument("energy: fields live on different grids");
  const double cv = g.cell_volume();
  EnergyReport r;
  double grad2 = 0.0;
  for (const CVec& d : spectral_gradient(g, CVec(psi.values.begin(), psi.values.end())))
    for (const cplx& z : d) grad2 += std::norm(z);
  r.e_kin = 0.5 * grad2 * cv;
  double ep = 0.0, ei = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double rho = std::norm(psi[i]);
    ep += V[i] * rho;
    ei += phi[i] * rho;
  }
  r.e_pot = ep * cv;
  r.e_int = 0.5 * beta * ei * cv;
  r.e_total = r.e_kin + r.e_pot + r.e_int;
  r.mu = r.e_total + r.e_int;
  r.virial_residual = std::numeric_limits<double>::quiet_NaN();
  if (virial) r.virial_residual = 2.0 * r.e_kin - 2.0 * r.e_pot + virial_term(*virial, beta, r.e_int);
  return r;
}

EnergyReport energy(const RealField& phi_state, const RealField& V, double beta, const RealField& phi,
                    std::optional<VirialCheck> virial) {
  ComplexField psi(phi_state.grid, FieldKind::Wavefunction);
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = phi_state[i];
  return energy(psi, V, beta, phi, virial);
}

double relative_max_error(const RVec& a, const RVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("relative_max_error: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  if (den == 0.0) throw std::invalid_argument("relative_max_error: reference is identically zero");
  return num / den;
}

double relative_max_error(const CVec& a, const CVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("relative_max_error: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  if (den == 0.0) throw std::invalid_argument("relative_max_error: reference is identically zero");
  return num / den;
}

}  // namespace nlse
