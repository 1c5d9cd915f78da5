#pragma once
// Exact potentials of Gaussian densities and the relative max-norm error.

#include <array>

#include "nlse/grid.hpp"
#include "nlse/kernels.hpp"

namespace nlse {

// rho(x) = exp(-(x^2 + y^2 + gamma^2 z^2)/sigma^2) in 3D,
// exp(-(x^2 + gamma^2 y^2)/sigma^2) in 2D, exp(-x^2/sigma^2) in 1D.
struct GaussianDensitySpec {
  double sigma = 1.0;
  double gamma = 1.0;
  int dim = 3;

  void validate() const;
  double operator()(const std::array<double, 3>& x) const;
  double mass() const;
};

RealField gaussian_density(const GaussianDensitySpec& spec, const UniformGrid& g);

// U = 1/(4 pi |x|) convolved with the Gaussian.
double coulomb3d_exact(const GaussianDensitySpec& spec, const std::array<double, 3>& x);
// U = 1/(2 pi |x|) in the plane.
double coulomb2d_exact(const GaussianDensitySpec& spec, const std::array<double, 2>& x);
// U = -(1/2 pi) ln|x| with rho = exp(-|x|^2/sigma0^2).
double poisson2d_exact(double sigma0, const std::array<double, 2>& x);
// U = -|x|/2 with rho = exp(-x^2/sigma0^2).
double poisson1d_exact(double sigma0, double x);

// Exact potential of the Gaussian for a kernel family on every grid point.
// Results are cached on disk under $NLSE_NONLOCAL_CACHE when that is set.
RealField exact_potential(KernelFamily family, const GaussianDensitySpec& spec, const UniformGrid& g);

// max|u - u_h| / max|u|.
double error_eh(const RealField& exact, const RealField& numeric);
double error_eh(const RVec& exact, const RVec& numeric);

}  // namespace nlse
