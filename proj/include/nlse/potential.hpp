#pragma once
// Solvers for u = U * rho on a uniform grid.

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nlse/grid.hpp"
#include "nlse/kernels.hpp"
#include "nlse/nufft.hpp"

namespace nlse {

enum class PotentialMethod { NufftFull, NufftSplit, Fft, Dst, FdmRadial };
const char* to_string(PotentialMethod m);
PotentialMethod parse_potential_method(const std::string& s);
// NufftSplit for 3D Coulomb/Laplace, NufftFull otherwise.
PotentialMethod default_method(KernelFamily f);

struct SolverOptions {
  double tol = 1e-12;
  // Regularization width of the 2D/1D Laplace solvers; default 8.8/P.
  std::optional<double> sigma;
  // Partition-of-unity width of the split solver; default from a cost model.
  std::optional<double> delta;
  // Half-extent per axis of the region where rho is non-negligible; default L.
  std::optional<std::array<double, 3>> support;
  // Fourier cutoff per axis; default pi/h.
  std::optional<std::array<double, 3>> bandwidth;
  // Explicit node counts for the full NUFFT path.
  std::optional<ShellCounts> counts;
  // NUFFT paths only: evaluate the discrete convolution kernel once (one solve on the doubled
  // grid) and apply it afterwards with zero-padded FFTs. Worth it when apply() runs many times.
  bool tabulate = false;
};

// Support half-extents and spectral cutoffs read off a density sample.
// Used by the one-shot solve_* functions; reusable solvers default to the whole box and full band.
void estimate_geometry(const RealField& rho, SolverOptions& opts);

// A solver bound to a kernel, grid and method. Plans and symbol weights are built
// once; apply() may be called repeatedly with different densities.
class PotentialSolver {
 public:
  PotentialSolver(const KernelSpec& spec, const UniformGrid& g, PotentialMethod method,
                  const SolverOptions& opts = {});
  ~PotentialSolver();
  PotentialSolver(PotentialSolver&&) noexcept;
  PotentialSolver& operator=(PotentialSolver&&) noexcept;

  RVec apply(const RVec& rho) const;
  RealField apply(const RealField& rho) const;

  const KernelSpec& kernel() const;
  const UniformGrid& grid() const;
  PotentialMethod method() const;
  // One-line summary of the discretization (node count, delta, padded sizes).
  std::string describe() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

// One-shot solvers. Geometry not given in opts is estimated from rho.
RealField solve_coulomb_nufft(const KernelSpec& spec, const RealField& rho,
                              PotentialMethod method = PotentialMethod::NufftSplit, SolverOptions opts = {});
RealField solve_poisson2d(const RealField& rho, SolverOptions opts = {});
RealField solve_poisson1d(const RealField& rho, SolverOptions opts = {});
RealField solve_confined(const KernelSpec& spec, const RealField& rho, SolverOptions opts = {});
// Periodic pseudospectral division by the symbol, zero mode dropped.
RealField solve_fft(const KernelSpec& spec, const RealField& rho);
// Sine-pseudospectral solve with homogeneous Dirichlet data.
RealField solve_dst(const KernelSpec& spec, const RealField& rho);
// Dispatch on (kernel, method).
RealField solve_potential(const KernelSpec& spec, const RealField& rho, PotentialMethod method,
                          SolverOptions opts = {});

// Radial two-point problem -(1/r^{d-1})(r^{d-1} u')' = rho on [0, L] with u'(0) = 0 and
// u'(L) = -u(L)/L (d = 3) or u(L)/(L ln L) (d = 2), centered second-order differences.
struct RadialProfile {
  std::vector<double> r;
  std::vector<double> u;
};
RadialProfile solve_fdm_radial(const std::function<double(double)>& rho, double L, double h, int d);

// Closed-form pieces of the regularized 2D/1D Laplace solvers.
double poisson2d_u11(double r, double sigma);
std::array<double, 2> poisson2d_u12(const std::array<double, 2>& x, double sigma);
double poisson1d_u11(double x, double sigma);
double poisson1d_u12(double x, double sigma);

}  // namespace nlse
