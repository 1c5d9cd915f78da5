#pragma once
// Ground states by the normalized gradient flow, backward Euler in time and
// Fourier pseudospectral in space, with a pluggable potential solver.

#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nlse/grid.hpp"
#include "nlse/kernels.hpp"
#include "nlse/observables.hpp"
#include "nlse/potential.hpp"

namespace nlse {

// An iteration that did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, int iterations, double residual)
      : std::runtime_error(what), iterations_(iterations), residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

struct GfdnConfig {
  KernelSpec kernel;
  UniformGrid grid;
  ExternalPotential V = harmonic_trap();
  double beta = 0.0;
  double tau = 1e-2;
  // Stop when max|phi^{n+1} - phi^n| / tau <= eps0.
  double eps0 = 1e-10;
  int max_steps = 200000;
  double inner_tol = 1e-12;
  int inner_max = 200;
  PotentialMethod method = PotentialMethod::NufftFull;
  SolverOptions solver = [] {
    SolverOptions o;
    o.tabulate = true;
    return o;
  }();
  // Default: normalized Gaussian of unit width per axis.
  std::optional<RVec> initial;
  // Converge first on grids coarser by 2^levels, ..., 2 and interpolate upward.
  int coarse_levels = 0;
  // Record E(phi^n) at every step.
  bool track_energy = false;

  void validate() const;
};

struct InnerSolveResult {
  RVec phi;
  int iterations = 0;
  double last_update = 0.0;
  bool converged = false;
};

// Solves (1/tau - Delta/2 + b) phi = phi_n / tau by the stabilized fixed point
// phi^{m+1} = [(1/tau + alpha) - Delta/2]^{-1} [phi_n / tau + (alpha - b) phi^m],
// alpha = (max b + min b) / 2, until max|phi^{m+1} - phi^m| <= tol. When the contraction
// bound (max b - min b) / (2 (1/tau + alpha)) exceeds 1/2 the same system is solved by
// conjugate gradients preconditioned with (1/tau + min b) - Delta/2, same stopping rule.
InnerSolveResult besp_inner_solve(const UniformGrid& g, const RVec& phi_n, const RVec& b, double tau, double tol,
                                  int max_iter, const RVec* guess = nullptr);

struct GfdnLevel {
  UniformGrid grid;
  int steps = 0;
  double residual = 0.0;
  double seconds = 0.0;
};

struct GroundStateResult {
  RealField phi_g;
  RealField potential;  // U * phi_g^2
  EnergyReport report;
  int steps = 0;        // on the final grid
  std::vector<double> residual_history;
  std::vector<double> energy_history;
  std::vector<GfdnLevel> levels;  // coarse to fine, last is the final grid
};

// Reusable stepper bound to one grid: potential solver, V and spectral symbols are built once.
class GfdnStepper {
 public:
  explicit GfdnStepper(const GfdnConfig& cfg);
  ~GfdnStepper();
  GfdnStepper(GfdnStepper&&) noexcept;

  struct Step {
    RVec phi;             // normalized phi^{n+1}
    double residual = 0;  // max|phi^{n+1} - phi^n| / tau
    int inner_iterations = 0;
    double energy = 0;    // E(phi^n) when tracking, else 0
  };
  // One GFDN step from a normalized phi^n.
  Step step(const RVec& phi_n, bool with_energy = false);
  RVec potential(const RVec& phi) const;
  EnergyReport report(const RVec& phi) const;
  const GfdnConfig& config() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One step with freshly built solvers (convenience; compute_ground_state reuses a stepper).
RVec gfdn_step(const RVec& phi_n, const GfdnConfig& cfg);

GroundStateResult compute_ground_state(const GfdnConfig& cfg);

// Normalized Gaussian of unit width per axis on g.
RVec default_initial_state(const UniformGrid& g);

}  // namespace nlse
