#pragma once
// Real-time NLSE i psi_t = [-Delta/2 + V + beta U*|psi|^2] psi by operator splitting.

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "nlse/grid.hpp"
#include "nlse/kernels.hpp"
#include "nlse/observables.hpp"
#include "nlse/potential.hpp"

namespace nlse {

// Composition of Strang steps T/2 V T/2 with the given step fractions.
struct SplittingScheme {
  int order = 2;
  std::vector<double> weights{1.0};

  static SplittingScheme strang();
  // Triple jump: w1, w0, w1 with w1 = 1/(2 - 2^{1/3}), w0 = 1 - 2 w1.
  static SplittingScheme fourth_order();
  static SplittingScheme of_order(int order);
};

struct DynamicsConfig {
  KernelSpec kernel;
  UniformGrid grid;
  ExternalPotential V = harmonic_trap();
  double beta = 0.0;
  double tau = 1e-3;
  double t_end = 0.0;
  SplittingScheme scheme = SplittingScheme::fourth_order();
  // Dst also switches the kinetic step to the sine basis (homogeneous Dirichlet data).
  PotentialMethod method = PotentialMethod::NufftFull;
  SolverOptions solver = [] {
    SolverOptions o;
    o.tabulate = true;
    return o;
  }();
  // Trace sample every this many steps (0: only t = 0 and t_end).
  int trace_every = 0;
  bool trace_energy = true;
  // Density snapshots at these times (rounded to the nearest step).
  std::vector<double> snapshot_times;

  void validate() const;
  // Number of steps; t_end must be an integer multiple of tau within roundoff.
  long steps() const;
};

struct TraceSample {
  double t = 0.0;
  double mass = 0.0;
  // NaN when energies are not traced.
  double e_total = 0.0, e_kin = 0.0, e_pot = 0.0, e_int = 0.0;
};

struct DynamicsTrace {
  std::vector<TraceSample> samples;
};

struct Snapshot {
  double t = 0.0;
  RealField density;
};

struct DynamicsResult {
  ComplexField psi;
  RealField potential;  // U * |psi|^2 at t_end
  DynamicsTrace trace;
  std::vector<Snapshot> snapshots;
  long steps = 0;
  double seconds = 0.0;
};

// psi_hat <- exp(-i |k|^2 s / 2) psi_hat (Fourier, periodic).
void kinetic_substep(ComplexField& psi, double s);
// Same flow in the sine basis; boundary values are set to zero.
void kinetic_substep_dst(ComplexField& psi, double s);

// Splitting integrator bound to one configuration: solvers, V and phase symbols are built once.
class SplittingIntegrator {
 public:
  explicit SplittingIntegrator(const DynamicsConfig& cfg);
  ~SplittingIntegrator();
  SplittingIntegrator(SplittingIntegrator&&) noexcept;

  // psi <- exp(-i (V + beta U*|psi|^2) s) psi with the potential computed once from the input.
  void potential_substep(ComplexField& psi, double s) const;
  void kinetic(ComplexField& psi, double s) const;
  // One step of the configured scheme with step tau.
  void step(ComplexField& psi) const;
  // n steps; equal to n calls of step() up to roundoff, with fewer kinetic transforms.
  void advance(ComplexField& psi, long n) const;
  RVec potential(const ComplexField& psi) const;
  EnergyReport energy(const ComplexField& psi) const;
  const DynamicsConfig& config() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

DynamicsResult evolve(const ComplexField& psi0, const DynamicsConfig& cfg);

// e^{-|x|^2/2}, not normalized.
ComplexField gaussian_wavepacket(const UniformGrid& g);

struct StateErrors {
  double e_psi = 0.0, e_phi = 0.0, e_rho = 0.0;
};
// Relative max errors of a run against a reference on a finer and/or larger grid whose points
// include those of the run's grid.
StateErrors compare_states(const ComplexField& psi, const RealField& phi, const ComplexField& ref_psi,
                           const RealField& ref_phi);

// Honeycomb application: 2D Coulomb, beta = 5, psi0 = e^{-|x|^2/2}.
struct HoneycombDemo {
  double L = 32.0;
  double h = 1.0 / 8;
  double tau = 1e-4;
  double t_end = 1.0;
  double beta = 5.0;
  double snapshot_every = 0.5;
  int order = 4;

  // Full-resolution run: h = 1/16, t_end = 3.5.
  static HoneycombDemo full();
  DynamicsConfig config() const;
};

}  // namespace nlse
