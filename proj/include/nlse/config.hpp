#pragma once
// Run configuration: `key = value` lines, optional [section] headers, '#' comments.
//
// Top level (or [run]): command, kernel, epsilon, L, N, method, tol, beta, potential,
//   gamma, amplitude, out, full, demo
// [density]     sigma, anisotropy                      (potential runs)
// [groundstate] tau, eps0, max_steps, inner_tol, inner_max, coarse_levels, track_energy
// [dynamics]    tau, t_end, order, trace_every, snapshots
// [table]       id, full
//
// L and N take one value (cubic box) or one per axis separated by commas.
// method = nufft picks the default NUFFT path for the kernel.
// demo = honeycomb (dynamics only) needs no kernel or grid keys; full = true selects the
// full-resolution demo and, for reproduce-table, the full parameter sets.

#include <optional>
#include <string>
#include <vector>

#include "nlse/dynamics.hpp"
#include "nlse/groundstate.hpp"
#include "nlse/reference.hpp"

namespace nlse {

enum class Command { Potential, Groundstate, Dynamics, ReproduceTable };
const char* to_string(Command c);
Command parse_command(const std::string& s);

// Malformed configuration text; the message names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  Command command = Command::Potential;
  KernelSpec kernel;
  UniformGrid grid;
  PotentialMethod method = PotentialMethod::NufftFull;
  double tol = 1e-12;
  double beta = 0.0;
  ExternalPotential V = harmonic_trap();
  GaussianDensitySpec density;

  struct {
    double tau = 1e-2, eps0 = 1e-10, inner_tol = 1e-12;
    int max_steps = 200000, inner_max = 200, coarse_levels = 0;
    bool track_energy = false;
  } gs;
  struct {
    double tau = 1e-3, t_end = 0.0;
    int order = 4, trace_every = 0;
    std::vector<double> snapshots;
  } dyn;
  struct {
    int id = 0;
  } table;
  bool full = false;
  std::string demo;

  std::string out = "out";
  // The text this config was parsed from, echoed into run manifests.
  std::string source;

  GfdnConfig groundstate_config() const;
  DynamicsConfig dynamics_config() const;
  SolverOptions solver_options() const;
};

// Throws ConfigError for unknown keys, type mismatches and missing required keys, and
// std::invalid_argument from the grid and kernel validators ("npoints must be even", ...).
// `command` fixes the command when the text has no command key; a conflicting key is an error.
RunConfig parse_config(const std::string& text, std::optional<Command> command = std::nullopt);
RunConfig load_config(const std::string& path, std::optional<Command> command = std::nullopt);

}  // namespace nlse
