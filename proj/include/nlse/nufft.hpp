#pragma once
// Nonuniform FFTs between a uniform grid and arbitrary frequency nodes,
// frequency-node quadratures on balls/ellipsoids, and brute-force oracles.

#include <array>
#include <memory>
#include <vector>

#include "nlse/grid.hpp"

namespace nlse {

enum class NodeTag { SphericalShell, PolarShell, Regular };
const char* to_string(NodeTag t);

// Frequency nodes k_m with weights w_m. For shell tags the weights satisfy
//   sum_m w_m g(k_m) ~ int_{ellipsoid} g(k) / |k|^{d-1} dk,
// where the ellipsoid is { A q : |q| <= P } with A = diag(axes).
// With half = true only one of each pair (k, -k) is kept and its weight doubled.
struct FrequencyNodeSet {
  int dim = 3;
  NodeTag tag = NodeTag::SphericalShell;
  double P = 0.0;
  std::array<double, 3> axes{1.0, 1.0, 1.0};
  bool half = false;
  std::vector<double> k;     // size() * dim, node-major
  std::vector<double> w;     // weights
  std::vector<double> kabs;  // |k_m|

  std::size_t size() const { return w.size(); }
  const double* node(std::size_t m) const { return k.data() + m * dim; }
};

FrequencyNodeSet build_spherical_nodes(double P, int n_radial_panels, int q_per_panel, int n_theta, int n_phi,
                                       const std::array<double, 3>& axes = {1.0, 1.0, 1.0}, bool half = false);
FrequencyNodeSet build_polar_nodes(double P, int n_radial_panels, int q_per_panel, int n_phi,
                                   const std::array<double, 2>& axes = {1.0, 1.0}, bool half = false);
// The grid's own FFT modes with unit weights.
FrequencyNodeSet build_regular_nodes(const UniformGrid& g);

struct ShellCounts {
  int n_radial_panels = 1;
  int q_per_panel = 10;
  int n_theta = 0;  // 3D only
  int n_phi = 0;
};

// Node counts that resolve a Fourier integrand whose total phase over the
// ball is at most `phase` radians (P times the largest stretched distance).
ShellCounts shell_counts_for_phase(int dim, double phase);

// Counts used when none are specified: N/8 panels of 10 nodes, n_theta = n_phi = N.
ShellCounts default_shell_counts(const UniformGrid& g);

// Spreading parameters of the exponential-of-semicircle kernel.
struct SpreadParams {
  int width = 0;
  double beta = 0.0;
  int oversampling = 2;
};
SpreadParams spread_params_for_tol(double tol);

class NufftPlan {
 public:
  NufftPlan(const UniformGrid& g, const FrequencyNodeSet& nodes, double tol);

  const UniformGrid& grid() const { return grid_; }
  std::size_t num_nodes() const { return m_; }
  double tol() const { return tol_; }
  const SpreadParams& spread() const { return sp_; }
  bool pruned() const { return pruned_; }

  // rho_hat(k_m) = h^d sum_j f(x_j) exp(-i k_m . x_j)
  CVec u2n(const CVec& f) const;
  CVec u2n(const RVec& f) const;
  // u(x_j) = sum_m c_m exp(i k_m . x_j)
  CVec n2u(const CVec& c) const;

 private:
  CVec fine_forward(const CVec& g) const;          // uniform -> fine-grid (or block) coefficients
  CVec fine_backward(const CVec& b) const;         // fine-grid (or block) -> uniform

  UniformGrid grid_;
  int dim_;
  std::size_t m_;
  double tol_;
  SpreadParams sp_;
  std::array<int, 3> nf_{1, 1, 1};      // oversampled grid per axis
  std::array<int, 3> lo_{0, 0, 0};      // block origin (signed fine index)
  std::array<int, 3> blk_{1, 1, 1};     // block extent per axis (== nf when full)
  bool pruned_ = false;
  double delta_[3]{1, 1, 1};            // fine spacing in t
  std::vector<double> t_;               // node phases k_a h_a reduced to [-pi, pi)
  std::vector<double> deconv_[3];       // 1 / psi_hat(j') per axis, uniform index order
  std::vector<cplx> dft_[3];            // block DFT matrices (pruned path), blk x N
};

// Brute-force sums, O(N M).
CVec nudft_direct_u2n(const UniformGrid& g, const FrequencyNodeSet& nodes, const CVec& f);
CVec nudft_direct_u2n(const UniformGrid& g, const FrequencyNodeSet& nodes, const RVec& f);
CVec nudft_direct_n2u(const UniformGrid& g, const FrequencyNodeSet& nodes, const CVec& c);

}  // namespace nlse
