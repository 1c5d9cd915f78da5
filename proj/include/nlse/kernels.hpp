#pragma once
// Fourier symbols of the interaction kernels and the auxiliary symbols used
// by the regularized solvers.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>

#include "nlse/grid.hpp"

namespace nlse {

enum class KernelFamily { Coulomb3D, Coulomb2D, LaplaceGreen3D, LaplaceGreen2D, LaplaceGreen1D, Confined2D, Confined1D };

const char* to_string(KernelFamily f);
KernelFamily parse_kernel_family(const std::string& s);
int kernel_dim(KernelFamily f);
bool is_confined(KernelFamily f);

struct KernelSpec {
  KernelFamily family = KernelFamily::Coulomb3D;
  std::optional<double> epsilon;  // confined families only
  std::optional<double> sigma;    // regularization width for the 2D/1D Laplace solvers

  int dim() const { return kernel_dim(family); }
  void validate() const;
};

KernelSpec make_kernel(KernelFamily f, std::optional<double> epsilon = std::nullopt,
                       std::optional<double> sigma = std::nullopt);

// Thrown when a singular symbol is evaluated at k = 0.
class SingularSymbol : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// U_hat(|k|). Coulomb3D / LaplaceGreen*: 1/|k|^2; Coulomb2D: 1/|k|;
// Confined2D: W1/|k|; Confined1D: W3/|k|.
double symbol(const KernelSpec& spec, double kabs);

// Confined-kernel integrals evaluated by adaptive Gauss-Kronrod (tol 1e-13)
// and cached per (|k|, eps).
double confined_w1(double kabs, double eps);  // (2/pi) int_0^inf e^{-eps^2 k^2 s^2/2}/(1+s^2) ds
double confined_w2(double k, double eps);     // int_0^inf e^{-eps^2 k^2 s/2}/(1+s)^2 ds
double confined_w3(double k, double eps);     // (k/2) int_0^inf e^{-eps^2 k^2 s/2}/(1+s) ds
void clear_confined_cache();

// Regularized 2D Poisson integrand:
// (rho_hat(k) - (rho_hat(0) + k . grad rho_hat(0)) e^{-|k|^2 sigma^2/2}) / |k|, and 0 at k = 0.
cplx poisson2d_W(const std::array<double, 2>& k, cplx rho_hat_0, const std::array<cplx, 2>& grad_rho_hat_0,
                 cplx rho_hat_k, double sigma);

// Moments rho_hat(0), (x rho)^(0), (x^2 rho)^(0) of a 1D density.
struct Moments1D {
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
};
// (rho_hat(k) - (rho_hat(0) + k rho_hat'(0)) e^{-k^2 sigma^2/2}) / k^2, with the k = 0 limit
// -m2/2 + sigma^2 m0 / 2. rho_hat'(0) = -i m1.
cplx poisson1d_W(double k, const Moments1D& m, cplx rho_hat_k, double sigma);

// Partition of unity p(k) = e^{-|k|^2/delta^2} and the regular remainder
// w_d(k) = (1 - p(k)) / |k|^{d-1}.
double partition_pd(double kabs, double delta);
double regular_part_wd(double kabs, double delta, int d);

}  // namespace nlse
