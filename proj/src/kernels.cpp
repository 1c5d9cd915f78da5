#include "nlse/kernels.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <tuple>

#include "nlse/specfun.hpp"

namespace nlse {

const char* to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::Coulomb3D: return "coulomb3d";
    case KernelFamily::Coulomb2D: return "coulomb2d";
    case KernelFamily::LaplaceGreen3D: return "laplace3d";
    case KernelFamily::LaplaceGreen2D: return "laplace2d";
    case KernelFamily::LaplaceGreen1D: return "laplace1d";
    case KernelFamily::Confined2D: return "confined2d";
    case KernelFamily::Confined1D: return "confined1d";
  }
  return "?";
}

KernelFamily parse_kernel_family(const std::string& s) {
  for (auto f : {KernelFamily::Coulomb3D, KernelFamily::Coulomb2D, KernelFamily::LaplaceGreen3D,
                 KernelFamily::LaplaceGreen2D, KernelFamily::LaplaceGreen1D, KernelFamily::Confined2D,
                 KernelFamily::Confined1D})
    if (s == to_string(f)) return f;
  if (s == "poisson3d") return KernelFamily::LaplaceGreen3D;
  if (s == "poisson2d") return KernelFamily::LaplaceGreen2D;
  if (s == "poisson1d") return KernelFamily::LaplaceGreen1D;
  throw std::invalid_argument("unknown kernel '" + s + "'");
}

int kernel_dim(KernelFamily f) {
  switch (f) {
    case KernelFamily::Coulomb3D:
    case KernelFamily::LaplaceGreen3D: return 3;
    case KernelFamily::Coulomb2D:
    case KernelFamily::LaplaceGreen2D:
    case KernelFamily::Confined2D: return 2;
    case KernelFamily::LaplaceGreen1D:
    case KernelFamily::Confined1D: return 1;
  }
  return 3;
}

bool is_confined(KernelFamily f) { return f == KernelFamily::Confined2D || f == KernelFamily::Confined1D; }

void KernelSpec::validate() const {
  if (is_confined(family)) {
    if (!epsilon) throw std::invalid_argument(std::string("kernel ") + to_string(family) + " requires epsilon");
    if (!(*epsilon > 0.0 && *epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1]");
  } else if (epsilon) {
    throw std::invalid_argument(std::string("kernel ") + to_string(family) + " does not take epsilon");
  }
  if (sigma && !(*sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
}

KernelSpec make_kernel(KernelFamily f, std::optional<double> epsilon, std::optional<double> sigma) {
  KernelSpec s{f, epsilon, sigma};
  s.validate();
  return s;
}

namespace {

constexpr double kSymbolTol = 1e-13;

struct ConfinedCache {
  std::shared_mutex mu;
  std::map<std::tuple<int, double, double>, double> values;
};

ConfinedCache& confined_cache() {
  static ConfinedCache c;
  return c;
}

template <class F>
double cached(int which, double k, double eps, F&& compute) {
  auto& c = confined_cache();
  const auto key = std::make_tuple(which, k, eps);
  {
    std::shared_lock lock(c.mu);
    auto it = c.values.find(key);
    if (it != c.values.end()) return it->second;
  }
  const double v = compute();
  std::unique_lock lock(c.mu);
  c.values.emplace(key, v);
  return v;
}

}  // namespace

void clear_confined_cache() {
  auto& c = confined_cache();
  std::unique_lock lock(c.mu);
  c.values.clear();
}

double confined_w1(double kabs, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("confined_w1: eps must be positive");
  kabs = std::abs(kabs);
  if (kabs == 0.0) return 1.0;
  return cached(1, kabs, eps, [&] {
    const double b = 0.5 * eps * eps * kabs * kabs;
    if (b <= 1.0) {
      auto f = [b](double s) { return std::exp(-b * s * s) / (1.0 + s * s); };
      return 2.0 / kPi * adaptive_gk15(f, 0.0, kInf, kSymbolTol);
    }
    // s = t / sqrt(b) keeps the Gaussian at unit width.
    auto f = [b](double t) { return std::exp(-t * t) / (b + t * t); };
    return 2.0 / kPi * std::sqrt(b) * adaptive_gk15(f, 0.0, kInf, kSymbolTol);
  });
}

double confined_w2(double k, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("confined_w2: eps must be positive");
  k = std::abs(k);
  if (k == 0.0) return 1.0;
  return cached(2, k, eps, [&] {
    const double a = 0.5 * eps * eps * k * k;
    if (a <= 1.0) {
      auto f = [a](double s) { return std::exp(-a * s) / ((1.0 + s) * (1.0 + s)); };
      return adaptive_gk15(f, 0.0, kInf, kSymbolTol);
    }
    auto f = [a](double t) { return std::exp(-t) / ((a + t) * (a + t)); };
    return a * adaptive_gk15(f, 0.0, kInf, kSymbolTol);
  });
}

double confined_w3(double k, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("confined_w3: eps must be positive");
  if (k == 0.0) return 0.0;
  const double ka = std::abs(k);
  const double v = cached(3, ka, eps, [&] {
    const double a = 0.5 * eps * eps * ka * ka;
    if (a <= 1.0) {
      auto f = [a](double s) { return std::exp(-a * s) / (1.0 + s); };
      return 0.5 * ka * adaptive_gk15(f, 0.0, kInf, kSymbolTol);
    }
    auto f = [a](double t) { return std::exp(-t) / (a + t); };
    return 0.5 * ka * adaptive_gk15(f, 0.0, kInf, kSymbolTol);
  });
  return k < 0 ? -v : v;
}

double symbol(const KernelSpec& spec, double kabs) {
  kabs = std::abs(kabs);
  if (kabs == 0.0) throw SingularSymbol(std::string("symbol of ") + to_string(spec.family) + " is singular at k = 0");
  switch (spec.family) {
    case KernelFamily::Coulomb3D:
    case KernelFamily::LaplaceGreen3D:
    case KernelFamily::LaplaceGreen2D:
    case KernelFamily::LaplaceGreen1D: return 1.0 / (kabs * kabs);
    case KernelFamily::Coulomb2D: return 1.0 / kabs;
    case KernelFamily::Confined2D: return confined_w1(kabs, spec.epsilon.value()) / kabs;
    case KernelFamily::Confined1D: return confined_w3(kabs, spec.epsilon.value()) / kabs;
  }
  return 0.0;
}

cplx poisson2d_W(const std::array<double, 2>& k, cplx rho_hat_0, const std::array<cplx, 2>& grad_rho_hat_0,
                 cplx rho_hat_k, double sigma) {
  const double kk = std::hypot(k[0], k[1]);
  if (kk == 0.0) return cplx(0.0, 0.0);
  const cplx lin = rho_hat_0 + k[0] * grad_rho_hat_0[0] + k[1] * grad_rho_hat_0[1];
  return (rho_hat_k - lin * std::exp(-0.5 * kk * kk * sigma * sigma)) / kk;
}

cplx poisson1d_W(double k, const Moments1D& m, cplx rho_hat_k, double sigma) {
  if (k == 0.0) return cplx(-0.5 * m.m2 + 0.5 * sigma * sigma * m.m0, 0.0);
  const cplx lin = cplx(m.m0, -k * m.m1);
  return (rho_hat_k - lin * std::exp(-0.5 * k * k * sigma * sigma)) / (k * k);
}

double partition_pd(double kabs, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("partition: delta must be positive");
  return std::exp(-kabs * kabs / (delta * delta));
}

double regular_part_wd(double kabs, double delta, int d) {
  if (!(delta > 0.0)) throw std::invalid_argument("partition: delta must be positive");
  kabs = std::abs(kabs);
  if (kabs == 0.0) return d == 3 ? 1.0 / (delta * delta) : 0.0;
  const double one_minus_p = -std::expm1(-kabs * kabs / (delta * delta));
  return one_minus_p / std::pow(kabs, d - 1);
}

}  // namespace nlse
