#include "nlse/potential.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "nlse/specfun.hpp"

namespace nlse {

const char* to_string(PotentialMethod m) {
  switch (m) {
    case PotentialMethod::NufftFull: return "nufft";
    case PotentialMethod::NufftSplit: return "nufft-split";
    case PotentialMethod::Fft: return "fft";
    case PotentialMethod::Dst: return "dst";
    case PotentialMethod::FdmRadial: return "fdm";
  }
  return "?";
}

PotentialMethod parse_potential_method(const std::string& s) {
  if (s == "nufft" || s == "nufft-full") return PotentialMethod::NufftFull;
  if (s == "nufft-split" || s == "split") return PotentialMethod::NufftSplit;
  if (s == "fft") return PotentialMethod::Fft;
  if (s == "dst") return PotentialMethod::Dst;
  if (s == "fdm") return PotentialMethod::FdmRadial;
  throw std::invalid_argument("unknown method '" + s + "'");
}

PotentialMethod default_method(KernelFamily f) {
  return (f == KernelFamily::Coulomb3D || f == KernelFamily::LaplaceGreen3D) ? PotentialMethod::NufftSplit
                                                                              : PotentialMethod::NufftFull;
}

// ---------------------------------------------------------------------------
// Closed-form pieces of the regularized Laplace solvers.

double poisson2d_u11(double r, double sigma) {
  const double s2 = 2.0 * sigma * sigma;
  const double z = r * r / s2;
  if (z < 1e-8) return (kEulerGamma - std::log(s2) - z + z * z / 4.0) / (4.0 * kPi);
  return -(exp_e1(z) + 2.0 * std::log(r)) / (4.0 * kPi);
}

std::array<double, 2> poisson2d_u12(const std::array<double, 2>& x, double sigma) {
  const double r2 = x[0] * x[0] + x[1] * x[1];
  const double z = r2 / (2.0 * sigma * sigma);
  if (r2 == 0.0) return {0.0, 0.0};
  // (1 - e^{-z}) / r^2 without cancellation for small r.
  const double f = -std::expm1(-z) / r2;
  return {-x[0] * f / (2.0 * kPi), -x[1] * f / (2.0 * kPi)};
}

double poisson1d_u11(double x, double sigma) {
  return -sigma / std::sqrt(2.0 * kPi) * std::exp(-x * x / (2.0 * sigma * sigma)) -
         0.5 * x * std::erf(x / (std::sqrt(2.0) * sigma));
}

double poisson1d_u12(double x, double sigma) { return -0.5 * std::erf(x / (std::sqrt(2.0) * sigma)); }

// ---------------------------------------------------------------------------
// Geometry estimates.

void estimate_geometry(const RealField& rho, SolverOptions& opts) {
  const UniformGrid& g = rho.grid;
  double mx = 0.0;
  for (double v : rho.values) mx = std::max(mx, std::abs(v));
  if (!opts.support) {
    std::array<double, 3> c{0, 0, 0};
    if (mx > 0.0) {
      const double thr = 1e-16 * mx;
      const int n0 = g.n[0], n1 = g.dim > 1 ? g.n[1] : 1, n2 = g.dim > 2 ? g.n[2] : 1;
      std::size_t idx = 0;
      for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n1; ++j)
          for (int k = 0; k < n2; ++k, ++idx)
            if (std::abs(rho.values[idx]) > thr) {
              c[0] = std::max(c[0], std::abs(g.x(0, i)) + g.h[0]);
              if (g.dim > 1) c[1] = std::max(c[1], std::abs(g.x(1, j)) + g.h[1]);
              if (g.dim > 2) c[2] = std::max(c[2], std::abs(g.x(2, k)) + g.h[2]);
            }
    }
    for (int a = 0; a < g.dim; ++a) c[a] = std::min(std::max(c[a], 2.0 * g.h[a]), g.L[a]);
    opts.support = c;
  }
  if (!opts.bandwidth) {
    std::array<double, 3> P{0, 0, 0};
    for (int a = 0; a < g.dim; ++a) P[a] = g.bandwidth(a);
    if (mx > 0.0) {
      CVec c = fft_forward(g, rho.values);
      double cm = 0.0;
      for (auto v : c) cm = std::max(cm, std::abs(v));
      const double thr = 1e-14 * cm;
      std::array<double, 3> K{0, 0, 0};
      const int n0 = g.n[0], n1 = g.dim > 1 ? g.n[1] : 1, n2 = g.dim > 2 ? g.n[2] : 1;
      std::size_t idx = 0;
      for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n1; ++j)
          for (int k = 0; k < n2; ++k, ++idx)
            if (std::abs(c[idx]) > thr) {
              K[0] = std::max(K[0], std::abs(g.k(0, i)));
              if (g.dim > 1) K[1] = std::max(K[1], std::abs(g.k(1, j)));
              if (g.dim > 2) K[2] = std::max(K[2], std::abs(g.k(2, k)));
            }
      for (int a = 0; a < g.dim; ++a) {
        const double dk = kPi / g.L[a];
        P[a] = std::min(P[a], 1.15 * K[a] + 2.0 * dk);
      }
    }
    opts.bandwidth = P;
  }
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kSplitRadius = 6.07;   // p(6.07 delta) = e^{-36.8} < 1e-16
constexpr double kKernelReach = 11.8;   // erfc(delta r / 2) < 1e-16 for r > 11.8 / delta
constexpr double kGaussReach = 8.6;     // e^{-r^2/(2 sigma^2)} < 1e-16 for r > 8.6 sigma
constexpr double kSigmaTimesP = 8.8;    // e^{-(sigma P)^2/2} < 2e-17

// Reused NUFFT plans keyed by grid, node parameters and tolerance.
struct PlanCache {
  std::mutex mu;
  std::map<std::string, std::shared_ptr<const NufftPlan>> plans;
};

PlanCache& plan_cache() {
  static PlanCache c;
  return c;
}

std::shared_ptr<const NufftPlan> get_plan(const UniformGrid& g, const FrequencyNodeSet& nodes, double tol,
                                          const std::string& node_key) {
  std::ostringstream key;
  key.precision(17);
  key << g.describe() << '|' << node_key << '|' << tol;
  auto& c = plan_cache();
  {
    std::lock_guard lock(c.mu);
    auto it = c.plans.find(key.str());
    if (it != c.plans.end()) return it->second;
  }
  auto plan = std::make_shared<const NufftPlan>(g, nodes, tol);
  std::lock_guard lock(c.mu);
  if (c.plans.size() >= 8) c.plans.clear();
  c.plans.emplace(key.str(), plan);
  return plan;
}

std::string node_key(const char* tag, double P, const std::array<double, 3>& axes, const ShellCounts& sc) {
  std::ostringstream os;
  os.precision(17);
  os << tag << ' ' << P << ' ' << axes[0] << ' ' << axes[1] << ' ' << axes[2] << ' ' << sc.n_radial_panels << ' '
     << sc.q_per_panel << ' ' << sc.n_theta << ' ' << sc.n_phi;
  return os.str();
}

FrequencyNodeSet build_half_nodes(int dim, double P, const std::array<double, 3>& axes, const ShellCounts& sc) {
  if (dim == 3) return build_spherical_nodes(P, sc.n_radial_panels, sc.q_per_panel, sc.n_theta, sc.n_phi, axes, true);
  return build_polar_nodes(P, sc.n_radial_panels, sc.q_per_panel, sc.n_phi, {axes[0], axes[1]}, true);
}

std::size_t node_count(int dim, const ShellCounts& sc) {
  std::size_t m = static_cast<std::size_t>(sc.n_radial_panels) * sc.q_per_panel * (sc.n_phi / 2);
  if (dim == 3) m *= sc.n_theta;
  return m;
}

// Zero-padded periodic convolution of a grid field with a radial-in-k symbol.
// Grid index j sits at padded index (j - n/2) mod np, so the origin maps to 0.
struct PaddedConvolution {
  int dim = 1;
  std::array<int, 3> n{1, 1, 1}, np{1, 1, 1};
  RVec sym;  // on the r2c half grid, normalization folded in

  std::size_t padded_size() const { return static_cast<std::size_t>(np[0]) * np[1] * np[2]; }
  // r2c halves the last used axis.
  std::array<int, 3> half_extent() const {
    std::array<int, 3> he = np;
    he[dim - 1] = np[dim - 1] / 2 + 1;
    return he;
  }
  std::size_t half_size() const {
    const auto he = half_extent();
    return static_cast<std::size_t>(he[0]) * he[1] * he[2];
  }

  // f(|k|, k) evaluated on the half grid; k_a = 2 pi m / (np_a h_a).
  template <class F>
  void build(const UniformGrid& g, const std::array<int, 3>& padded, F&& f) {
    dim = g.dim;
    for (int a = 0; a < 3; ++a) {
      n[a] = a < g.dim ? g.n[a] : 1;
      np[a] = a < g.dim ? padded[a] : 1;
    }
    sym.assign(half_size(), 0.0);
    const double norm = 1.0 / static_cast<double>(padded_size());
    std::array<double, 3> dk{0, 0, 0};
    for (int a = 0; a < g.dim; ++a) dk[a] = 2.0 * kPi / (np[a] * g.h[a]);
    const auto he = half_extent();
    auto kof = [&](int a, int i) {
      if (a >= dim) return 0.0;
      if (a == dim - 1) return dk[a] * i;
      return dk[a] * (i <= np[a] / 2 ? i : i - np[a]);
    };
    std::size_t idx = 0;
    for (int i = 0; i < he[0]; ++i)
      for (int j = 0; j < he[1]; ++j)
        for (int l = 0; l < he[2]; ++l, ++idx) {
          const std::array<double, 3> kk{kof(0, i), kof(1, j), kof(2, l)};
          sym[idx] = norm * f(std::sqrt(kk[0] * kk[0] + kk[1] * kk[1] + kk[2] * kk[2]), kk);
        }
  }

  // Symbol = transform of a tabulated kernel K(z_m), m in (-n, n) per axis, given on the doubled
  // grid with z = 0 at index n. K is symmetrized so the symbol is real.
  void build_from_kernel(const UniformGrid& g, const RVec& K) {
    dim = g.dim;
    for (int a = 0; a < 3; ++a) {
      n[a] = a < g.dim ? g.n[a] : 1;
      np[a] = a < g.dim ? 2 * g.n[a] : 1;
    }
    RVec buf(padded_size(), 0.0);
    auto wrap = [&](int a, int i) { return ((i - n[a]) % np[a] + np[a]) % np[a]; };
    auto flip = [&](int a, int i) { return a < dim ? (2 * n[a] - i) % np[a] : 0; };
    for (int i = 0; i < np[0]; ++i)
      for (int j = 0; j < np[1]; ++j)
        for (int l = 0; l < np[2]; ++l) {
          const std::size_t src = (static_cast<std::size_t>(i) * np[1] + j) * np[2] + l;
          const std::size_t mir = (static_cast<std::size_t>(flip(0, i)) * np[1] + flip(1, j)) * np[2] + flip(2, l);
          const std::size_t dst = (static_cast<std::size_t>(wrap(0, i)) * np[1] + wrap(1, j)) * np[2] + wrap(2, l);
          buf[dst] = 0.5 * (K[src] + K[mir]);
        }
    CVec spec(half_size());
    fft_r2c(shape(), buf.data(), spec.data());
    const double norm = 1.0 / static_cast<double>(padded_size());
    sym.resize(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) sym[i] = norm * spec[i].real();
  }

  std::vector<int> shape() const { return std::vector<int>(np.begin(), np.begin() + dim); }

  void scatter(const RVec& rho, RVec& buf) const {
    buf.assign(padded_size(), 0.0);
    for (int i = 0; i < n[0]; ++i) {
      const int pi = ((i - n[0] / 2) % np[0] + np[0]) % np[0];
      for (int j = 0; j < n[1]; ++j) {
        const int pj = ((j - n[1] / 2) % np[1] + np[1]) % np[1];
        const std::size_t src = (static_cast<std::size_t>(i) * n[1] + j) * n[2];
        const std::size_t dst = (static_cast<std::size_t>(pi) * np[1] + pj) * np[2];
        for (int l = 0; l < n[2]; ++l) {
          const int pl = ((l - n[2] / 2) % np[2] + np[2]) % np[2];
          buf[dst + pl] = rho[src + l];
        }
      }
    }
  }

  void gather(const RVec& buf, RVec& out, bool accumulate) const {
    for (int i = 0; i < n[0]; ++i) {
      const int pi = ((i - n[0] / 2) % np[0] + np[0]) % np[0];
      for (int j = 0; j < n[1]; ++j) {
        const int pj = ((j - n[1] / 2) % np[1] + np[1]) % np[1];
        const std::size_t dst = (static_cast<std::size_t>(i) * n[1] + j) * n[2];
        const std::size_t src = (static_cast<std::size_t>(pi) * np[1] + pj) * np[2];
        for (int l = 0; l < n[2]; ++l) {
          const int pl = ((l - n[2] / 2) % np[2] + np[2]) % np[2];
          out[dst + l] = (accumulate ? out[dst + l] : 0.0) + buf[src + pl];
        }
      }
    }
  }

  void apply(const RVec& rho, RVec& out, bool accumulate) const {
    RVec buf;
    scatter(rho, buf);
    CVec spec(half_size());
    fft_r2c(shape(), buf.data(), spec.data());
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= sym[i];
    fft_c2r(shape(), spec.data(), buf.data());
    gather(buf, out, accumulate);
  }
};

double max_stretched_reach(const UniformGrid& g, const std::array<double, 3>& c, const std::array<double, 3>& P) {
  double s = 0.0;
  for (int a = 0; a < g.dim; ++a) s += std::pow(P[a] * (g.L[a] + c[a]), 2);
  return std::sqrt(s);
}

double box_reach(const UniformGrid& g, const std::array<double, 3>& c) {
  double s = 0.0;
  for (int a = 0; a < g.dim; ++a) s += std::pow(g.L[a] + c[a], 2);
  return std::sqrt(s);
}

}  // namespace

// ---------------------------------------------------------------------------

struct PotentialSolver::Impl {
  enum class Path { Full, Split, Poisson2D, Poisson1D, Confined1D, Fft, Dst };

  KernelSpec spec;
  UniformGrid g;
  PotentialMethod method;
  SolverOptions opts;
  Path path = Path::Full;
  std::array<double, 3> c{0, 0, 0}, P{0, 0, 0};

  // Nonuniform part (full solve, I2 of the split solve, u2 of the 2D Laplace solve).
  FrequencyNodeSet nodes;
  std::shared_ptr<const NufftPlan> plan;
  std::vector<double> coef;   // w_m S(k_m) / (2 pi)^d
  std::vector<double> gauss;  // e^{-|k_m|^2 sigma^2 / 2}

  // Regular part.
  PaddedConvolution conv;
  double delta = 0.0, sigma = 0.0;

  // 1D padded spectral paths.
  int np = 0;
  double T = 0.0;
  std::vector<double> kq, gq, w2q, w3q;

  // Closed-form fields.
  RVec u11, u12x, u12y;

  // Fft / Dst symbols.
  RVec sym;

  // Tabulated kernel (opts.tabulate).
  bool tabulated = false;
  PaddedConvolution tab;

  void build();
  void build_full(std::function<double(double)> S);
  void build_split();
  void build_poisson2d();
  void build_poisson1d();
  void build_confined1d();
  void build_fft();
  void build_dst();
  void build_tabulated();

  RVec apply(const RVec& rho) const;
};

void PotentialSolver::Impl::build_tabulated() {
  UniformGrid g2 = g;
  for (int a = 0; a < g.dim; ++a) {
    g2.L[a] = 2.0 * g.L[a];
    g2.n[a] = 2 * g.n[a];
  }
  SolverOptions o2 = opts;
  o2.tabulate = false;
  o2.counts.reset();
  o2.delta.reset();
  o2.bandwidth = P;
  // A point source: the support only has to cover one cell.
  o2.support = std::array<double, 3>{g.h[0], g.h[1], g.h[2]};
  PotentialSolver s2(spec, g2, method, o2);
  RVec src(g2.size(), 0.0);
  std::size_t center = 0;
  for (int a = 0; a < g.dim; ++a) center = center * g2.n[a] + g.n[a];
  src[center] = 1.0;
  tab.build_from_kernel(g, s2.apply(src));
  // The direct-path data is no longer needed.
  plan.reset();
  nodes = FrequencyNodeSet{};
  coef.clear();
  gauss.clear();
  conv = PaddedConvolution{};
  u11.clear();
  u12x.clear();
  u12y.clear();
  kq.clear();
  gq.clear();
  w2q.clear();
  w3q.clear();
  tabulated = true;
}

void PotentialSolver::Impl::build() {
  spec.validate();
  if (spec.dim() != g.dim) throw std::invalid_argument("potential solver: kernel and grid dimensions differ");
  if (!(opts.tol >= 1e-15 && opts.tol <= 1e-2)) throw std::invalid_argument("potential solver: tol out of range");
  c = opts.support.value_or(std::array<double, 3>{g.L[0], g.L[1], g.L[2]});
  if (opts.bandwidth) {
    P = *opts.bandwidth;
  } else {
    for (int a = 0; a < g.dim; ++a) P[a] = g.bandwidth(a);
  }
  for (int a = g.dim; a < 3; ++a) c[a] = P[a] = 0.0;

  const auto f = spec.family;
  switch (method) {
    case PotentialMethod::Fft: path = Path::Fft; return build_fft();
    case PotentialMethod::Dst: path = Path::Dst; return build_dst();
    case PotentialMethod::FdmRadial:
      throw std::invalid_argument("fdm works on radial profiles; use solve_fdm_radial");
    case PotentialMethod::NufftFull:
    case PotentialMethod::NufftSplit: break;
  }
  if (f == KernelFamily::LaplaceGreen2D) {
    path = Path::Poisson2D;
    return build_poisson2d();
  }
  if (f == KernelFamily::LaplaceGreen1D) {
    path = Path::Poisson1D;
    return build_poisson1d();
  }
  if (f == KernelFamily::Confined1D) {
    path = Path::Confined1D;
    return build_confined1d();
  }
  if (f == KernelFamily::Confined2D) {
    if (method == PotentialMethod::NufftSplit) throw std::invalid_argument("split solver supports Coulomb kernels only");
    path = Path::Full;
    const double eps = spec.epsilon.value();
    return build_full([eps](double k) { return confined_w1(k, eps); });
  }
  // Coulomb3D / LaplaceGreen3D / Coulomb2D: the 1/|k|^{d-1} factor is absorbed by the shell measure.
  if (method == PotentialMethod::NufftSplit) {
    path = Path::Split;
    return build_split();
  }
  path = Path::Full;
  build_full([](double) { return 1.0; });
}

void PotentialSolver::Impl::build_full(std::function<double(double)> S) {
  const double P0 = P[0];
  std::array<double, 3> axes{1.0, 1.0, 1.0};
  for (int a = 0; a < g.dim; ++a) axes[a] = P[a] / P0;
  const ShellCounts sc = opts.counts.value_or(shell_counts_for_phase(g.dim, max_stretched_reach(g, c, P)));
  nodes = build_half_nodes(g.dim, P0, axes, sc);
  plan = get_plan(g, nodes, opts.tol, node_key("full", P0, axes, sc));
  const double norm = 1.0 / std::pow(2.0 * kPi, g.dim);
  coef.resize(nodes.size());
  for (std::size_t m = 0; m < nodes.size(); ++m) coef[m] = nodes.w[m] * S(nodes.kabs[m]) * norm;
}

void PotentialSolver::Impl::build_split() {
  const int d = g.dim;
  const SpreadParams sp = spread_params_for_tol(opts.tol);
  const double R = box_reach(g, c);
  auto padded_for = [&](double dl) {
    std::array<int, 3> np3{1, 1, 1};
    for (int a = 0; a < d; ++a) {
      const int need = static_cast<int>(std::ceil((g.L[a] + c[a] + kKernelReach / dl) / g.h[a]));
      np3[a] = fft_good_even_size(std::max(g.n[a], need));
    }
    return np3;
  };
  auto cost = [&](double dl) {
    const auto np3 = padded_for(dl);
    double ntot = 1.0;
    for (int a = 0; a < d; ++a) ntot *= np3[a];
    const double c1 = 5.0 * ntot * std::log2(ntot);
    const ShellCounts sc = shell_counts_for_phase(d, kSplitRadius * dl * R);
    const double M = static_cast<double>(node_count(d, sc));
    double c2 = 2.0 * M * std::pow(sp.width, d) * 8.0;
    double gtot = static_cast<double>(g.size()), blk = 0.0;
    for (int a = 0; a < d; ++a) blk += 2.0 * kSplitRadius * dl * 2.0 * g.L[a] / kPi + sp.width;
    c2 += 2.0 * 8.0 * gtot * blk;
    return c1 + c2;
  };
  if (opts.delta) {
    delta = *opts.delta;
  } else {
    double best = 0.0, bc = 0.0;
    for (double dl = 0.3; dl <= 1.5 + 1e-12; dl += 0.05) {
      const double cc = cost(dl);
      if (best == 0.0 || cc < bc) {
        best = dl;
        bc = cc;
      }
    }
    delta = best;
  }
  if (!(delta > 0.0)) throw std::invalid_argument("split solver: delta must be positive");

  // I1: regular modes inside the cube |k_a| <= P_a with symbol w_d.
  const auto np3 = padded_for(delta);
  const auto Pc = P;
  const double dl = delta;
  conv.build(g, np3, [&](double kk, const std::array<double, 3>& k) {
    for (int a = 0; a < d; ++a)
      if (std::abs(k[a]) > Pc[a] * (1.0 + 1e-12)) return 0.0;
    return regular_part_wd(kk, dl, d);
  });

  // I2: small ball of radius 6.07 delta with symbol p.
  const double P2 = kSplitRadius * delta;
  const std::array<double, 3> axes{1.0, 1.0, 1.0};
  const ShellCounts sc = shell_counts_for_phase(d, P2 * R);
  nodes = build_half_nodes(d, P2, axes, sc);
  plan = get_plan(g, nodes, opts.tol, node_key("split", P2, axes, sc));
  const double norm = 1.0 / std::pow(2.0 * kPi, d);
  coef.resize(nodes.size());
  for (std::size_t m = 0; m < nodes.size(); ++m) coef[m] = nodes.w[m] * partition_pd(nodes.kabs[m], delta) * norm;
}

void PotentialSolver::Impl::build_poisson2d() {
  const double Pmin = std::min(P[0], P[1]);
  sigma = opts.sigma.value_or(kSigmaTimesP / Pmin);
  if (!(sigma > 0.0)) throw std::invalid_argument("2D Laplace solver: sigma must be positive");
  std::array<double, 3> ce = c;
  for (int a = 0; a < 2; ++a) ce[a] = std::max(c[a], kGaussReach * sigma);
  const double P0 = P[0];
  const std::array<double, 3> axes{1.0, P[1] / P0, 1.0};
  const ShellCounts sc = opts.counts.value_or(shell_counts_for_phase(2, max_stretched_reach(g, ce, P)));
  nodes = build_half_nodes(2, P0, axes, sc);
  plan = get_plan(g, nodes, opts.tol, node_key("poisson2d", P0, axes, sc));
  coef.resize(nodes.size());
  gauss.resize(nodes.size());
  for (std::size_t m = 0; m < nodes.size(); ++m) {
    coef[m] = nodes.w[m] / (4.0 * kPi * kPi);
    gauss[m] = std::exp(-0.5 * nodes.kabs[m] * nodes.kabs[m] * sigma * sigma);
  }
  const auto U11 = sample<double>(g, FieldKind::Potential, [&](const std::array<double, 3>& x) {
    return poisson2d_u11(std::hypot(x[0], x[1]), sigma);
  });
  const auto U12x = sample<double>(g, FieldKind::Potential, [&](const std::array<double, 3>& x) {
    return poisson2d_u12({x[0], x[1]}, sigma)[0];
  });
  const auto U12y = sample<double>(g, FieldKind::Potential, [&](const std::array<double, 3>& x) {
    return poisson2d_u12({x[0], x[1]}, sigma)[1];
  });
  u11 = U11.values;
  u12x = U12x.values;
  u12y = U12y.values;
}

void PotentialSolver::Impl::build_poisson1d() {
  sigma = opts.sigma.value_or(kSigmaTimesP / P[0]);
  if (!(sigma > 0.0)) throw std::invalid_argument("1D Laplace solver: sigma must be positive");
  // u2 = U * (rho - G1) vanishes outside the support of rho - G1 (zero mass and first moment),
  // so one period of length L + c' suffices.
  const double ce = std::max(c[0], kGaussReach * sigma);
  const int need = static_cast<int>(std::ceil((g.L[0] + ce) / g.h[0])) + 2;
  np = fft_good_even_size(std::max(g.n[0], need));
  T = np * g.h[0];
  kq.resize(np);
  gq.resize(np);
  for (int q = 0; q < np; ++q) {
    const double k = 2.0 * kPi * (q <= np / 2 ? q : q - np) / T;
    kq[q] = std::abs(k) <= P[0] * (1.0 + 1e-12) ? k : std::nan("");
    gq[q] = std::exp(-0.5 * k * k * sigma * sigma);
  }
  u11.resize(g.n[0]);
  u12x.resize(g.n[0]);
  for (int j = 0; j < g.n[0]; ++j) {
    u11[j] = poisson1d_u11(g.x(0, j), sigma);
    u12x[j] = poisson1d_u12(g.x(0, j), sigma);
  }
}

void PotentialSolver::Impl::build_confined1d() {
  const double eps = spec.epsilon.value();
  // The W2, W3 factors behave like k^2 ln|k| and k ln|k| at the origin; the resulting
  // trapezoid error in k decays like (L + c)^2 / T^3.
  const double reach = g.L[0] + c[0];
  const double target = std::max(opts.tol, 1e-13);
  const double Tacc = std::cbrt(0.1 * reach * reach / target);
  T = std::max(4.0 * reach, Tacc);
  np = fft_good_even_size(std::max(g.n[0], static_cast<int>(std::ceil(T / g.h[0]))));
  T = np * g.h[0];
  kq.resize(np);
  w2q.assign(np, 0.0);
  w3q.assign(np, 0.0);
  for (int q = 0; q < np; ++q) {
    const double k = 2.0 * kPi * (q <= np / 2 ? q : q - np) / T;
    kq[q] = k;
    if (std::abs(k) > P[0] * (1.0 + 1e-12)) continue;
    w2q[q] = confined_w2(k, eps);
    w3q[q] = confined_w3(k, eps);
  }
}

void PotentialSolver::Impl::build_fft() {
  const RVec k2 = laplacian_symbol(g);
  sym.resize(k2.size());
  for (std::size_t i = 0; i < k2.size(); ++i) sym[i] = k2[i] == 0.0 ? 0.0 : symbol(spec, std::sqrt(k2[i]));
}

void PotentialSolver::Impl::build_dst() {
  const auto f = spec.family;
  const bool root = f == KernelFamily::Coulomb2D;
  if (!(root || f == KernelFamily::Coulomb3D || f == KernelFamily::LaplaceGreen3D ||
        f == KernelFamily::LaplaceGreen2D || f == KernelFamily::LaplaceGreen1D))
    throw std::invalid_argument(std::string("dst solver does not support kernel ") + to_string(f));
  const RVec lam = dst_eigenvalues(g);
  sym.resize(lam.size());
  for (std::size_t i = 0; i < lam.size(); ++i) sym[i] = 1.0 / (root ? std::sqrt(lam[i]) : lam[i]);
}

RVec PotentialSolver::Impl::apply(const RVec& rho) const {
  if (rho.size() != g.size()) throw std::invalid_argument("potential solver: density size does not match grid");
  RVec u(g.size(), 0.0);
  if (tabulated) {
    tab.apply(rho, u, false);
    return u;
  }
  switch (path) {
    case Path::Fft: {
      CVec ch = fft_forward(g, rho);
      for (std::size_t i = 0; i < ch.size(); ++i) ch[i] *= sym[i];
      CVec back = fft_backward(g, ch);
      for (std::size_t i = 0; i < u.size(); ++i) u[i] = back[i].real();
      return u;
    }
    case Path::Dst: {
      RVec s = dst_forward(g, rho);
      for (std::size_t i = 0; i < s.size(); ++i) s[i] *= sym[i];
      return dst_backward(g, s);
    }
    case Path::Full:
    case Path::Split: {
      if (path == Path::Split) conv.apply(rho, u, false);
      CVec rh = plan->u2n(rho);
      for (std::size_t m = 0; m < rh.size(); ++m) rh[m] *= coef[m];
      const CVec v = plan->n2u(rh);
      for (std::size_t i = 0; i < u.size(); ++i) u[i] += v[i].real();
      return u;
    }
    case Path::Poisson2D: {
      const double cv = g.cell_volume();
      double m0 = 0.0, mx = 0.0, my = 0.0;
      std::size_t idx = 0;
      for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j, ++idx) {
          m0 += rho[idx];
          mx += g.x(0, i) * rho[idx];
          my += g.x(1, j) * rho[idx];
        }
      m0 *= cv;
      mx *= cv;
      my *= cv;
      CVec rh = plan->u2n(rho);
      const cplx gx(0.0, -mx), gy(0.0, -my);
      for (std::size_t m = 0; m < rh.size(); ++m) {
        const double* k = nodes.node(m);
        const cplx lin = m0 + k[0] * gx + k[1] * gy;
        rh[m] = coef[m] * (rh[m] - lin * gauss[m]) / nodes.kabs[m];
      }
      const CVec v = plan->n2u(rh);
      for (std::size_t i = 0; i < u.size(); ++i) u[i] = v[i].real() + m0 * u11[i] - mx * u12x[i] - my * u12y[i];
      return u;
    }
    case Path::Poisson1D: {
      const int n = g.n[0];
      const double h = g.h[0];
      Moments1D mom;
      for (int j = 0; j < n; ++j) {
        const double x = g.x(0, j);
        mom.m0 += rho[j];
        mom.m1 += x * rho[j];
        mom.m2 += x * x * rho[j];
      }
      mom.m0 *= h;
      mom.m1 *= h;
      mom.m2 *= h;
      CVec buf(np, cplx(0, 0));
      for (int j = 0; j < n; ++j) buf[((j - n / 2) % np + np) % np] = rho[j];
      fft_c2c({np}, buf.data(), -1);
      for (int q = 0; q < np; ++q) {
        if (std::isnan(kq[q])) {
          buf[q] = 0.0;
          continue;
        }
        buf[q] = poisson1d_W(kq[q], mom, h * buf[q], sigma);
      }
      fft_c2c({np}, buf.data(), +1);
      for (int j = 0; j < n; ++j)
        u[j] = buf[((j - n / 2) % np + np) % np].real() / T + mom.m0 * u11[j] - mom.m1 * u12x[j];
      return u;
    }
    case Path::Confined1D: {
      const int n = g.n[0];
      const double h = g.h[0];
      CVec a(np, cplx(0, 0)), b(np, cplx(0, 0));
      for (int j = 0; j < n; ++j) {
        const int p = ((j - n / 2) % np + np) % np;
        a[p] = rho[j];
        b[p] = g.x(0, j) * rho[j];
      }
      fft_c2c({np}, a.data(), -1);
      fft_c2c({np}, b.data(), -1);
      // a <- W2 rho_hat + i W3 (x rho)^ ; b <- W3 rho_hat
      for (int q = 0; q < np; ++q) {
        const cplx rh = h * a[q], xrh = h * b[q];
        a[q] = w2q[q] * rh + cplx(0.0, w3q[q]) * xrh;
        b[q] = w3q[q] * rh;
      }
      fft_c2c({np}, a.data(), +1);
      fft_c2c({np}, b.data(), +1);
      for (int j = 0; j < n; ++j) {
        const int p = ((j - n / 2) % np + np) % np;
        const double x = g.x(0, j);
        u[j] = (a[p] - cplx(0.0, x) * b[p]).real() / T;
      }
      return u;
    }
  }
  return u;
}

PotentialSolver::PotentialSolver(const KernelSpec& spec, const UniformGrid& g, PotentialMethod method,
                                 const SolverOptions& opts)
    : impl_(std::make_unique<Impl>()) {
  impl_->spec = spec;
  impl_->g = g;
  impl_->method = method;
  impl_->opts = opts;
  if (opts.tabulate && (method == PotentialMethod::Fft || method == PotentialMethod::Dst)) impl_->opts.tabulate = false;
  impl_->build();
  if (impl_->opts.tabulate) impl_->build_tabulated();
}

PotentialSolver::~PotentialSolver() = default;
PotentialSolver::PotentialSolver(PotentialSolver&&) noexcept = default;
PotentialSolver& PotentialSolver::operator=(PotentialSolver&&) noexcept = default;

RVec PotentialSolver::apply(const RVec& rho) const { return impl_->apply(rho); }

RealField PotentialSolver::apply(const RealField& rho) const {
  if (rho.grid != impl_->g) throw std::invalid_argument("potential solver: density lives on a different grid");
  return RealField(impl_->g, FieldKind::Potential, impl_->apply(rho.values));
}

const KernelSpec& PotentialSolver::kernel() const { return impl_->spec; }
const UniformGrid& PotentialSolver::grid() const { return impl_->g; }
PotentialMethod PotentialSolver::method() const { return impl_->method; }

std::string PotentialSolver::describe() const {
  const Impl& s = *impl_;
  std::ostringstream os;
  os << to_string(s.spec.family) << ' ' << to_string(s.method) << ' ' << s.g.describe();
  if (s.tabulated) {
    os << " tabulated pad=";
    for (int a = 0; a < s.g.dim; ++a) os << (a ? "x" : "") << s.tab.np[a];
    return os.str();
  }
  if (s.plan) os << " nodes=" << s.nodes.size() << " P=" << s.nodes.P << (s.plan->pruned() ? " pruned" : "");
  if (s.path == Impl::Path::Split) {
    os << " delta=" << s.delta << " pad=";
    for (int a = 0; a < s.g.dim; ++a) os << (a ? "x" : "") << s.conv.np[a];
  }
  if (s.sigma > 0.0) os << " sigma=" << s.sigma;
  if (s.np > 0) os << " period=" << s.T << " np=" << s.np;
  return os.str();
}

// ---------------------------------------------------------------------------

RealField solve_coulomb_nufft(const KernelSpec& spec, const RealField& rho, PotentialMethod method,
                              SolverOptions opts) {
  const auto f = spec.family;
  if (!(f == KernelFamily::Coulomb3D || f == KernelFamily::Coulomb2D || f == KernelFamily::LaplaceGreen3D))
    throw std::invalid_argument(std::string("solve_coulomb_nufft: unsupported kernel ") + to_string(f));
  if (method != PotentialMethod::NufftFull && method != PotentialMethod::NufftSplit)
    throw std::invalid_argument("solve_coulomb_nufft: method must be nufft or nufft-split");
  estimate_geometry(rho, opts);
  return PotentialSolver(spec, rho.grid, method, opts).apply(rho);
}

RealField solve_poisson2d(const RealField& rho, SolverOptions opts) {
  estimate_geometry(rho, opts);
  return PotentialSolver(make_kernel(KernelFamily::LaplaceGreen2D), rho.grid, PotentialMethod::NufftFull, opts)
      .apply(rho);
}

RealField solve_poisson1d(const RealField& rho, SolverOptions opts) {
  estimate_geometry(rho, opts);
  return PotentialSolver(make_kernel(KernelFamily::LaplaceGreen1D), rho.grid, PotentialMethod::NufftFull, opts)
      .apply(rho);
}

RealField solve_confined(const KernelSpec& spec, const RealField& rho, SolverOptions opts) {
  if (!is_confined(spec.family)) throw std::invalid_argument("solve_confined: kernel is not confined");
  estimate_geometry(rho, opts);
  return PotentialSolver(spec, rho.grid, PotentialMethod::NufftFull, opts).apply(rho);
}

RealField solve_fft(const KernelSpec& spec, const RealField& rho) {
  return PotentialSolver(spec, rho.grid, PotentialMethod::Fft).apply(rho);
}

RealField solve_dst(const KernelSpec& spec, const RealField& rho) {
  return PotentialSolver(spec, rho.grid, PotentialMethod::Dst).apply(rho);
}

RealField solve_potential(const KernelSpec& spec, const RealField& rho, PotentialMethod method, SolverOptions opts) {
  if (method == PotentialMethod::Fft) return solve_fft(spec, rho);
  if (method == PotentialMethod::Dst) return solve_dst(spec, rho);
  if (method == PotentialMethod::FdmRadial)
    throw std::invalid_argument("fdm works on radial profiles; use solve_fdm_radial");
  estimate_geometry(rho, opts);
  return PotentialSolver(spec, rho.grid, method, opts).apply(rho);
}

// ---------------------------------------------------------------------------

RadialProfile solve_fdm_radial(const std::function<double(double)>& rho, double L, double h, int d) {
  if (d != 2 && d != 3) throw std::invalid_argument("fdm: dimension must be 2 or 3");
  if (!(L > 0.0 && h > 0.0)) throw std::invalid_argument("fdm: L and h must be positive");
  const int n = static_cast<int>(std::lround(L / h));
  if (n < 2 || std::abs(n * h - L) > 1e-9 * L) throw std::invalid_argument("fdm: L must be a multiple of h");
  if (d == 2 && L <= 1.0) throw std::invalid_argument("fdm: the 2D far-field condition needs L > 1");
  const double alpha = d == 3 ? -1.0 / L : 1.0 / (L * std::log(L));
  // Tridiagonal system a_i u_{i-1} + b_i u_i + c_i u_{i+1} = f_i, i = 0..n.
  std::vector<double> a(n + 1, 0.0), b(n + 1, 0.0), cc(n + 1, 0.0), f(n + 1, 0.0), r(n + 1);
  const double ih2 = 1.0 / (h * h);
  for (int i = 0; i <= n; ++i) {
    r[i] = i * h;
    f[i] = rho(r[i]);
  }
  // Origin: Laplacian -> d u''(0) by symmetry.
  b[0] = 2.0 * d * ih2;
  cc[0] = -2.0 * d * ih2;
  for (int i = 1; i <= n; ++i) {
    const double rm = std::pow((i - 0.5) / i, d - 1), rp = std::pow((i + 0.5) / i, d - 1);
    a[i] = -rm * ih2;
    b[i] = (rm + rp) * ih2;
    cc[i] = -rp * ih2;
  }
  // Ghost node u_{n+1} = u_{n-1} + 2 h alpha u_n.
  a[n] += cc[n];
  b[n] += cc[n] * 2.0 * h * alpha;
  cc[n] = 0.0;
  // Thomas algorithm.
  for (int i = 1; i <= n; ++i) {
    const double m = a[i] / b[i - 1];
    b[i] -= m * cc[i - 1];
    f[i] -= m * f[i - 1];
  }
  RadialProfile out;
  out.r = r;
  out.u.assign(n + 1, 0.0);
  out.u[n] = f[n] / b[n];
  for (int i = n - 1; i >= 0; --i) out.u[i] = (f[i] - cc[i] * out.u[i + 1]) / b[i];
  return out;
}

}  // namespace nlse
