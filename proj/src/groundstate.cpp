#include "nlse/groundstate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace nlse {

namespace {

// r2c/c2r transforms of real grid fields with |k|^2 on the half grid.
struct RealSpectral {
  std::vector<int> shape;
  std::size_t n = 0;
  RVec k2;

  explicit RealSpectral(const UniformGrid& g) {
    shape = g.shape();
    n = g.size();
    std::array<int, 3> he{1, 1, 1};
    for (int a = 0; a < g.dim; ++a) he[a] = g.n[a];
    he[g.dim - 1] = g.n[g.dim - 1] / 2 + 1;
    k2.resize(static_cast<std::size_t>(he[0]) * he[1] * he[2]);
    std::size_t idx = 0;
    for (int i = 0; i < he[0]; ++i)
      for (int j = 0; j < he[1]; ++j)
        for (int l = 0; l < he[2]; ++l, ++idx) {
          const int pos[3] = {i, j, l};
          double s = 0.0;
          for (int a = 0; a < g.dim; ++a) {
            const double k = g.k(a, pos[a]);
            s += k * k;
          }
          k2[idx] = s;
        }
  }
  std::size_t half_size() const { return k2.size(); }
};

double max_abs_diff(const RVec& a, const RVec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double l2_norm(const UniformGrid& g, const RVec& f) {
  double s = 0.0;
  for (double v : f) s += v * v;
  return std::sqrt(s * g.cell_volume());
}

std::optional<VirialCheck> virial_for(const GfdnConfig& cfg) {
  if (!cfg.V.harmonic()) return std::nullopt;
  switch (cfg.kernel.family) {
    case KernelFamily::Coulomb3D:
    case KernelFamily::LaplaceGreen3D:
    case KernelFamily::Coulomb2D:
    case KernelFamily::LaplaceGreen2D: return VirialCheck{cfg.kernel.family, true};
    default: return std::nullopt;
  }
}

UniformGrid coarsen(const UniformGrid& g, int level) {
  std::vector<double> L(g.dim);
  std::vector<int> n(g.dim);
  for (int a = 0; a < g.dim; ++a) {
    L[a] = g.L[a];
    const int f = 1 << level;
    if (g.n[a] % (2 * f) != 0)
      throw std::invalid_argument("coarse_levels too large: grid size not divisible by 2^(levels+1)");
    n[a] = g.n[a] / f;
  }
  return make_grid(g.dim, L, n);
}

}  // namespace

void GfdnConfig::validate() const {
  kernel.validate();
  if (kernel.dim() != grid.dim) throw std::invalid_argument("ground state: kernel and grid dimensions differ");
  if (!(tau > 0.0)) throw std::invalid_argument("ground state: tau must be positive");
  if (!(eps0 > 0.0)) throw std::invalid_argument("ground state: eps0 must be positive");
  if (!(inner_tol > 0.0)) throw std::invalid_argument("ground state: inner_tol must be positive");
  if (max_steps < 1 || inner_max < 1) throw std::invalid_argument("ground state: iteration limits must be positive");
  if (coarse_levels < 0) throw std::invalid_argument("ground state: coarse_levels must be >= 0");
  if (initial && initial->size() != grid.size()) throw std::invalid_argument("ground state: initial state size mismatch");
}

RVec default_initial_state(const UniformGrid& g) {
  auto f = sample<double>(g, FieldKind::Wavefunction, [&](const std::array<double, 3>& x) {
    double r2 = 0.0;
    for (int a = 0; a < g.dim; ++a) r2 += x[a] * x[a];
    return std::exp(-0.5 * r2);
  });
  const double nrm = l2_norm(g, f.values);
  for (double& v : f.values) v /= nrm;
  return f.values;
}

namespace {

double dot(const RVec& a, const RVec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Conjugate gradients on (1/tau - Delta/2 + b) phi = phi_n / tau, preconditioned by
// (1/tau + c - Delta/2) with c = min b. M p is carried by recursion, so each
// iteration costs one FFT pair like the fixed-point sweep.
InnerSolveResult pcg_inner(const RealSpectral& sp, const RVec& phi_n, const RVec& b, double tau, double c, double tol,
                           int max_iter, const RVec* guess) {
  const std::size_t n = phi_n.size();
  const double N = static_cast<double>(sp.n);
  RVec inv(sp.half_size()), lap(sp.half_size());
  for (std::size_t i = 0; i < inv.size(); ++i) {
    inv[i] = 1.0 / ((1.0 / tau + c + 0.5 * sp.k2[i]) * N);
    lap[i] = 0.5 * sp.k2[i] / N;
  }
  CVec spec(sp.half_size());
  auto apply_symbol = [&](const RVec& in, const RVec& sym, RVec& out) {
    fft_r2c(sp.shape, in.data(), spec.data());
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= sym[i];
    fft_c2r(sp.shape, spec.data(), out.data());
  };

  InnerSolveResult r;
  r.phi = guess ? *guess : phi_n;
  RVec res(n), z(n), p(n), Mp(n), Ap(n);
  apply_symbol(r.phi, lap, Ap);
  for (std::size_t i = 0; i < n; ++i) res[i] = phi_n[i] / tau - (1.0 / tau + b[i]) * r.phi[i] - Ap[i];
  apply_symbol(res, inv, z);
  p = z;
  Mp = res;
  double rz = dot(res, z);
  for (int it = 1; it <= max_iter; ++it) {
    for (std::size_t i = 0; i < n; ++i) Ap[i] = Mp[i] + (b[i] - c) * p[i];
    const double pAp = dot(p, Ap);
    r.iterations = it;
    if (!(pAp > 0.0)) {
      r.last_update = 0.0;
      r.converged = rz == 0.0;
      break;
    }
    const double a = rz / pAp;
    double upd = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r.phi[i] += a * p[i];
      res[i] -= a * Ap[i];
      upd = std::max(upd, std::abs(a * p[i]));
    }
    r.last_update = upd;
    if (upd <= tol) {
      r.converged = true;
      break;
    }
    apply_symbol(res, inv, z);
    const double rz_new = dot(res, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = z[i] + beta * p[i];
      Mp[i] = res[i] + beta * Mp[i];
    }
  }
  return r;
}

}  // namespace

InnerSolveResult besp_inner_solve(const UniformGrid& g, const RVec& phi_n, const RVec& b, double tau, double tol,
                                  int max_iter, const RVec* guess) {
  if (phi_n.size() != g.size() || b.size() != g.size()) throw std::invalid_argument("inner solve: size mismatch");
  RealSpectral sp(g);
  const auto [bmin, bmax] = std::minmax_element(b.begin(), b.end());
  const double alpha = 0.5 * (*bmin + *bmax);
  const double c0 = 1.0 / tau + alpha;
  if (!(c0 > 0.0)) throw std::invalid_argument("inner solve: 1/tau + alpha must be positive");
  // Fixed-point contraction bound; large trap energies on big boxes push it toward 1.
  const double q = 0.5 * (*bmax - *bmin) / c0;
  if (q > 0.5 && 1.0 / tau + *bmin > 0.0) return pcg_inner(sp, phi_n, b, tau, *bmin, tol, max_iter, guess);

  RVec inv(sp.half_size());
  for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = 1.0 / ((c0 + 0.5 * sp.k2[i]) * static_cast<double>(sp.n));

  InnerSolveResult r;
  r.phi = guess ? *guess : phi_n;
  RVec w(g.size()), next(g.size());
  CVec spec(sp.half_size());
  for (int it = 1; it <= max_iter; ++it) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = phi_n[i] / tau + (alpha - b[i]) * r.phi[i];
    fft_r2c(sp.shape, w.data(), spec.data());
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= inv[i];
    fft_c2r(sp.shape, spec.data(), next.data());
    r.last_update = max_abs_diff(next, r.phi);
    r.phi.swap(next);
    r.iterations = it;
    if (r.last_update <= tol) {
      r.converged = true;
      break;
    }
  }
  return r;
}

struct GfdnStepper::Impl {
  GfdnConfig cfg;
  PotentialSolver pot;
  RVec V;
  double scale = 1.0;  // |phi^{(1)}| of the previous step, used for the inner initial guess

  explicit Impl(const GfdnConfig& c)
      : cfg(c), pot(c.kernel, c.grid, c.method, c.solver), V(c.V.sample(c.grid).values) {}
};

GfdnStepper::GfdnStepper(const GfdnConfig& cfg) {
  cfg.validate();
  impl_ = std::make_unique<Impl>(cfg);
}
GfdnStepper::~GfdnStepper() = default;
GfdnStepper::GfdnStepper(GfdnStepper&&) noexcept = default;

const GfdnConfig& GfdnStepper::config() const { return impl_->cfg; }

RVec GfdnStepper::potential(const RVec& phi) const {
  RVec rho(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) rho[i] = phi[i] * phi[i];
  return impl_->pot.apply(rho);
}

EnergyReport GfdnStepper::report(const RVec& phi) const {
  const auto& c = impl_->cfg;
  const RealField state(c.grid, FieldKind::Wavefunction, phi);
  const RealField V(c.grid, FieldKind::Potential, impl_->V);
  const RealField u(c.grid, FieldKind::Potential, potential(phi));
  return energy(state, V, c.beta, u, virial_for(c));
}

GfdnStepper::Step GfdnStepper::step(const RVec& phi_n, bool with_energy) {
  Impl& s = *impl_;
  const GfdnConfig& c = s.cfg;
  if (phi_n.size() != c.grid.size()) throw std::invalid_argument("gfdn step: state size mismatch");
  const RVec u = potential(phi_n);
  RVec b(u.size());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = s.V[i] + c.beta * u[i];

  RVec guess(phi_n.size());
  for (std::size_t i = 0; i < guess.size(); ++i) guess[i] = s.scale * phi_n[i];
  InnerSolveResult in = besp_inner_solve(c.grid, phi_n, b, c.tau, c.inner_tol, c.inner_max, &guess);
  if (!in.converged) {
    std::ostringstream os;
    os << "inner backward-Euler solve did not converge in " << in.iterations << " iterations (last update "
       << in.last_update << ")";
    throw ConvergenceError(os.str(), in.iterations, in.last_update);
  }
  const double nrm = l2_norm(c.grid, in.phi);
  s.scale = nrm;
  Step out;
  out.phi = std::move(in.phi);
  for (double& v : out.phi) v /= nrm;
  out.residual = max_abs_diff(out.phi, phi_n) / c.tau;
  out.inner_iterations = in.iterations;
  if (with_energy) {
    const RealField state(c.grid, FieldKind::Wavefunction, phi_n);
    out.energy = energy(state, RealField(c.grid, FieldKind::Potential, s.V), c.beta,
                        RealField(c.grid, FieldKind::Potential, u))
                     .e_total;
  }
  return out;
}

RVec gfdn_step(const RVec& phi_n, const GfdnConfig& cfg) {
  GfdnStepper st(cfg);
  return st.step(phi_n).phi;
}

GroundStateResult compute_ground_state(const GfdnConfig& cfg) {
  cfg.validate();
  GroundStateResult res;
  std::vector<UniformGrid> grids;
  for (int l = cfg.coarse_levels; l >= 1; --l) grids.push_back(coarsen(cfg.grid, l));
  grids.push_back(cfg.grid);

  RVec phi;
  if (cfg.initial) {
    phi = restrict_to_grid(cfg.grid, *cfg.initial, grids.front());
  } else {
    phi = default_initial_state(grids.front());
  }
  {
    const double nrm = l2_norm(grids.front(), phi);
    if (!(nrm > 0.0)) throw std::invalid_argument("ground state: initial state is zero");
    for (double& v : phi) v /= nrm;
  }

  for (std::size_t lev = 0; lev < grids.size(); ++lev) {
    const bool last = lev + 1 == grids.size();
    const auto t0 = std::chrono::steady_clock::now();
    GfdnConfig lc = cfg;
    lc.grid = grids[lev];
    lc.initial.reset();
    if (lev > 0) {
      phi = spectral_upsample(grids[lev - 1], phi, lc.grid);
      const double nrm = l2_norm(lc.grid, phi);
      for (double& v : phi) v /= nrm;
    }
    GfdnStepper st(lc);
    GfdnLevel info;
    info.grid = lc.grid;
    double r = std::numeric_limits<double>::infinity();
    while (r > cfg.eps0) {
      if (info.steps >= cfg.max_steps) {
        std::ostringstream os;
        os << "ground state did not converge in " << cfg.max_steps << " steps on " << lc.grid.describe()
           << " (residual " << r << ")";
        throw ConvergenceError(os.str(), info.steps, r);
      }
      auto s = st.step(phi, last && cfg.track_energy);
      r = s.residual;
      phi = std::move(s.phi);
      ++info.steps;
      if (last) {
        res.residual_history.push_back(r);
        if (cfg.track_energy) res.energy_history.push_back(s.energy);
      }
    }
    info.residual = r;
    info.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.levels.push_back(info);
    if (last) {
      res.steps = info.steps;
      res.report = st.report(phi);
      res.potential = RealField(lc.grid, FieldKind::Potential, st.potential(phi));
      res.phi_g = RealField(lc.grid, FieldKind::Wavefunction, std::move(phi));
    }
  }
  return res;
}

}  // namespace nlse
