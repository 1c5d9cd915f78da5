#include "nlse/dynamics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nlse {

SplittingScheme SplittingScheme::strang() { return {2, {1.0}}; }

SplittingScheme SplittingScheme::fourth_order() {
  const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
  return {4, {w1, 1.0 - 2.0 * w1, w1}};
}

SplittingScheme SplittingScheme::of_order(int order) {
  if (order == 2) return strang();
  if (order == 4) return fourth_order();
  throw std::invalid_argument("splitting order must be 2 or 4");
}

void DynamicsConfig::validate() const {
  kernel.validate();
  if (kernel.dim() != grid.dim) throw std::invalid_argument("dynamics: kernel and grid dimensions differ");
  if (!(tau > 0.0)) throw std::invalid_argument("dynamics: tau must be positive");
  if (!(t_end >= 0.0)) throw std::invalid_argument("dynamics: t_end must be non-negative");
  if (scheme.weights.empty()) throw std::invalid_argument("dynamics: empty splitting scheme");
  if (trace_every < 0) throw std::invalid_argument("dynamics: trace_every must be >= 0");
  for (double t : snapshot_times)
    if (t < 0.0 || t > t_end * (1 + 1e-12)) throw std::invalid_argument("dynamics: snapshot time outside [0, t_end]");
  steps();
}

long DynamicsConfig::steps() const {
  const double r = t_end / tau;
  const long n = std::lround(r);
  if (std::abs(r - static_cast<double>(n)) > 1e-9 * std::max(1.0, r))
    throw std::invalid_argument("dynamics: t_end is not a multiple of tau");
  return n;
}

namespace {

// exp(-i lam s / 2) for a fixed list of eigenvalues, cached per s.
class PhaseCache {
 public:
  explicit PhaseCache(RVec lam) : lam_(std::move(lam)) {}
  void set_scale(double c) { scale_ = c; }
  const CVec& get(double s) const {
    for (const auto& [key, ph] : cache_)
      if (key == s) return ph;
    CVec ph(lam_.size());
    for (std::size_t i = 0; i < ph.size(); ++i) ph[i] = std::polar(scale_, -0.5 * lam_[i] * s);
    cache_.emplace_back(s, std::move(ph));
    return cache_.back().second;
  }

 private:
  RVec lam_;
  double scale_ = 1.0;
  mutable std::vector<std::pair<double, CVec>> cache_;
};

void kinetic_fourier(ComplexField& psi, const CVec& phase) {
  const auto shape = psi.grid.shape();
  fft_c2c(shape, psi.values.data(), -1);
  for (std::size_t i = 0; i < phase.size(); ++i) psi.values[i] *= phase[i];
  fft_c2c(shape, psi.values.data(), +1);
}

void kinetic_sine(ComplexField& psi, const CVec& phase) {
  const UniformGrid& g = psi.grid;
  RVec re(g.size()), im(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    re[i] = psi.values[i].real();
    im[i] = psi.values[i].imag();
  }
  RVec a = dst_forward(g, re), b = dst_forward(g, im);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const cplx c = cplx(a[i], b[i]) * phase[i];
    a[i] = c.real();
    b[i] = c.imag();
  }
  re = dst_backward(g, a);
  im = dst_backward(g, b);
  for (std::size_t i = 0; i < g.size(); ++i) psi.values[i] = cplx(re[i], im[i]);
}

PhaseCache fourier_phases(const UniformGrid& g) {
  PhaseCache pc(laplacian_symbol(g));
  pc.set_scale(1.0 / static_cast<double>(g.size()));
  return pc;
}

}  // namespace

void kinetic_substep(ComplexField& psi, double s) {
  if (s == 0.0) return;
  kinetic_fourier(psi, fourier_phases(psi.grid).get(s));
}

void kinetic_substep_dst(ComplexField& psi, double s) {
  kinetic_sine(psi, PhaseCache(dst_eigenvalues(psi.grid)).get(s));
}

struct SplittingIntegrator::Impl {
  DynamicsConfig cfg;
  PotentialSolver pot;
  RealField V;
  bool sine;
  PhaseCache phases;

  explicit Impl(const DynamicsConfig& c)
      : cfg(c),
        pot(c.kernel, c.grid, c.method, c.solver),
        V(c.V.sample(c.grid)),
        sine(c.method == PotentialMethod::Dst),
        phases(sine ? PhaseCache(dst_eigenvalues(c.grid)) : fourier_phases(c.grid)) {}
};

SplittingIntegrator::SplittingIntegrator(const DynamicsConfig& cfg) {
  cfg.validate();
  impl_ = std::make_unique<Impl>(cfg);
}
SplittingIntegrator::~SplittingIntegrator() = default;
SplittingIntegrator::SplittingIntegrator(SplittingIntegrator&&) noexcept = default;

const DynamicsConfig& SplittingIntegrator::config() const { return impl_->cfg; }

RVec SplittingIntegrator::potential(const ComplexField& psi) const {
  RVec rho(psi.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(psi.values[i]);
  return impl_->pot.apply(rho);
}

void SplittingIntegrator::potential_substep(ComplexField& psi, double s) const {
  const Impl& m = *impl_;
  if (psi.grid != m.cfg.grid) throw std::invalid_argument("potential_substep: grid mismatch");
  const double beta = m.cfg.beta;
  if (beta == 0.0) {
    for (std::size_t i = 0; i < psi.size(); ++i) psi.values[i] *= std::polar(1.0, -m.V[i] * s);
    return;
  }
  const RVec u = potential(psi);
  for (std::size_t i = 0; i < psi.size(); ++i) psi.values[i] *= std::polar(1.0, -(m.V[i] + beta * u[i]) * s);
}

void SplittingIntegrator::kinetic(ComplexField& psi, double s) const {
  if (s == 0.0) return;
  const Impl& m = *impl_;
  if (m.sine)
    kinetic_sine(psi, m.phases.get(s));
  else
    kinetic_fourier(psi, m.phases.get(s));
}

void SplittingIntegrator::step(ComplexField& psi) const { advance(psi, 1); }

void SplittingIntegrator::advance(ComplexField& psi, long n) const {
  if (n <= 0) return;
  const auto& w = impl_->cfg.scheme.weights;
  const double tau = impl_->cfg.tau;
  // Adjacent half kinetic steps are merged, within a step and across step boundaries.
  double pending = 0.5 * w[0] * tau;
  for (long k = 0; k < n; ++k)
    for (std::size_t j = 0; j < w.size(); ++j) {
      kinetic(psi, pending);
      potential_substep(psi, w[j] * tau);
      pending = 0.5 * w[j] * tau + 0.5 * w[(j + 1) % w.size()] * tau;
    }
  kinetic(psi, 0.5 * w.back() * tau);
}

EnergyReport SplittingIntegrator::energy(const ComplexField& psi) const {
  return nlse::energy(psi, impl_->V, impl_->cfg.beta, RealField(psi.grid, FieldKind::Potential, potential(psi)));
}

namespace {

TraceSample sample_at(const SplittingIntegrator& integ, const ComplexField& psi, double t, bool with_energy) {
  TraceSample s;
  s.t = t;
  s.mass = mass(psi);
  if (with_energy) {
    const auto r = integ.energy(psi);
    s.e_total = r.e_total;
    s.e_kin = r.e_kin;
    s.e_pot = r.e_pot;
    s.e_int = r.e_int;
  } else {
    s.e_total = s.e_kin = s.e_pot = s.e_int = std::numeric_limits<double>::quiet_NaN();
  }
  return s;
}

}  // namespace

DynamicsResult evolve(const ComplexField& psi0, const DynamicsConfig& cfg) {
  if (psi0.grid != cfg.grid) throw std::invalid_argument("evolve: initial state is on a different grid");
  const auto t0 = std::chrono::steady_clock::now();
  SplittingIntegrator integ(cfg);
  const long n = cfg.steps();

  std::vector<std::pair<long, double>> snaps;
  for (double t : cfg.snapshot_times) snaps.emplace_back(std::lround(t / cfg.tau), t);

  DynamicsResult res;
  res.psi = psi0;
  auto take_snapshots = [&](long k) {
    for (const auto& [idx, t] : snaps) {
      if (idx != k) continue;
      RealField rho(cfg.grid, FieldKind::Density);
      for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(res.psi.values[i]);
      res.snapshots.push_back({k * cfg.tau, std::move(rho)});
    }
  };

  res.trace.samples.push_back(sample_at(integ, res.psi, 0.0, cfg.trace_energy));
  take_snapshots(0);
  // psi is only formed at steps that are observed.
  std::vector<long> stops{n};
  if (cfg.trace_every > 0)
    for (long k = cfg.trace_every; k < n; k += cfg.trace_every) stops.push_back(k);
  for (const auto& s : snaps)
    if (s.first > 0 && s.first < n) stops.push_back(s.first);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
  long k = 0;
  for (long stop : stops) {
    integ.advance(res.psi, stop - k);
    k = stop;
    take_snapshots(k);
    if (k == n || (cfg.trace_every > 0 && k % cfg.trace_every == 0))
      res.trace.samples.push_back(sample_at(integ, res.psi, k * cfg.tau, cfg.trace_energy));
  }
  res.steps = n;
  res.potential = RealField(cfg.grid, FieldKind::Potential, integ.potential(res.psi));
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

ComplexField gaussian_wavepacket(const UniformGrid& g) {
  ComplexField psi(g, FieldKind::Wavefunction);
  const auto f = sample<double>(g, FieldKind::Wavefunction, [&](const std::array<double, 3>& x) {
    double r2 = 0.0;
    for (int a = 0; a < g.dim; ++a) r2 += x[a] * x[a];
    return std::exp(-0.5 * r2);
  });
  for (std::size_t i = 0; i < f.size(); ++i) psi[i] = f[i];
  return psi;
}

StateErrors compare_states(const ComplexField& psi, const RealField& phi, const ComplexField& ref_psi,
                           const RealField& ref_phi) {
  const UniformGrid& g = psi.grid;
  if (phi.grid != g) throw std::invalid_argument("compare_states: psi and phi grids differ");
  const CVec rp = restrict_to_grid(ref_psi.grid, ref_psi.values, g);
  const RVec ru = restrict_to_grid(ref_phi.grid, ref_phi.values, g);
  RVec rho(g.size()), rrho(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    rho[i] = std::norm(psi.values[i]);
    rrho[i] = std::norm(rp[i]);
  }
  StateErrors e;
  e.e_psi = relative_max_error(psi.values, rp);
  e.e_phi = relative_max_error(phi.values, ru);
  e.e_rho = relative_max_error(rho, rrho);
  return e;
}

HoneycombDemo HoneycombDemo::full() {
  HoneycombDemo d;
  d.h = 1.0 / 16;
  d.t_end = 3.5;
  return d;
}

DynamicsConfig HoneycombDemo::config() const {
  DynamicsConfig c;
  c.kernel = make_kernel(KernelFamily::Coulomb2D);
  const int n = static_cast<int>(std::lround(2 * L / h));
  c.grid = make_grid(2, {L, L}, {n, n});
  c.V.kind = ExternalPotential::Kind::Honeycomb;
  c.beta = beta;
  c.tau = tau;
  c.t_end = t_end;
  c.scheme = SplittingScheme::of_order(order);
  for (int k = 0; k * snapshot_every <= t_end * (1 + 1e-12); ++k) c.snapshot_times.push_back(k * snapshot_every);
  return c;
}

}  // namespace nlse
