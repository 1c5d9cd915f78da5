#include "nlse/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "nlse/fft.hpp"

#ifndef NLSE_VERSION
#define NLSE_VERSION "0.0.0"
#endif

namespace nlse {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string library_version() { return NLSE_VERSION; }

std::string format_sci(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3E", v);
  return buf;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string h_label(double h) {
  if (h >= 1.0 - 1e-12) return num(h);
  return "1/" + std::to_string(std::lround(1.0 / h));
}

// Per-axis description, collapsed to one value when all axes agree.
template <class F>
std::string per_axis(const UniformGrid& g, F f) {
  std::vector<std::string> v;
  for (int a = 0; a < g.dim; ++a) v.push_back(f(a));
  bool same = true;
  for (const auto& s : v) same = same && s == v[0];
  if (same) return v[0];
  std::string out = v[0];
  for (std::size_t i = 1; i < v.size(); ++i) out += "x" + v[i];
  return out;
}

UniformGrid cube(int dim, double L, double h) {
  const int n = static_cast<int>(std::lround(2.0 * L / h));
  return make_grid(dim, std::vector<double>(dim, L), std::vector<int>(dim, n));
}

std::string grid_label(const UniformGrid& g) {
  return "L=" + per_axis(g, [&](int a) { return num(g.L[a]); }) + " h=" + per_axis(g, [&](int a) { return h_label(g.h[a]); });
}

// Values of a reference field at the points of g. Points inside the reference box must be
// reference grid points; points outside it get zero (the reference has decayed there).
template <class Vec>
Vec transfer(const UniformGrid& src, const Vec& f, const UniformGrid& g, bool* inside = nullptr) {
  std::vector<int> idx[3];
  bool all_inside = true;
  for (int a = 0; a < 3; ++a) {
    if (a >= g.dim) {
      idx[a] = {0};
      continue;
    }
    for (int j = 0; j < g.n[a]; ++j) {
      const double pos = (g.x(a, j) + src.L[a]) / src.h[a];
      const long r = std::lround(pos);
      if (r < 0 || r >= src.n[a]) {
        idx[a].push_back(-1);
        all_inside = false;
        continue;
      }
      if (std::abs(pos - r) > 1e-9) throw std::invalid_argument("transfer: grid points do not coincide");
      idx[a].push_back(static_cast<int>(r));
    }
  }
  if (inside) *inside = all_inside;
  Vec out(g.size());
  const int s1 = src.dim > 1 ? src.n[1] : 1, s2 = src.dim > 2 ? src.n[2] : 1;
  std::size_t o = 0;
  for (int i : idx[0])
    for (int j : idx[1])
      for (int k : idx[2]) {
        out[o++] = (i < 0 || j < 0 || k < 0) ? typename Vec::value_type{}
                                               : f[(static_cast<std::size_t>(i) * s1 + j) * s2 + k];
      }
  return out;
}

// Reference potential on g: restricted when g lies inside the reference box, otherwise
// recomputed by NUFFT from the zero-extended reference density.
RVec reference_potential(const KernelSpec& k, const UniformGrid& ref_grid, const RVec& ref_rho, const RVec& ref_phi,
                         const UniformGrid& g, double tol) {
  bool inside = false;
  RVec phi = transfer(ref_grid, ref_phi, g, &inside);
  if (inside) return phi;
  SolverOptions o;
  o.tol = tol;
  RealField rho(g, FieldKind::Density, transfer(ref_grid, ref_rho, g));
  return solve_potential(k, rho, default_method(k.family), o).values;
}

class Builder {
 public:
  Builder(int id, const TableOptions& o) : opts(o) {
    res.id = id;
    res.title = table_title(id);
    res.full = o.full;
  }

  // Creates the cell now so the CSV keeps the published row order; filled in later.
  std::size_t slot(const std::string& block, const std::string& row, const std::string& col,
                   std::optional<double> target) {
    TableCell c;
    c.block = block;
    c.row = row;
    c.column = col;
    c.value = kNaN;
    c.target = target;
    c.status = "pending";
    res.cells.push_back(c);
    return res.cells.size() - 1;
  }

  TableCell& at(std::size_t i) { return res.cells[i]; }

  void provenance(std::size_t i, const std::string& method, KernelFamily f, const UniformGrid& g, double tau = 0.0) {
    TableCell& c = res.cells[i];
    c.method = method;
    c.kernel = to_string(f);
    c.dim = g.dim;
    c.L = per_axis(g, [&](int a) { return num(g.L[a]); });
    c.h = per_axis(g, [&](int a) { return h_label(g.h[a]); });
    c.N = per_axis(g, [&](int a) { return std::to_string(g.n[a]); });
    c.tau = tau;
  }

  void done(std::size_t i, double value, double seconds, const std::string& status = "ok") {
    TableCell& c = res.cells[i];
    c.value = value;
    c.seconds = seconds;
    c.status = status;
    if (opts.log) {
      *opts.log << "table " << res.id << " | " << c.block << " | " << c.row << " | " << c.column << " : "
                << (std::isnan(value) ? c.status : format_sci(value));
      if (c.target) *opts.log << " (published " << format_sci(*c.target) << ")";
      *opts.log << "  [" << num(seconds) << " s]" << std::endl;
    }
  }

  void skip(std::size_t i, const std::string& why) { done(i, kNaN, 0.0, "skipped: " + why); }

  TableResult res;
  const TableOptions& opts;
};

std::optional<double> pick(const std::vector<double>& t, std::size_t i) {
  if (i < t.size() && !std::isnan(t[i])) return t[i];
  return std::nullopt;
}

// ---------------------------------------------------------------- potential tables

struct PotentialBlock {
  std::string label;
  PotentialMethod method;
  std::vector<double> Ls;
  std::vector<double> targets;  // row-major over (L, h)
  std::size_t budget;           // max grid points
};

void potential_sweep(Builder& b, KernelFamily fam, const GaussianDensitySpec& spec, const std::vector<double>& hs,
                     const std::vector<PotentialBlock>& blocks) {
  const KernelSpec k = make_kernel(fam);
  SolverOptions o;
  o.tol = b.opts.tol;
  for (const auto& blk : blocks) {
    for (std::size_t i = 0; i < blk.Ls.size(); ++i) {
      for (std::size_t j = 0; j < hs.size(); ++j) {
        const auto g = cube(spec.dim, blk.Ls[i], hs[j]);
        const auto s = b.slot(blk.label, "L=" + num(blk.Ls[i]), "h=" + h_label(hs[j]), pick(blk.targets, i * hs.size() + j));
        b.provenance(s, to_string(blk.method), fam, g);
        b.at(s).reference = "exact";
        if (g.size() > blk.budget) {
          b.skip(s, "grid over budget");
          continue;
        }
        const auto t0 = Clock::now();
        const auto ex = exact_potential(fam, spec, g);
        const auto u = solve_potential(k, gaussian_density(spec, g), blk.method, o);
        b.done(s, error_eh(ex, u), since(t0));
      }
    }
  }
}

std::size_t cube_points(int dim, int n) { return static_cast<std::size_t>(std::pow(n, dim)); }

void table_coulomb_sweep(Builder& b, int dim) {
  const std::vector<double> hs{2, 1, 0.5, 0.25, 0.125};
  const std::vector<double> small{4, 8, 16}, large{4, 8, 16, 32, 64};
  // 3D NUFFT at 256^3 needs a 512^3 complex work array (2 GB).
  const std::size_t nufft_budget = dim == 3 ? cube_points(3, 128) : cube_points(2, 1024);
  const std::size_t grid_budget = dim == 3 ? cube_points(3, 256) : cube_points(2, 1024);
  std::vector<PotentialBlock> blocks;
  if (dim == 3) {
    blocks = {
        {"NUFFT", PotentialMethod::NufftSplit, small,
         {4.191E-01, 2.696E-03, 6.634E-07, 4.599E-07, 3.688E-07, 4.111E-01, 2.817E-03, 1.667E-08, 2.367E-14,
          2.404E-14, 4.127E-01, 2.848E-03, 1.732E-08, 1.420E-14, 1.334E-14},
         nufft_budget},
        {"DST", PotentialMethod::Dst, large,
         {2.437E-01, 2.437E-01, 2.437E-01, 2.437E-01, 2.437E-01, 2.754E-01, 1.219E-01, 1.219E-01, 1.219E-01,
          1.219E-01, 3.433E-01, 6.093E-02, 6.093E-02, 6.093E-02, 6.093E-02, 3.780E-01, 3.046E-02, 3.046E-02,
          3.046E-02, 3.046E-02, 3.956E-01, 1.523E-02, 1.523E-02, 1.523E-02, 1.523E-02},
         grid_budget},
        {"FFT", PotentialMethod::Fft, large,
         {3.032E-01, 3.363E-01, 3.385E-01, 3.385E-01, 3.385E-01, 1.744E-01, 1.712E-01, 1.720E-01, 1.720E-01,
          1.720E-01, 2.958E-01, 8.666E-02, 8.632E-02, 8.632E-02, 8.632E-02, 3.550E-01, 4.372E-02, 4.320E-02,
          4.320E-02, 4.320E-02, 3.843E-01, 2.214E-02, 2.161E-02, 2.161E-02, 2.161E-02},
         grid_budget},
    };
    potential_sweep(b, KernelFamily::Coulomb3D, {1.1, 1.0, 3}, hs, blocks);
  } else {
    blocks = {
        {"NUFFT", PotentialMethod::NufftFull, small,
         {1.837, 5.540E-02, 4.289E-07, 3.383E-07, 2.937E-07, 4.457E-01, 2.373E-03, 2.714E-08, 3.202E-15, 3.431E-15,
          2.084E-01, 2.385E-03, 2.761E-08, 2.745E-15, 2.859E-15},
         nufft_budget},
        {"DST", PotentialMethod::Dst, large,
         {1.577E-01, 1.577E-01, 1.577E-01, 1.577E-01, 1.577E-01, 1.348E-01, 7.762E-02, 7.762E-02, 7.762E-02,
          7.762E-02, 1.711E-01, 3.867E-02, 3.867E-02, 3.867E-02, 3.867E-02, 1.897E-01, 1.932E-02, 1.932E-02,
          1.932E-02, 1.932E-02, 1.991E-01, 9.658E-03, 9.658E-03, 9.658E-03, 9.658E-03},
         grid_budget},
        {"FFT", PotentialMethod::Fft, large,
         {2.855E-01, 2.961E-01, 2.980E-01, 2.980E-01, 2.980E-01, 1.553E-01, 1.503E-01, 1.502E-01, 1.502E-01,
          1.502E-01, 1.157E-01, 7.596E-02, 7.528E-02, 7.528E-02, 7.528E-02, 1.624E-01, 3.843E-02, 3.766E-02,
          3.766E-02, 3.766E-02, 1.856E-01, 1.961E-02, 1.883E-02, 1.883E-02, 1.883E-02},
         grid_budget},
    };
    potential_sweep(b, KernelFamily::Coulomb2D, {std::sqrt(1.2), 1.0, 2}, hs, blocks);
  }
}

// Anisotropic densities: box [-L,L]^(d-1) x [-L/gamma, L/gamma], same point count per axis.
void table_anisotropic(Builder& b, int dim) {
  const double L = 12.0, sigma = 2.0;
  const double h = dim == 3 ? 0.25 : 0.125;
  const std::vector<double> gammas{1, 2, 4, 8};
  const KernelFamily fam = dim == 3 ? KernelFamily::Coulomb3D : KernelFamily::Coulomb2D;
  const KernelSpec k = make_kernel(fam);
  struct Row {
    std::string label;
    PotentialMethod method;
    std::vector<double> targets;
  };
  const std::vector<Row> rows =
      dim == 3 ? std::vector<Row>{{"NUFFT", PotentialMethod::NufftSplit, {2.164E-14, 2.134E-14, 2.044E-14, 2.005E-14}},
                                  {"DST", PotentialMethod::Dst, {0.146, 0.441, 1.559, 3.782}},
                                  {"FFT", PotentialMethod::Fft, {0.208, 0.310, 1.327, 3.349}}}
               : std::vector<Row>{{"NUFFT", PotentialMethod::NufftFull, {4.230E-14, 3.102E-15, 3.504E-15, 4.381E-15}},
                                  {"DST", PotentialMethod::Dst, {0.373, 0.386, 0.412, 0.446}},
                                  {"FFT", PotentialMethod::Fft, {0.426, 0.425, 0.405, 0.344}}};
  SolverOptions o;
  o.tol = b.opts.tol;
  const int n = static_cast<int>(std::lround(2 * L / h));
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < gammas.size(); ++j) {
      std::vector<double> Ls(dim, L);
      Ls[dim - 1] = L / gammas[j];
      const auto g = make_grid(dim, Ls, std::vector<int>(dim, n));
      const GaussianDensitySpec spec{sigma, gammas[j], dim};
      const auto s = b.slot(r.label, r.label, "gamma=" + num(gammas[j]), pick(r.targets, j));
      b.provenance(s, to_string(r.method), fam, g);
      b.at(s).reference = "exact";
      const auto t0 = Clock::now();
      const auto ex = exact_potential(fam, spec, g);
      const auto u = solve_potential(k, gaussian_density(spec, g), r.method, o);
      b.done(s, error_eh(ex, u), since(t0));
    }
  }
}

double fdm_error(double sigma2, double L, double h) {
  auto p = solve_fdm_radial([&](double r) { return std::exp(-r * r / sigma2); }, L, h, 2);
  double err = 0.0, den = 0.0;
  for (std::size_t i = 0; i < p.r.size(); ++i) {
    const double ex = poisson2d_exact(std::sqrt(sigma2), {p.r[i], 0.0});
    err = std::max(err, std::abs(ex - p.u[i]));
    den = std::max(den, std::abs(ex));
  }
  return err / den;
}

void table_poisson2d(Builder& b) {
  const std::vector<double> hs{2, 1, 0.5, 0.25, 0.125};
  potential_sweep(b, KernelFamily::LaplaceGreen2D, {std::sqrt(1.3), 1.0, 2}, hs,
                  {{"NUFFT",
                    PotentialMethod::NufftFull,
                    {4, 8, 16},
                    {5.821E-01, 1.133E-02, 3.011E-06, 1.994E-06, 1.650E-06, 1.685E-01, 6.820E-04, 1.754E-09, 4.936E-14,
                     4.857E-14, 1.684E-01, 5.333E-04, 1.391E-09, 4.577E-14, 4.561E-14},
                    cube_points(2, 1024)}});
  const std::vector<double> fh{0.25, 0.125, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  const std::vector<std::vector<double>> errs{{4.646E-03, 1.155E-03, 2.910E-04, 7.602E-05, 2.246E-05},
                                              {4.101E-03, 1.019E-03, 2.542E-04, 6.353E-05, 1.588E-05},
                                              {4.052E-03, 1.007E-03, 2.512E-04, 6.278E-05, 1.569E-05}};
  const std::vector<std::vector<double>> rates{{kNaN, 2.0081, 1.9889, 1.9365, 1.7590},
                                               {kNaN, 2.0093, 2.0024, 2.0006, 2.0002},
                                               {kNaN, 2.0092, 2.0023, 2.0006, 2.0001}};
  const std::vector<double> Ls{4, 8, 16};
  for (std::size_t i = 0; i < Ls.size(); ++i) {
    double prev = kNaN;
    std::vector<std::size_t> rate_slots;
    std::vector<double> rate_vals;
    for (std::size_t j = 0; j < fh.size(); ++j) {
      const auto s = b.slot("FDM", "L=" + num(Ls[i]), "h=" + h_label(fh[j]), errs[i][j]);
      b.provenance(s, "fdm", KernelFamily::LaplaceGreen2D, cube(2, Ls[i], fh[j]));
      b.at(s).N = std::to_string(std::lround(Ls[i] / fh[j]) + 1) + " radial";
      b.at(s).reference = "exact";
      const auto t0 = Clock::now();
      const double e = fdm_error(1.3, Ls[i], fh[j]);
      b.done(s, e, since(t0));
      rate_vals.push_back(std::isnan(prev) ? kNaN : std::log2(prev / e));
      prev = e;
    }
    for (std::size_t j = 0; j < fh.size(); ++j) {
      const auto s = b.slot("FDM", "L=" + num(Ls[i]) + " rate", "h=" + h_label(fh[j]), pick(rates[i], j));
      b.provenance(s, "fdm", KernelFamily::LaplaceGreen2D, cube(2, Ls[i], fh[j]));
      b.at(s).N = std::to_string(std::lround(Ls[i] / fh[j]) + 1) + " radial";
      b.at(s).reference = "log2 of the error ratio to the previous h";
      if (std::isnan(rate_vals[j]))
        b.done(s, kNaN, 0.0, "n/a");
      else
        b.done(s, rate_vals[j], 0.0);
    }
  }
}

// Wall time of the NUFFT 2D Poisson solve; the best of several repeats.
void table_timing(Builder& b) {
  const std::vector<double> hs{1, 0.5, 0.25, 0.125};
  const std::vector<double> published{0.06, 0.10, 0.32, 1.38};
  const GaussianDensitySpec spec{std::sqrt(1.3), 1.0, 2};
  SolverOptions o;
  o.tol = b.opts.tol;
  double prev = kNaN;
  for (std::size_t j = 0; j < hs.size(); ++j) {
    const auto g = cube(2, 16, hs[j]);
    const auto rho = gaussian_density(spec, g);
    solve_poisson2d(rho, o);  // warm-up: FFTW plans and allocations
    double best = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < 5; ++rep) {
      const auto t0 = Clock::now();
      solve_poisson2d(rho, o);
      best = std::min(best, since(t0));
    }
    const auto s = b.slot("NUFFT", "h=" + h_label(hs[j]), "T_total", published[j]);
    b.provenance(s, to_string(PotentialMethod::NufftFull), KernelFamily::LaplaceGreen2D, g);
    b.at(s).reference = "wall seconds, best of 5";
    b.done(s, best, best);
    const auto r = b.slot("NUFFT", "h=" + h_label(hs[j]), "growth", j ? pick(published, j) : std::nullopt);
    if (j) b.at(r).target = published[j] / published[j - 1];
    b.provenance(r, to_string(PotentialMethod::NufftFull), KernelFamily::LaplaceGreen2D, g);
    b.at(r).reference = "T_total ratio to the previous h";
    if (j)
      b.done(r, best / prev, 0.0);
    else
      b.done(r, kNaN, 0.0, "n/a");
    prev = best;
  }
}

// ---------------------------------------------------------------- ground-state tables

int auto_levels(const UniformGrid& g) {
  int l = 0;
  for (;;) {
    const int next = l + 1, div = 1 << (next + 1);
    bool ok = next <= 3;
    for (int a = 0; a < g.dim && ok; ++a) ok = g.n[a] % div == 0 && g.n[a] / (1 << next) >= 16;
    if (!ok) return l;
    l = next;
  }
}

struct GsRun {
  UniformGrid grid;
  RVec phi, potential;
  EnergyReport report;
  int steps = 0;
  double seconds = 0.0;
};

GfdnConfig gs_config(KernelFamily fam, const ExternalPotential& V, double beta, const UniformGrid& g,
                     PotentialMethod method, double eps0, double tol) {
  GfdnConfig c;
  c.kernel = make_kernel(fam);
  c.grid = g;
  c.V = V;
  c.beta = beta;
  c.method = method;
  c.eps0 = eps0;
  c.solver.tol = tol;
  c.coarse_levels = auto_levels(g);
  c.inner_max = 2000;
  if (eps0 < 1e-10) c.inner_tol = 1e-14;
  return c;
}

GsRun gs_run(const GfdnConfig& c) {
  const auto t0 = Clock::now();
  auto r = compute_ground_state(c);
  return {c.grid, r.phi_g.values, r.potential.values, r.report, r.steps, since(t0)};
}

// Error tables share one layout: blocks of columns, rows "<quantity> beta=<b>".
struct GsColumn {
  std::string label;
  double L, h;
};
struct GsBlock {
  std::string label;
  PotentialMethod method;
  std::vector<GsColumn> cols;
  // [quantity][beta][column], quantity 0 = state, 1 = potential
  std::vector<double> targets;
};

void gs_error_table(Builder& b, KernelFamily fam, const ExternalPotential& V, double ref_L, double ref_h,
                    const std::vector<GsBlock>& blocks, std::size_t budget) {
  const int dim = kernel_dim(fam);
  const double eps0 = 1e-12;
  const std::vector<double> betas{-5, 5};
  const char* qnames[2] = {"e_phi_g", "e_potential"};
  const KernelSpec k = make_kernel(fam);

  // slots[block][q][beta][col]
  std::map<std::tuple<std::size_t, int, std::size_t, std::size_t>, std::size_t> slots;
  for (std::size_t bi = 0; bi < blocks.size(); ++bi)
    for (int q = 0; q < 2; ++q)
      for (std::size_t be = 0; be < betas.size(); ++be)
        for (std::size_t c = 0; c < blocks[bi].cols.size(); ++c) {
          const std::size_t ti = (q * betas.size() + be) * blocks[bi].cols.size() + c;
          const auto s = b.slot(blocks[bi].label, std::string(qnames[q]) + " beta=" + num(betas[be]),
                                blocks[bi].cols[c].label, pick(blocks[bi].targets, ti));
          slots[{bi, q, be, c}] = s;
          const auto g = cube(dim, blocks[bi].cols[c].L, blocks[bi].cols[c].h);
          b.provenance(s, "GF-" + std::string(to_string(blocks[bi].method)), fam, g, 1e-2);
        }

  const auto ref_grid = cube(dim, ref_L, ref_h);
  const auto seed_grid = cube(dim, ref_L, 2 * ref_h);
  for (std::size_t be = 0; be < betas.size(); ++be) {
    const double beta = betas[be];
    std::map<std::tuple<int, double, double>, GsRun> memo;
    auto get = [&](PotentialMethod m, double L, double h) -> const GsRun& {
      const auto key = std::make_tuple(static_cast<int>(m), L, h);
      auto it = memo.find(key);
      if (it != memo.end()) return it->second;
      return memo.emplace(key, gs_run(gs_config(fam, V, beta, cube(dim, L, h), m, eps0, b.opts.tol))).first->second;
    };

    // Reference: converge on the half-resolution grid, then refine on the reference grid.
    const PotentialMethod ref_method = default_method(fam);
    std::string ref_label = "GF-" + std::string(to_string(ref_method)) + " " + grid_label(ref_grid) + " eps0=1e-12";
    std::optional<GsRun> ref;
    if (ref_grid.size() <= budget) {
      const GsRun& seed = get(ref_method, ref_L, 2 * ref_h);
      auto c = gs_config(fam, V, beta, ref_grid, ref_method, eps0, b.opts.tol);
      c.coarse_levels = 0;
      c.initial = spectral_upsample(seed_grid, seed.phi, ref_grid);
      ref = gs_run(c);
      if (b.opts.log)
        *b.opts.log << "table " << b.res.id << " | reference beta=" << num(beta) << " " << ref_label << " : "
                    << ref->steps << " steps [" << num(ref->seconds) << " s]" << std::endl;
    }
    RVec ref_rho;
    if (ref) {
      ref_rho.resize(ref->phi.size());
      for (std::size_t i = 0; i < ref_rho.size(); ++i) ref_rho[i] = ref->phi[i] * ref->phi[i];
    }

    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
      for (std::size_t c = 0; c < blocks[bi].cols.size(); ++c) {
        const auto& col = blocks[bi].cols[c];
        const auto g = cube(dim, col.L, col.h);
        const auto s0 = slots[{bi, 0, be, c}], s1 = slots[{bi, 1, be, c}];
        b.at(s0).reference = b.at(s1).reference = ref_label;
        if (!ref) {
          b.skip(s0, "reference grid over budget");
          b.skip(s1, "reference grid over budget");
          continue;
        }
        if (g.size() > budget || !(col.h > ref_h * (1 + 1e-12))) {
          const std::string why = g.size() > budget ? "grid over budget" : "reference not finer";
          b.skip(s0, why);
          b.skip(s1, why);
          continue;
        }
        const auto t0 = Clock::now();
        const GsRun& r = get(blocks[bi].method, col.L, col.h);
        const double e_state = relative_max_error(r.phi, transfer(ref->grid, ref->phi, g));
        const RVec ref_pot = reference_potential(k, ref->grid, ref_rho, ref->potential, g, b.opts.tol);
        const double e_pot = relative_max_error(r.potential, ref_pot);
        const double dt = since(t0);
        b.done(s0, e_state, dt);
        b.done(s1, e_pot, 0.0);
      }
    }
  }
}

std::vector<GsColumn> h_columns(double L, const std::vector<double>& hs) {
  std::vector<GsColumn> out;
  for (double h : hs) out.push_back({"h=" + h_label(h), L, h});
  return out;
}

void table_gs_errors(Builder& b) {
  const bool full = b.opts.full;
  switch (b.res.id) {
    case 7: {
      const auto cols = h_columns(8, {2, 1, 0.5, 0.25});
      gs_error_table(b, KernelFamily::Coulomb3D, harmonic_trap(), 8, 0.125,
                     {{"GF-NUFFT",
                       default_method(KernelFamily::Coulomb3D),
                       cols,
                       {5.362E-02, 1.954E-04, 2.201E-07, 4.643E-11, 1.512E-01, 4.712E-04, 4.026E-08, 1.141E-10,
                        2.532E-01, 3.769E-03, 8.153E-07, 7.035E-11, 2.682E-01, 7.061E-04, 1.225E-07, 8.048E-11}},
                      {"GF-DST",
                       PotentialMethod::Dst,
                       cols,
                       {2.319E-01, 9.439E-03, 1.637E-06, 6.309E-07, 1.659E-01, 9.469E-04, 8.306E-07, 8.531E-07,
                        7.297E-02, 9.551E-02, 9.945E-02, 1.027E-01, 7.809E-02, 1.016E-01, 1.057E-01, 1.091E-01}}},
                     cube_points(3, 128));
      break;
    }
    case 9: {
      const auto cols = h_columns(8, {1, 0.5, 0.25, 0.125});
      std::vector<GsColumn> lcols;
      for (double L : {8.0, 16.0, 32.0, 64.0}) lcols.push_back({"L=" + num(L), L, 0.125});
      gs_error_table(b, KernelFamily::Coulomb2D, harmonic_trap({1, 2, 1}), 8, 1.0 / 16,
                     {{"GF-NUFFT (L=8)",
                       PotentialMethod::NufftFull,
                       cols,
                       {4.620E-02, 1.058E-03, 5.570E-08, 3.968E-15, 7.034E-03, 2.365E-05, 2.632E-10, 2.074E-15,
                        1.025E-01, 1.402E-03, 8.244E-08, 4.445E-15, 1.263E-02, 3.239E-05, 3.161E-10, 1.703E-15}},
                      {"GF-DST (L=8)",
                       PotentialMethod::Dst,
                       cols,
                       {4.823E-02, 1.112E-03, 3.139E-05, 3.133E-05, 8.183E-03, 7.245E-05, 5.317E-05, 5.381E-05,
                        6.613E-02, 5.159E-02, 5.159E-02, 5.159E-02, 6.840E-02, 6.840E-02, 6.840E-02, 6.840E-02}},
                      {"GF-DST (h=1/8)",
                       PotentialMethod::Dst,
                       lcols,
                       {3.133E-05, 3.848E-06, 4.789E-07, 5.980E-08, 5.381E-05, 6.212E-06, 7.606E-07, 9.445E-08,
                        5.159E-02, 2.572E-02, 1.072E-02, 5.248E-03, 6.840E-02, 3.398E-02, 1.415E-02, 6.928E-03}}},
                     cube_points(2, full ? 1024 : 512));
      break;
    }
    case 11:
      gs_error_table(b, KernelFamily::LaplaceGreen2D, harmonic_trap({1, 2, 1}), 8, 1.0 / 16,
                     {{"GF-NUFFT",
                       PotentialMethod::NufftFull,
                       h_columns(8, {1, 0.5, 0.25, 0.125}),
                       {2.465E-02, 1.024E-04, 4.699E-10, 2.878E-15, 1.191E-02, 1.593E-05, 9.793E-12, 2.726E-15,
                        3.737E-02, 7.634E-05, 2.896E-10, 6.347E-14, 1.033E-02, 3.282E-06, 2.682E-12, 6.247E-14}}},
                     cube_points(2, 1024));
      break;
  }
}

void table_energies(Builder& b) {
  const int id = b.res.id;
  const KernelFamily fam =
      id == 8 ? KernelFamily::Coulomb3D : (id == 10 ? KernelFamily::Coulomb2D : KernelFamily::LaplaceGreen2D);
  const int dim = kernel_dim(fam);
  const ExternalPotential V = dim == 3 ? harmonic_trap({1, 1, 2}) : harmonic_trap({1, 2, 1});
  const double h = (dim == 3 && !b.opts.full) ? 0.25 : 0.125;
  const auto g = cube(dim, 8, h);
  const std::vector<double> betas{-10, -5, -1, 1, 5, 10};
  const std::vector<std::string> cols{"E_g", "mu_g", "E_kin", "E_pot", "E_int", "I_h"};
  std::vector<std::vector<double>> t;
  if (id == 8)
    t = {{1.6370, 1.2630, 1.0990, 9.1197E-01, -3.7401E-01, -3.39E-10},
         {1.8212, 1.6397, 1.0467, 9.5594E-01, -1.8147E-01, -3.63E-10},
         {1.9646, 1.9292, 1.0089, 9.9118E-01, -3.5462E-02, -3.87E-10},
         {2.0351, 2.0702, 9.9128E-01, 1.0088, 3.5064E-02, -3.86E-10},
         {2.1739, 2.3454, 9.5831E-01, 1.0441, 1.7151E-01, -4.30E-10},
         {2.3431, 2.6772, 9.2101E-01, 1.0880, 3.3408E-01, -1.16E-10}};
  else if (id == 10)
    t = {{0.1367, -1.4536, 1.2611, 4.6592E-01, -1.5903, 1.89E-10},
         {0.8698, 0.1933, 9.4226E-01, 6.0401E-01, -6.7651E-01, 2.37E-10},
         {1.3808, 1.2600, 7.8098E-01, 7.2058E-01, -1.2080E-01, 2.60E-10},
         {1.6163, 1.7311, 7.2201E-01, 7.7942E-01, 1.1483E-01, -2.61E-10},
         {2.0551, 2.5801, 6.3379E-01, 8.9629E-01, 5.2501E-01, -2.65E-10},
         {2.5557, 3.5132, 5.5977E-01, 1.0385, 9.5748E-01, -2.69E-10}};
  else
    t = {{1.3533, 1.1432, 9.8061E-01, 5.8272E-01, -2.1008E-01, 2.44E-10},
         {1.4429, 1.3691, 8.5784E-01, 6.5889E-01, -7.3819E-02, 2.54E-10},
         {1.4913, 1.4819, 7.7024E-01, 7.3045E-01, -9.3826E-03, 2.59E-10},
         {1.5073, 1.5139, 7.3046E-01, 7.7025E-01, 6.5762E-03, -2.62E-10},
         {1.5221, 1.5260, 6.5959E-01, 8.5854E-01, 3.9516E-03, -2.70E-10},
         {1.5076, 1.4420, 5.8770E-01, 9.8559E-01, -6.5660E-02, -2.81E-10}};
  const PotentialMethod method = default_method(fam);
  for (std::size_t i = 0; i < betas.size(); ++i) {
    std::vector<std::size_t> s;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      s.push_back(b.slot("GF-NUFFT", "beta=" + num(betas[i]), cols[j], t[i][j]));
      b.provenance(s.back(), "GF-" + std::string(to_string(method)), fam, g, 1e-2);
      b.at(s.back()).reference = "eps0=1e-10";
    }
    const GsRun r = gs_run(gs_config(fam, V, betas[i], g, method, 1e-10, b.opts.tol));
    const auto& e = r.report;
    const double vals[6] = {e.e_total, e.mu, e.e_kin, e.e_pot, e.e_int, e.virial_residual};
    for (std::size_t j = 0; j < cols.size(); ++j) b.done(s[j], vals[j], j == 0 ? r.seconds : 0.0);
  }
}

// ---------------------------------------------------------------- dynamics tables

struct DynRun {
  UniformGrid grid;
  CVec psi;
  RVec potential;
  double seconds = 0.0;
};

DynRun dyn_run(KernelFamily fam, double beta, const UniformGrid& g, double tau, double t_end, PotentialMethod m,
               double tol) {
  DynamicsConfig c;
  c.kernel = make_kernel(fam);
  c.grid = g;
  c.V = harmonic_trap();
  c.beta = beta;
  c.tau = tau;
  c.t_end = t_end;
  c.method = m;
  c.solver.tol = tol;
  c.trace_energy = false;
  const auto r = evolve(gaussian_wavepacket(g), c);
  return {g, r.psi.values, r.potential.values, r.seconds};
}

struct DynBlock {
  std::string label;
  PotentialMethod method;
  std::vector<GsColumn> cols;
  std::vector<std::string> quantities;  // subset of e_psi, e_rho, e_potential
  std::vector<double> targets;          // [quantity][beta][column]
};

void dyn_error_table(Builder& b, KernelFamily fam, double tau, double t_end, double ref_L, double ref_h,
                     const std::vector<DynBlock>& blocks, std::size_t budget) {
  const int dim = kernel_dim(fam);
  const std::vector<double> betas{-5, 5};
  const KernelSpec k = make_kernel(fam);
  std::map<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>, std::size_t> slots;
  for (std::size_t bi = 0; bi < blocks.size(); ++bi)
    for (std::size_t q = 0; q < blocks[bi].quantities.size(); ++q)
      for (std::size_t be = 0; be < betas.size(); ++be)
        for (std::size_t c = 0; c < blocks[bi].cols.size(); ++c) {
          const std::size_t ti = (q * betas.size() + be) * blocks[bi].cols.size() + c;
          const auto s = b.slot(blocks[bi].label, blocks[bi].quantities[q] + " beta=" + num(betas[be]),
                                blocks[bi].cols[c].label, pick(blocks[bi].targets, ti));
          slots[{bi, q, be, c}] = s;
          b.provenance(s, "TS-" + std::string(to_string(blocks[bi].method)), fam,
                       cube(dim, blocks[bi].cols[c].L, blocks[bi].cols[c].h), tau);
        }

  const auto ref_grid = cube(dim, ref_L, ref_h);
  const PotentialMethod ref_method = default_method(fam);
  const std::string ref_label =
      "TS-" + std::string(to_string(ref_method)) + " " + grid_label(ref_grid) + " tau=" + num(tau) + " 4th order";
  for (std::size_t be = 0; be < betas.size(); ++be) {
    const double beta = betas[be];
    std::optional<DynRun> ref;
    if (ref_grid.size() <= budget) {
      ref = dyn_run(fam, beta, ref_grid, tau, t_end, ref_method, b.opts.tol);
      if (b.opts.log)
        *b.opts.log << "table " << b.res.id << " | reference beta=" << num(beta) << " " << ref_label << " ["
                    << num(ref->seconds) << " s]" << std::endl;
    }
    RVec ref_rho;
    if (ref) {
      ref_rho.resize(ref->psi.size());
      for (std::size_t i = 0; i < ref_rho.size(); ++i) ref_rho[i] = std::norm(ref->psi[i]);
    }
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
      const auto& blk = blocks[bi];
      for (std::size_t c = 0; c < blk.cols.size(); ++c) {
        const auto g = cube(dim, blk.cols[c].L, blk.cols[c].h);
        std::vector<std::size_t> s;
        for (std::size_t q = 0; q < blk.quantities.size(); ++q) {
          s.push_back(slots[{bi, q, be, c}]);
          b.at(s.back()).reference = ref_label;
        }
        std::string why;
        if (!ref)
          why = "reference grid over budget";
        else if (g.size() > budget)
          why = "grid over budget";
        else if (!(blk.cols[c].h > ref_h * (1 + 1e-12)))
          why = "reference not finer";
        if (!why.empty()) {
          for (auto i : s) b.skip(i, why);
          continue;
        }
        const DynRun r = dyn_run(fam, beta, g, tau, t_end, blk.method, b.opts.tol);
        const CVec rp = transfer(ref->grid, ref->psi, g);
        for (std::size_t q = 0; q < blk.quantities.size(); ++q) {
          double e = kNaN;
          const std::string& name = blk.quantities[q];
          if (name == "e_psi") {
            e = relative_max_error(r.psi, rp);
          } else if (name == "e_rho") {
            RVec rho(g.size()), rr(g.size());
            for (std::size_t i = 0; i < rho.size(); ++i) {
              rho[i] = std::norm(r.psi[i]);
              rr[i] = std::norm(rp[i]);
            }
            e = relative_max_error(rho, rr);
          } else {
            e = relative_max_error(r.potential, reference_potential(k, ref->grid, ref_rho, ref->potential, g, b.opts.tol));
          }
          b.done(s[q], e, q == 0 ? r.seconds : 0.0);
        }
      }
    }
  }
}

void table_dynamics(Builder& b) {
  const bool full = b.opts.full;
  switch (b.res.id) {
    case 13: {
      const auto cols = h_columns(8, {1, 0.5, 0.25, 0.125});
      dyn_error_table(b, KernelFamily::Coulomb3D, 1e-3, 0.125, 8, full ? 0.125 : 0.25,
                      {{"TS-NUFFT",
                        default_method(KernelFamily::Coulomb3D),
                        cols,
                        {"e_psi", "e_potential"},
                        {5.461E-03, 1.011E-05, 9.297E-12, 1.492E-13, 3.997E-03, 7.879E-06, 6.959E-12, 1.348E-13,
                         7.890E-03, 4.466E-06, 4.745E-12, 6.992E-14, 6.563E-03, 2.828E-06, 1.081E-12, 6.872E-14}},
                       {"TS-DST",
                        PotentialMethod::Dst,
                        cols,
                        {"e_psi", "e_rho", "e_potential"},
                        {2.561E-02, 3.024E-02, 3.025E-02, 3.025E-02, 2.753E-02, 3.024E-02, 3.025E-02, 3.025E-02,
                         5.567E-03, 1.444E-05, 2.397E-07, 2.441E-07, 5.590E-03, 1.416E-05, 2.560E-07, 2.568E-07,
                         1.099E-01, 1.099E-01, 1.099E-01, 1.099E-01, 1.117E-01, 1.117E-01, 1.117E-01, 1.117E-01}}},
                      cube_points(3, 128));
      break;
    }
    case 14: {
      const double tau = full ? 1e-4 : 1e-3, ref_h = full ? 1.0 / 16 : 0.125, lh = full ? 0.125 : 0.25;
      const auto cols = h_columns(16, {1, 0.5, 0.25, 0.125});
      std::vector<GsColumn> lcols;
      for (double L : {8.0, 16.0, 32.0, 64.0}) lcols.push_back({"L=" + num(L), L, lh});
      dyn_error_table(b, KernelFamily::Coulomb2D, tau, 0.5, 16, ref_h,
                      {{"TS-NUFFT (L=16)",
                        PotentialMethod::NufftFull,
                        cols,
                        {"e_psi", "e_potential"},
                        {1.582E-01, 7.468E-03, 4.746E-06, 2.954E-12, 5.118E-02, 7.756E-04, 2.476E-10, 1.268E-12,
                         2.219E-02, 4.242E-03, 4.169E-06, 3.756E-12, 3.235E-02, 2.451E-04, 3.117E-11, 7.586E-13}},
                       {"TS-DST (L=16)",
                        PotentialMethod::Dst,
                        cols,
                        {"e_psi", "e_potential"},
                        {1.175E-01, 5.576E-02, 6.311E-02, 6.312E-02, 6.477E-02, 6.308E-02, 6.313E-02, 6.313E-02,
                         4.286E-02, 2.449E-02, 2.449E-02, 2.449E-02, 6.854E-02, 4.412E-02, 4.455E-02, 4.478E-02}},
                       {"TS-DST (h=1/8)",
                        PotentialMethod::Dst,
                        lcols,
                        {"e_psi", "e_potential"},
                        {1.263E-01, 6.312E-02, 3.156E-02, 1.578E-02, 1.264E-01, 6.313E-02, 3.156E-02, 1.578E-02,
                         4.907E-02, 2.449E-02, 1.021E-02, 4.999E-03, 9.038E-02, 4.500E-02, 1.875E-02, 9.181E-03}}},
                      cube_points(2, 1024));
      break;
    }
    case 15: {
      const double tau = full ? 1e-4 : 1e-3, ref_h = full ? 1.0 / 16 : 0.125;
      dyn_error_table(b, KernelFamily::LaplaceGreen2D, tau, 0.5, 16, ref_h,
                      {{"TS-NUFFT",
                        PotentialMethod::NufftFull,
                        h_columns(16, {1, 0.5, 0.25, 0.125}),
                        {"e_psi", "e_potential"},
                        {5.833E-02, 2.599E-04, 3.211E-09, 7.524E-13, 2.658E-02, 9.083E-05, 3.395E-12, 1.124E-12,
                         1.329E-02, 8.840E-05, 1.072E-09, 3.974E-13, 4.645E-03, 2.805E-06, 8.322E-13, 5.821E-13}}},
                      cube_points(2, 1024));
      break;
    }
  }
}

// ---------------------------------------------------------------- run() helpers

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class OutDir {
 public:
  explicit OutDir(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
  }
  std::string path(const std::string& name) {
    files.push_back(name);
    return (dir_ / name).string();
  }
  std::ofstream open(const std::string& name) {
    std::ofstream f(path(name));
    if (!f) throw std::runtime_error("cannot write " + (dir_ / name).string());
    f.precision(17);
    return f;
  }
  std::vector<std::string> files;

 private:
  fs::path dir_;
};

json grid_json(const UniformGrid& g) {
  json j;
  j["dim"] = g.dim;
  j["L"] = std::vector<double>(g.L.begin(), g.L.begin() + g.dim);
  j["N"] = std::vector<int>(g.n.begin(), g.n.begin() + g.dim);
  return j;
}

void run_potential(const RunConfig& cfg, OutDir& out, json& m, std::ostream& log) {
  const auto rho = gaussian_density(cfg.density, cfg.grid);
  const auto u = solve_potential(cfg.kernel, rho, cfg.method, cfg.solver_options());
  write_field(out.path("density.field"), rho);
  write_field(out.path("potential.field"), u);
  double eh = kNaN;
  try {
    eh = error_eh(exact_potential(cfg.kernel.family, cfg.density, cfg.grid), u);
  } catch (const std::invalid_argument&) {
    // No closed-form or quadrature reference for this kernel/density.
  }
  auto f = out.open("potential.csv");
  f << "kernel,method,dim,L,h,N,sigma,anisotropy,tol,e_h\n";
  const auto& g = cfg.grid;
  f << to_string(cfg.kernel.family) << ',' << to_string(cfg.method) << ',' << g.dim << ','
    << per_axis(g, [&](int a) { return num(g.L[a]); }) << ',' << per_axis(g, [&](int a) { return h_label(g.h[a]); })
    << ',' << per_axis(g, [&](int a) { return std::to_string(g.n[a]); }) << ',' << format_sci(cfg.density.sigma) << ','
    << format_sci(cfg.density.gamma) << ',' << format_sci(cfg.tol) << ',' << format_sci(eh) << '\n';
  if (!std::isnan(eh)) log << "e_h = " << format_sci(eh) << '\n';
  m["grid"] = grid_json(g);
  m["e_h"] = std::isnan(eh) ? json(nullptr) : json(eh);
}

void run_groundstate(const RunConfig& cfg, OutDir& out, json& m, std::ostream& log) {
  const auto gc = cfg.groundstate_config();
  const auto r = compute_ground_state(gc);
  write_field(out.path("phi_g.field"), r.phi_g);
  write_field(out.path("potential.field"), r.potential);
  const auto& e = r.report;
  {
    auto f = out.open("energy.csv");
    f << "kernel,method,beta,E_g,mu_g,E_kin,E_pot,E_int,I_h,steps,residual\n";
    const double res = r.levels.empty() ? kNaN : r.levels.back().residual;
    f << to_string(cfg.kernel.family) << ',' << to_string(cfg.method) << ',' << num(cfg.beta) << ','
      << format_sci(e.e_total) << ',' << format_sci(e.mu) << ',' << format_sci(e.e_kin) << ','
      << format_sci(e.e_pot) << ',' << format_sci(e.e_int) << ',' << format_sci(e.virial_residual) << ',' << r.steps
      << ',' << format_sci(res) << '\n';
  }
  {
    auto f = out.open("residuals.csv");
    f << "step,residual" << (r.energy_history.empty() ? "" : ",energy") << '\n';
    for (std::size_t i = 0; i < r.residual_history.size(); ++i) {
      f << i + 1 << ',' << format_sci(r.residual_history[i]);
      if (i < r.energy_history.size()) f << ',' << r.energy_history[i];
      f << '\n';
    }
  }
  log << "E_g = " << format_sci(e.e_total) << "  mu_g = " << format_sci(e.mu) << "  I_h = " << format_sci(e.virial_residual)
      << "  steps = " << r.steps << '\n';
  m["grid"] = grid_json(cfg.grid);
  json lv = json::array();
  for (const auto& l : r.levels)
    lv.push_back({{"N", std::vector<int>(l.grid.n.begin(), l.grid.n.begin() + l.grid.dim)},
                  {"steps", l.steps},
                  {"residual", l.residual},
                  {"seconds", l.seconds}});
  m["levels"] = lv;
}

std::string time_tag(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", t);
  return buf;
}

void run_dynamics(const RunConfig& cfg, OutDir& out, json& m, std::ostream& log) {
  DynamicsConfig d;
  if (cfg.demo == "honeycomb") {
    d = (cfg.full ? HoneycombDemo::full() : HoneycombDemo{}).config();
    d.solver.tol = cfg.tol;
    d.trace_every = static_cast<int>(std::max(1L, d.steps() / 100));
    m["demo"] = cfg.full ? "honeycomb (full)" : "honeycomb (reduced)";
  } else {
    d = cfg.dynamics_config();
  }
  const auto r = evolve(gaussian_wavepacket(d.grid), d);
  write_field(out.path("psi.field"), r.psi);
  write_field(out.path("potential.field"), r.potential);
  for (const auto& s : r.snapshots) write_field(out.path("density_t" + time_tag(s.t) + ".field"), s.density);
  {
    auto f = out.open("trace.csv");
    f << "t,mass,E,E_kin,E_pot,E_int\n";
    for (const auto& s : r.trace.samples)
      f << s.t << ',' << s.mass << ',' << s.e_total << ',' << s.e_kin << ',' << s.e_pot << ',' << s.e_int << '\n';
  }
  const auto& tr = r.trace.samples;
  double drift = 0.0;
  for (const auto& s : tr) drift = std::max(drift, std::abs(s.mass - tr.front().mass));
  log << r.steps << " steps, " << r.snapshots.size() << " snapshots, max mass drift " << format_sci(drift) << '\n';
  m["grid"] = grid_json(d.grid);
  m["tau"] = d.tau;
  m["t_end"] = d.t_end;
  m["steps"] = r.steps;
  m["max_mass_drift"] = drift;
}

}  // namespace

std::vector<int> table_ids() { return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15}; }

std::string table_title(int id) {
  switch (id) {
    case 1: return "3D Coulomb potential errors by method, h and L";
    case 2: return "3D Coulomb potential errors for anisotropic densities";
    case 3: return "2D Coulomb potential errors by method, h and L";
    case 4: return "2D Coulomb potential errors for anisotropic densities";
    case 5: return "2D Poisson potential errors, NUFFT and radial finite differences";
    case 6: return "NUFFT 2D Poisson solve time scaling";
    case 7: return "3D Coulomb ground-state errors";
    case 8: return "3D Coulomb ground-state energies";
    case 9: return "2D Coulomb ground-state errors";
    case 10: return "2D Coulomb ground-state energies";
    case 11: return "2D Poisson ground-state errors";
    case 12: return "2D Poisson ground-state energies";
    case 13: return "3D Coulomb dynamics errors at t=1/8";
    case 14: return "2D Coulomb dynamics errors at t=0.5";
    case 15: return "2D Poisson dynamics errors at t=0.5";
  }
  throw std::invalid_argument("unknown table id " + std::to_string(id) + " (expected 1..15)");
}

TableResult reproduce_table(int id, const TableOptions& opts) {
  const auto t0 = Clock::now();
  Builder b(id, opts);
  switch (id) {
    case 1: table_coulomb_sweep(b, 3); break;
    case 2: table_anisotropic(b, 3); break;
    case 3: table_coulomb_sweep(b, 2); break;
    case 4: table_anisotropic(b, 2); break;
    case 5: table_poisson2d(b); break;
    case 6: table_timing(b); break;
    case 7:
    case 9:
    case 11: table_gs_errors(b); break;
    case 8:
    case 10:
    case 12: table_energies(b); break;
    default: table_dynamics(b); break;
  }
  b.res.seconds = since(t0);
  return b.res;
}

void write_table_csv(std::ostream& out, const TableResult& t) {
  out << "table,block,row,column,value,target,method,kernel,dim,L,h,N,tau,reference,status\n";
  for (const auto& c : t.cells) {
    out << t.id << ',' << csv_escape(c.block) << ',' << csv_escape(c.row) << ',' << csv_escape(c.column) << ','
        << format_sci(c.value) << ',' << (c.target ? format_sci(*c.target) : "") << ',' << csv_escape(c.method) << ','
        << c.kernel << ',' << c.dim << ',' << c.L << ',' << c.h << ',' << csv_escape(c.N) << ','
        << (c.tau > 0 ? format_sci(c.tau) : "") << ',' << csv_escape(c.reference) << ',' << csv_escape(c.status)
        << '\n';
  }
}

RunReport run(const RunConfig& cfg, std::ostream& log) {
  const auto t0 = Clock::now();
  OutDir out(cfg.out);
  json m;
  m["command"] = to_string(cfg.command);
  m["library_version"] = library_version();
  m["threads"] = fft_threads();
  m["tol"] = cfg.tol;
  m["full"] = cfg.full;

  switch (cfg.command) {
    case Command::Potential:
      m["kernel"] = to_string(cfg.kernel.family);
      m["method"] = to_string(cfg.method);
      run_potential(cfg, out, m, log);
      break;
    case Command::Groundstate:
      m["kernel"] = to_string(cfg.kernel.family);
      m["method"] = to_string(cfg.method);
      run_groundstate(cfg, out, m, log);
      break;
    case Command::Dynamics:
      if (cfg.demo.empty()) {
        m["kernel"] = to_string(cfg.kernel.family);
        m["method"] = to_string(cfg.method);
      }
      run_dynamics(cfg, out, m, log);
      break;
    case Command::ReproduceTable: {
      TableOptions o;
      o.full = cfg.full;
      o.tol = cfg.tol;
      o.log = &log;
      const auto t = reproduce_table(cfg.table.id, o);
      {
        auto f = out.open("table_" + std::to_string(t.id) + ".csv");
        write_table_csv(f, t);
      }
      m["table"] = t.id;
      m["title"] = t.title;
      json cells = json::array();
      for (const auto& c : t.cells)
        cells.push_back({{"block", c.block}, {"row", c.row}, {"column", c.column}, {"seconds", c.seconds}});
      m["cell_seconds"] = cells;
      if (t.id == 6) m["note"] = "values are wall-clock timings and vary between runs";
      break;
    }
  }

  RunReport rep;
  rep.seconds = since(t0);
  rep.files = out.files;
  m["files"] = out.files;
  m["wall_seconds"] = rep.seconds;
  m["config"] = cfg.source;
  {
    std::ofstream f(fs::path(cfg.out) / "manifest.json");
    if (!f) throw std::runtime_error("cannot write manifest.json");
    f << m.dump(2) << '\n';
  }
  rep.files.push_back("manifest.json");
  return rep;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConvergenceError*>(&e)) return 3;
  if (dynamic_cast<const std::invalid_argument*>(&e)) return 2;
  return 4;
}

}  // namespace nlse
