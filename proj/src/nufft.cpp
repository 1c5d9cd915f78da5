#include "nlse/nufft.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nlse/specfun.hpp"

namespace nlse {

const char* to_string(NodeTag t) {
  switch (t) {
    case NodeTag::SphericalShell: return "spherical-shell";
    case NodeTag::PolarShell: return "polar-shell";
    case NodeTag::Regular: return "regular";
  }
  return "regular";
}

namespace {

QuadratureRule radial_rule(double P, int panels, int q) {
  if (!(P > 0.0)) throw std::invalid_argument("node set: P must be positive");
  if (panels < 1) throw std::invalid_argument("node set: need at least one radial panel");
  if (q < 4) throw std::invalid_argument("node set: q_per_panel must be at least 4");
  QuadratureRule out;
  out.a = 0.0;
  out.b = P;
  for (int p = 0; p < panels; ++p) {
    auto r = gauss_legendre(q, P * p / panels, P * (p + 1) / panels);
    out.nodes.insert(out.nodes.end(), r.nodes.begin(), r.nodes.end());
    out.weights.insert(out.weights.end(), r.weights.begin(), r.weights.end());
  }
  return out;
}

}  // namespace

FrequencyNodeSet build_spherical_nodes(double P, int n_radial_panels, int q_per_panel, int n_theta, int n_phi,
                                       const std::array<double, 3>& axes, bool half) {
  if (n_theta < 1 || n_phi < 1) throw std::invalid_argument("node set: angular counts must be positive");
  if (half && n_phi % 2) throw std::invalid_argument("node set: half sets need an even n_phi");
  auto rad = radial_rule(P, n_radial_panels, q_per_panel);
  auto mu = gauss_legendre(n_theta, -1.0, 1.0);
  const int nphi_used = half ? n_phi / 2 : n_phi;
  const double dphi = 2.0 * kPi / n_phi;
  const double det = std::abs(axes[0] * axes[1] * axes[2]);
  FrequencyNodeSet s;
  s.dim = 3;
  s.tag = NodeTag::SphericalShell;
  s.P = P;
  s.axes = axes;
  s.half = half;
  const std::size_t M = rad.size() * mu.size() * nphi_used;
  s.k.reserve(3 * M);
  s.w.reserve(M);
  s.kabs.reserve(M);
  for (std::size_t it = 0; it < mu.size(); ++it) {
    const double c = mu.nodes[it], sn = std::sqrt(std::max(0.0, 1.0 - c * c));
    for (int ip = 0; ip < nphi_used; ++ip) {
      const double ph = ip * dphi;
      const double ox = axes[0] * sn * std::cos(ph), oy = axes[1] * sn * std::sin(ph), oz = axes[2] * c;
      const double an = std::sqrt(ox * ox + oy * oy + oz * oz);
      const double wang = mu.weights[it] * dphi * det / (an * an) * (half ? 2.0 : 1.0);
      for (std::size_t ir = 0; ir < rad.size(); ++ir) {
        const double r = rad.nodes[ir];
        s.k.push_back(r * ox);
        s.k.push_back(r * oy);
        s.k.push_back(r * oz);
        s.w.push_back(rad.weights[ir] * wang);
        s.kabs.push_back(r * an);
      }
    }
  }
  return s;
}

FrequencyNodeSet build_polar_nodes(double P, int n_radial_panels, int q_per_panel, int n_phi,
                                   const std::array<double, 2>& axes, bool half) {
  if (n_phi < 1) throw std::invalid_argument("node set: n_phi must be positive");
  if (half && n_phi % 2) throw std::invalid_argument("node set: half sets need an even n_phi");
  auto rad = radial_rule(P, n_radial_panels, q_per_panel);
  const int nphi_used = half ? n_phi / 2 : n_phi;
  const double dphi = 2.0 * kPi / n_phi;
  const double det = std::abs(axes[0] * axes[1]);
  FrequencyNodeSet s;
  s.dim = 2;
  s.tag = NodeTag::PolarShell;
  s.P = P;
  s.axes = {axes[0], axes[1], 1.0};
  s.half = half;
  for (int ip = 0; ip < nphi_used; ++ip) {
    const double ph = ip * dphi;
    const double ox = axes[0] * std::cos(ph), oy = axes[1] * std::sin(ph);
    const double an = std::hypot(ox, oy);
    const double wang = dphi * det / an * (half ? 2.0 : 1.0);
    for (std::size_t ir = 0; ir < rad.size(); ++ir) {
      const double r = rad.nodes[ir];
      s.k.push_back(r * ox);
      s.k.push_back(r * oy);
      s.w.push_back(rad.weights[ir] * wang);
      s.kabs.push_back(r * an);
    }
  }
  return s;
}

FrequencyNodeSet build_regular_nodes(const UniformGrid& g) {
  FrequencyNodeSet s;
  s.dim = g.dim;
  s.tag = NodeTag::Regular;
  s.P = g.min_bandwidth();
  const int n0 = g.n[0], n1 = g.dim > 1 ? g.n[1] : 1, n2 = g.dim > 2 ? g.n[2] : 1;
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n1; ++j)
      for (int k = 0; k < n2; ++k) {
        double kk[3] = {g.k(0, i), g.dim > 1 ? g.k(1, j) : 0.0, g.dim > 2 ? g.k(2, k) : 0.0};
        double a2 = 0.0;
        for (int a = 0; a < g.dim; ++a) {
          s.k.push_back(kk[a]);
          a2 += kk[a] * kk[a];
        }
        s.w.push_back(1.0);
        s.kabs.push_back(std::sqrt(a2));
      }
  return s;
}

ShellCounts shell_counts_for_phase(int dim, double phase) {
  phase = std::max(phase, 0.0);
  const double ell = phase + 11.5 * std::cbrt(phase) + 8.0;
  ShellCounts c;
  c.n_phi = static_cast<int>(std::ceil(ell)) + 1;
  if (c.n_phi % 2) ++c.n_phi;
  c.n_theta = dim == 3 ? static_cast<int>(std::ceil((ell + 1.0) / 2.0)) : 0;
  const double om = 0.5 * phase;
  c.n_radial_panels = 1;
  c.q_per_panel = std::max(8, static_cast<int>(std::ceil((om + 11.5 * std::cbrt(om) + 8.0) / 2.0)));
  return c;
}

ShellCounts default_shell_counts(const UniformGrid& g) {
  int n = 0;
  for (int a = 0; a < g.dim; ++a) n = std::max(n, g.n[a]);
  ShellCounts c;
  c.n_radial_panels = std::max(1, n / 8);
  c.q_per_panel = 10;
  c.n_theta = g.dim == 3 ? n : 0;
  c.n_phi = n;
  return c;
}

SpreadParams spread_params_for_tol(double tol) {
  if (!(tol >= 1e-15 && tol <= 1e-2)) throw std::invalid_argument("nufft: tol must lie in [1e-15, 1e-2]");
  SpreadParams p;
  p.width = std::min(16, static_cast<int>(std::ceil(std::log10(1.0 / tol))) + 2);
  p.beta = 2.30 * p.width;
  p.oversampling = 2;
  return p;
}

namespace {

double es_kernel(double z, double beta) {
  const double s = 1.0 - z * z;
  return s > 0.0 ? std::exp(beta * (std::sqrt(s) - 1.0)) : 0.0;
}

}  // namespace

NufftPlan::NufftPlan(const UniformGrid& g, const FrequencyNodeSet& nodes, double tol)
    : grid_(g), dim_(g.dim), m_(nodes.size()), tol_(tol), sp_(spread_params_for_tol(tol)) {
  if (nodes.dim != g.dim) throw std::invalid_argument("nufft: node dimension does not match grid");
  const int w = sp_.width;
  for (int a = 0; a < dim_; ++a) {
    nf_[a] = sp_.oversampling * g.n[a];
    delta_[a] = 2.0 * kPi / nf_[a];
  }
  // Node phases t = k h reduced to [-pi, pi).
  t_.resize(m_ * dim_);
  for (std::size_t m = 0; m < m_; ++m)
    for (int a = 0; a < dim_; ++a) {
      double t = nodes.k[m * dim_ + a] * g.h[a];
      t = std::remainder(t, 2.0 * kPi);
      if (t >= kPi) t -= 2.0 * kPi;
      t_[m * dim_ + a] = t;
    }

  // Deconvolution factors: psi_hat(j) = int phi(t) cos(j t) dt over the kernel support.
  const int nq = 4 * w + 40;
  auto gl = gauss_legendre(nq, 0.0, 1.0);
  for (int a = 0; a < dim_; ++a) {
    const double alpha = 0.5 * w * delta_[a];
    const int N = g.n[a];
    deconv_[a].resize(N);
    for (int j = 0; j < N; ++j) {
      const int jp = j - N / 2;  // centered index; x_j = jp h
      double s = 0.0;
      for (std::size_t q = 0; q < gl.size(); ++q)
        s += gl.weights[q] * es_kernel(gl.nodes[q], sp_.beta) * std::cos(jp * alpha * gl.nodes[q]);
      deconv_[a][j] = 1.0 / (2.0 * alpha * s);
    }
  }

  // Bounding block of touched fine-grid indices.
  std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    lo[a] = 1 << 30;
    hi[a] = -(1 << 30);
  }
  for (std::size_t m = 0; m < m_; ++m)
    for (int a = 0; a < dim_; ++a) {
      const int s = static_cast<int>(std::ceil(t_[m * dim_ + a] / delta_[a] - 0.5 * w));
      lo[a] = std::min(lo[a], s);
      hi[a] = std::max(hi[a], s + w - 1);
    }
  double full_cost = 1.0, block_cost = 0.0;
  std::size_t fine_total = 1;
  for (int a = 0; a < dim_; ++a) fine_total *= static_cast<std::size_t>(nf_[a]);
  full_cost = 1.5 * static_cast<double>(fine_total) * std::log2(static_cast<double>(fine_total) + 1.0);
  bool fits = m_ > 0;
  for (int a = 0; a < dim_; ++a) {
    if (m_ == 0) break;
    blk_[a] = hi[a] - lo[a] + 1;
    if (blk_[a] >= nf_[a]) fits = false;
  }
  if (fits) {
    // Separable partial DFT: contract one axis at a time.
    double pre = 1.0;
    for (int a = 0; a < dim_; ++a) {
      double post = 1.0;
      for (int b = a + 1; b < dim_; ++b) post *= g.n[b];
      block_cost += pre * g.n[a] * blk_[a] * post;
      pre *= blk_[a];
    }
  }
  pruned_ = fits && block_cost < full_cost;
  if (pruned_) {
    for (int a = 0; a < dim_; ++a) {
      lo_[a] = lo[a];
      const int N = g.n[a];
      dft_[a].resize(static_cast<std::size_t>(blk_[a]) * N);
      for (int l = 0; l < blk_[a]; ++l) {
        const double tl = (lo[a] + l) * delta_[a];
        for (int j = 0; j < N; ++j) dft_[a][static_cast<std::size_t>(l) * N + j] = std::polar(1.0, -(j - N / 2) * tl);
      }
    }
  } else {
    for (int a = 0; a < dim_; ++a) {
      lo_[a] = 0;
      blk_[a] = nf_[a];
    }
  }
}

namespace {

// Per-axis kernel samples for one node: start index and w values.
inline void node_kernel(double t, double delta, int w, double beta, int& start, double* vals) {
  start = static_cast<int>(std::ceil(t / delta - 0.5 * w));
  const double inv = 2.0 / (w * delta);
  for (int i = 0; i < w; ++i) {
    const double z = ((start + i) * delta - t) * inv;
    vals[i] = es_kernel(z, beta);
  }
}

inline int wrap(int l, int n) {
  l %= n;
  return l < 0 ? l + n : l;
}

}  // namespace

CVec NufftPlan::fine_forward(const CVec& g) const {
  const int n0 = grid_.n[0], n1 = dim_ > 1 ? grid_.n[1] : 1, n2 = dim_ > 2 ? grid_.n[2] : 1;
  if (!pruned_) {
    const int f0 = nf_[0], f1 = dim_ > 1 ? nf_[1] : 1, f2 = dim_ > 2 ? nf_[2] : 1;
    CVec G(static_cast<std::size_t>(f0) * f1 * f2, cplx(0.0, 0.0));
    for (int i = 0; i < n0; ++i) {
      const std::size_t fi = wrap(i - n0 / 2, f0);
      for (int j = 0; j < n1; ++j) {
        const std::size_t fj = dim_ > 1 ? wrap(j - n1 / 2, f1) : 0;
        const std::size_t src = (static_cast<std::size_t>(i) * n1 + j) * n2;
        const std::size_t dst = (fi * f1 + fj) * f2;
        for (int k = 0; k < n2; ++k) {
          const std::size_t fk = dim_ > 2 ? wrap(k - n2 / 2, f2) : 0;
          G[dst + fk] = g[src + k];
        }
      }
    }
    std::vector<int> shape(nf_.begin(), nf_.begin() + dim_);
    fft_c2c(shape, G.data(), -1);
    return G;
  }
  // Pruned: contract axis 0, then 1, then 2.
  const int b0 = blk_[0], b1 = dim_ > 1 ? blk_[1] : 1, b2 = dim_ > 2 ? blk_[2] : 1;
  CVec t1(static_cast<std::size_t>(b0) * n1 * n2, cplx(0.0, 0.0));
  const std::size_t row = static_cast<std::size_t>(n1) * n2;
  for (int l = 0; l < b0; ++l) {
    cplx* out = t1.data() + l * row;
    for (int i = 0; i < n0; ++i) {
      const cplx c = dft_[0][static_cast<std::size_t>(l) * n0 + i];
      const cplx* in = g.data() + i * row;
      for (std::size_t r = 0; r < row; ++r) out[r] += c * in[r];
    }
  }
  if (dim_ == 1) return t1;
  CVec t2(static_cast<std::size_t>(b0) * b1 * n2, cplx(0.0, 0.0));
  for (int l0 = 0; l0 < b0; ++l0)
    for (int l1 = 0; l1 < b1; ++l1) {
      cplx* out = t2.data() + (static_cast<std::size_t>(l0) * b1 + l1) * n2;
      for (int j = 0; j < n1; ++j) {
        const cplx c = dft_[1][static_cast<std::size_t>(l1) * n1 + j];
        const cplx* in = t1.data() + (static_cast<std::size_t>(l0) * n1 + j) * n2;
        for (int k = 0; k < n2; ++k) out[k] += c * in[k];
      }
    }
  if (dim_ == 2) return t2;
  CVec t3(static_cast<std::size_t>(b0) * b1 * b2);
  for (std::size_t p = 0; p < static_cast<std::size_t>(b0) * b1; ++p) {
    const cplx* in = t2.data() + p * n2;
    for (int l2 = 0; l2 < b2; ++l2) {
      const cplx* e = dft_[2].data() + static_cast<std::size_t>(l2) * n2;
      cplx s(0.0, 0.0);
      for (int k = 0; k < n2; ++k) s += e[k] * in[k];
      t3[p * b2 + l2] = s;
    }
  }
  return t3;
}

CVec NufftPlan::fine_backward(const CVec& B) const {
  const int n0 = grid_.n[0], n1 = dim_ > 1 ? grid_.n[1] : 1, n2 = dim_ > 2 ? grid_.n[2] : 1;
  CVec u(grid_.size());
  if (!pruned_) {
    CVec b = B;
    std::vector<int> shape(nf_.begin(), nf_.begin() + dim_);
    fft_c2c(shape, b.data(), +1);
    const int f1 = dim_ > 1 ? nf_[1] : 1, f2 = dim_ > 2 ? nf_[2] : 1;
    for (int i = 0; i < n0; ++i) {
      const std::size_t fi = wrap(i - n0 / 2, nf_[0]);
      for (int j = 0; j < n1; ++j) {
        const std::size_t fj = dim_ > 1 ? wrap(j - n1 / 2, f1) : 0;
        for (int k = 0; k < n2; ++k) {
          const std::size_t fk = dim_ > 2 ? wrap(k - n2 / 2, f2) : 0;
          u[(static_cast<std::size_t>(i) * n1 + j) * n2 + k] = b[(fi * f1 + fj) * f2 + fk];
        }
      }
    }
    return u;
  }
  // Adjoint of the pruned forward: contract axis 2, then 1, then 0 with conjugate matrices.
  const int b0 = blk_[0], b1 = dim_ > 1 ? blk_[1] : 1, b2 = dim_ > 2 ? blk_[2] : 1;
  CVec s2;
  const CVec* cur = &B;
  if (dim_ == 3) {
    s2.assign(static_cast<std::size_t>(b0) * b1 * n2, cplx(0.0, 0.0));
    for (std::size_t p = 0; p < static_cast<std::size_t>(b0) * b1; ++p) {
      cplx* out = s2.data() + p * n2;
      const cplx* in = B.data() + p * b2;
      for (int l2 = 0; l2 < b2; ++l2) {
        const cplx* e = dft_[2].data() + static_cast<std::size_t>(l2) * n2;
        const cplx c = in[l2];
        for (int k = 0; k < n2; ++k) out[k] += c * std::conj(e[k]);
      }
    }
    cur = &s2;
  }
  CVec s1;
  if (dim_ >= 2) {
    s1.assign(static_cast<std::size_t>(b0) * n1 * n2, cplx(0.0, 0.0));
    for (int l0 = 0; l0 < b0; ++l0)
      for (int l1 = 0; l1 < b1; ++l1) {
        const cplx* in = cur->data() + (static_cast<std::size_t>(l0) * b1 + l1) * n2;
        for (int j = 0; j < n1; ++j) {
          const cplx c = std::conj(dft_[1][static_cast<std::size_t>(l1) * n1 + j]);
          cplx* out = s1.data() + (static_cast<std::size_t>(l0) * n1 + j) * n2;
          for (int k = 0; k < n2; ++k) out[k] += c * in[k];
        }
      }
    cur = &s1;
  }
  std::fill(u.begin(), u.end(), cplx(0.0, 0.0));
  const std::size_t row = static_cast<std::size_t>(n1) * n2;
  for (int l = 0; l < b0; ++l) {
    const cplx* in = cur->data() + l * row;
    for (int i = 0; i < n0; ++i) {
      const cplx c = std::conj(dft_[0][static_cast<std::size_t>(l) * n0 + i]);
      cplx* out = u.data() + i * row;
      for (std::size_t r = 0; r < row; ++r) out[r] += c * in[r];
    }
  }
  return u;
}

CVec NufftPlan::u2n(const RVec& f) const {
  CVec z(f.begin(), f.end());
  return u2n(z);
}

CVec NufftPlan::u2n(const CVec& f) const {
  if (f.size() != grid_.size()) throw std::invalid_argument("nufft_u2n: field does not match plan grid");
  const int n0 = grid_.n[0], n1 = dim_ > 1 ? grid_.n[1] : 1, n2 = dim_ > 2 ? grid_.n[2] : 1;
  // Pre-correct by the kernel transform.
  CVec g(f.size());
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n1; ++j) {
      const double d01 = deconv_[0][i] * (dim_ > 1 ? deconv_[1][j] : 1.0);
      const std::size_t base = (static_cast<std::size_t>(i) * n1 + j) * n2;
      for (int k = 0; k < n2; ++k) g[base + k] = f[base + k] * (d01 * (dim_ > 2 ? deconv_[2][k] : 1.0));
    }
  const CVec G = fine_forward(g);
  const int w = sp_.width;
  const int s1 = dim_ > 1 ? blk_[1] : 1, s2 = dim_ > 2 ? blk_[2] : 1;
  double scale = 1.0;
  for (int a = 0; a < dim_; ++a) scale *= delta_[a] * grid_.h[a];
  CVec out(m_);
  double k0[16], k1[16], k2[16];
  int i0[16], i1[16], i2[16];
  for (std::size_t m = 0; m < m_; ++m) {
    int st[3];
    node_kernel(t_[m * dim_], delta_[0], w, sp_.beta, st[0], k0);
    for (int i = 0; i < w; ++i) i0[i] = pruned_ ? st[0] + i - lo_[0] : wrap(st[0] + i, nf_[0]);
    if (dim_ > 1) {
      node_kernel(t_[m * dim_ + 1], delta_[1], w, sp_.beta, st[1], k1);
      for (int i = 0; i < w; ++i) i1[i] = pruned_ ? st[1] + i - lo_[1] : wrap(st[1] + i, nf_[1]);
    }
    if (dim_ > 2) {
      node_kernel(t_[m * dim_ + 2], delta_[2], w, sp_.beta, st[2], k2);
      for (int i = 0; i < w; ++i) i2[i] = pruned_ ? st[2] + i - lo_[2] : wrap(st[2] + i, nf_[2]);
    }
    cplx acc(0.0, 0.0);
    if (dim_ == 1) {
      for (int a = 0; a < w; ++a) acc += k0[a] * G[i0[a]];
    } else if (dim_ == 2) {
      for (int a = 0; a < w; ++a) {
        const cplx* row = G.data() + static_cast<std::size_t>(i0[a]) * s1;
        cplx r(0.0, 0.0);
        for (int b = 0; b < w; ++b) r += k1[b] * row[i1[b]];
        acc += k0[a] * r;
      }
    } else {
      for (int a = 0; a < w; ++a) {
        cplx ra(0.0, 0.0);
        for (int b = 0; b < w; ++b) {
          const cplx* row = G.data() + (static_cast<std::size_t>(i0[a]) * s1 + i1[b]) * s2;
          double re = 0.0, im = 0.0;
          for (int c = 0; c < w; ++c) {
            re += k2[c] * row[i2[c]].real();
            im += k2[c] * row[i2[c]].imag();
          }
          ra += k1[b] * cplx(re, im);
        }
        acc += k0[a] * ra;
      }
    }
    out[m] = acc * scale;
  }
  return out;
}

CVec NufftPlan::n2u(const CVec& c) const {
  if (c.size() != m_) throw std::invalid_argument("nufft_n2u: coefficient count does not match node count");
  const int w = sp_.width;
  const int s0 = blk_[0], s1 = dim_ > 1 ? blk_[1] : 1, s2 = dim_ > 2 ? blk_[2] : 1;
  CVec B(static_cast<std::size_t>(s0) * s1 * s2, cplx(0.0, 0.0));
  double k0[16], k1[16], k2[16];
  int i0[16], i1[16], i2[16];
  for (std::size_t m = 0; m < m_; ++m) {
    const cplx cm = c[m];
    if (cm == cplx(0.0, 0.0)) continue;
    int st[3];
    node_kernel(t_[m * dim_], delta_[0], w, sp_.beta, st[0], k0);
    for (int i = 0; i < w; ++i) i0[i] = pruned_ ? st[0] + i - lo_[0] : wrap(st[0] + i, nf_[0]);
    if (dim_ > 1) {
      node_kernel(t_[m * dim_ + 1], delta_[1], w, sp_.beta, st[1], k1);
      for (int i = 0; i < w; ++i) i1[i] = pruned_ ? st[1] + i - lo_[1] : wrap(st[1] + i, nf_[1]);
    }
    if (dim_ > 2) {
      node_kernel(t_[m * dim_ + 2], delta_[2], w, sp_.beta, st[2], k2);
      for (int i = 0; i < w; ++i) i2[i] = pruned_ ? st[2] + i - lo_[2] : wrap(st[2] + i, nf_[2]);
    }
    if (dim_ == 1) {
      for (int a = 0; a < w; ++a) B[i0[a]] += k0[a] * cm;
    } else if (dim_ == 2) {
      for (int a = 0; a < w; ++a) {
        const cplx ca = k0[a] * cm;
        cplx* row = B.data() + static_cast<std::size_t>(i0[a]) * s1;
        for (int b = 0; b < w; ++b) row[i1[b]] += k1[b] * ca;
      }
    } else {
      for (int a = 0; a < w; ++a) {
        const cplx ca = k0[a] * cm;
        for (int b = 0; b < w; ++b) {
          const cplx cb = k1[b] * ca;
          cplx* row = B.data() + (static_cast<std::size_t>(i0[a]) * s1 + i1[b]) * s2;
          for (int cc = 0; cc < w; ++cc) row[i2[cc]] += k2[cc] * cb;
        }
      }
    }
  }
  CVec u = fine_backward(B);
  const int n0 = grid_.n[0], n1 = dim_ > 1 ? grid_.n[1] : 1, n2 = dim_ > 2 ? grid_.n[2] : 1;
  double scale = 1.0;
  for (int a = 0; a < dim_; ++a) scale *= delta_[a];
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n1; ++j) {
      const double d01 = scale * deconv_[0][i] * (dim_ > 1 ? deconv_[1][j] : 1.0);
      const std::size_t base = (static_cast<std::size_t>(i) * n1 + j) * n2;
      for (int k = 0; k < n2; ++k) u[base + k] *= d01 * (dim_ > 2 ? deconv_[2][k] : 1.0);
    }
  return u;
}

CVec nudft_direct_u2n(const UniformGrid& g, const FrequencyNodeSet& nodes, const CVec& f) {
  if (f.size() != g.size()) throw std::invalid_argument("nudft: field does not match grid");
  const int d = g.dim;
  const int n0 = g.n[0], n1 = d > 1 ? g.n[1] : 1, n2 = d > 2 ? g.n[2] : 1;
  const double hd = g.cell_volume();
  CVec out(nodes.size());
  std::vector<cplx> e0(n0), e1(n1), e2(n2);
  for (std::size_t m = 0; m < nodes.size(); ++m) {
    const double* k = nodes.node(m);
    for (int i = 0; i < n0; ++i) e0[i] = std::polar(1.0, -k[0] * g.x(0, i));
    for (int j = 0; j < n1; ++j) e1[j] = d > 1 ? std::polar(1.0, -k[1] * g.x(1, j)) : cplx(1.0, 0.0);
    for (int l = 0; l < n2; ++l) e2[l] = d > 2 ? std::polar(1.0, -k[2] * g.x(2, l)) : cplx(1.0, 0.0);
    cplx s(0.0, 0.0);
    std::size_t idx = 0;
    for (int i = 0; i < n0; ++i) {
      cplx si(0.0, 0.0);
      for (int j = 0; j < n1; ++j) {
        cplx sj(0.0, 0.0);
        for (int l = 0; l < n2; ++l) sj += e2[l] * f[idx++];
        si += e1[j] * sj;
      }
      s += e0[i] * si;
    }
    out[m] = s * hd;
  }
  return out;
}

CVec nudft_direct_u2n(const UniformGrid& g, const FrequencyNodeSet& nodes, const RVec& f) {
  CVec z(f.begin(), f.end());
  return nudft_direct_u2n(g, nodes, z);
}

CVec nudft_direct_n2u(const UniformGrid& g, const FrequencyNodeSet& nodes, const CVec& c) {
  if (c.size() != nodes.size()) throw std::invalid_argument("nudft: coefficient count does not match nodes");
  const int d = g.dim;
  const int n0 = g.n[0], n1 = d > 1 ? g.n[1] : 1, n2 = d > 2 ? g.n[2] : 1;
  CVec u(g.size(), cplx(0.0, 0.0));
  std::vector<cplx> e0(n0), e1(n1), e2(n2);
  for (std::size_t m = 0; m < nodes.size(); ++m) {
    const double* k = nodes.node(m);
    for (int i = 0; i < n0; ++i) e0[i] = std::polar(1.0, k[0] * g.x(0, i));
    for (int j = 0; j < n1; ++j) e1[j] = d > 1 ? std::polar(1.0, k[1] * g.x(1, j)) : cplx(1.0, 0.0);
    for (int l = 0; l < n2; ++l) e2[l] = d > 2 ? std::polar(1.0, k[2] * g.x(2, l)) : cplx(1.0, 0.0);
    std::size_t idx = 0;
    for (int i = 0; i < n0; ++i) {
      const cplx ci = c[m] * e0[i];
      for (int j = 0; j < n1; ++j) {
        const cplx cj = ci * e1[j];
        for (int l = 0; l < n2; ++l) u[idx++] += cj * e2[l];
      }
    }
  }
  return u;
}

}  // namespace nlse
