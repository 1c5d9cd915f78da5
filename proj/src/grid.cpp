#include "nlse/grid.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace nlse {

double UniformGrid::min_bandwidth() const {
  double p = bandwidth(0);
  for (int a = 1; a < dim; ++a) p = std::min(p, bandwidth(a));
  return p;
}

double UniformGrid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= h[a];
  return v;
}

double UniformGrid::box_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= 2.0 * L[a];
  return v;
}

bool UniformGrid::operator==(const UniformGrid& o) const {
  if (dim != o.dim) return false;
  for (int a = 0; a < dim; ++a)
    if (n[a] != o.n[a] || L[a] != o.L[a]) return false;
  return true;
}

std::string UniformGrid::describe() const {
  std::ostringstream os;
  os << dim << "D [";
  for (int a = 0; a < dim; ++a) os << (a ? "x" : "") << "[-" << L[a] << "," << L[a] << ")";
  os << "] N=";
  for (int a = 0; a < dim; ++a) os << (a ? "x" : "") << n[a];
  return os.str();
}

UniformGrid make_grid(int dim, const std::vector<double>& halfwidths, const std::vector<int>& npoints) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("dim must be 1, 2 or 3");
  if (static_cast<int>(halfwidths.size()) != dim || static_cast<int>(npoints.size()) != dim)
    throw std::invalid_argument("halfwidths and npoints must have dim entries");
  UniformGrid g;
  g.dim = dim;
  for (int a = 0; a < 3; ++a) {
    g.L[a] = 1.0;
    g.n[a] = 1;
    g.h[a] = 1.0;
  }
  for (int a = 0; a < dim; ++a) {
    if (!(halfwidths[a] > 0.0)) throw std::invalid_argument("halfwidth must be positive");
    if (npoints[a] % 2 != 0) throw std::invalid_argument("npoints must be even");
    if (npoints[a] < 4) throw std::invalid_argument("npoints must be at least 4");
    g.L[a] = halfwidths[a];
    g.n[a] = npoints[a];
    g.h[a] = 2.0 * halfwidths[a] / npoints[a];
  }
  return g;
}

const char* to_string(FieldKind k) {
  switch (k) {
    case FieldKind::Density: return "density";
    case FieldKind::Potential: return "potential";
    case FieldKind::Wavefunction: return "wavefunction";
  }
  return "potential";
}

RVec laplacian_symbol(const UniformGrid& g) {
  RVec out(g.size());
  std::vector<double> k2[3];
  for (int a = 0; a < 3; ++a) {
    const int n = a < g.dim ? g.n[a] : 1;
    k2[a].resize(n, 0.0);
    if (a < g.dim)
      for (int i = 0; i < n; ++i) k2[a][i] = g.k(a, i) * g.k(a, i);
  }
  std::size_t idx = 0;
  for (std::size_t i = 0; i < k2[0].size(); ++i)
    for (std::size_t j = 0; j < k2[1].size(); ++j)
      for (std::size_t k = 0; k < k2[2].size(); ++k) out[idx++] = k2[0][i] + k2[1][j] + k2[2][k];
  return out;
}

namespace {

// (-1)^(i+j+k) for FFT-order indices; equals (-1)^m for even N.
void apply_checkerboard(const UniformGrid& g, CVec& c) {
  const int n0 = g.n[0], n1 = g.dim > 1 ? g.n[1] : 1, n2 = g.dim > 2 ? g.n[2] : 1;
  std::size_t idx = 0;
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n1; ++j)
      for (int k = 0; k < n2; ++k, ++idx)
        if ((i + j + k) & 1) c[idx] = -c[idx];
}

}  // namespace

CVec fft_forward(const UniformGrid& g, const CVec& f) {
  if (f.size() != g.size()) throw std::invalid_argument("fft_forward: size mismatch");
  CVec c(f.size());
  fft_c2c(g.shape(), f.data(), c.data(), -1);
  const double s = 1.0 / static_cast<double>(g.size());
  for (auto& v : c) v *= s;
  apply_checkerboard(g, c);
  return c;
}

CVec fft_forward(const UniformGrid& g, const RVec& f) {
  if (f.size() != g.size()) throw std::invalid_argument("fft_forward: size mismatch");
  CVec z(f.begin(), f.end());
  return fft_forward(g, z);
}

CVec fft_backward(const UniformGrid& g, const CVec& c) {
  if (c.size() != g.size()) throw std::invalid_argument("fft_backward: size mismatch");
  CVec t = c;
  apply_checkerboard(g, t);
  fft_c2c(g.shape(), t.data(), +1);
  return t;
}

namespace {

std::vector<int> interior_shape(const UniformGrid& g) {
  std::vector<int> s;
  for (int a = 0; a < g.dim; ++a) s.push_back(g.n[a] - 1);
  return s;
}

}  // namespace

RVec dst_forward(const UniformGrid& g, const RVec& f) {
  if (f.size() != g.size()) throw std::invalid_argument("dst_forward: size mismatch");
  auto is = interior_shape(g);
  const int m0 = is[0], m1 = g.dim > 1 ? is[1] : 1, m2 = g.dim > 2 ? is[2] : 1;
  const int n1 = g.dim > 1 ? g.n[1] : 1, n2 = g.dim > 2 ? g.n[2] : 1;
  RVec in(static_cast<std::size_t>(m0) * m1 * m2), out(in.size());
  std::size_t idx = 0;
  for (int i = 0; i < m0; ++i)
    for (int j = 0; j < m1; ++j)
      for (int k = 0; k < m2; ++k) {
        const int fi = i + 1, fj = g.dim > 1 ? j + 1 : 0, fk = g.dim > 2 ? k + 1 : 0;
        in[idx++] = f[(static_cast<std::size_t>(fi) * n1 + fj) * n2 + fk];
      }
  fft_dst1(is, in.data(), out.data());
  // f_j = sum_m s_m sin(pi m j / N)  =>  s = RODFT00(f) / N per axis.
  double scale = 1.0;
  for (int a = 0; a < g.dim; ++a) scale /= g.n[a];
  for (auto& v : out) v *= scale;
  return out;
}

RVec dst_backward(const UniformGrid& g, const RVec& s) {
  auto is = interior_shape(g);
  const int m0 = is[0], m1 = g.dim > 1 ? is[1] : 1, m2 = g.dim > 2 ? is[2] : 1;
  if (s.size() != static_cast<std::size_t>(m0) * m1 * m2)
    throw std::invalid_argument("dst_backward: size mismatch");
  RVec out(s.size());
  fft_dst1(is, s.data(), out.data());
  double scale = 1.0;
  for (int a = 0; a < g.dim; ++a) scale *= 0.5;
  const int n1 = g.dim > 1 ? g.n[1] : 1, n2 = g.dim > 2 ? g.n[2] : 1;
  RVec f(g.size(), 0.0);
  std::size_t idx = 0;
  for (int i = 0; i < m0; ++i)
    for (int j = 0; j < m1; ++j)
      for (int k = 0; k < m2; ++k) {
        const int fi = i + 1, fj = g.dim > 1 ? j + 1 : 0, fk = g.dim > 2 ? k + 1 : 0;
        f[(static_cast<std::size_t>(fi) * n1 + fj) * n2 + fk] = out[idx++] * scale;
      }
  return f;
}

RVec dst_eigenvalues(const UniformGrid& g) {
  auto is = interior_shape(g);
  const int m0 = is[0], m1 = g.dim > 1 ? is[1] : 1, m2 = g.dim > 2 ? is[2] : 1;
  RVec lam(static_cast<std::size_t>(m0) * m1 * m2);
  auto ev = [&](int a, int m) {
    const double k = kPi * m / (2.0 * g.L[a]);
    return k * k;
  };
  std::size_t idx = 0;
  for (int i = 0; i < m0; ++i)
    for (int j = 0; j < m1; ++j)
      for (int k = 0; k < m2; ++k)
        lam[idx++] = ev(0, i + 1) + (g.dim > 1 ? ev(1, j + 1) : 0.0) + (g.dim > 2 ? ev(2, k + 1) : 0.0);
  return lam;
}

std::vector<CVec> spectral_gradient(const UniformGrid& g, const CVec& f) {
  if (f.size() != g.size()) throw std::invalid_argument("spectral_gradient: size mismatch");
  CVec fh(f.size());
  fft_c2c(g.shape(), f.data(), fh.data(), -1);
  const double inv = 1.0 / static_cast<double>(g.size());
  std::vector<CVec> out;
  const int n0 = g.n[0], n1 = g.dim > 1 ? g.n[1] : 1, n2 = g.dim > 2 ? g.n[2] : 1;
  for (int a = 0; a < g.dim; ++a) {
    CVec d(f.size());
    std::size_t idx = 0;
    for (int i = 0; i < n0; ++i)
      for (int j = 0; j < n1; ++j)
        for (int k = 0; k < n2; ++k, ++idx) {
          const int pos = a == 0 ? i : (a == 1 ? j : k);
          const double kk = (pos == g.n[a] / 2) ? 0.0 : g.k(a, pos);
          d[idx] = cplx(0.0, kk * inv) * fh[idx];
        }
    fft_c2c(g.shape(), d.data(), +1);
    out.push_back(std::move(d));
  }
  return out;
}

namespace {

void write_header(std::ostream& os, const UniformGrid& g, FieldKind kind, bool complex) {
  os << "NLSEFIELD v1 dim=" << g.dim << " L=";
  os.precision(17);
  for (int a = 0; a < g.dim; ++a) os << (a ? "," : "") << g.L[a];
  os << " N=";
  for (int a = 0; a < g.dim; ++a) os << (a ? "," : "") << g.n[a];
  os << " kind=" << to_string(kind) << " type=" << (complex ? "complex" : "real") << "\n";
}

void write_le(std::ostream& os, const double* p, std::size_t n) {
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      auto u = std::bit_cast<std::uint64_t>(p[i]);
      char b[8];
      for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((u >> (8 * k)) & 0xff);
      os.write(b, 8);
    }
  }
}

void read_le(std::istream& is, double* p, std::size_t n) {
  is.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
  if constexpr (std::endian::native != std::endian::little) {
    for (std::size_t i = 0; i < n; ++i) {
      unsigned char b[8];
      std::memcpy(b, &p[i], 8);
      std::uint64_t u = 0;
      for (int k = 0; k < 8; ++k) u |= static_cast<std::uint64_t>(b[k]) << (8 * k);
      p[i] = std::bit_cast<double>(u);
    }
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void write_field(const std::string& path, const RealField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_header(os, f.grid, f.kind, false);
  write_le(os, f.values.data(), f.values.size());
}

void write_field(const std::string& path, const ComplexField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_header(os, f.grid, f.kind, true);
  write_le(os, reinterpret_cast<const double*>(f.values.data()), 2 * f.values.size());
}

LoadedField read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string header;
  std::getline(is, header);
  std::istringstream hs(header);
  std::string tok;
  hs >> tok;
  if (tok != "NLSEFIELD") throw std::runtime_error("not a field dump: " + path);
  int dim = 0;
  std::vector<double> L;
  std::vector<int> N;
  std::string kind = "potential", type = "real";
  while (hs >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
    if (k == "dim") dim = std::stoi(v);
    if (k == "L")
      for (auto& s : split(v, ',')) L.push_back(std::stod(s));
    if (k == "N")
      for (auto& s : split(v, ',')) N.push_back(std::stoi(s));
    if (k == "kind") kind = v;
    if (k == "type") type = v;
  }
  LoadedField out;
  out.grid = make_grid(dim, L, N);
  out.kind = kind == "density" ? FieldKind::Density
             : kind == "wavefunction" ? FieldKind::Wavefunction
                                      : FieldKind::Potential;
  out.is_complex = type == "complex";
  const std::size_t n = out.grid.size();
  if (out.is_complex) {
    out.complex.resize(n);
    read_le(is, reinterpret_cast<double*>(out.complex.data()), 2 * n);
  } else {
    out.real.resize(n);
    read_le(is, out.real.data(), n);
  }
  if (!is) throw std::runtime_error("truncated field dump: " + path);
  return out;
}

namespace {

struct AxisMap {
  std::vector<int> src;
  std::vector<double> w;
};

AxisMap upsample_axis(int ns, int nt) {
  AxisMap m;
  m.src.assign(nt, -1);
  m.w.assign(nt, 0.0);
  for (int t = 0; t < nt; ++t) {
    const int mode = t < nt / 2 ? t : t - nt;
    if (std::abs(mode) < ns / 2) {
      m.src[t] = (mode % ns + ns) % ns;
      m.w[t] = 1.0;
    } else if (std::abs(mode) == ns / 2) {
      m.src[t] = ns / 2;
      m.w[t] = nt == ns ? 1.0 : 0.5;
    }
  }
  return m;
}

}  // namespace

CVec spectral_upsample(const UniformGrid& src, const CVec& f, const UniformGrid& target) {
  if (src.dim != target.dim) throw std::invalid_argument("spectral_upsample: dimension mismatch");
  for (int a = 0; a < src.dim; ++a) {
    if (std::abs(src.L[a] - target.L[a]) > 1e-12 * src.L[a])
      throw std::invalid_argument("spectral_upsample: grids must cover the same box");
    if (target.n[a] < src.n[a]) throw std::invalid_argument("spectral_upsample: target must not be coarser");
  }
  const CVec c = fft_forward(src, f);
  AxisMap m[3];
  for (int a = 0; a < 3; ++a) m[a] = a < src.dim ? upsample_axis(src.n[a], target.n[a]) : AxisMap{{0}, {1.0}};
  CVec ct(target.size(), cplx(0.0, 0.0));
  const int t0 = target.n[0], t1 = target.dim > 1 ? target.n[1] : 1, t2 = target.dim > 2 ? target.n[2] : 1;
  const int s1 = src.dim > 1 ? src.n[1] : 1, s2 = src.dim > 2 ? src.n[2] : 1;
  std::size_t idx = 0;
  for (int i = 0; i < t0; ++i)
    for (int j = 0; j < t1; ++j)
      for (int k = 0; k < t2; ++k, ++idx) {
        if (m[0].src[i] < 0 || m[1].src[j] < 0 || m[2].src[k] < 0) continue;
        const std::size_t si = (static_cast<std::size_t>(m[0].src[i]) * s1 + m[1].src[j]) * s2 + m[2].src[k];
        ct[idx] = c[si] * (m[0].w[i] * m[1].w[j] * m[2].w[k]);
      }
  return fft_backward(target, ct);
}

RVec spectral_upsample(const UniformGrid& src, const RVec& f, const UniformGrid& target) {
  const CVec z = spectral_upsample(src, CVec(f.begin(), f.end()), target);
  RVec out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i].real();
  return out;
}

template <class T>
std::vector<T, FftAllocator<T>> restrict_to_grid(const UniformGrid& src, const std::vector<T, FftAllocator<T>>& f,
                                                 const UniformGrid& target) {
  if (src.dim != target.dim) throw std::invalid_argument("restrict_to_grid: dimension mismatch");
  if (f.size() != src.size()) throw std::invalid_argument("restrict_to_grid: size mismatch");
  std::vector<int> idx[3];
  for (int a = 0; a < 3; ++a) {
    if (a >= src.dim) {
      idx[a] = {0};
      continue;
    }
    for (int j = 0; j < target.n[a]; ++j) {
      const double pos = (target.x(a, j) + src.L[a]) / src.h[a];
      const long r = std::lround(pos);
      if (std::abs(pos - r) > 1e-9 || r < 0 || r >= src.n[a])
        throw std::invalid_argument("restrict_to_grid: target points are not points of the source grid");
      idx[a].push_back(static_cast<int>(r));
    }
  }
  std::vector<T, FftAllocator<T>> out(target.size());
  const int s1 = src.dim > 1 ? src.n[1] : 1, s2 = src.dim > 2 ? src.n[2] : 1;
  std::size_t o = 0;
  for (int i : idx[0])
    for (int j : idx[1])
      for (int k : idx[2]) out[o++] = f[(static_cast<std::size_t>(i) * s1 + j) * s2 + k];
  return out;
}

template RVec restrict_to_grid<double>(const UniformGrid&, const RVec&, const UniformGrid&);
template CVec restrict_to_grid<cplx>(const UniformGrid&, const CVec&, const UniformGrid&);

}  // namespace nlse
