#pragma once
// Uniform tensor-product grids, sampled fields and uniform spectral transforms.

#include <array>
#include <cmath>
#include <iosfwd>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlse/fft.hpp"

namespace nlse {

constexpr double kPi = std::numbers::pi;

struct UniformGrid {
  int dim = 1;
  std::array<double, 3> L{1.0, 1.0, 1.0};  // half-widths
  std::array<int, 3> n{4, 1, 1};           // points per axis (unused axes hold 1)
  std::array<double, 3> h{0.5, 1.0, 1.0};  // spacings

  std::size_t size() const {
    std::size_t s = 1;
    for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(n[a]);
    return s;
  }
  std::vector<int> shape() const { return std::vector<int>(n.begin(), n.begin() + dim); }
  double x(int axis, int j) const { return -L[axis] + j * h[axis]; }
  // Signed mode index of FFT-order position i.
  int mode(int axis, int i) const { return i < n[axis] / 2 ? i : i - n[axis]; }
  double k(int axis, int i) const { return kPi * mode(axis, i) / L[axis]; }
  double bandwidth(int axis) const { return kPi * n[axis] / (2.0 * L[axis]); }
  double min_bandwidth() const;
  double cell_volume() const;
  double box_volume() const;
  bool operator==(const UniformGrid& o) const;
  bool operator!=(const UniformGrid& o) const { return !(*this == o); }
  std::string describe() const;
};

UniformGrid make_grid(int dim, const std::vector<double>& halfwidths, const std::vector<int>& npoints);

enum class FieldKind { Density, Potential, Wavefunction };
const char* to_string(FieldKind k);

template <class T>
struct Field {
  UniformGrid grid;
  FieldKind kind = FieldKind::Potential;
  std::vector<T, FftAllocator<T>> values;

  Field() = default;
  Field(const UniformGrid& g, FieldKind k) : grid(g), kind(k), values(g.size()) {}
  Field(const UniformGrid& g, FieldKind k, std::vector<T, FftAllocator<T>> v)
      : grid(g), kind(k), values(std::move(v)) {
    if (values.size() != grid.size()) throw std::invalid_argument("field size does not match grid");
  }
  std::size_t size() const { return values.size(); }
  T& operator[](std::size_t i) { return values[i]; }
  const T& operator[](std::size_t i) const { return values[i]; }
};

using RealField = Field<double>;
using ComplexField = Field<cplx>;

// Fill a field by evaluating f at every grid point (x has dim entries).
template <class T, class F>
Field<T> sample(const UniformGrid& g, FieldKind kind, F&& f) {
  Field<T> out(g, kind);
  std::array<double, 3> x{0, 0, 0};
  std::size_t idx = 0;
  const int n0 = g.n[0], n1 = g.dim > 1 ? g.n[1] : 1, n2 = g.dim > 2 ? g.n[2] : 1;
  for (int i = 0; i < n0; ++i) {
    x[0] = g.x(0, i);
    for (int j = 0; j < n1; ++j) {
      if (g.dim > 1) x[1] = g.x(1, j);
      for (int k = 0; k < n2; ++k) {
        if (g.dim > 2) x[2] = g.x(2, k);
        out.values[idx++] = f(x);
      }
    }
  }
  return out;
}

// Sum of squared wave numbers |k|^2 at every FFT-order position.
RVec laplacian_symbol(const UniformGrid& g);

// Coefficients c_m ~ (1/|Omega|) int f exp(-i k_m x) dx, stored in FFT order.
CVec fft_forward(const UniformGrid& g, const CVec& f);
CVec fft_forward(const UniformGrid& g, const RVec& f);
CVec fft_backward(const UniformGrid& g, const CVec& c);

// Sine coefficients of the interior samples (indices 1..N-1 on each axis).
// Output has prod(N_a - 1) entries; mode m_a = 1..N_a-1.
RVec dst_forward(const UniformGrid& g, const RVec& f);
// Inverse: full-grid field with zeros on the index-0 boundary planes.
RVec dst_backward(const UniformGrid& g, const RVec& s);
// Eigenvalues of -Laplacian for each sine mode (same layout as dst_forward).
RVec dst_eigenvalues(const UniformGrid& g);

// Per-axis spectral derivative with the Nyquist mode zeroed.
std::vector<CVec> spectral_gradient(const UniformGrid& g, const CVec& f);

// Trigonometric interpolation onto a finer grid over the same box (n_target >= n_source per axis).
// The source Nyquist mode is split evenly between +-n/2.
CVec spectral_upsample(const UniformGrid& src, const CVec& f, const UniformGrid& target);
RVec spectral_upsample(const UniformGrid& src, const RVec& f, const UniformGrid& target);
// Values of a field at the points of `target`, which must all be points of `src`
// (e.g. a reference on a finer grid over a larger box).
template <class T>
std::vector<T, FftAllocator<T>> restrict_to_grid(const UniformGrid& src, const std::vector<T, FftAllocator<T>>& f,
                                                 const UniformGrid& target);

// Binary field dump: text header line then little-endian float64 payload.
void write_field(const std::string& path, const RealField& f);
void write_field(const std::string& path, const ComplexField& f);
struct LoadedField {
  UniformGrid grid;
  FieldKind kind;
  bool is_complex;
  RVec real;
  CVec complex;
};
LoadedField read_field(const std::string& path);

}  // namespace nlse
