#pragma once
// Thin FFTW wrapper: aligned storage and cached plans keyed by shape.

#include <complex>
#include <cstddef>
#include <new>
#include <vector>

namespace nlse {

using cplx = std::complex<double>;

void* fft_alloc(std::size_t bytes);
void fft_free(void* p) noexcept;

template <class T>
struct FftAllocator {
  using value_type = T;
  FftAllocator() = default;
  template <class U>
  FftAllocator(const FftAllocator<U>&) noexcept {}
  T* allocate(std::size_t n) {
    void* p = fft_alloc(n * sizeof(T));
    if (!p) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { fft_free(p); }
  template <class U>
  bool operator==(const FftAllocator<U>&) const noexcept { return true; }
};

using RVec = std::vector<double, FftAllocator<double>>;
using CVec = std::vector<cplx, FftAllocator<cplx>>;

// Set the number of FFTW threads used by plans created afterwards.
void fft_set_threads(int k);
int fft_threads();

// Unnormalized multi-dimensional transforms on row-major arrays.
// sign = -1: sum f_j exp(-2 pi i j m / n); sign = +1: exp(+...).
void fft_c2c(const std::vector<int>& shape, cplx* data, int sign);
void fft_c2c(const std::vector<int>& shape, const cplx* in, cplx* out, int sign);
// Real-to-complex along all axes; output shape is shape with last axis n/2+1.
void fft_r2c(const std::vector<int>& shape, const double* in, cplx* out);
// Inverse of fft_r2c (unnormalized); the input array is clobbered.
void fft_c2r(const std::vector<int>& shape, cplx* in, double* out);
// DST-I (FFTW RODFT00) along all axes, unnormalized.
void fft_dst1(const std::vector<int>& shape, const double* in, double* out);
// Batched 1D transforms along one axis of a row-major array (in place).
void fft_c2c_axis(const std::vector<int>& shape, int axis, cplx* data, int sign);

// Sizes with only factors 2, 3, 5, 7 at or above n.
int fft_good_size(int n);
// Same, restricted to even values.
int fft_good_even_size(int n);

}  // namespace nlse
