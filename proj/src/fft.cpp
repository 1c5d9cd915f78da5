#include "nlse/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace nlse {

void* fft_alloc(std::size_t bytes) { return fftw_malloc(bytes == 0 ? 1 : bytes); }
void fft_free(void* p) noexcept { fftw_free(p); }

namespace {

enum class Kind { C2C, C2C_IP, R2C, C2R, DST1, AXIS };

using Key = std::tuple<int, std::vector<int>, int, int>;

struct Cache {
  std::mutex mu;
  std::map<Key, fftw_plan> plans;
  int threads = 1;
  bool threads_init = false;
  ~Cache() {
    for (auto& kv : plans) fftw_destroy_plan(kv.second);
  }
};

Cache& cache() {
  static Cache c;
  return c;
}

std::size_t prod(const std::vector<int>& s) {
  std::size_t p = 1;
  for (int v : s) p *= static_cast<std::size_t>(v);
  return p;
}

std::size_t half_prod(const std::vector<int>& s) {
  std::size_t p = 1;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) p *= static_cast<std::size_t>(s[i]);
  return p * static_cast<std::size_t>(s.back() / 2 + 1);
}

fftw_plan make_plan(Kind kind, const std::vector<int>& shape, int sign, int axis) {
  const unsigned flags = FFTW_ESTIMATE;
  const int rank = static_cast<int>(shape.size());
  const std::size_t n = prod(shape);
  fftw_plan p = nullptr;
  switch (kind) {
    case Kind::C2C: {
      auto* a = fftw_alloc_complex(n);
      auto* b = fftw_alloc_complex(n);
      p = fftw_plan_dft(rank, shape.data(), a, b, sign, flags);
      fftw_free(a);
      fftw_free(b);
      break;
    }
    case Kind::C2C_IP: {
      auto* a = fftw_alloc_complex(n);
      p = fftw_plan_dft(rank, shape.data(), a, a, sign, flags);
      fftw_free(a);
      break;
    }
    case Kind::R2C: {
      auto* a = fftw_alloc_real(n);
      auto* b = fftw_alloc_complex(half_prod(shape));
      p = fftw_plan_dft_r2c(rank, shape.data(), a, b, flags);
      fftw_free(a);
      fftw_free(b);
      break;
    }
    case Kind::C2R: {
      auto* a = fftw_alloc_complex(half_prod(shape));
      auto* b = fftw_alloc_real(n);
      p = fftw_plan_dft_c2r(rank, shape.data(), a, b, flags);
      fftw_free(a);
      fftw_free(b);
      break;
    }
    case Kind::DST1: {
      auto* a = fftw_alloc_real(n);
      auto* b = fftw_alloc_real(n);
      std::vector<fftw_r2r_kind> kinds(shape.size(), FFTW_RODFT00);
      p = fftw_plan_r2r(rank, shape.data(), a, b, kinds.data(), flags);
      fftw_free(a);
      fftw_free(b);
      break;
    }
    case Kind::AXIS: {
      std::ptrdiff_t inner = 1;
      for (int i = axis + 1; i < rank; ++i) inner *= shape[i];
      std::ptrdiff_t outer = 1;
      for (int i = 0; i < axis; ++i) outer *= shape[i];
      fftw_iodim dim{shape[axis], static_cast<int>(inner), static_cast<int>(inner)};
      fftw_iodim how[2] = {{static_cast<int>(outer), static_cast<int>(inner * shape[axis]),
                            static_cast<int>(inner * shape[axis])},
                           {static_cast<int>(inner), 1, 1}};
      auto* a = fftw_alloc_complex(n);
      p = fftw_plan_guru_dft(1, &dim, 2, how, a, a, sign, flags);
      fftw_free(a);
      break;
    }
  }
  if (!p) throw std::runtime_error("fftw plan creation failed");
  return p;
}

fftw_plan get_plan(Kind kind, const std::vector<int>& shape, int sign, int axis = -1) {
  Cache& c = cache();
  std::lock_guard<std::mutex> lock(c.mu);
  Key key{static_cast<int>(kind), shape, sign, axis};
  auto it = c.plans.find(key);
  if (it != c.plans.end()) return it->second;
  if (c.threads > 1) fftw_plan_with_nthreads(c.threads);
  fftw_plan p = make_plan(kind, shape, sign, axis);
  c.plans.emplace(key, p);
  return p;
}

}  // namespace

void fft_set_threads(int k) {
  Cache& c = cache();
  std::lock_guard<std::mutex> lock(c.mu);
  if (k < 1) k = 1;
  if (!c.threads_init) {
    fftw_init_threads();
    c.threads_init = true;
  }
  c.threads = k;
  fftw_plan_with_nthreads(k);
  for (auto& kv : c.plans) fftw_destroy_plan(kv.second);
  c.plans.clear();
}

int fft_threads() { return cache().threads; }

void fft_c2c(const std::vector<int>& shape, cplx* data, int sign) {
  fftw_plan p = get_plan(Kind::C2C_IP, shape, sign);
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, d, d);
}

void fft_c2c(const std::vector<int>& shape, const cplx* in, cplx* out, int sign) {
  if (in == out) return fft_c2c(shape, out, sign);
  fftw_plan p = get_plan(Kind::C2C, shape, sign);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void fft_r2c(const std::vector<int>& shape, const double* in, cplx* out) {
  fftw_plan p = get_plan(Kind::R2C, shape, 0);
  fftw_execute_dft_r2c(p, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
}

void fft_c2r(const std::vector<int>& shape, cplx* in, double* out) {
  fftw_plan p = get_plan(Kind::C2R, shape, 0);
  fftw_execute_dft_c2r(p, reinterpret_cast<fftw_complex*>(in), out);
}

void fft_dst1(const std::vector<int>& shape, const double* in, double* out) {
  fftw_plan p = get_plan(Kind::DST1, shape, 0);
  fftw_execute_r2r(p, const_cast<double*>(in), out);
}

void fft_c2c_axis(const std::vector<int>& shape, int axis, cplx* data, int sign) {
  fftw_plan p = get_plan(Kind::AXIS, shape, sign, axis);
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, d, d);
}

int fft_good_size(int n) {
  for (int m = n > 1 ? n : 1;; ++m) {
    int r = m;
    for (int f : {2, 3, 5, 7})
      while (r % f == 0) r /= f;
    if (r == 1) return m;
  }
}

int fft_good_even_size(int n) {
  int m = fft_good_size(n);
  while (m % 2) m = fft_good_size(m + 1);
  return m;
}

}  // namespace nlse
