#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cmath>
#include <random>

#include "nlse/nufft.hpp"
#include "nlse/specfun.hpp"

using namespace nlse;

namespace {

FrequencyNodeSet random_nodes(const UniformGrid& g, std::size_t M, double scale, unsigned seed) {
  std::mt19937 rng(seed);
  FrequencyNodeSet s;
  s.dim = g.dim;
  s.tag = NodeTag::Regular;
  for (std::size_t m = 0; m < M; ++m) {
    double a2 = 0;
    for (int a = 0; a < g.dim; ++a) {
      std::uniform_real_distribution<double> u(-scale * g.bandwidth(a), scale * g.bandwidth(a));
      const double k = u(rng);
      s.k.push_back(k);
      a2 += k * k;
    }
    s.w.push_back(1.0);
    s.kabs.push_back(std::sqrt(a2));
  }
  return s;
}

CVec random_cvec(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  CVec v(n);
  for (auto& x : v) x = cplx(u(rng), u(rng));
  return v;
}

double max_err(const CVec& a, const CVec& b) {
  double e = 0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

double l1(const CVec& v) {
  double s = 0;
  for (auto x : v) s += std::abs(x);
  return s;
}

void check_contract(const UniformGrid& g, const FrequencyNodeSet& nodes, double tol, unsigned seed) {
  NufftPlan plan(g, nodes, tol);
  auto f = random_cvec(g.size(), seed);
  const double e1 = max_err(plan.u2n(f), nudft_direct_u2n(g, nodes, f));
  CHECK(e1 <= tol * l1(f) * g.cell_volume());
  auto c = random_cvec(nodes.size(), seed + 1);
  const double e2 = max_err(plan.n2u(c), nudft_direct_n2u(g, nodes, c));
  CHECK(e2 <= tol * l1(c));
  MESSAGE("dim " << g.dim << " tol " << tol << " pruned " << plan.pruned() << " u2n err/scale "
                 << e1 / (l1(f) * g.cell_volume()) << " n2u err/scale " << e2 / l1(c));
}

}  // namespace

TEST_CASE("spherical and polar node measures") {
  auto s = build_spherical_nodes(3.0, 2, 8, 12, 16);
  double sum = 0;
  for (double w : s.w) sum += w;
  CHECK(std::abs(sum - 4 * kPi * 3.0) < 1e-12);
  auto p = build_polar_nodes(3.0, 2, 8, 16);
  sum = 0;
  for (double w : p.w) sum += w;
  CHECK(std::abs(sum - 2 * kPi * 3.0) < 1e-12);
  auto ph = build_polar_nodes(3.0, 2, 8, 16, {1.0, 1.0}, true);
  CHECK(ph.size() * 2 == p.size());
  sum = 0;
  for (double w : ph.w) sum += w;
  CHECK(std::abs(sum - 2 * kPi * 3.0) < 1e-12);
  for (std::size_t m = 0; m < s.size(); ++m) CHECK(s.kabs[m] <= 3.0);
}

TEST_CASE("radial polynomials integrate exactly per panel") {
  // int_{|k|<=P} |k|^{d-1} * |k|^5 / |k|^{d-1} dk over the measure = 4 pi P^6 / 6.
  auto s = build_spherical_nodes(2.0, 3, 4, 4, 4);
  double sum = 0;
  for (std::size_t m = 0; m < s.size(); ++m) sum += s.w[m] * std::pow(s.kabs[m], 7);
  CHECK(std::abs(sum - 4 * kPi * std::pow(2.0, 8) / 8) < 1e-10);
}

TEST_CASE("smooth radial integrand matches adaptive quadrature") {
  auto g = [](double r) { return std::exp(-r * r) * std::cos(3 * r); };
  const double P = 6.0;
  const double oracle = 4 * kPi * adaptive_gk15(g, 0.0, P, 1e-15);
  auto s = build_spherical_nodes(P, 4, 16, 6, 8);
  double sum = 0;
  for (std::size_t m = 0; m < s.size(); ++m) sum += s.w[m] * g(s.kabs[m]);
  CHECK(std::abs(sum - oracle) < 1e-12);
  // Stretched ellipsoid: integral of 1 over the ellipsoid with 1/|k|^2 weight.
  auto e = build_spherical_nodes(1.0, 1, 12, 40, 80, {1.0, 1.0, 3.0});
  double vol = 0;
  for (std::size_t m = 0; m < e.size(); ++m) vol += e.w[m] * e.kabs[m] * e.kabs[m];
  CHECK(std::abs(vol - 4.0 / 3.0 * kPi * 3.0) < 1e-12);
}

TEST_CASE("trivial cases") {
  auto g = make_grid(2, {4.0, 4.0}, {16, 16});
  auto nodes = random_nodes(g, 50, 1.0, 5);
  NufftPlan plan(g, nodes, 1e-12);
  CVec zero(g.size(), cplx(0, 0));
  for (auto v : plan.u2n(zero)) CHECK(v == cplx(0, 0));
  CVec cz(nodes.size(), cplx(0, 0));
  for (auto v : plan.n2u(cz)) CHECK(v == cplx(0, 0));
  CVec delta = zero;
  delta[37] = 1.0;
  auto out = plan.u2n(delta);
  const double x0 = g.x(0, 37 / 16), x1 = g.x(1, 37 % 16);
  for (std::size_t m = 0; m < nodes.size(); ++m) {
    auto expect = g.cell_volume() * std::polar(1.0, -(nodes.k[2 * m] * x0 + nodes.k[2 * m + 1] * x1));
    CHECK(std::abs(out[m] - expect) < 1e-12 * g.cell_volume());
  }
  CVec single(nodes.size(), cplx(0, 0));
  single[3] = 1.0;
  auto u = plan.n2u(single);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      CHECK(std::abs(u[i * 16 + j] - std::polar(1.0, nodes.k[6] * g.x(0, i) + nodes.k[7] * g.x(1, j))) < 1e-12);
  CHECK_THROWS(NufftPlan(g, nodes, 1e-16));
  CHECK_THROWS(plan.u2n(CVec(5)));
}

TEST_CASE("NUFFT contract against direct sums") {
  for (double tol : {1e-6, 1e-9, 1e-12}) {
    auto g1 = make_grid(1, {5.0}, {64});
    check_contract(g1, random_nodes(g1, 3000, 1.5, 1), tol, 10);
    auto g2 = make_grid(2, {8.0, 4.0}, {64, 48});
    check_contract(g2, random_nodes(g2, 2000, 1.0, 2), tol, 20);
    check_contract(g2, build_polar_nodes(2.0, 1, 20, 40, {1.0, 1.0}, true), tol, 25);
    auto g3 = make_grid(3, {8.0, 8.0, 8.0}, {32, 32, 32});
    check_contract(g3, random_nodes(g3, 400, 1.0, 3), tol, 30);
    // Small ball of nodes: exercises the pruned block path.
    check_contract(g3, build_spherical_nodes(1.5, 1, 6, 6, 10), tol, 40);
  }
}

TEST_CASE("Gaussian density on the 64^3 grid") {
  auto g = make_grid(3, {8.0, 8.0, 8.0}, {64, 64, 64});
  auto rho = sample<double>(g, FieldKind::Density, [](const std::array<double, 3>& x) {
    return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 1.21);
  });
  auto nodes = random_nodes(g, 100, 0.5, 9);
  NufftPlan plan(g, nodes, 1e-12);
  auto fast = plan.u2n(rho.values);
  auto slow = nudft_direct_u2n(g, nodes, rho.values);
  double scale = 0;
  for (double v : rho.values) scale += v;
  scale *= g.cell_volume();
  CHECK(max_err(fast, slow) <= 1e-12 * scale);
}

TEST_CASE("direct sums: linearity, conjugate symmetry") {
  auto g = make_grid(2, {3.0, 3.0}, {12, 12});
  auto nodes = random_nodes(g, 30, 1.0, 4);
  FrequencyNodeSet neg = nodes;
  for (auto& k : neg.k) k = -k;
  RVec f(g.size()), h(g.size());
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = u(rng);
    h[i] = u(rng);
  }
  auto a = nudft_direct_u2n(g, nodes, f);
  auto b = nudft_direct_u2n(g, neg, f);
  for (std::size_t m = 0; m < a.size(); ++m) CHECK(std::abs(a[m] - std::conj(b[m])) < 1e-13);
  RVec comb(g.size());
  for (std::size_t i = 0; i < f.size(); ++i) comb[i] = 2 * f[i] - 3 * h[i];
  auto c = nudft_direct_u2n(g, nodes, comb);
  auto d = nudft_direct_u2n(g, nodes, h);
  for (std::size_t m = 0; m < a.size(); ++m) CHECK(std::abs(c[m] - (2.0 * a[m] - 3.0 * d[m])) < 1e-12);
}

TEST_CASE("adjointness of the fast transforms") {
  auto g = make_grid(2, {4.0, 4.0}, {32, 32});
  auto nodes = random_nodes(g, 500, 1.0, 8);
  const double tol = 1e-9;
  NufftPlan plan(g, nodes, tol);
  auto f = random_cvec(g.size(), 3);
  auto c = random_cvec(nodes.size(), 4);
  auto Af = plan.u2n(f);
  CVec cc(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) cc[i] = std::conj(c[i]);
  auto Bc = plan.n2u(cc);
  // sum_m (u2n f)_m c_m = h^d sum_j f_j conj(n2u(conj c))_j
  cplx lhs(0, 0), rhs(0, 0);
  for (std::size_t m = 0; m < c.size(); ++m) lhs += Af[m] * c[m];
  for (std::size_t j = 0; j < f.size(); ++j) rhs += f[j] * std::conj(Bc[j]);
  rhs *= g.cell_volume();
  CHECK(std::abs(lhs - rhs) <= 10 * tol * std::abs(lhs));
}

TEST_CASE("cost grows near N log N") {
  auto nodes_for = [](const UniformGrid& g) { return random_nodes(g, 20000, 1.0, 6); };
  auto time_it = [](const UniformGrid& g, const FrequencyNodeSet& n) {
    NufftPlan plan(g, n, 1e-12);
    CVec f(g.size(), cplx(1, 0));
    auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < 3; ++r) (void)plan.u2n(f);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  auto ga = make_grid(2, {8, 8}, {128, 128});
  auto gb = make_grid(2, {8, 8}, {256, 256});
  const double ta = time_it(ga, nodes_for(ga)), tb = time_it(gb, nodes_for(gb));
  MESSAGE("u2n time 128^2: " << ta << " s, 256^2: " << tb << " s");
  CHECK(tb / ta <= 2.6 * 4);
}
