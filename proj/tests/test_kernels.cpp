#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "mixgan/core/backend.hpp"
#include "mixgan/core/rng.hpp"

using namespace mixgan;

namespace {

std::vector<float> random_vec(RandomEngine& rng, std::size_t n,
                              double lo = -2.0, double hi = 2.0) {
  std::vector<float> v(n);
  for (auto& x : v) x = float(rng.uniform(lo, hi));
  return v;
}

double max_rel_diff(const std::vector<float>& a, const std::vector<float>& b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max({std::fabs(double(a[i])),
                                   std::fabs(double(b[i])), 1.0});
    worst = std::max(worst, std::fabs(double(a[i]) - double(b[i])) / denom);
  }
  return worst;
}

}  // namespace

TEST_CASE("gemm_nn matches a hand-computed product") {
  // A (2x3) * B (3x2)
  const float a[] = {1, 2, 3, 4, 5, 6};
  const float b[] = {7, 8, 9, 10, 11, 12};
  float c[4] = {};
  kern::gemm_nn(2, 2, 3, a, 3, b, 2, c, 2, false);
  CHECK(c[0] == doctest::Approx(58));   // 1*7+2*9+3*11
  CHECK(c[1] == doctest::Approx(64));   // 1*8+2*10+3*12
  CHECK(c[2] == doctest::Approx(139));  // 4*7+5*9+6*11
  CHECK(c[3] == doctest::Approx(154));
}

TEST_CASE("gemm_nt and gemm_tn agree with explicit transposition") {
  RandomEngine rng(7);
  const std::size_t m = 5, n = 4, k = 3;
  const auto a = random_vec(rng, m * k);   // m x k
  const auto bt = random_vec(rng, n * k);  // n x k, i.e. B^T with B k x n
  // Materialize B = (B^T)^T and compare gemm_nt(a, bt) with gemm_nn(a, b).
  std::vector<float> b(k * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) b[j * n + i] = bt[i * k + j];
  std::vector<float> c1(m * n), c2(m * n);
  kern::gemm_nt(m, n, k, a.data(), k, bt.data(), k, c1.data(), n, false);
  kern::gemm_nn(m, n, k, a.data(), k, b.data(), n, c2.data(), n, false);
  CHECK(max_rel_diff(c1, c2) < 1e-6);

  // gemm_tn: A is stored k x m, logical A^T (m x k).
  std::vector<float> at(k * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < k; ++j) at[j * m + i] = a[i * k + j];
  std::vector<float> c3(m * n);
  kern::gemm_tn(m, n, k, at.data(), m, b.data(), n, c3.data(), n, false);
  CHECK(max_rel_diff(c3, c2) < 1e-6);
}

TEST_CASE("gemm accumulate adds onto the existing output") {
  const float a[] = {1, 2};
  const float b[] = {3, 4};
  float c[1] = {100};
  kern::gemm_nn(1, 1, 2, a, 2, b, 1, c, 1, true);
  CHECK(c[0] == doctest::Approx(111));
  kern::gemm_nn(1, 1, 2, a, 2, b, 1, c, 1, false);
  CHECK(c[0] == doctest::Approx(11));
}

TEST_CASE("scalar and avx2 backends agree on every kernel") {
  if (!kern::avx2_supported()) {
    MESSAGE("avx2 not available on this host, skipping");
    return;
  }
  const auto& sc = kern::scalar_kernels();
  const auto& vx = kern::avx2_kernels();
  RandomEngine rng(11);

  // Sizes straddle the 8-lane width to exercise vector body and scalar tail.
  for (std::size_t m : {1, 2, 7}) {
    for (std::size_t n : {1, 5, 8, 19}) {
      for (std::size_t k : {1, 3, 16, 33}) {
        const auto a = random_vec(rng, m * k);
        const auto b = random_vec(rng, k * n);
        const auto bt = random_vec(rng, n * k);
        const auto at = random_vec(rng, k * m);
        std::vector<float> c0(m * n), c1(m * n);

        sc.gemm_nn(m, n, k, a.data(), k, b.data(), n, c0.data(), n, false);
        vx.gemm_nn(m, n, k, a.data(), k, b.data(), n, c1.data(), n, false);
        CHECK(max_rel_diff(c0, c1) < 1e-5);

        sc.gemm_nt(m, n, k, a.data(), k, bt.data(), k, c0.data(), n, false);
        vx.gemm_nt(m, n, k, a.data(), k, bt.data(), k, c1.data(), n, false);
        CHECK(max_rel_diff(c0, c1) < 1e-5);

        sc.gemm_tn(m, n, k, at.data(), m, b.data(), n, c0.data(), n, false);
        vx.gemm_tn(m, n, k, at.data(), m, b.data(), n, c1.data(), n, false);
        CHECK(max_rel_diff(c0, c1) < 1e-5);
      }
    }
  }

  for (std::size_t n : {1, 8, 23, 100}) {
    const auto x = random_vec(rng, n);
    auto y0 = random_vec(rng, n);
    auto y1 = y0;
    sc.axpy(n, 0.37f, x.data(), y0.data());
    vx.axpy(n, 0.37f, x.data(), y1.data());
    CHECK(max_rel_diff(y0, y1) < 1e-6);

    auto s0 = x, s1 = x;
    sc.scale(n, -1.2f, s0.data());
    vx.scale(n, -1.2f, s1.data());
    CHECK(max_rel_diff(s0, s1) < 1e-6);

    std::vector<float> r0(n), r1(n);
    sc.leaky_relu_fwd(n, 0.2f, x.data(), r0.data());
    vx.leaky_relu_fwd(n, 0.2f, x.data(), r1.data());
    CHECK(std::memcmp(r0.data(), r1.data(), n * sizeof(float)) == 0);

    const auto dy = random_vec(rng, n);
    sc.leaky_relu_bwd(n, 0.2f, x.data(), dy.data(), r0.data());
    vx.leaky_relu_bwd(n, 0.2f, x.data(), dy.data(), r1.data());
    CHECK(std::memcmp(r0.data(), r1.data(), n * sizeof(float)) == 0);

    auto p0 = random_vec(rng, n), p1 = p0;
    auto m0 = random_vec(rng, n, -0.1, 0.1), m1 = m0;
    auto v0 = random_vec(rng, n, 0.0, 0.1), v1 = v0;
    const auto g = random_vec(rng, n);
    sc.adam_update(n, p0.data(), g.data(), m0.data(), v0.data(), 2e-4f, 0.5f,
                   0.999f, 1e-8f, 0.5f, 0.001f);
    vx.adam_update(n, p1.data(), g.data(), m1.data(), v1.data(), 2e-4f, 0.5f,
                   0.999f, 1e-8f, 0.5f, 0.001f);
    CHECK(max_rel_diff(p0, p1) < 1e-6);
    CHECK(max_rel_diff(m0, m1) < 1e-6);
    CHECK(max_rel_diff(v0, v1) < 1e-6);
  }
}

TEST_CASE("row-partitioned gemm is bit-identical for any worker count") {
  RandomEngine rng(23);
  const std::size_t m = 13, n = 29, k = 41;  // deliberately awkward sizes
  const auto a = random_vec(rng, m * k);
  const auto b = random_vec(rng, k * n);
  const auto at = random_vec(rng, k * m);
  const auto bt = random_vec(rng, n * k);

  std::vector<float> base_nn(m * n), base_nt(m * n), base_tn(m * n);
  kern::set_threads(1);
  kern::gemm_nn(m, n, k, a.data(), k, b.data(), n, base_nn.data(), n, false);
  kern::gemm_nt(m, n, k, a.data(), k, bt.data(), k, base_nt.data(), n, false);
  kern::gemm_tn(m, n, k, at.data(), m, b.data(), n, base_tn.data(), n, false);

  for (int workers : {2, 3, 5, 16, 64}) {
    kern::set_threads(workers);
    std::vector<float> c(m * n);
    kern::gemm_nn(m, n, k, a.data(), k, b.data(), n, c.data(), n, false);
    CHECK(std::memcmp(c.data(), base_nn.data(), c.size() * 4) == 0);
    kern::gemm_nt(m, n, k, a.data(), k, bt.data(), k, c.data(), n, false);
    CHECK(std::memcmp(c.data(), base_nt.data(), c.size() * 4) == 0);
    kern::gemm_tn(m, n, k, at.data(), m, b.data(), n, c.data(), n, false);
    CHECK(std::memcmp(c.data(), base_tn.data(), c.size() * 4) == 0);
  }
  kern::set_threads(1);
}

TEST_CASE("backend selection is explicit and reports its name") {
  const auto saved = kern::current_backend();
  kern::set_backend(kern::Backend::scalar);
  CHECK(kern::backend_name() == "scalar");
  CHECK(kern::active().name == std::string("scalar"));
  if (kern::avx2_supported()) {
    kern::set_backend(kern::Backend::avx2);
    CHECK(kern::backend_name() == "avx2");
  }
  kern::set_backend(saved);
}

TEST_CASE("adam reference kernel matches a hand-worked first step") {
  double p = 1.0, m = 0.0, v = 0.0;
  const double g = 0.5;
  // t = 1, beta1 = 0.9, beta2 = 0.999: bc1 = 0.1, bc2 = 0.001.
  kern::adam_update_ref<double>(1, &p, &g, &m, &v, 0.1, 0.9, 0.999, 1e-8, 0.1,
                                0.001);
  CHECK(m == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(v == doctest::Approx(0.00025).epsilon(1e-12));
  // mhat = 0.5, vhat = 0.25, step = 0.1 * 0.5 / (0.5 + 1e-8)
  CHECK(p == doctest::Approx(1.0 - 0.1 * 0.5 / (0.5 + 1e-8)).epsilon(1e-12));
}

TEST_CASE("rng streams are reproducible and serializable") {
  RandomEngine a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  const auto snap = a.state();
  std::vector<double> first;
  for (int i = 0; i < 10; ++i) first.push_back(a.normal());
  a.set_state(snap);
  for (int i = 0; i < 10; ++i) CHECK(a.normal() == first[std::size_t(i)]);

  RandomEngine c(43);
  CHECK(c.next_u64() != b.next_u64());
}

TEST_CASE("normal sampler has roughly standard moments") {
  RandomEngine rng(5);
  const std::size_t n = 200000;
  std::vector<float> z(n);
  rng.fill_normal(z.data(), n);
  double mean = 0, var = 0;
  for (float x : z) mean += x;
  mean /= double(n);
  for (float x : z) var += (x - mean) * (x - mean);
  var /= double(n);
  CHECK(std::fabs(mean) < 0.01);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}
