#include "mixgan/core/backend.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <thread>
#include <vector>

namespace mixgan::kern {

namespace {

std::atomic<int> g_threads{1};

Backend pick_default() {
  if (const char* env = std::getenv("MIXGAN_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return Backend::avx2;
    // "auto" or anything unrecognized falls through to detection.
  }
  return avx2_supported() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> b{pick_default()};
  return b;
}

using GemmFn = void (*)(std::size_t, std::size_t, std::size_t, const float*,
                        std::size_t, const float*, std::size_t, float*,
                        std::size_t, bool);

// Splits output rows across workers. Row ranges are disjoint and every
// element accumulates serially inside one worker, so the result is identical
// for any worker count.
template <bool kColsOfA>
void run_rows(GemmFn fn, std::size_t m, std::size_t n, std::size_t k,
              const float* a, std::size_t lda, const float* b, std::size_t ldb,
              float* c, std::size_t ldc, bool acc) {
  const int want = threads();
  if (want <= 1 || m < 2 * static_cast<std::size_t>(want)) {
    fn(m, n, k, a, lda, b, ldb, c, ldc, acc);
    return;
  }
  const std::size_t nw = static_cast<std::size_t>(want);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (std::size_t w = 0; w < nw; ++w) {
    const std::size_t r0 = m * w / nw;
    const std::size_t r1 = m * (w + 1) / nw;
    if (r0 == r1) continue;
    // For gemm_tn the row block of C corresponds to a column block of A.
    const float* ablk = kColsOfA ? a + r0 : a + r0 * lda;
    pool.emplace_back([=] {
      fn(r1 - r0, n, k, ablk, lda, b, ldb, c + r0 * ldc, ldc, acc);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Kernels& active() {
  return backend_slot().load() == Backend::avx2 ? avx2_kernels()
                                                : scalar_kernels();
}

void set_backend(Backend b) {
  if (b == Backend::avx2 && !avx2_supported()) b = Backend::scalar;
  backend_slot().store(b);
}

Backend current_backend() { return backend_slot().load(); }

std::string backend_name() { return active().name; }

void set_threads(int n) { g_threads.store(n < 1 ? 1 : n); }
int threads() { return g_threads.load(); }

void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const float* a,
             std::size_t lda, const float* b, std::size_t ldb, float* c,
             std::size_t ldc, bool acc) {
  run_rows<false>(active().gemm_nn, m, n, k, a, lda, b, ldb, c, ldc, acc);
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const float* a,
             std::size_t lda, const float* b, std::size_t ldb, float* c,
             std::size_t ldc, bool acc) {
  run_rows<false>(active().gemm_nt, m, n, k, a, lda, b, ldb, c, ldc, acc);
}

void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const float* a,
             std::size_t lda, const float* b, std::size_t ldb, float* c,
             std::size_t ldc, bool acc) {
  run_rows<true>(active().gemm_tn, m, n, k, a, lda, b, ldb, c, ldc, acc);
}

}  // namespace mixgan::kern
