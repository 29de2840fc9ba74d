// AVX2 + FMA variants of the float inner loops. Built as a separate
// translation unit with -mavx2 -mfma; only reached through the dispatch
// table after a cpuid check. Per-element accumulation order matches the
// scalar reference (ascending k), so the two backends agree to FMA rounding.

#include "mixgan/core/backend.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

namespace mixgan::kern {

namespace {

inline float hsum256(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_add_ps(lo, hi);
  __m128 sh = _mm_movehl_ps(lo, lo);
  lo = _mm_add_ps(lo, sh);
  sh = _mm_movehdup_ps(lo);
  lo = _mm_add_ss(lo, sh);
  return _mm_cvtss_f32(lo);
}

// saxpy-form GEMM: for each (i, p) broadcast A[i,p] and fma across the C row.
void v_gemm_nn(std::size_t m, std::size_t n, std::size_t k, const float* a,
               std::size_t lda, const float* b, std::size_t ldb, float* c,
               std::size_t ldc, bool acc) {
  const std::size_t n8 = n & ~std::size_t(7);
  for (std::size_t i = 0; i < m; ++i) {
    float* crow = c + i * ldc;
    if (!acc)
      for (std::size_t j = 0; j < n; ++j) crow[j] = 0.0f;
    const float* arow = a + i * lda;
    for (std::size_t p = 0; p < k; ++p) {
      const float av = arow[p];
      if (av == 0.0f) continue;
      const __m256 va = _mm256_set1_ps(av);
      const float* brow = b + p * ldb;
      std::size_t j = 0;
      for (; j < n8; j += 8) {
        __m256 vc = _mm256_loadu_ps(crow + j);
        vc = _mm256_fmadd_ps(va, _mm256_loadu_ps(brow + j), vc);
        _mm256_storeu_ps(crow + j, vc);
      }
      for (; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// dot-form GEMM: C[i,j] = <A_i, B_j> with 8 partial lanes reduced at the end.
void v_gemm_nt(std::size_t m, std::size_t n, std::size_t k, const float* a,
               std::size_t lda, const float* b, std::size_t ldb, float* c,
               std::size_t ldc, bool acc) {
  const std::size_t k8 = k & ~std::size_t(7);
  for (std::size_t i = 0; i < m; ++i) {
    const float* arow = a + i * lda;
    float* crow = c + i * ldc;
    for (std::size_t j = 0; j < n; ++j) {
      const float* brow = b + j * ldb;
      __m256 vacc = _mm256_setzero_ps();
      std::size_t p = 0;
      for (; p < k8; p += 8)
        vacc = _mm256_fmadd_ps(_mm256_loadu_ps(arow + p),
                               _mm256_loadu_ps(brow + p), vacc);
      float s = hsum256(vacc);
      for (; p < k; ++p) s += arow[p] * brow[p];
      crow[j] = acc ? crow[j] + s : s;
    }
  }
}

void v_gemm_tn(std::size_t m, std::size_t n, std::size_t k, const float* a,
               std::size_t lda, const float* b, std::size_t ldb, float* c,
               std::size_t ldc, bool acc) {
  const std::size_t n8 = n & ~std::size_t(7);
  for (std::size_t i = 0; i < m; ++i) {
    float* crow = c + i * ldc;
    if (!acc)
      for (std::size_t j = 0; j < n; ++j) crow[j] = 0.0f;
    for (std::size_t p = 0; p < k; ++p) {
      const float av = a[p * lda + i];
      if (av == 0.0f) continue;
      const __m256 va = _mm256_set1_ps(av);
      const float* brow = b + p * ldb;
      std::size_t j = 0;
      for (; j < n8; j += 8) {
        __m256 vc = _mm256_loadu_ps(crow + j);
        vc = _mm256_fmadd_ps(va, _mm256_loadu_ps(brow + j), vc);
        _mm256_storeu_ps(crow + j, vc);
      }
      for (; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void v_axpy(std::size_t n, float alpha, const float* x, float* y) {
  const __m256 va = _mm256_set1_ps(alpha);
  const std::size_t n8 = n & ~std::size_t(7);
  std::size_t i = 0;
  for (; i < n8; i += 8) {
    __m256 vy = _mm256_loadu_ps(y + i);
    vy = _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i), vy);
    _mm256_storeu_ps(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void v_scale(std::size_t n, float alpha, float* x) {
  const __m256 va = _mm256_set1_ps(alpha);
  const std::size_t n8 = n & ~std::size_t(7);
  std::size_t i = 0;
  for (; i < n8; i += 8)
    _mm256_storeu_ps(x + i, _mm256_mul_ps(va, _mm256_loadu_ps(x + i)));
  for (; i < n; ++i) x[i] *= alpha;
}

void v_lrelu_fwd(std::size_t n, float slope, const float* x, float* y) {
  const __m256 vs = _mm256_set1_ps(slope);
  const __m256 vz = _mm256_setzero_ps();
  const std::size_t n8 = n & ~std::size_t(7);
  std::size_t i = 0;
  for (; i < n8; i += 8) {
    const __m256 vx = _mm256_loadu_ps(x + i);
    const __m256 mask = _mm256_cmp_ps(vx, vz, _CMP_GT_OQ);
    _mm256_storeu_ps(y + i,
                     _mm256_blendv_ps(_mm256_mul_ps(vs, vx), vx, mask));
  }
  for (; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : slope * x[i];
}

void v_lrelu_bwd(std::size_t n, float slope, const float* x, const float* dy,
                 float* dx) {
  const __m256 vs = _mm256_set1_ps(slope);
  const __m256 vz = _mm256_setzero_ps();
  const std::size_t n8 = n & ~std::size_t(7);
  std::size_t i = 0;
  for (; i < n8; i += 8) {
    const __m256 vx = _mm256_loadu_ps(x + i);
    const __m256 vdy = _mm256_loadu_ps(dy + i);
    const __m256 mask = _mm256_cmp_ps(vx, vz, _CMP_GT_OQ);
    _mm256_storeu_ps(dx + i,
                     _mm256_blendv_ps(_mm256_mul_ps(vs, vdy), vdy, mask));
  }
  for (; i < n; ++i) dx[i] = x[i] > 0.0f ? dy[i] : slope * dy[i];
}

void v_adam(std::size_t n, float* p, const float* g, float* m, float* v,
            float lr, float b1, float b2, float eps, float bc1, float bc2) {
  const __m256 vb1 = _mm256_set1_ps(b1);
  const __m256 vb2 = _mm256_set1_ps(b2);
  const __m256 v1mb1 = _mm256_set1_ps(1.0f - b1);
  const __m256 v1mb2 = _mm256_set1_ps(1.0f - b2);
  const __m256 vlr = _mm256_set1_ps(lr);
  const __m256 veps = _mm256_set1_ps(eps);
  const __m256 vbc1 = _mm256_set1_ps(bc1);
  const __m256 vbc2 = _mm256_set1_ps(bc2);
  const std::size_t n8 = n & ~std::size_t(7);
  std::size_t i = 0;
  for (; i < n8; i += 8) {
    const __m256 vg = _mm256_loadu_ps(g + i);
    __m256 vm = _mm256_loadu_ps(m + i);
    __m256 vv = _mm256_loadu_ps(v + i);
    vm = _mm256_add_ps(_mm256_mul_ps(vb1, vm), _mm256_mul_ps(v1mb1, vg));
    vv = _mm256_add_ps(_mm256_mul_ps(vb2, vv),
                       _mm256_mul_ps(v1mb2, _mm256_mul_ps(vg, vg)));
    _mm256_storeu_ps(m + i, vm);
    _mm256_storeu_ps(v + i, vv);
    const __m256 mhat = _mm256_div_ps(vm, vbc1);
    const __m256 vhat = _mm256_div_ps(vv, vbc2);
    const __m256 denom = _mm256_add_ps(_mm256_sqrt_ps(vhat), veps);
    const __m256 step = _mm256_div_ps(_mm256_mul_ps(vlr, mhat), denom);
    _mm256_storeu_ps(p + i, _mm256_sub_ps(_mm256_loadu_ps(p + i), step));
  }
  for (; i < n; ++i) {
    m[i] = b1 * m[i] + (1.0f - b1) * g[i];
    v[i] = b2 * v[i] + (1.0f - b2) * g[i] * g[i];
    const float mhat = m[i] / bc1;
    const float vhat = v[i] / bc2;
    p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace

const Kernels& avx2_kernels() {
  static const Kernels k{
      "avx2",  v_gemm_nn,   v_gemm_nt,   v_gemm_tn, v_axpy,
      v_scale, v_lrelu_fwd, v_lrelu_bwd, v_adam,
  };
  return k;
}

}  // namespace mixgan::kern

#else  // non-x86: table exists but must never be selected

namespace mixgan::kern {
const Kernels& avx2_kernels() { return scalar_kernels(); }
}  // namespace mixgan::kern

#endif
