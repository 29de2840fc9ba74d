#pragma once

#include <cstddef>
#include <string>

#include "mixgan/core/kernels_ref.hpp"

namespace mixgan::kern {

enum class Backend { scalar, avx2 };

// Function table for the float inner loops. One instance per backend.
struct Kernels {
  const char* name;
  void (*gemm_nn)(std::size_t m, std::size_t n, std::size_t k, const float* a,
                  std::size_t lda, const float* b, std::size_t ldb, float* c,
                  std::size_t ldc, bool accumulate);
  void (*gemm_nt)(std::size_t m, std::size_t n, std::size_t k, const float* a,
                  std::size_t lda, const float* b, std::size_t ldb, float* c,
                  std::size_t ldc, bool accumulate);
  void (*gemm_tn)(std::size_t m, std::size_t n, std::size_t k, const float* a,
                  std::size_t lda, const float* b, std::size_t ldb, float* c,
                  std::size_t ldc, bool accumulate);
  void (*axpy)(std::size_t n, float alpha, const float* x, float* y);
  void (*scale)(std::size_t n, float alpha, float* x);
  void (*leaky_relu_fwd)(std::size_t n, float slope, const float* x, float* y);
  void (*leaky_relu_bwd)(std::size_t n, float slope, const float* x,
                         const float* dy, float* dx);
  void (*adam_update)(std::size_t n, float* p, const float* g, float* m,
                      float* v, float lr, float beta1, float beta2, float eps,
                      float bc1, float bc2);
};

const Kernels& scalar_kernels();
const Kernels& avx2_kernels();  // valid only when avx2_supported()

bool avx2_supported();

// Active table. Defaults to the best supported backend; the MIXGAN_KERNELS
// environment variable ("scalar" / "avx2" / "auto") is honored on first use.
const Kernels& active();
void set_backend(Backend b);
Backend current_backend();
std::string backend_name();

// Worker count for row-partitioned GEMM. 1 (the default) keeps every loop on
// the calling thread. Partitioning is by output rows, and each output element
// is accumulated serially by exactly one worker, so results are bit-identical
// for every thread count.
void set_threads(int n);
int threads();

// Dispatched, optionally row-parallel entry points used by the layers.
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const float* a,
             std::size_t lda, const float* b, std::size_t ldb, float* c,
             std::size_t ldc, bool accumulate);
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const float* a,
             std::size_t lda, const float* b, std::size_t ldb, float* c,
             std::size_t ldc, bool accumulate);
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const float* a,
             std::size_t lda, const float* b, std::size_t ldb, float* c,
             std::size_t ldc, bool accumulate);

// Type-generic wrappers: float goes through the dispatch table, every other
// scalar type through the reference kernels.
template <typename T>
void gemm_nn_t(std::size_t m, std::size_t n, std::size_t k, const T* a,
               std::size_t lda, const T* b, std::size_t ldb, T* c,
               std::size_t ldc, bool accumulate) {
  if constexpr (std::is_same_v<T, float>)
    gemm_nn(m, n, k, a, lda, b, ldb, c, ldc, accumulate);
  else
    gemm_nn_ref(m, n, k, a, lda, b, ldb, c, ldc, accumulate);
}

template <typename T>
void gemm_nt_t(std::size_t m, std::size_t n, std::size_t k, const T* a,
               std::size_t lda, const T* b, std::size_t ldb, T* c,
               std::size_t ldc, bool accumulate) {
  if constexpr (std::is_same_v<T, float>)
    gemm_nt(m, n, k, a, lda, b, ldb, c, ldc, accumulate);
  else
    gemm_nt_ref(m, n, k, a, lda, b, ldb, c, ldc, accumulate);
}

template <typename T>
void gemm_tn_t(std::size_t m, std::size_t n, std::size_t k, const T* a,
               std::size_t lda, const T* b, std::size_t ldb, T* c,
               std::size_t ldc, bool accumulate) {
  if constexpr (std::is_same_v<T, float>)
    gemm_tn(m, n, k, a, lda, b, ldb, c, ldc, accumulate);
  else
    gemm_tn_ref(m, n, k, a, lda, b, ldb, c, ldc, accumulate);
}

template <typename T>
void leaky_relu_fwd_t(std::size_t n, T slope, const T* x, T* y) {
  if constexpr (std::is_same_v<T, float>)
    active().leaky_relu_fwd(n, slope, x, y);
  else
    leaky_relu_fwd_ref(n, slope, x, y);
}

template <typename T>
void leaky_relu_bwd_t(std::size_t n, T slope, const T* x, const T* dy, T* dx) {
  if constexpr (std::is_same_v<T, float>)
    active().leaky_relu_bwd(n, slope, x, dy, dx);
  else
    leaky_relu_bwd_ref(n, slope, x, dy, dx);
}

template <typename T>
void adam_update_t(std::size_t n, T* p, const T* g, T* m, T* v, T lr, T beta1,
                   T beta2, T eps, T bc1, T bc2) {
  if constexpr (std::is_same_v<T, float>)
    active().adam_update(n, p, g, m, v, lr, beta1, beta2, eps, bc1, bc2);
  else
    adam_update_ref(n, p, g, m, v, lr, beta1, beta2, eps, bc1, bc2);
}

}  // namespace mixgan::kern
