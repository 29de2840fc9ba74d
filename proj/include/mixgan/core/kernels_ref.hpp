#pragma once

#include <cmath>
#include <cstddef>

namespace mixgan::kern {

// Reference kernels. These are the semantic ground truth for the dispatched
// float variants and the only implementation used for double tensors. Loop
// order is part of the contract: each output element accumulates serially in
// ascending k, so results are independent of row partitioning.

// C(m x n) = A(m x k) * B(k x n), optionally accumulating into C.
template <typename T>
void gemm_nn_ref(std::size_t m, std::size_t n, std::size_t k, const T* a,
                 std::size_t lda, const T* b, std::size_t ldb, T* c,
                 std::size_t ldc, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    T* crow = c + i * ldc;
    if (!accumulate)
      for (std::size_t j = 0; j < n; ++j) crow[j] = T(0);
    const T* arow = a + i * lda;
    for (std::size_t p = 0; p < k; ++p) {
      const T av = arow[p];
      if (av == T(0)) continue;
      const T* brow = b + p * ldb;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// C(m x n) = A(m x k) * B(n x k)^T
template <typename T>
void gemm_nt_ref(std::size_t m, std::size_t n, std::size_t k, const T* a,
                 std::size_t lda, const T* b, std::size_t ldb, T* c,
                 std::size_t ldc, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    const T* arow = a + i * lda;
    T* crow = c + i * ldc;
    for (std::size_t j = 0; j < n; ++j) {
      const T* brow = b + j * ldb;
      T acc = T(0);
      for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
      crow[j] = accumulate ? crow[j] + acc : acc;
    }
  }
}

// C(m x n) = A(k x m)^T * B(k x n)
template <typename T>
void gemm_tn_ref(std::size_t m, std::size_t n, std::size_t k, const T* a,
                 std::size_t lda, const T* b, std::size_t ldb, T* c,
                 std::size_t ldc, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    T* crow = c + i * ldc;
    if (!accumulate)
      for (std::size_t j = 0; j < n; ++j) crow[j] = T(0);
    for (std::size_t p = 0; p < k; ++p) {
      const T av = a[p * lda + i];
      if (av == T(0)) continue;
      const T* brow = b + p * ldb;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

template <typename T>
void axpy_ref(std::size_t n, T alpha, const T* x, T* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <typename T>
void scale_ref(std::size_t n, T alpha, T* x) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

template <typename T>
void leaky_relu_fwd_ref(std::size_t n, T slope, const T* x, T* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > T(0) ? x[i] : slope * x[i];
}

// dx = dy * (x > 0 ? 1 : slope); accumulation is not needed by the layers.
template <typename T>
void leaky_relu_bwd_ref(std::size_t n, T slope, const T* x, const T* dy,
                        T* dx) {
  for (std::size_t i = 0; i < n; ++i)
    dx[i] = x[i] > T(0) ? dy[i] : slope * dy[i];
}

// One bias-corrected Adam step over a flat parameter array. bc1/bc2 are the
// precomputed 1 - beta^t correction denominators for the current step.
template <typename T>
void adam_update_ref(std::size_t n, T* p, const T* g, T* m, T* v, T lr, T beta1,
                     T beta2, T eps, T bc1, T bc2) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (T(1) - beta1) * g[i];
    v[i] = beta2 * v[i] + (T(1) - beta2) * g[i] * g[i];
    const T mhat = m[i] / bc1;
    const T vhat = v[i] / bc2;
    p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace mixgan::kern
