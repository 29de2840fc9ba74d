#include "mixgan/core/backend.hpp"
#include "mixgan/core/kernels_ref.hpp"

namespace mixgan::kern {

namespace {

void s_gemm_nn(std::size_t m, std::size_t n, std::size_t k, const float* a,
               std::size_t lda, const float* b, std::size_t ldb, float* c,
               std::size_t ldc, bool acc) {
  gemm_nn_ref(m, n, k, a, lda, b, ldb, c, ldc, acc);
}
void s_gemm_nt(std::size_t m, std::size_t n, std::size_t k, const float* a,
               std::size_t lda, const float* b, std::size_t ldb, float* c,
               std::size_t ldc, bool acc) {
  gemm_nt_ref(m, n, k, a, lda, b, ldb, c, ldc, acc);
}
void s_gemm_tn(std::size_t m, std::size_t n, std::size_t k, const float* a,
               std::size_t lda, const float* b, std::size_t ldb, float* c,
               std::size_t ldc, bool acc) {
  gemm_tn_ref(m, n, k, a, lda, b, ldb, c, ldc, acc);
}
void s_axpy(std::size_t n, float alpha, const float* x, float* y) {
  axpy_ref(n, alpha, x, y);
}
void s_scale(std::size_t n, float alpha, float* x) { scale_ref(n, alpha, x); }
void s_lrelu_fwd(std::size_t n, float slope, const float* x, float* y) {
  leaky_relu_fwd_ref(n, slope, x, y);
}
void s_lrelu_bwd(std::size_t n, float slope, const float* x, const float* dy,
                 float* dx) {
  leaky_relu_bwd_ref(n, slope, x, dy, dx);
}
void s_adam(std::size_t n, float* p, const float* g, float* m, float* v,
            float lr, float b1, float b2, float eps, float bc1, float bc2) {
  adam_update_ref(n, p, g, m, v, lr, b1, b2, eps, bc1, bc2);
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k{
      "scalar",    s_gemm_nn,   s_gemm_nt,   s_gemm_tn, s_axpy,
      s_scale,     s_lrelu_fwd, s_lrelu_bwd, s_adam,
  };
  return k;
}

}  // namespace mixgan::kern
