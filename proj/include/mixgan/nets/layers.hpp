#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mixgan/core/backend.hpp"
#include "mixgan/core/error.hpp"
#include "mixgan/core/tensor.hpp"

namespace mixgan::nets {

// A learnable tensor and its gradient accumulator. Names are layer-local
// ("conv1.w"); the owning network prefixes them for checkpoints.
template <typename T>
struct Param {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;

  Param(std::string n, Shape shape)
      : name(std::move(n)), value(shape), grad(std::move(shape)) {}
};

// Persistent but non-learnable state (batch-norm running stats).
template <typename T>
using Buffer = Param<T>;

// Base of the manual-backprop layer zoo. forward() caches whatever backward()
// needs; backward() adds into parameter gradients and returns dL/dx.
template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor<T> forward(const Tensor<T>& x, bool train) = 0;
  virtual Tensor<T> backward(const Tensor<T>& dy) = 0;
  virtual void collect_params(std::vector<Param<T>*>&) {}
  virtual void collect_buffers(std::vector<Buffer<T>*>&) {}
};

namespace detail {

// im2col for a (C, H, W) sample: row (c, ky, kx), column (oy, ox). The same
// geometry serves transposed convolution with the roles of input and output
// grids swapped.
template <typename T>
void im2col(const T* x, std::size_t c, std::size_t h, std::size_t w,
            std::size_t k, std::size_t s, std::size_t p, std::size_t ho,
            std::size_t wo, T* col) {
  const std::size_t l = ho * wo;
  for (std::size_t ch = 0; ch < c; ++ch)
    for (std::size_t ky = 0; ky < k; ++ky)
      for (std::size_t kx = 0; kx < k; ++kx) {
        T* row = col + ((ch * k + ky) * k + kx) * l;
        for (std::size_t oy = 0; oy < ho; ++oy) {
          const std::ptrdiff_t iy =
              std::ptrdiff_t(oy * s + ky) - std::ptrdiff_t(p);
          const bool row_in = iy >= 0 && iy < std::ptrdiff_t(h);
          for (std::size_t ox = 0; ox < wo; ++ox) {
            const std::ptrdiff_t ix =
                std::ptrdiff_t(ox * s + kx) - std::ptrdiff_t(p);
            row[oy * wo + ox] =
                (row_in && ix >= 0 && ix < std::ptrdiff_t(w))
                    ? x[(ch * h + std::size_t(iy)) * w + std::size_t(ix)]
                    : T(0);
          }
        }
      }
}

// Scatter-accumulate transpose of im2col: col rows land back on the (C, H, W)
// grid. The caller zeroes the output first.
template <typename T>
void col2im(const T* col, std::size_t c, std::size_t h, std::size_t w,
            std::size_t k, std::size_t s, std::size_t p, std::size_t ho,
            std::size_t wo, T* x) {
  const std::size_t l = ho * wo;
  for (std::size_t ch = 0; ch < c; ++ch)
    for (std::size_t ky = 0; ky < k; ++ky)
      for (std::size_t kx = 0; kx < k; ++kx) {
        const T* row = col + ((ch * k + ky) * k + kx) * l;
        for (std::size_t oy = 0; oy < ho; ++oy) {
          const std::ptrdiff_t iy =
              std::ptrdiff_t(oy * s + ky) - std::ptrdiff_t(p);
          if (iy < 0 || iy >= std::ptrdiff_t(h)) continue;
          for (std::size_t ox = 0; ox < wo; ++ox) {
            const std::ptrdiff_t ix =
                std::ptrdiff_t(ox * s + kx) - std::ptrdiff_t(p);
            if (ix < 0 || ix >= std::ptrdiff_t(w)) continue;
            x[(ch * h + std::size_t(iy)) * w + std::size_t(ix)] +=
                row[oy * wo + ox];
          }
        }
      }
}

inline std::size_t conv_out(std::size_t in, std::size_t k, std::size_t s,
                            std::size_t p) {
  return (in + 2 * p - k) / s + 1;
}

inline std::size_t tconv_out(std::size_t in, std::size_t k, std::size_t s,
                             std::size_t p) {
  return (in - 1) * s + k - 2 * p;
}

}  // namespace detail

// Fully connected: y = x W^T + b with W stored (out, in).
template <typename T>
class Dense : public Layer<T> {
 public:
  Dense(std::string name, std::size_t in, std::size_t out)
      : in_(in), out_(out), w_(name + ".w", {out, in}), b_(name + ".b", {out}) {}

  Tensor<T> forward(const Tensor<T>& x, bool) override {
    require_rank(x, 2, "Dense input");
    if (x.dim(1) != in_)
      throw ShapeError("Dense " + w_.name + ": expected " +
                       std::to_string(in_) + " features, got " +
                       std::to_string(x.dim(1)));
    x_ = x;
    const std::size_t n = x.dim(0);
    Tensor<T> y({n, out_});
    kern::gemm_nt_t<T>(n, out_, in_, x.data(), in_, w_.value.data(), in_,
                       y.data(), out_, false);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < out_; ++j) y.at2(i, j) += b_.value[j];
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) override {
    const std::size_t n = dy.dim(0);
    // dW += dy^T x, db += column sums, dx = dy W.
    kern::gemm_tn_t<T>(out_, in_, n, dy.data(), out_, x_.data(), in_,
                       w_.grad.data(), in_, true);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < out_; ++j) b_.grad[j] += dy.at2(i, j);
    Tensor<T> dx({n, in_});
    kern::gemm_nn_t<T>(n, in_, out_, dy.data(), out_, w_.value.data(), in_,
                       dx.data(), in_, false);
    return dx;
  }

  void collect_params(std::vector<Param<T>*>& out) override {
    out.push_back(&w_);
    out.push_back(&b_);
  }

 private:
  std::size_t in_, out_;
  Param<T> w_, b_;
  Tensor<T> x_;
};

// Strided convolution, square kernel, symmetric zero padding. Weights are
// (out, in, k, k), treated as (out, in*k*k) against im2col patches.
template <typename T>
class Conv2d : public Layer<T> {
 public:
  Conv2d(std::string name, std::size_t cin, std::size_t cout, std::size_t k,
         std::size_t s, std::size_t p)
      : cin_(cin), cout_(cout), k_(k), s_(s), p_(p),
        w_(name + ".w", {cout, cin, k, k}), b_(name + ".b", {cout}) {}

  Tensor<T> forward(const Tensor<T>& x, bool) override {
    require_rank(x, 4, "Conv2d input");
    if (x.dim(1) != cin_)
      throw ShapeError("Conv2d " + w_.name + ": expected " +
                       std::to_string(cin_) + " channels, got " +
                       std::to_string(x.dim(1)));
    x_ = x;
    const std::size_t n = x.dim(0), h = x.dim(2), w = x.dim(3);
    const std::size_t ho = detail::conv_out(h, k_, s_, p_);
    const std::size_t wo = detail::conv_out(w, k_, s_, p_);
    const std::size_t kk = cin_ * k_ * k_, l = ho * wo;

    Tensor<T> y({n, cout_, ho, wo});
    Tensor<T> col({kk, l});
    for (std::size_t i = 0; i < n; ++i) {
      detail::im2col(&x[i * cin_ * h * w], cin_, h, w, k_, s_, p_, ho, wo,
                     col.data());
      T* yi = &y[i * cout_ * l];
      kern::gemm_nn_t<T>(cout_, l, kk, w_.value.data(), kk, col.data(), l, yi,
                         l, false);
      for (std::size_t c = 0; c < cout_; ++c)
        for (std::size_t j = 0; j < l; ++j) yi[c * l + j] += b_.value[c];
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) override {
    const std::size_t n = x_.dim(0), h = x_.dim(2), w = x_.dim(3);
    const std::size_t ho = dy.dim(2), wo = dy.dim(3);
    const std::size_t kk = cin_ * k_ * k_, l = ho * wo;

    Tensor<T> dx(x_.shape());
    Tensor<T> col({kk, l}), dcol({kk, l});
    for (std::size_t i = 0; i < n; ++i) {
      const T* dyi = &dy[i * cout_ * l];
      // dW += dy_i col_i^T (recomputing the patch matrix beats caching it).
      detail::im2col(&x_[i * cin_ * h * w], cin_, h, w, k_, s_, p_, ho, wo,
                     col.data());
      kern::gemm_nt_t<T>(cout_, kk, l, dyi, l, col.data(), l, w_.grad.data(),
                         kk, true);
      for (std::size_t c = 0; c < cout_; ++c)
        for (std::size_t j = 0; j < l; ++j) b_.grad[c] += dyi[c * l + j];
      // dcol = W^T dy_i, then scatter back onto the input grid.
      kern::gemm_tn_t<T>(kk, l, cout_, w_.value.data(), kk, dyi, l,
                         dcol.data(), l, false);
      detail::col2im(dcol.data(), cin_, h, w, k_, s_, p_, ho, wo,
                     &dx[i * cin_ * h * w]);
    }
    return dx;
  }

  void collect_params(std::vector<Param<T>*>& out) override {
    out.push_back(&w_);
    out.push_back(&b_);
  }

 private:
  std::size_t cin_, cout_, k_, s_, p_;
  Param<T> w_, b_;
  Tensor<T> x_;
};

// Transposed convolution (fractionally strided). Weights are (in, out, k, k);
// forward is the data-gradient of the matching Conv2d and vice versa.
template <typename T>
class ConvT2d : public Layer<T> {
 public:
  ConvT2d(std::string name, std::size_t cin, std::size_t cout, std::size_t k,
          std::size_t s, std::size_t p)
      : cin_(cin), cout_(cout), k_(k), s_(s), p_(p),
        w_(name + ".w", {cin, cout, k, k}), b_(name + ".b", {cout}) {}

  Tensor<T> forward(const Tensor<T>& x, bool) override {
    require_rank(x, 4, "ConvT2d input");
    if (x.dim(1) != cin_)
      throw ShapeError("ConvT2d " + w_.name + ": expected " +
                       std::to_string(cin_) + " channels, got " +
                       std::to_string(x.dim(1)));
    x_ = x;
    const std::size_t n = x.dim(0), hin = x.dim(2), win = x.dim(3);
    const std::size_t ho = detail::tconv_out(hin, k_, s_, p_);
    const std::size_t wo = detail::tconv_out(win, k_, s_, p_);
    const std::size_t kk = cout_ * k_ * k_, l = hin * win;

    Tensor<T> y({n, cout_, ho, wo});
    Tensor<T> col({kk, l});
    for (std::size_t i = 0; i < n; ++i) {
      const T* xi = &x[i * cin_ * l];
      kern::gemm_tn_t<T>(kk, l, cin_, w_.value.data(), kk, xi, l, col.data(),
                         l, false);
      T* yi = &y[i * cout_ * ho * wo];
      detail::col2im(col.data(), cout_, ho, wo, k_, s_, p_, hin, win, yi);
      for (std::size_t c = 0; c < cout_; ++c)
        for (std::size_t j = 0; j < ho * wo; ++j)
          yi[c * ho * wo + j] += b_.value[c];
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) override {
    const std::size_t n = x_.dim(0), hin = x_.dim(2), win = x_.dim(3);
    const std::size_t ho = dy.dim(2), wo = dy.dim(3);
    const std::size_t kk = cout_ * k_ * k_, l = hin * win;

    Tensor<T> dx(x_.shape());
    Tensor<T> dcol({kk, l});
    for (std::size_t i = 0; i < n; ++i) {
      const T* dyi = &dy[i * cout_ * ho * wo];
      detail::im2col(dyi, cout_, ho, wo, k_, s_, p_, hin, win, dcol.data());
      // dx_i = W dcol, dW += x_i dcol^T.
      kern::gemm_nn_t<T>(cin_, l, kk, w_.value.data(), kk, dcol.data(), l,
                         &dx[i * cin_ * l], l, false);
      kern::gemm_nt_t<T>(cin_, kk, l, &x_[i * cin_ * l], l, dcol.data(), l,
                         w_.grad.data(), kk, true);
      for (std::size_t c = 0; c < cout_; ++c)
        for (std::size_t j = 0; j < ho * wo; ++j)
          b_.grad[c] += dyi[c * ho * wo + j];
    }
    return dx;
  }

  void collect_params(std::vector<Param<T>*>& out) override {
    out.push_back(&w_);
    out.push_back(&b_);
  }

 private:
  std::size_t cin_, cout_, k_, s_, p_;
  Param<T> w_, b_;
  Tensor<T> x_;
};

// Batch normalization over (N) for rank-2 or (N, H, W) for rank-4 inputs.
// Statistics accumulate in double regardless of T. Training mode normalizes
// with biased batch variance and updates running stats (unbiased variance,
// momentum 0.1); eval mode applies the running stats as a fixed affine map.
template <typename T>
class BatchNorm : public Layer<T> {
 public:
  BatchNorm(std::string name, std::size_t channels, T momentum = T(0.1),
            T eps = T(1e-5))
      : c_(channels), momentum_(momentum), eps_(eps),
        gamma_(name + ".gamma", {channels}), beta_(name + ".beta", {channels}),
        rmean_(name + ".running_mean", {channels}),
        rvar_(name + ".running_var", {channels}) {
    gamma_.value.fill(T(1));
    rvar_.value.fill(T(1));
  }

  Tensor<T> forward(const Tensor<T>& x, bool train) override {
    if (x.rank() != 2 && x.rank() != 4)
      throw ShapeError("BatchNorm expects rank 2 or 4, got " +
                       shape_str(x.shape()));
    if (x.dim(1) != c_)
      throw ShapeError("BatchNorm " + gamma_.name + ": expected " +
                       std::to_string(c_) + " channels, got " +
                       std::to_string(x.dim(1)));
    train_ = train;
    x_ = x;
    const std::size_t n = x.dim(0);
    const std::size_t sp = x.rank() == 4 ? x.dim(2) * x.dim(3) : 1;
    const std::size_t m = n * sp;
    if (train && m < 2)
      throw ArgumentError("BatchNorm needs at least 2 values per channel in "
                          "training mode");

    mean_.assign(c_, 0.0);
    var_.assign(c_, 0.0);
    if (train) {
      for (std::size_t ch = 0; ch < c_; ++ch) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const T* px = &x[(i * c_ + ch) * sp];
          for (std::size_t j = 0; j < sp; ++j) acc += double(px[j]);
        }
        mean_[ch] = acc / double(m);
        double sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const T* px = &x[(i * c_ + ch) * sp];
          for (std::size_t j = 0; j < sp; ++j) {
            const double d = double(px[j]) - mean_[ch];
            sq += d * d;
          }
        }
        var_[ch] = sq / double(m);  // biased, used for normalization
        const double unbiased = m > 1 ? sq / double(m - 1) : sq;
        rmean_.value[ch] = T((1.0 - double(momentum_)) *
                                 double(rmean_.value[ch]) +
                             double(momentum_) * mean_[ch]);
        rvar_.value[ch] = T((1.0 - double(momentum_)) *
                                double(rvar_.value[ch]) +
                            double(momentum_) * unbiased);
      }
    } else {
      for (std::size_t ch = 0; ch < c_; ++ch) {
        mean_[ch] = double(rmean_.value[ch]);
        var_[ch] = double(rvar_.value[ch]);
      }
    }

    Tensor<T> y(x.shape());
    xhat_ = Tensor<T>(x.shape());
    for (std::size_t ch = 0; ch < c_; ++ch) {
      const T inv = T(1.0 / std::sqrt(var_[ch] + double(eps_)));
      const T mu = T(mean_[ch]);
      const T g = gamma_.value[ch], b = beta_.value[ch];
      for (std::size_t i = 0; i < n; ++i) {
        const T* px = &x[(i * c_ + ch) * sp];
        T* ph = &xhat_[(i * c_ + ch) * sp];
        T* py = &y[(i * c_ + ch) * sp];
        for (std::size_t j = 0; j < sp; ++j) {
          ph[j] = (px[j] - mu) * inv;
          py[j] = g * ph[j] + b;
        }
      }
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) override {
    const std::size_t n = dy.dim(0);
    const std::size_t sp = dy.rank() == 4 ? dy.dim(2) * dy.dim(3) : 1;
    const std::size_t m = n * sp;
    Tensor<T> dx(dy.shape());

    for (std::size_t ch = 0; ch < c_; ++ch) {
      const double inv = 1.0 / std::sqrt(var_[ch] + double(eps_));
      double dg = 0.0, db = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const T* pdy = &dy[(i * c_ + ch) * sp];
        const T* ph = &xhat_[(i * c_ + ch) * sp];
        for (std::size_t j = 0; j < sp; ++j) {
          dg += double(pdy[j]) * double(ph[j]);
          db += double(pdy[j]);
        }
      }
      gamma_.grad[ch] += T(dg);
      beta_.grad[ch] += T(db);

      const double g = double(gamma_.value[ch]);
      if (!train_) {
        // Running stats are constants: the map is a fixed affine transform.
        const T scale = T(g * inv);
        for (std::size_t i = 0; i < n; ++i) {
          const T* pdy = &dy[(i * c_ + ch) * sp];
          T* pdx = &dx[(i * c_ + ch) * sp];
          for (std::size_t j = 0; j < sp; ++j) pdx[j] = pdy[j] * scale;
        }
        continue;
      }
      // dx = (g * inv / m) * (m dy - sum(dy) - xhat * sum(dy xhat))
      const double k1 = g * inv / double(m);
      for (std::size_t i = 0; i < n; ++i) {
        const T* pdy = &dy[(i * c_ + ch) * sp];
        const T* ph = &xhat_[(i * c_ + ch) * sp];
        T* pdx = &dx[(i * c_ + ch) * sp];
        for (std::size_t j = 0; j < sp; ++j)
          pdx[j] = T(k1 * (double(m) * double(pdy[j]) - db -
                           double(ph[j]) * dg));
      }
    }
    return dx;
  }

  void collect_params(std::vector<Param<T>*>& out) override {
    out.push_back(&gamma_);
    out.push_back(&beta_);
  }
  void collect_buffers(std::vector<Buffer<T>*>& out) override {
    out.push_back(&rmean_);
    out.push_back(&rvar_);
  }

 private:
  std::size_t c_;
  T momentum_, eps_;
  Param<T> gamma_, beta_;
  Buffer<T> rmean_, rvar_;
  Tensor<T> x_, xhat_;
  std::vector<double> mean_, var_;
  bool train_ = true;
};

template <typename T>
class ReLU : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x, bool) override {
    x_ = x;
    Tensor<T> y(x.shape());
    kern::leaky_relu_fwd_t<T>(x.size(), T(0), x.data(), y.data());
    return y;
  }
  Tensor<T> backward(const Tensor<T>& dy) override {
    Tensor<T> dx(dy.shape());
    kern::leaky_relu_bwd_t<T>(dy.size(), T(0), x_.data(), dy.data(),
                              dx.data());
    return dx;
  }

 private:
  Tensor<T> x_;
};

template <typename T>
class LeakyReLU : public Layer<T> {
 public:
  explicit LeakyReLU(T slope) : slope_(slope) {}
  Tensor<T> forward(const Tensor<T>& x, bool) override {
    x_ = x;
    Tensor<T> y(x.shape());
    kern::leaky_relu_fwd_t<T>(x.size(), slope_, x.data(), y.data());
    return y;
  }
  Tensor<T> backward(const Tensor<T>& dy) override {
    Tensor<T> dx(dy.shape());
    kern::leaky_relu_bwd_t<T>(dy.size(), slope_, x_.data(), dy.data(),
                              dx.data());
    return dx;
  }

 private:
  T slope_;
  Tensor<T> x_;
};

template <typename T>
class Tanh : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x, bool) override {
    y_ = Tensor<T>(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) y_[i] = std::tanh(x[i]);
    return y_;
  }
  Tensor<T> backward(const Tensor<T>& dy) override {
    Tensor<T> dx(dy.shape());
    for (std::size_t i = 0; i < dy.size(); ++i)
      dx[i] = dy[i] * (T(1) - y_[i] * y_[i]);
    return dx;
  }

 private:
  Tensor<T> y_;
};

// Reinterprets each sample under a new per-sample shape (e.g. flatten).
template <typename T>
class Reshape : public Layer<T> {
 public:
  explicit Reshape(Shape per_sample) : per_sample_(std::move(per_sample)) {}
  Tensor<T> forward(const Tensor<T>& x, bool) override {
    in_shape_ = x.shape();
    Shape out = {x.dim(0)};
    out.insert(out.end(), per_sample_.begin(), per_sample_.end());
    return x.reshaped(std::move(out));
  }
  Tensor<T> backward(const Tensor<T>& dy) override {
    return dy.reshaped(in_shape_);
  }

 private:
  Shape per_sample_;
  Shape in_shape_;
};

// Ordered layer stack with shared forward/backward plumbing.
template <typename T>
class Sequential {
 public:
  template <typename L, typename... Args>
  L* add(Args&&... args) {
    auto layer = std::make_unique<L>(std::forward<Args>(args)...);
    L* raw = layer.get();
    layers_.push_back(std::move(layer));
    return raw;
  }

  Tensor<T> forward(const Tensor<T>& x, bool train) {
    Tensor<T> h = x;
    for (auto& l : layers_) h = l->forward(h, train);
    return h;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    Tensor<T> g = dy;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it)
      g = (*it)->backward(g);
    return g;
  }

  void collect_params(std::vector<Param<T>*>& out) {
    for (auto& l : layers_) l->collect_params(out);
  }
  void collect_buffers(std::vector<Buffer<T>*>& out) {
    for (auto& l : layers_) l->collect_buffers(out);
  }

  std::size_t size() const { return layers_.size(); }
  Layer<T>& at(std::size_t i) { return *layers_[i]; }

 private:
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

}  // namespace mixgan::nets
