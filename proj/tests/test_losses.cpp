#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "mixgan/core/rng.hpp"
#include "mixgan/losses/adam.hpp"
#include "mixgan/losses/losses.hpp"
#include "mixgan/nets/layers.hpp"
#include "support/fd.hpp"

using namespace mixgan;
using losses::AdamOptimizer;
using losses::encoder_adv_loss;
using losses::l1_reconstruction;
using losses::lsgan_disc_loss;
using losses::lsgan_gen_loss;

namespace {

template <typename T>
Tensor<T> make(const Shape& shape, std::initializer_list<T> vals) {
  Tensor<T> t(shape);
  std::size_t i = 0;
  for (T v : vals) t[i++] = v;
  return t;
}

template <typename T>
Tensor<T> randn(const Shape& shape, RandomEngine& rng, T scale = T(1)) {
  Tensor<T> t(shape);
  rng.fill_normal(t.data(), t.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] *= scale;
  return t;
}

// Two-layer scoring head used to compose losses with parameters for the
// finite-difference checks (37 parameters).
nets::Sequential<double> make_mlp(std::uint64_t seed) {
  nets::Sequential<double> mlp;
  mlp.add<nets::Dense<double>>("a", 4, 6);
  mlp.add<nets::LeakyReLU<double>>(0.2);
  mlp.add<nets::Dense<double>>("b", 6, 1);
  std::vector<nets::Param<double>*> ps;
  mlp.collect_params(ps);
  RandomEngine rng(seed);
  for (auto* p : ps) {
    rng.fill_normal(p->value.data(), p->value.size());
    for (std::size_t i = 0; i < p->value.size(); ++i) p->value[i] *= 0.4;
    p->grad.zero();
  }
  return mlp;
}

std::vector<nets::Param<double>*> params_of(nets::Sequential<double>& s) {
  std::vector<nets::Param<double>*> ps;
  s.collect_params(ps);
  return ps;
}

}  // namespace

TEST_CASE("closed forms and brute-force oracle") {
  const auto perfect = lsgan_disc_loss(make<float>({2}, {1, 1}),
                                       make<float>({2}, {0, 0}));
  CHECK(std::abs(perfect.value) < 1e-12);
  const auto flipped =
      lsgan_disc_loss(make<float>({1}, {0}), make<float>({1}, {1}));
  CHECK(std::abs(flipped.value - 2.0) < 1e-12);

  CHECK(std::abs(lsgan_gen_loss(make<float>({3}, {1, 1, 1})).value) < 1e-12);
  CHECK(std::abs(lsgan_gen_loss(make<float>({1}, {0})).value - 1.0) < 1e-12);
  CHECK(std::abs(encoder_adv_loss(make<float>({1}, {0})).value - 1.0) <
        1e-12);

  const Tensor<float> same = make<float>({4}, {0.5f, -0.25f, 1, -1});
  CHECK(std::abs(l1_reconstruction(same, same).value) < 1e-12);
  Tensor<float> plus({2, 1, 2, 2});
  plus.fill(1.0f);
  Tensor<float> minus({2, 1, 2, 2});
  minus.fill(-1.0f);
  CHECK(std::abs(l1_reconstruction(plus, minus).value - 2.0) < 1e-12);

  // Independent per-element accumulation oracle on random scores.
  RandomEngine rng(31);
  const Tensor<double> r = randn<double>({17}, rng);
  const Tensor<double> f = randn<double>({9}, rng);
  double want = 0.0;
  for (std::size_t i = 0; i < 17; ++i) want += (r[i] - 1.0) * (r[i] - 1.0);
  want /= 17.0;
  double wf = 0.0;
  for (std::size_t i = 0; i < 9; ++i) wf += f[i] * f[i];
  want += wf / 9.0;
  CHECK(std::abs(lsgan_disc_loss(r, f).value - want) < 1e-12);

  double wg = 0.0;
  for (std::size_t i = 0; i < 9; ++i) wg += (f[i] - 1.0) * (f[i] - 1.0);
  CHECK(std::abs(lsgan_gen_loss(f).value - wg / 9.0) < 1e-12);

  const Tensor<double> a = randn<double>({3, 5}, rng);
  const Tensor<double> b = randn<double>({3, 5}, rng);
  double wl = 0.0;
  for (std::size_t i = 0; i < 15; ++i) wl += std::abs(a[i] - b[i]);
  CHECK(std::abs(l1_reconstruction(a, b).value - wl / 15.0) < 1e-12);

  // Non-negativity on the random draws plus a sweep of fresh ones.
  for (std::uint64_t s = 0; s < 8; ++s) {
    RandomEngine r2(100 + s);
    const Tensor<double> x = randn<double>({5}, r2);
    const Tensor<double> y = randn<double>({7}, r2);
    CHECK(lsgan_disc_loss(x, y).value >= 0.0);
    CHECK(lsgan_gen_loss(x).value >= 0.0);
    const Tensor<double> u = randn<double>({2, 3}, r2);
    const Tensor<double> v = randn<double>({2, 3}, r2);
    CHECK(l1_reconstruction(u, v).value >= 0.0);
  }

  // Zero exactly when every label is achieved, positive otherwise.
  CHECK(lsgan_disc_loss(make<float>({2}, {1, 1}), make<float>({1}, {0}))
            .value == 0.0);
  CHECK(lsgan_disc_loss(make<float>({2}, {1, 0.999f}), make<float>({1}, {0}))
            .value > 0.0);
  CHECK(lsgan_disc_loss(make<float>({1}, {1}), make<float>({1}, {1e-4f}))
            .value > 0.0);
}

TEST_CASE("argument validation") {
  const Tensor<float> some = make<float>({2}, {0.5f, 0.5f});
  const Tensor<float> none;
  CHECK_THROWS_AS(lsgan_disc_loss(none, some), ArgumentError);
  CHECK_THROWS_AS(lsgan_disc_loss(some, none), ArgumentError);
  CHECK_THROWS_AS(lsgan_gen_loss(none), ArgumentError);
  CHECK_THROWS_AS(encoder_adv_loss(none), ArgumentError);
  CHECK_THROWS_AS(
      l1_reconstruction(make<float>({2}, {0, 0}), make<float>({3}, {0, 0, 0})),
      ShapeError);
}

TEST_CASE("loss gradients through a small network match finite differences") {
  RandomEngine rng(41);

  SUBCASE("discriminator loss, both score paths") {
    auto mlp = make_mlp(1);
    Tensor<double> xr = randn<double>({3, 4}, rng);
    Tensor<double> xf = randn<double>({2, 4}, rng);
    auto loss = [&] {
      return lsgan_disc_loss(mlp.forward(xr, true), mlp.forward(xf, true))
          .value;
    };
    const Tensor<double> sr = mlp.forward(xr, true);
    const Tensor<double> sf = mlp.forward(xf, true);
    const auto l = lsgan_disc_loss(sr, sf);
    // Backprop each faction from its own cached forward pass.
    const Tensor<double> dxf = mlp.backward(l.dfake);
    mlp.forward(xr, true);
    const Tensor<double> dxr = mlp.backward(l.dreal);

    fdcheck::Stat st;
    fdcheck::scan(st, "xr", xr.data(), fdcheck::sample_indices(12, 12),
                  dxr.data(), loss);
    fdcheck::scan(st, "xf", xf.data(), fdcheck::sample_indices(8, 8),
                  dxf.data(), loss);
    for (auto* p : params_of(mlp))
      fdcheck::scan(st, p->name, p->value.data(),
                    fdcheck::sample_indices(p->value.size(), 48),
                    p->grad.data(), loss);
    INFO("worst " << st.worst << ": " << st.worst_an << " vs " << st.worst_fd);
    CHECK(st.max_err < 1e-4);
  }

  SUBCASE("generator and encoder adversarial losses") {
    auto mlp = make_mlp(2);
    Tensor<double> x = randn<double>({4, 4}, rng);
    auto loss = [&] { return lsgan_gen_loss(mlp.forward(x, true)).value; };
    const auto l = lsgan_gen_loss(mlp.forward(x, true));
    const Tensor<double> dx = mlp.backward(l.dscores);

    fdcheck::Stat st;
    fdcheck::scan(st, "x", x.data(), fdcheck::sample_indices(16, 16),
                  dx.data(), loss);
    for (auto* p : params_of(mlp))
      fdcheck::scan(st, p->name, p->value.data(),
                    fdcheck::sample_indices(p->value.size(), 48),
                    p->grad.data(), loss);
    INFO("worst " << st.worst << ": " << st.worst_an << " vs " << st.worst_fd);
    CHECK(st.max_err < 1e-4);

    // encoder_adv_loss is the same functional form; spot-check its gradient
    // agrees with lsgan_gen_loss on identical scores.
    const Tensor<double> s = randn<double>({5}, rng);
    const auto g1 = lsgan_gen_loss(s);
    const auto g2 = encoder_adv_loss(s);
    CHECK(g1.value == g2.value);
    CHECK(std::memcmp(g1.dscores.data(), g2.dscores.data(),
                      5 * sizeof(double)) == 0);
  }

  SUBCASE("reconstruction loss") {
    nets::Sequential<double> mlp;
    mlp.add<nets::Dense<double>>("a", 4, 4);
    mlp.add<nets::Tanh<double>>();
    for (auto* p : params_of(mlp)) {
      RandomEngine r2(3);
      r2.fill_normal(p->value.data(), p->value.size());
      for (std::size_t i = 0; i < p->value.size(); ++i) p->value[i] *= 0.5;
      p->grad.zero();
    }
    Tensor<double> z = randn<double>({3, 4}, rng);
    // Keep every |x - x_hat| far from the absolute-value kink.
    const Tensor<double> base = mlp.forward(z, true);
    Tensor<double> x(base.shape());
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] = base[i] + (i % 2 == 0 ? 0.3 : -0.4);

    auto loss = [&] { return l1_reconstruction(x, mlp.forward(z, true)).value; };
    const auto l = l1_reconstruction(x, mlp.forward(z, true));
    const Tensor<double> dz = mlp.backward(l.dx_hat);

    fdcheck::Stat st;
    fdcheck::scan(st, "z", z.data(), fdcheck::sample_indices(12, 12),
                  dz.data(), loss);
    for (auto* p : params_of(mlp))
      fdcheck::scan(st, p->name, p->value.data(),
                    fdcheck::sample_indices(p->value.size(), 20),
                    p->grad.data(), loss);
    INFO("worst " << st.worst << ": " << st.worst_an << " vs " << st.worst_fd);
    CHECK(st.max_err < 1e-4);
  }
}

TEST_CASE("content objective is affine in the reconstruction weight") {
  RandomEngine rng(51);
  auto mlp = make_mlp(4);
  const Tensor<double> x = randn<double>({3, 4}, rng);
  const Tensor<double> scores = mlp.forward(x, true);
  const Tensor<double> target = randn<double>({3, 1}, rng);

  const double adv = encoder_adv_loss(scores).value;
  const double rec = l1_reconstruction(target, scores).value;
  auto total = [&](double lambda) { return adv + lambda * rec; };
  CHECK(std::abs((total(1.0) - total(0.0)) - rec) < 1e-12);
  CHECK(std::abs((total(2.0) - total(1.0)) - rec) < 1e-12);
  CHECK(std::abs(total(0.0) - adv) < 1e-12);
}

TEST_CASE("adam optimizer") {
  SUBCASE("hyperparameter validation") {
    nets::Param<double> w("w", {1});
    nets::ParamRegistry<double> reg{{"g.w", &w}};
    CHECK_THROWS_AS(AdamOptimizer<double>(reg, 0.0, 0.5, 0.999),
                    ArgumentError);
    CHECK_THROWS_AS(AdamOptimizer<double>(reg, 0.1, 1.0, 0.999),
                    ArgumentError);
    CHECK_THROWS_AS(AdamOptimizer<double>(reg, 0.1, 0.5, 0.0), ArgumentError);
  }

  SUBCASE("zero gradient leaves parameters untouched") {
    nets::Dense<float> d("fc", 3, 2);
    std::vector<nets::Param<float>*> ps;
    d.collect_params(ps);
    RandomEngine rng(61);
    nets::ParamRegistry<float> reg;
    for (auto* p : ps) {
      rng.fill_normal(p->value.data(), p->value.size());
      p->grad.zero();
      reg.emplace_back("d." + p->name, p);
    }
    const Tensor<float> before = ps[0]->value;
    AdamOptimizer<float> opt(reg, 2e-4f, 0.5f, 0.999f);
    opt.step();
    opt.step();
    CHECK(opt.steps() == 2);
    CHECK(std::memcmp(before.data(), ps[0]->value.data(),
                      before.size() * sizeof(float)) == 0);
  }

  SUBCASE("bias-corrected first step moves by almost exactly lr") {
    nets::Param<double> w("w", {1});
    w.value[0] = 0.7;
    w.grad[0] = 1.0;
    AdamOptimizer<double> opt({{"g.w", &w}}, 0.1, 0.5, 0.999);
    opt.step();
    CHECK(std::abs((0.7 - w.value[0]) - 0.09999999900000006) < 1e-12);
  }

  SUBCASE("100 steps on w^2 track the textbook recurrence and converge") {
    nets::Param<double> w("w", {1});
    w.value[0] = 1.0;
    AdamOptimizer<double> opt({{"q.w", &w}}, 0.1, 0.5, 0.999);

    double ow = 1.0, om = 0.0, ov = 0.0;  // independent plain-double oracle
    for (int t = 1; t <= 100; ++t) {
      w.grad[0] = 2.0 * w.value[0];
      opt.step();

      const double g = 2.0 * ow;
      om = 0.5 * om + 0.5 * g;
      ov = 0.999 * ov + 0.001 * g * g;
      const double mhat = om / (1.0 - std::pow(0.5, t));
      const double vhat = ov / (1.0 - std::pow(0.999, t));
      ow -= 0.1 * mhat / (std::sqrt(vhat) + 1e-8);
      CHECK(std::abs(w.value[0] - ow) < 1e-12);
    }
    CHECK(std::abs(w.value[0]) < 0.05);

    nets::Param<float> wf("w", {1});
    wf.value[0] = 1.0f;
    AdamOptimizer<float> optf({{"q.w", &wf}}, 0.1f, 0.5f, 0.999f);
    for (int t = 1; t <= 100; ++t) {
      wf.grad[0] = 2.0f * wf.value[0];
      optf.step();
    }
    CHECK(std::abs(wf.value[0]) < 0.05f);
  }

  SUBCASE("non-finite gradients abort with the parameter named") {
    nets::Param<float> w("w", {2});
    w.grad[0] = std::numeric_limits<float>::infinity();
    AdamOptimizer<float> opt({{"gm.tconv1.w", &w}}, 2e-4f, 0.5f, 0.999f);
    bool threw = false;
    try {
      opt.step();
    } catch (const NonFiniteError& e) {
      threw = true;
      CHECK(std::string(e.what()).find("gm.tconv1.w") != std::string::npos);
    }
    CHECK(threw);
  }
}
