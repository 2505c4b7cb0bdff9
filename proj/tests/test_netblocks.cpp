// Copyright 2026 The sdagan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Unit tests for the differentiable building blocks. Convolutions are
// verified against a brute-force direct-convolution oracle and the gradient
// path against central finite differences.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "sda/gradcheck.hpp"
#include "sda/layers.hpp"
#include "sda/ops.hpp"
#include "sda/rng.hpp"

using namespace sda;

namespace {

template <typename T>
Tensor<T> random_tensor(std::vector<int64_t> shape, RngStream& rng) {
  Tensor<T> t(std::move(shape));
  rng.fill_gauss(t.ptr(), static_cast<size_t>(t.numel()));
  return t;
}

// Direct-summation convolution with same-style (ceil) padding; the oracle
// the GEMM path is checked against.
template <typename T>
Tensor<T> naive_conv2d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b, int64_t st,
                       int64_t sf) {
  const int64_t B = x.dim(0), Ci = x.dim(1), Ti = x.dim(2), Fi = x.dim(3);
  const int64_t Co = w.dim(0), kt = w.dim(2), kf = w.dim(3);
  const int64_t To = (Ti + st - 1) / st, Fo = (Fi + sf - 1) / sf;
  const int64_t pt0 = std::max<int64_t>((To - 1) * st + kt - Ti, 0) / 2;
  const int64_t pf0 = std::max<int64_t>((Fo - 1) * sf + kf - Fi, 0) / 2;
  Tensor<T> y({B, Co, To, Fo});
  for (int64_t bb = 0; bb < B; ++bb)
    for (int64_t co = 0; co < Co; ++co)
      for (int64_t to = 0; to < To; ++to)
        for (int64_t fo = 0; fo < Fo; ++fo) {
          T acc = b.numel() ? b[co] : T(0);
          for (int64_t ci = 0; ci < Ci; ++ci)
            for (int64_t dt = 0; dt < kt; ++dt)
              for (int64_t df = 0; df < kf; ++df) {
                const int64_t ti = to * st + dt - pt0, fi = fo * sf + df - pf0;
                if (ti < 0 || ti >= Ti || fi < 0 || fi >= Fi) continue;
                acc += x[((bb * Ci + ci) * Ti + ti) * Fi + fi] *
                       w[((co * Ci + ci) * kt + dt) * kf + df];
              }
          y[((bb * Co + co) * To + to) * Fo + fo] = acc;
        }
  return y;
}

template <typename T>
double max_abs_diff(const Tensor<T>& a, const Tensor<T>& b) {
  REQUIRE(a.shape == b.shape);
  double m = 0;
  for (int64_t i = 0; i < a.numel(); ++i)
    m = std::max(m, std::abs(double(a[i]) - double(b[i])));
  return m;
}

template <typename T>
double dot(const Tensor<T>& a, const Tensor<T>& b) {
  double s = 0;
  for (int64_t i = 0; i < a.numel(); ++i) s += double(a[i]) * double(b[i]);
  return s;
}

}  // namespace

TEST_CASE("conv2d matches the direct-convolution oracle") {
  RngStream rng(11);
  struct Case {
    int64_t B, Ci, Ti, Fi, Co, kt, kf, st, sf;
  };
  // Random shapes plus every kernel/stride pair the models use.
  const Case cases[] = {
      {2, 3, 7, 9, 4, 3, 3, 1, 1}, {1, 2, 5, 8, 3, 2, 4, 2, 2}, {3, 1, 20, 80, 8, 6, 6, 2, 2},
      {2, 8, 10, 40, 16, 6, 6, 2, 2}, {1, 16, 5, 20, 32, 1, 6, 1, 2}, {1, 32, 5, 10, 64, 1, 3, 1, 2},
      {2, 1, 20, 80, 16, 1, 6, 1, 2}, {1, 128, 20, 5, 128, 3, 3, 1, 1}, {1, 16, 20, 80, 1, 1, 1, 1, 1},
  };
  for (const auto& c : cases) {
    auto x = random_tensor<float>({c.B, c.Ci, c.Ti, c.Fi}, rng);
    auto w = random_tensor<float>({c.Co, c.Ci, c.kt, c.kf}, rng);
    auto b = random_tensor<float>({c.Co}, rng);
    Tensor<float> want = naive_conv2d(x, w, b, c.st, c.sf);
    Tape<float> tp;
    Var y = conv2d(tp, tp.constant(x), tp.constant(w), tp.constant(b), c.st, c.sf);
    CHECK(tp.val(y).shape == want.shape);
    CHECK(max_abs_diff(tp.val(y), want) < 2e-4);
  }
}

TEST_CASE("conv2d shape traces") {
  RngStream rng(1);
  Tape<float> tp;
  auto run = [&](std::vector<int64_t> xs, std::vector<int64_t> ws, int64_t st, int64_t sf) {
    Var y = conv2d(tp, tp.constant(random_tensor<float>(xs, rng)),
                   tp.constant(random_tensor<float>(ws, rng)), Var{}, st, sf);
    return tp.val(y).shape;
  };
  CHECK(run({1, 1, 20, 80}, {8, 1, 6, 6}, 2, 2) == std::vector<int64_t>{1, 8, 10, 40});
  CHECK(run({1, 8, 10, 40}, {16, 8, 6, 6}, 2, 2) == std::vector<int64_t>{1, 16, 5, 20});
}

TEST_CASE("conv2d 1x1 identity kernel is the identity") {
  RngStream rng(2);
  auto x = random_tensor<float>({2, 1, 5, 7}, rng);
  Tensor<float> w({1, 1, 1, 1});
  w[0] = 1.0f;
  Tape<float> tp;
  Var y = conv2d(tp, tp.constant(x), tp.constant(w), tp.constant(Tensor<float>({1})), 1, 1);
  CHECK(max_abs_diff(tp.val(y), x) == 0.0);
}

TEST_CASE("tconv2d doubles strided axes and chains through the decoder trace") {
  RngStream rng(3);
  Tape<float> tp;
  Var x = tp.constant(random_tensor<float>({1, 128, 20, 5}, rng));
  Var y = tconv2d(tp, x, tp.constant(random_tensor<float>({128, 8, 1, 3}, rng)), Var{}, 1, 2);
  CHECK(tp.val(y).shape == std::vector<int64_t>{1, 8, 20, 10});

  const int64_t chs[5] = {128, 8, 16, 16, 16};
  const int64_t kfs[4] = {3, 3, 6, 6};
  Var h = x;
  for (int i = 0; i < 4; ++i)
    h = tconv2d(tp, h, tp.constant(random_tensor<float>({chs[i], chs[i + 1], 1, kfs[i]}, rng)),
                Var{}, 1, 2);
  CHECK(tp.val(h).shape == std::vector<int64_t>{1, 16, 20, 80});
}

TEST_CASE("tconv2d is the exact adjoint of conv2d") {
  RngStream rng(4);
  struct Case {
    int64_t Ci, Co, kt, kf, st, sf, Ti, Fi;  // conv input extents
  };
  const Case cases[] = {
      {1, 8, 6, 6, 2, 2, 20, 80},   {8, 16, 6, 6, 2, 2, 10, 40}, {16, 32, 1, 6, 1, 2, 5, 20},
      {32, 64, 1, 3, 1, 2, 5, 10},  {128, 128, 3, 3, 1, 1, 20, 5}, {8, 128, 1, 3, 1, 2, 20, 10},
      {16, 16, 1, 6, 1, 2, 20, 80},
  };
  for (const auto& c : cases) {
    auto x = random_tensor<double>({2, c.Ci, c.Ti, c.Fi}, rng);
    auto w = random_tensor<double>({c.Co, c.Ci, c.kt, c.kf}, rng);
    Tape<double> tp;
    Var cy = conv2d(tp, tp.constant(x), tp.constant(w), Var{}, c.st, c.sf);
    auto y = random_tensor<double>(tp.val(cy).shape, rng);
    Var tx = tconv2d(tp, tp.constant(y), tp.constant(w), Var{}, c.st, c.sf);
    REQUIRE(tp.val(tx).shape == x.shape);
    const double lhs = dot(tp.val(cy), y);
    const double rhs = dot(x, tp.val(tx));
    CHECK(std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)}) < 1e-4);
  }
}

TEST_CASE("dense chains produce the declared widths") {
  RngStream rng(5);
  ParamStore<float> ps;
  auto disc = DenseChain<float>::create(ps, "disc", {1600, 512, 256, 64, 1},
                                        Activation::kLeakyRelu, rng);
  auto dom = DenseChain<float>::create(ps, "dom", {256, 128, 32, 16, 8},
                                       Activation::kLeakyRelu, rng);
  Tape<float> tp;
  Var a = disc.apply(tp, ps, tp.constant(random_tensor<float>({3, 1600}, rng)));
  CHECK(tp.val(a).shape == std::vector<int64_t>{3, 1});
  Var b = dom.apply(tp, ps, tp.constant(random_tensor<float>({3, 256}, rng)));
  CHECK(tp.val(b).shape == std::vector<int64_t>{3, 8});
}

TEST_CASE("single dense layer with identity weights is the identity") {
  ParamStore<float> ps;
  Tensor<float> w({4, 4});
  for (int i = 0; i < 4; ++i) w[i * 4 + i] = 1.0f;
  int wid = ps.add("w", std::move(w));
  int bid = ps.add("b", Tensor<float>({4}));
  RngStream rng(6);
  auto x = random_tensor<float>({2, 4}, rng);
  Tape<float> tp;
  Var y = dense(tp, tp.constant(x), ps.lease(tp, wid), ps.lease(tp, bid));
  CHECK(max_abs_diff(tp.val(y), x) == 0.0);
}

TEST_CASE("instance_norm normalizes per channel") {
  RngStream rng(7);
  auto x = random_tensor<float>({2, 3, 6, 10}, rng);
  for (int64_t i = 0; i < x.numel(); ++i) x[i] = x[i] * 2.5f + 1.0f;
  Tape<float> tp;
  Var y = instance_norm(tp, tp.constant(x));
  const auto& yv = tp.val(y);
  const int64_t S = 60;
  for (int64_t bc = 0; bc < 6; ++bc) {
    double m = 0, v = 0;
    for (int64_t i = 0; i < S; ++i) m += yv[bc * S + i];
    m /= S;
    for (int64_t i = 0; i < S; ++i) v += (yv[bc * S + i] - m) * (yv[bc * S + i] - m);
    v /= S;
    CHECK(std::abs(m) < 1e-5);
    CHECK(std::abs(std::sqrt(v) - 1.0) < 1e-3);
  }
}

TEST_CASE("instance_norm of a constant channel is zero") {
  Tensor<float> x({1, 2, 4, 4}, 7.0f);
  Tape<float> tp;
  Var y = instance_norm(tp, tp.constant(x));
  for (int64_t i = 0; i < tp.val(y).numel(); ++i) CHECK(tp.val(y)[i] == 0.0f);
}

TEST_CASE("instance_norm is invariant to per-channel affine input transforms") {
  RngStream rng(8);
  auto x = random_tensor<float>({2, 4, 5, 9}, rng);
  Tensor<float> xt = x;
  const float scales[4] = {3.0f, 0.5f, 2.0f, 1.5f};
  const float shifts[4] = {1.0f, -2.0f, 0.25f, 4.0f};
  const int64_t S = 45;
  for (int64_t b = 0; b < 2; ++b)
    for (int64_t c = 0; c < 4; ++c)
      for (int64_t i = 0; i < S; ++i)
        xt[(b * 4 + c) * S + i] = scales[c] * xt[(b * 4 + c) * S + i] + shifts[c];
  Tape<float> tp;
  Var y0 = instance_norm(tp, tp.constant(x));
  Var y1 = instance_norm(tp, tp.constant(xt));
  CHECK(max_abs_diff(tp.val(y0), tp.val(y1)) < 1e-4);
}

TEST_CASE("adain with gamma=1, beta=0 equals instance_norm") {
  RngStream rng(9);
  auto x = random_tensor<float>({2, 3, 4, 8}, rng);
  Tape<float> tp;
  Var in = instance_norm(tp, tp.constant(x));
  Var ad = adain(tp, tp.constant(x), tp.constant(Tensor<float>({2, 3}, 1.0f)),
                 tp.constant(Tensor<float>({2, 3}, 0.0f)));
  CHECK(max_abs_diff(tp.val(in), tp.val(ad)) == 0.0);
}

TEST_CASE("adain output moments follow (gamma, beta)") {
  RngStream rng(10);
  auto x = random_tensor<float>({3, 5, 8, 12}, rng);
  auto gamma = random_tensor<float>({3, 5}, rng);
  auto beta = random_tensor<float>({3, 5}, rng);
  Tape<float> tp;
  Var y = adain(tp, tp.constant(x), tp.constant(gamma), tp.constant(beta));
  const auto& yv = tp.val(y);
  const int64_t S = 96;
  for (int64_t bc = 0; bc < 15; ++bc) {
    double m = 0, v = 0;
    for (int64_t i = 0; i < S; ++i) m += yv[bc * S + i];
    m /= S;
    for (int64_t i = 0; i < S; ++i) v += (yv[bc * S + i] - m) * (yv[bc * S + i] - m);
    v /= S;
    CHECK(std::abs(m - beta[bc]) < 1e-3);
    CHECK(std::abs(std::sqrt(v) - std::abs(gamma[bc])) < 1e-2);
  }
}

TEST_CASE("adain with gamma=0 is constant beta") {
  RngStream rng(12);
  auto x = random_tensor<float>({1, 2, 3, 5}, rng);
  Tape<float> tp;
  Var y = adain(tp, tp.constant(x), tp.constant(Tensor<float>({1, 2}, 0.0f)),
                tp.constant(Tensor<float>({1, 2}, 0.75f)));
  for (int64_t i = 0; i < tp.val(y).numel(); ++i) CHECK(tp.val(y)[i] == 0.75f);
}

TEST_CASE("residual block with zero conv weights is the identity") {
  ParamStore<float> ps;
  int w1 = ps.add("c1.w", Tensor<float>({128, 128, 3, 3}));
  int b1 = ps.add("c1.b", Tensor<float>({128}));
  int w2 = ps.add("c2.w", Tensor<float>({128, 128, 3, 3}));
  int b2 = ps.add("c2.b", Tensor<float>({128}));
  RngStream rng(13);
  auto x = random_tensor<float>({1, 128, 20, 5}, rng);
  Tape<float> tp;
  Var xv = tp.constant(x);
  Var g = tp.constant(Tensor<float>({1, 128}, 1.0f));
  Var be = tp.constant(Tensor<float>({1, 128}, 0.0f));
  Var y = adain(tp, conv2d(tp, xv, ps.lease(tp, w1), ps.lease(tp, b1), 1, 1), g, be);
  y = relu(tp, y);
  y = adain(tp, conv2d(tp, y, ps.lease(tp, w2), ps.lease(tp, b2), 1, 1), g, be);
  Var out = add(tp, xv, y);
  CHECK(tp.val(out).shape == x.shape);
  CHECK(max_abs_diff(tp.val(out), x) == 0.0);
}

TEST_CASE("grad_check: quadratic") {
  ParamStore<double> ps;
  RngStream rng(14);
  ps.add("w", random_tensor<double>({37}, rng));
  LossFn<double> f = [](ParamStore<double>& store, bool with_grad) {
    Tape<double> tp;
    Var w = store.lease(tp, 0);
    Var loss = scale(tp, mean_all(tp, mul(tp, w, w)), 37.0);
    if (with_grad) tp.backward(loss);
    return tp.val(loss)[0];
  };
  RngStream probe_rng(15);
  auto rep = grad_check<double>(f, ps, 32, 1e-6, probe_rng);
  CHECK(rep.max_rel_err < 1e-7);
}

TEST_CASE("grad_check: tiny conv net with L1 loss") {
  ParamStore<double> ps;
  RngStream rng(16);
  ps.add("c1.w", init_trunc_normal<double>({4, 1, 3, 3}, 9, rng));
  ps.add("c1.b", Tensor<double>({4}));
  ps.add("c2.w", init_trunc_normal<double>({2, 4, 3, 3}, 36, rng));
  ps.add("c2.b", Tensor<double>({2}));
  auto x = random_tensor<double>({2, 1, 6, 8}, rng);
  auto target = random_tensor<double>({2, 2, 3, 4}, rng);
  LossFn<double> f = [&](ParamStore<double>& store, bool with_grad) {
    Tape<double> tp;
    Var h = conv2d(tp, tp.constant(x), store.lease(tp, 0), store.lease(tp, 1), 1, 1);
    h = leaky_relu(tp, h);
    h = conv2d(tp, h, store.lease(tp, 2), store.lease(tp, 3), 2, 2);
    Var loss = mean_abs_diff(tp, h, tp.constant(target));
    if (with_grad) tp.backward(loss);
    return tp.val(loss)[0];
  };
  RngStream probe_rng(17);
  auto rep = grad_check<double>(f, ps, 64, 1e-5, probe_rng);
  CHECK(rep.max_rel_err < 1e-3);
}

TEST_CASE("grad_check: constant function has zero gradients") {
  ParamStore<double> ps;
  RngStream rng(18);
  ps.add("w", random_tensor<double>({8}, rng));
  LossFn<double> f = [](ParamStore<double>& store, bool with_grad) {
    Tape<double> tp;
    store.lease(tp, 0);
    Var c = tp.constant(Tensor<double>({1}, 3.0));
    Var loss = mean_all(tp, c);
    if (with_grad) tp.backward(loss);
    return tp.val(loss)[0];
  };
  RngStream probe_rng(19);
  auto rep = grad_check<double>(f, ps, 16, 1e-6, probe_rng);
  CHECK(rep.max_rel_err == 0.0);
  for (int64_t i = 0; i < 8; ++i) CHECK(ps.at(0).grad[i] == 0.0);
}

TEST_CASE("gradients flow through every op used by the blocks") {
  // instance_norm / adain / tconv / pooling / concat under one FD check.
  ParamStore<double> ps;
  RngStream rng(20);
  ps.add("w", init_trunc_normal<double>({3, 2, 2, 4}, 16, rng));
  ps.add("tw", init_trunc_normal<double>({3, 2, 1, 3}, 9, rng));
  ps.add("g", random_tensor<double>({2, 3}, rng));
  ps.add("be", random_tensor<double>({2, 3}, rng));
  ps.add("dw", init_trunc_normal<double>({3, 12}, 12, rng));
  auto x = random_tensor<double>({2, 2, 6, 8}, rng);
  LossFn<double> f = [&](ParamStore<double>& store, bool with_grad) {
    Tape<double> tp;
    Var h = conv2d(tp, tp.constant(x), store.lease(tp, 0), Var{}, 1, 2);  // (2,3,6,4)
    h = adain(tp, h, store.lease(tp, 2), store.lease(tp, 3));
    h = tanh_act(tp, h);
    Var up = tconv2d(tp, h, store.lease(tp, 1), Var{}, 1, 2);  // (2,2,6,8)
    up = concat_channels(tp, up, tp.constant(x));              // (2,4,6,8)
    up = instance_norm(tp, up);
    Var pooled = adaptive_avg_pool_freq(tp, mean_over_time(tp, up), 3);  // (2,4,1,3)
    Var flat = flatten_spatial(tp, pooled);                              // (2,12)
    Var d = dense(tp, flat, store.lease(tp, 4), Var{});
    Var loss = mean_abs(tp, sigmoid(tp, d));
    if (with_grad) tp.backward(loss);
    return tp.val(loss)[0];
  };
  RngStream probe_rng(21);
  auto rep = grad_check<double>(f, ps, 80, 1e-5, probe_rng);
  CHECK(rep.max_rel_err < 1e-3);
}
