// Copyright 2026 The sdagan Authors
// SPDX-License-Identifier: Apache-2.0
//
// The two-encoder/decoder/discriminator model pair, one set per domain side,
// plus the U-net CycleGAN baseline generators.
//
// Shape traces with 20x80 segments:
//   context encoder   (B,1,20,80) -> (B,128,20,5)   four 1x6/1x2 convs
//   domain encoder    (B,1,20,80) -> (B,8)          convs, pool to 256, dense
//   decoder           (128,20,5)+(8,) -> (B,1,20,80)
//   discriminator     (B,1,20,80) -> (B,1) probability, flatten width 1600

#ifndef SDA_MODELS_HPP_
#define SDA_MODELS_HPP_

#include <array>
#include <string>
#include <vector>

#include "sda/layers.hpp"

namespace sda {

enum class Side { A = 0, B = 1 };
inline const char* side_name(Side s) { return s == Side::A ? "A" : "B"; }
inline Side other(Side s) { return s == Side::A ? Side::B : Side::A; }

constexpr int64_t kSegFrames = 20;
constexpr int64_t kMelBins = 80;
constexpr int64_t kContextChannels = 128;
constexpr int64_t kContextFreq = 5;
constexpr int64_t kDomainDim = 8;
constexpr int64_t kNumResBlocks = 6;
constexpr int64_t kNumAdainSites = 2 * kNumResBlocks;
constexpr int64_t kDiscFlatten = 1600;

template <typename T>
struct ContextEncoder {
  std::array<Conv2dLayer<T>, 4> convs;

  static ContextEncoder create(ParamStore<T>& ps, const std::string& pfx, RngStream& rng) {
    ContextEncoder e;
    const int64_t ch[5] = {1, 16, 32, 64, 128};
    for (int i = 0; i < 4; ++i)
      e.convs[i] = Conv2dLayer<T>::create(ps, pfx + ".conv" + std::to_string(i), ch[i], ch[i + 1],
                                          1, 6, 1, 2, rng);
    return e;
  }

  // (B,1,20,80) -> (B,128,20,5); instance norm then leaky-relu per conv.
  Var forward(Tape<T>& tp, ParamStore<T>& ps, Var x) const {
    for (const auto& c : convs) x = leaky_relu(tp, instance_norm(tp, c.apply(tp, ps, x)));
    return x;
  }
};

template <typename T>
struct DomainEncoder {
  std::array<Conv2dLayer<T>, 4> convs;
  DenseChain<T> dense_chain;

  static DomainEncoder create(ParamStore<T>& ps, const std::string& pfx, RngStream& rng) {
    DomainEncoder e;
    const int64_t ch[5] = {1, 8, 16, 32, 64};
    for (int i = 0; i < 4; ++i) {
      const int64_t kf = (i == 3) ? 3 : 6;
      e.convs[i] = Conv2dLayer<T>::create(ps, pfx + ".conv" + std::to_string(i), ch[i], ch[i + 1],
                                          1, kf, 1, 2, rng);
    }
    e.dense_chain =
        DenseChain<T>::create(ps, pfx, {256, 128, 32, 16, 8}, Activation::kLeakyRelu, rng);
    return e;
  }

  // (B,1,20,80) -> (B,8). The conv stack ends at (B,64,20,5); the bridge to
  // the 256-wide dense chain is a time average followed by adaptive frequency
  // pooling 5 -> 4, giving 64*4 = 256.
  Var forward(Tape<T>& tp, ParamStore<T>& ps, Var x) const {
    for (const auto& c : convs) x = leaky_relu(tp, c.apply(tp, ps, x));
    x = mean_over_time(tp, x);
    x = adaptive_avg_pool_freq(tp, x, 4);
    x = flatten_spatial(tp, x);
    return dense_chain.apply(tp, ps, x);
  }
};

template <typename T>
struct Decoder {
  DenseChain<T> affine_mlp;           // 8-16-32-64-128
  DenseLayer<T> affine_head;          // 128 -> 12 sites x (gamma_raw, beta) x 128
  std::array<Conv2dLayer<T>, 12> res_convs;
  std::array<TConv2dLayer<T>, 4> ups;
  Conv2dLayer<T> proj;

  static Decoder create(ParamStore<T>& ps, const std::string& pfx, RngStream& rng) {
    Decoder d;
    d.affine_mlp = DenseChain<T>::create(ps, pfx + ".mlp", {8, 16, 32, 64, 128},
                                         Activation::kLeakyRelu, rng);
    // Zero-initialized head: gamma = 1 + raw starts every AdaIN at identity.
    d.affine_head = DenseLayer<T>::create_zero(ps, pfx + ".affine_head", 128,
                                               kNumAdainSites * 2 * kContextChannels);
    for (int i = 0; i < 12; ++i)
      d.res_convs[i] = Conv2dLayer<T>::create(ps, pfx + ".res" + std::to_string(i / 2) + ".conv" +
                                                      std::to_string(i % 2),
                                              128, 128, 3, 3, 1, 1, rng);
    const int64_t up_ch[5] = {128, 8, 16, 16, 16};
    const int64_t up_kf[4] = {3, 3, 6, 6};
    for (int i = 0; i < 4; ++i)
      d.ups[i] = TConv2dLayer<T>::create(ps, pfx + ".up" + std::to_string(i), up_ch[i],
                                         up_ch[i + 1], 1, up_kf[i], 1, 2, rng);
    d.proj = Conv2dLayer<T>::create(ps, pfx + ".proj", 16, 1, 1, 1, 1, 1, rng);
    return d;
  }

  // c: (B,128,20,5), d: (B,8) -> (B,1,20,80).
  Var forward(Tape<T>& tp, ParamStore<T>& ps, Var c, Var d) const {
    Var h = affine_mlp.apply(tp, ps, d);
    Var aff = affine_head.apply(tp, ps, leaky_relu(tp, h));
    Var x = c;
    for (int blk = 0; blk < kNumResBlocks; ++blk) {
      auto site = [&](int s, bool gamma_part) {
        const int64_t off = (2 * blk + s) * 2 * kContextChannels +
                            (gamma_part ? 0 : kContextChannels);
        Var raw = slice_cols(tp, aff, off, kContextChannels);
        return gamma_part ? add_scalar(tp, raw, T(1)) : raw;
      };
      Var y = adain(tp, res_convs[2 * blk].apply(tp, ps, x), site(0, true), site(0, false));
      y = relu(tp, y);
      y = adain(tp, res_convs[2 * blk + 1].apply(tp, ps, y), site(1, true), site(1, false));
      x = add(tp, x, y);
    }
    for (const auto& u : ups) x = relu(tp, u.apply(tp, ps, x));
    return proj.apply(tp, ps, x);
  }
};

template <typename T>
struct Discriminator {
  std::array<Conv2dLayer<T>, 4> convs;
  DenseChain<T> dense_chain;

  static Discriminator create(ParamStore<T>& ps, const std::string& pfx, RngStream& rng) {
    Discriminator d;
    d.convs[0] = Conv2dLayer<T>::create(ps, pfx + ".conv0", 1, 8, 6, 6, 2, 2, rng);
    d.convs[1] = Conv2dLayer<T>::create(ps, pfx + ".conv1", 8, 16, 6, 6, 2, 2, rng);
    d.convs[2] = Conv2dLayer<T>::create(ps, pfx + ".conv2", 16, 32, 1, 6, 1, 2, rng);
    d.convs[3] = Conv2dLayer<T>::create(ps, pfx + ".conv3", 32, 64, 1, 3, 1, 2, rng);
    d.dense_chain =
        DenseChain<T>::create(ps, pfx, {1600, 512, 256, 64, 1}, Activation::kLeakyRelu, rng);
    return d;
  }

  // (B,1,20,80) -> (B,1) probability in (0,1).
  Var forward(Tape<T>& tp, ParamStore<T>& ps, Var x) const {
    for (const auto& c : convs) x = leaky_relu(tp, c.apply(tp, ps, x));
    x = flatten_spatial(tp, x);
    return sigmoid(tp, dense_chain.apply(tp, ps, x));
  }
};

// Full parameter set of the proposed model: context/domain encoders, decoder
// and discriminator per side, all registered in one store.
template <typename T>
struct ModelPair {
  std::array<ContextEncoder<T>, 2> enc_c;
  std::array<DomainEncoder<T>, 2> enc_d;
  std::array<Decoder<T>, 2> dec;
  std::array<Discriminator<T>, 2> disc;

  static ModelPair create(ParamStore<T>& ps, RngStream& rng) {
    ModelPair m;
    for (int s = 0; s < 2; ++s) {
      const std::string side = s == 0 ? "A" : "B";
      RngStream r = rng.split("init." + side);
      m.enc_c[s] = ContextEncoder<T>::create(ps, "enc_c_" + side, r);
      m.enc_d[s] = DomainEncoder<T>::create(ps, "enc_d_" + side, r);
      m.dec[s] = Decoder<T>::create(ps, "dec_" + side, r);
      m.disc[s] = Discriminator<T>::create(ps, "disc_" + side, r);
    }
    return m;
  }

  Var context_encode(Tape<T>& tp, ParamStore<T>& ps, Var x, Side s) const {
    return enc_c[static_cast<int>(s)].forward(tp, ps, x);
  }
  Var domain_encode(Tape<T>& tp, ParamStore<T>& ps, Var x, Side s) const {
    return enc_d[static_cast<int>(s)].forward(tp, ps, x);
  }
  Var decode(Tape<T>& tp, ParamStore<T>& ps, Var c, Var d, Side s) const {
    return dec[static_cast<int>(s)].forward(tp, ps, c, d);
  }
  Var discriminate(Tape<T>& tp, ParamStore<T>& ps, Var x, Side s) const {
    return disc[static_cast<int>(s)].forward(tp, ps, x);
  }
  // decode(context_encode(x, src), d, target): the translation composite.
  Var translate(Tape<T>& tp, ParamStore<T>& ps, Var x, Side src, Var d) const {
    return decode(tp, ps, context_encode(tp, ps, x, src), d, other(src));
  }
};

// U-net generator for the CycleGAN baseline: the discriminator's
// downsampling ladder mirrored with transposed convs, skip concatenation at
// each resolution, and a raw-input skip into the final 1x1 projection.
template <typename T>
struct UNetGenerator {
  std::array<Conv2dLayer<T>, 4> enc;
  std::array<TConv2dLayer<T>, 4> up;
  Conv2dLayer<T> proj;

  static UNetGenerator create(ParamStore<T>& ps, const std::string& pfx, RngStream& rng) {
    UNetGenerator g;
    g.enc[0] = Conv2dLayer<T>::create(ps, pfx + ".enc0", 1, 16, 6, 6, 2, 2, rng);
    g.enc[1] = Conv2dLayer<T>::create(ps, pfx + ".enc1", 16, 32, 6, 6, 2, 2, rng);
    g.enc[2] = Conv2dLayer<T>::create(ps, pfx + ".enc2", 32, 64, 1, 6, 1, 2, rng);
    g.enc[3] = Conv2dLayer<T>::create(ps, pfx + ".enc3", 64, 128, 1, 3, 1, 2, rng);
    g.up[0] = TConv2dLayer<T>::create(ps, pfx + ".up0", 128, 64, 1, 3, 1, 2, rng);
    g.up[1] = TConv2dLayer<T>::create(ps, pfx + ".up1", 128, 32, 1, 6, 1, 2, rng);
    g.up[2] = TConv2dLayer<T>::create(ps, pfx + ".up2", 64, 16, 6, 6, 2, 2, rng);
    g.up[3] = TConv2dLayer<T>::create(ps, pfx + ".up3", 32, 16, 6, 6, 2, 2, rng);
    g.proj = Conv2dLayer<T>::create(ps, pfx + ".proj", 17, 1, 1, 1, 1, 1, rng);
    return g;
  }

  Var forward(Tape<T>& tp, ParamStore<T>& ps, Var x0) const {
    std::array<Var, 4> skips;
    Var x = x0;
    for (int i = 0; i < 4; ++i) {
      x = leaky_relu(tp, instance_norm(tp, enc[i].apply(tp, ps, x)));
      skips[static_cast<size_t>(i)] = x;
    }
    x = relu(tp, up[0].apply(tp, ps, x));
    x = concat_channels(tp, x, skips[2]);
    x = relu(tp, up[1].apply(tp, ps, x));
    x = concat_channels(tp, x, skips[1]);
    x = relu(tp, up[2].apply(tp, ps, x));
    x = concat_channels(tp, x, skips[0]);
    x = relu(tp, up[3].apply(tp, ps, x));
    x = concat_channels(tp, x, x0);
    return proj.apply(tp, ps, x);
  }
};

template <typename T>
struct UNetGenerators {
  UNetGenerator<T> g_ab, g_ba;
  std::array<Discriminator<T>, 2> disc;

  static UNetGenerators create(ParamStore<T>& ps, RngStream& rng) {
    UNetGenerators m;
    RngStream ra = rng.split("init.gAB"), rb = rng.split("init.gBA");
    RngStream rda = rng.split("init.discA"), rdb = rng.split("init.discB");
    m.g_ab = UNetGenerator<T>::create(ps, "gen_AB", ra);
    m.g_ba = UNetGenerator<T>::create(ps, "gen_BA", rb);
    m.disc[0] = Discriminator<T>::create(ps, "disc_A", rda);
    m.disc[1] = Discriminator<T>::create(ps, "disc_B", rdb);
    return m;
  }

  Var generate(Tape<T>& tp, ParamStore<T>& ps, Var x, Side src) const {
    return (src == Side::A ? g_ab : g_ba).forward(tp, ps, x);
  }
  Var discriminate(Tape<T>& tp, ParamStore<T>& ps, Var x, Side s) const {
    return disc[static_cast<int>(s)].forward(tp, ps, x);
  }
};

// i.i.d. standard-normal domain codes (the prior), shape (n, 8).
template <typename T>
Tensor<T> sample_domain_prior(RngStream& rng, int64_t n) {
  Tensor<T> t({n, kDomainDim});
  rng.fill_gauss(t.ptr(), static_cast<size_t>(t.numel()));
  return t;
}

struct ConformanceRow {
  std::string network, layer, expected, actual;
  bool pass = true;
};

struct ConformanceReport {
  std::vector<ConformanceRow> rows;
  bool all_pass() const {
    for (const auto& r : rows)
      if (!r.pass) return false;
    return true;
  }
};

// Checks every layer of a constructed ModelPair against the published
// configuration table (kernels, channels, strides, dense widths) and runs
// the shape traces end to end.
ConformanceReport table1_conformance(const ModelPair<float>& m, ParamStore<float>& ps);

}  // namespace sda

#endif  // SDA_MODELS_HPP_
