// Copyright 2026 The sdagan Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SDA_LAYERS_HPP_
#define SDA_LAYERS_HPP_

#include <string>
#include <vector>

#include "sda/ops.hpp"
#include "sda/params.hpp"

namespace sda {

enum class LayerKind { kConv, kTConv, kDense };
enum class Activation { kLeakyRelu, kRelu, kTanh, kNone };
enum class NormKind { kInstance, kAdain, kNone };

struct LayerSpec {
  LayerKind kind = LayerKind::kConv;
  int64_t kt = 1, kf = 1;
  int64_t channels_in = 0, channels_out = 0;
  int64_t st = 1, sf = 1;
  Activation act = Activation::kNone;
  NormKind norm = NormKind::kNone;

  std::string describe() const {
    const char* k = kind == LayerKind::kConv ? "conv" : (kind == LayerKind::kTConv ? "tconv" : "dense");
    return std::to_string(kt) + "x" + std::to_string(kf) + " / " + std::to_string(channels_out) +
           " / " + std::to_string(st) + "x" + std::to_string(sf) + " / " + k;
  }
};

template <typename T>
struct Conv2dLayer {
  int w = -1, b = -1;
  LayerSpec spec;

  static Conv2dLayer create(ParamStore<T>& ps, const std::string& name, int64_t ci, int64_t co,
                            int64_t kt, int64_t kf, int64_t st, int64_t sf, RngStream& rng) {
    Conv2dLayer l;
    l.spec = {LayerKind::kConv, kt, kf, ci, co, st, sf, Activation::kNone, NormKind::kNone};
    l.w = ps.add(name + ".w", init_trunc_normal<T>({co, ci, kt, kf}, ci * kt * kf, rng));
    l.b = ps.add(name + ".b", Tensor<T>({co}));
    return l;
  }

  Var apply(Tape<T>& tp, ParamStore<T>& ps, Var x) const {
    return conv2d(tp, x, ps.lease(tp, w), ps.lease(tp, b), spec.st, spec.sf);
  }
};

template <typename T>
struct TConv2dLayer {
  int w = -1, b = -1;
  LayerSpec spec;

  static TConv2dLayer create(ParamStore<T>& ps, const std::string& name, int64_t ci, int64_t co,
                             int64_t kt, int64_t kf, int64_t st, int64_t sf, RngStream& rng) {
    TConv2dLayer l;
    l.spec = {LayerKind::kTConv, kt, kf, ci, co, st, sf, Activation::kNone, NormKind::kNone};
    l.w = ps.add(name + ".w", init_trunc_normal<T>({ci, co, kt, kf}, ci * kt * kf, rng));
    l.b = ps.add(name + ".b", Tensor<T>({co}));
    return l;
  }

  Var apply(Tape<T>& tp, ParamStore<T>& ps, Var x) const {
    return tconv2d(tp, x, ps.lease(tp, w), ps.lease(tp, b), spec.st, spec.sf);
  }
};

template <typename T>
struct DenseLayer {
  int w = -1, b = -1;
  int64_t in = 0, out = 0;

  static DenseLayer create(ParamStore<T>& ps, const std::string& name, int64_t in, int64_t out,
                           RngStream& rng) {
    DenseLayer l;
    l.in = in;
    l.out = out;
    l.w = ps.add(name + ".w", init_trunc_normal<T>({out, in}, in, rng));
    l.b = ps.add(name + ".b", Tensor<T>({out}));
    return l;
  }

  static DenseLayer create_zero(ParamStore<T>& ps, const std::string& name, int64_t in,
                                int64_t out) {
    DenseLayer l;
    l.in = in;
    l.out = out;
    l.w = ps.add(name + ".w", Tensor<T>({out, in}));
    l.b = ps.add(name + ".b", Tensor<T>({out}));
    return l;
  }

  Var apply(Tape<T>& tp, ParamStore<T>& ps, Var x) const {
    return dense(tp, x, ps.lease(tp, w), ps.lease(tp, b));
  }
};

// Sequence of dense layers with the given activation between layers and none
// after the last. widths includes the input width.
template <typename T>
struct DenseChain {
  std::vector<DenseLayer<T>> layers;
  Activation act = Activation::kLeakyRelu;

  static DenseChain create(ParamStore<T>& ps, const std::string& name,
                           const std::vector<int64_t>& widths, Activation act, RngStream& rng) {
    DenseChain c;
    c.act = act;
    for (size_t i = 0; i + 1 < widths.size(); ++i)
      c.layers.push_back(
          DenseLayer<T>::create(ps, name + ".fc" + std::to_string(i), widths[i], widths[i + 1], rng));
    return c;
  }

  Var apply(Tape<T>& tp, ParamStore<T>& ps, Var x) const {
    for (size_t i = 0; i < layers.size(); ++i) {
      x = layers[i].apply(tp, ps, x);
      if (i + 1 < layers.size()) {
        if (act == Activation::kLeakyRelu) x = leaky_relu(tp, x);
        else if (act == Activation::kRelu) x = relu(tp, x);
        else if (act == Activation::kTanh) x = tanh_act(tp, x);
      }
    }
    return x;
  }
};

}  // namespace sda

#endif  // SDA_LAYERS_HPP_
