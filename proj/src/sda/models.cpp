// Copyright 2026 The sdagan Authors
// SPDX-License-Identifier: Apache-2.0

#include "sda/models.hpp"

#include <sstream>

namespace sda {

namespace {

std::string spec_str(int64_t kt, int64_t kf, int64_t co, int64_t st, int64_t sf, const char* kind) {
  std::ostringstream os;
  os << kt << "x" << kf << " / " << co << " / " << st << "x" << sf << " / " << kind;
  return os.str();
}

void check_layer(ConformanceReport& rep, const std::string& net, const std::string& layer,
                 const LayerSpec& got, int64_t kt, int64_t kf, int64_t co, int64_t st, int64_t sf,
                 LayerKind kind) {
  ConformanceRow row;
  row.network = net;
  row.layer = layer;
  row.expected = spec_str(kt, kf, co, st, sf, kind == LayerKind::kConv ? "conv" : "tconv");
  row.actual = got.describe();
  row.pass = got.kind == kind && got.kt == kt && got.kf == kf && got.channels_out == co &&
             got.st == st && got.sf == sf;
  rep.rows.push_back(row);
}

template <typename ChainT>
void check_dense_widths(ConformanceReport& rep, const std::string& net, const ChainT& chain,
                        const std::vector<int64_t>& widths) {
  ConformanceRow row;
  row.network = net;
  row.layer = "dense";
  std::ostringstream exp, act;
  for (size_t i = 0; i < widths.size(); ++i) exp << (i ? "-" : "") << widths[i];
  row.expected = exp.str() + " dense layer";
  bool ok = chain.layers.size() + 1 == widths.size();
  if (!chain.layers.empty()) act << chain.layers[0].in;
  for (const auto& l : chain.layers) act << "-" << l.out;
  row.actual = act.str() + " dense layer";
  if (ok)
    for (size_t i = 0; i < chain.layers.size(); ++i)
      ok = ok && chain.layers[i].in == widths[i] && chain.layers[i].out == widths[i + 1];
  row.pass = ok;
  rep.rows.push_back(row);
}

void check_shape(ConformanceReport& rep, const std::string& net, const std::string& what,
                 const std::vector<int64_t>& got, const std::vector<int64_t>& want) {
  ConformanceRow row;
  row.network = net;
  row.layer = what;
  auto str = [](const std::vector<int64_t>& s) {
    std::ostringstream os;
    os << '(';
    for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << ')';
    return os.str();
  };
  row.expected = str(want);
  row.actual = str(got);
  row.pass = got == want;
  rep.rows.push_back(row);
}

}  // namespace

ConformanceReport table1_conformance(const ModelPair<float>& m, ParamStore<float>& ps) {
  ConformanceReport rep;
  for (int s = 0; s < 2; ++s) {
    const std::string side = s == 0 ? "A" : "B";

    const auto& disc = m.disc[s];
    check_layer(rep, "discriminator " + side, "conv0", disc.convs[0].spec, 6, 6, 8, 2, 2,
                LayerKind::kConv);
    check_layer(rep, "discriminator " + side, "conv1", disc.convs[1].spec, 6, 6, 16, 2, 2,
                LayerKind::kConv);
    check_layer(rep, "discriminator " + side, "conv2", disc.convs[2].spec, 1, 6, 32, 1, 2,
                LayerKind::kConv);
    check_layer(rep, "discriminator " + side, "conv3", disc.convs[3].spec, 1, 3, 64, 1, 2,
                LayerKind::kConv);
    check_dense_widths(rep, "discriminator " + side, disc.dense_chain, {1600, 512, 256, 64, 1});

    const auto& de = m.enc_d[s];
    check_layer(rep, "domain encoder " + side, "conv0", de.convs[0].spec, 1, 6, 8, 1, 2,
                LayerKind::kConv);
    check_layer(rep, "domain encoder " + side, "conv1", de.convs[1].spec, 1, 6, 16, 1, 2,
                LayerKind::kConv);
    check_layer(rep, "domain encoder " + side, "conv2", de.convs[2].spec, 1, 6, 32, 1, 2,
                LayerKind::kConv);
    check_layer(rep, "domain encoder " + side, "conv3", de.convs[3].spec, 1, 3, 64, 1, 2,
                LayerKind::kConv);
    check_dense_widths(rep, "domain encoder " + side, de.dense_chain, {256, 128, 32, 16, 8});

    const auto& ce = m.enc_c[s];
    check_layer(rep, "context encoder " + side, "conv0", ce.convs[0].spec, 1, 6, 16, 1, 2,
                LayerKind::kConv);
    check_layer(rep, "context encoder " + side, "conv1", ce.convs[1].spec, 1, 6, 32, 1, 2,
                LayerKind::kConv);
    check_layer(rep, "context encoder " + side, "conv2", ce.convs[2].spec, 1, 6, 64, 1, 2,
                LayerKind::kConv);
    check_layer(rep, "context encoder " + side, "conv3", ce.convs[3].spec, 1, 6, 128, 1, 2,
                LayerKind::kConv);

    const auto& dec = m.dec[s];
    check_dense_widths(rep, "decoder " + side, dec.affine_mlp, {8, 16, 32, 64, 128});
    for (int i = 0; i < 12; ++i)
      check_layer(rep, "decoder " + side, "res" + std::to_string(i / 2) + ".conv" +
                      std::to_string(i % 2),
                  dec.res_convs[i].spec, 3, 3, 128, 1, 1, LayerKind::kConv);
    check_layer(rep, "decoder " + side, "up0", dec.ups[0].spec, 1, 3, 8, 1, 2, LayerKind::kTConv);
    check_layer(rep, "decoder " + side, "up1", dec.ups[1].spec, 1, 3, 16, 1, 2, LayerKind::kTConv);
    check_layer(rep, "decoder " + side, "up2", dec.ups[2].spec, 1, 6, 16, 1, 2, LayerKind::kTConv);
    check_layer(rep, "decoder " + side, "up3", dec.ups[3].spec, 1, 6, 16, 1, 2, LayerKind::kTConv);

    // Shape traces on a dummy segment.
    Tape<float> tp;
    Var x = tp.constant(Tensor<float>({1, 1, kSegFrames, kMelBins}, 0.1f));

    Var h = x;
    const int64_t ctx_freq[4] = {40, 20, 10, 5};
    const int64_t ctx_ch[4] = {16, 32, 64, 128};
    for (int i = 0; i < 4; ++i) {
      h = ce.convs[i].apply(tp, ps, h);
      check_shape(rep, "context encoder " + side, "trace conv" + std::to_string(i),
                  tp.val(h).shape, {1, ctx_ch[i], kSegFrames, ctx_freq[i]});
      h = leaky_relu(tp, instance_norm(tp, h));
    }

    h = x;
    const int64_t dom_ch[4] = {8, 16, 32, 64};
    for (int i = 0; i < 4; ++i) {
      h = de.convs[i].apply(tp, ps, h);
      check_shape(rep, "domain encoder " + side, "trace conv" + std::to_string(i),
                  tp.val(h).shape, {1, dom_ch[i], kSegFrames, ctx_freq[i]});
      h = leaky_relu(tp, h);
    }
    Var code = de.forward(tp, ps, x);
    check_shape(rep, "domain encoder " + side, "domain code", tp.val(code).shape, {1, kDomainDim});

    h = x;
    const int64_t disc_t[4] = {10, 5, 5, 5};
    const int64_t disc_f[4] = {40, 20, 10, 5};
    const int64_t disc_ch[4] = {8, 16, 32, 64};
    for (int i = 0; i < 4; ++i) {
      h = disc.convs[i].apply(tp, ps, h);
      check_shape(rep, "discriminator " + side, "trace conv" + std::to_string(i),
                  tp.val(h).shape, {1, disc_ch[i], disc_t[i], disc_f[i]});
      h = leaky_relu(tp, h);
    }
    Var flat = flatten_spatial(tp, h);
    check_shape(rep, "discriminator " + side, "flatten", tp.val(flat).shape, {1, kDiscFlatten});

    Var ctx = ce.forward(tp, ps, x);
    check_shape(rep, "context encoder " + side, "context code", tp.val(ctx).shape,
                {1, kContextChannels, kSegFrames, kContextFreq});
    Var dcode = tp.constant(Tensor<float>({1, kDomainDim}, 0.3f));
    Var up = ctx;
    Var mlp_out = leaky_relu(tp, dec.affine_mlp.apply(tp, ps, dcode));
    Var aff = dec.affine_head.apply(tp, ps, mlp_out);
    check_shape(rep, "decoder " + side, "affine params", tp.val(aff).shape,
                {1, kNumAdainSites * 2 * kContextChannels});
    const int64_t up_freq[4] = {10, 20, 40, 80};
    const int64_t up_ch[4] = {8, 16, 16, 16};
    for (int i = 0; i < 4; ++i) {
      up = dec.ups[i].apply(tp, ps, up);
      check_shape(rep, "decoder " + side, "trace up" + std::to_string(i), tp.val(up).shape,
                  {1, up_ch[i], kSegFrames, up_freq[i]});
      up = relu(tp, up);
    }
    Var out = dec.forward(tp, ps, ctx, dcode);
    check_shape(rep, "decoder " + side, "output", tp.val(out).shape,
                {1, 1, kSegFrames, kMelBins});
  }
  return rep;
}

}  // namespace sda
