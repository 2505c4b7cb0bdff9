// Copyright 2026 The sdagan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Adversarial, cycle-consistency and reconstruction losses for both model
// kinds, as batch-mean scalars. Sign conventions: d_loss is minimized by the
// discriminator (the negated adversarial value) and the generator minimizes
// the non-saturating -log D(fake). Probabilities are clamped at 1e-7 before
// any log.

#ifndef SDA_LOSSES_HPP_
#define SDA_LOSSES_HPP_

#include <string>
#include <vector>

#include "sda/models.hpp"
#include "sda/ops.hpp"

namespace sda {

inline constexpr double kProbClamp = 1e-7;

struct LossWeights {
  float lambda_cyc = 1.0f;
  float lambda_feat = 1.0f;
  float lambda_cont = 1.0f;
  float lambda_dom = 5.0f;
};

// Every named scalar of one training step, plus the weighted total.
struct LossBundle {
  double adv_a = 0, adv_b = 0;
  double cyc_a = 0, cyc_b = 0;
  double recon_feat_a = 0, recon_feat_b = 0;
  double recon_c_a = 0, recon_c_b = 0;
  double recon_d_a = 0, recon_d_b = 0;
  double total = 0;
  double d_loss_a = 0, d_loss_b = 0;

  bool all_finite() const;
  // Name of the first non-finite member, or "" when all are finite.
  std::string first_non_finite() const;
  // Recomputes the weighted combination from the stored components.
  double recompute_total(const LossWeights& w) const;
  // One JSON-lines record: {"step":..,"adv_A":..,...}.
  std::string to_json_line(int64_t step) const;
};

// --- scalar-side helpers (host arithmetic, used by tests and logging) ------

double adversarial_value(const std::vector<double>& d_real, const std::vector<double>& d_fake);
double d_loss_value(const std::vector<double>& d_real, const std::vector<double>& d_fake);
double g_adv_loss_value(const std::vector<double>& d_fake);
double total_proposed_value(double adv, double cyc, double feat_a, double feat_b, double cont_a,
                            double cont_b, double dom_a, double dom_b, const LossWeights& w);
double total_cyclegan_value(double adv_xy, double adv_yx, double cyc, double lambda_cyc);

// --- tape builders ----------------------------------------------------------

// mean(log d_real) + mean(log(1 - d_fake)), the quantity D maximizes.
template <typename T>
Var adversarial_value_op(Tape<T>& tp, Var d_real, Var d_fake) {
  Var r = log_op(tp, clamp(tp, d_real, T(kProbClamp), T(1.0 - kProbClamp)));
  Var f = log_op(tp, add_scalar(tp, scale(tp, clamp(tp, d_fake, T(kProbClamp), T(1.0 - kProbClamp)), T(-1)), T(1)));
  return add(tp, mean_all(tp, r), mean_all(tp, f));
}

template <typename T>
Var d_loss_op(Tape<T>& tp, Var d_real, Var d_fake) {
  return scale(tp, adversarial_value_op(tp, d_real, d_fake), T(-1));
}

// Non-saturating generator objective: -mean(log d_fake).
template <typename T>
Var g_adv_loss_op(Tape<T>& tp, Var d_fake) {
  Var f = log_op(tp, clamp(tp, d_fake, T(kProbClamp), T(1.0 - kProbClamp)));
  return scale(tp, mean_all(tp, f), T(-1));
}

template <typename T>
struct ProposedLossVars {
  Var adv_a, adv_b;
  Var cyc_a, cyc_b;
  Var feat_a, feat_b;
  Var cont_a, cont_b;
  Var dom_a, dom_b;
  Var total;
};

// The generator-side objective. Translation paths use prior-sampled
// target-domain codes; the back-translation re-uses the encoded domain code
// of the original input. prior_a / prior_b are (batch, 8) constants.
template <typename T>
ProposedLossVars<T> build_proposed_generator_loss(Tape<T>& tp, ParamStore<T>& ps,
                                                  const ModelPair<T>& m, Var x_a, Var x_b,
                                                  Var prior_a, Var prior_b,
                                                  const LossWeights& w) {
  ProposedLossVars<T> L;
  Var z_a_c = m.context_encode(tp, ps, x_a, Side::A);
  Var z_a_d = m.domain_encode(tp, ps, x_a, Side::A);
  Var z_b_c = m.context_encode(tp, ps, x_b, Side::B);
  Var z_b_d = m.domain_encode(tp, ps, x_b, Side::B);

  Var x_ab = m.decode(tp, ps, z_a_c, prior_b, Side::B);
  Var x_ba = m.decode(tp, ps, z_b_c, prior_a, Side::A);

  L.adv_a = g_adv_loss_op(tp, m.discriminate(tp, ps, x_ba, Side::A));
  L.adv_b = g_adv_loss_op(tp, m.discriminate(tp, ps, x_ab, Side::B));

  // Re-encoded contexts are shared between the cycle and the context
  // reconstruction terms.
  Var e_ab = m.context_encode(tp, ps, x_ab, Side::B);
  Var e_ba = m.context_encode(tp, ps, x_ba, Side::A);

  L.cyc_a = mean_abs_diff(tp, m.decode(tp, ps, e_ab, z_a_d, Side::A), x_a);
  L.cyc_b = mean_abs_diff(tp, m.decode(tp, ps, e_ba, z_b_d, Side::B), x_b);

  L.feat_a = mean_abs_diff(tp, m.decode(tp, ps, z_a_c, z_a_d, Side::A), x_a);
  L.feat_b = mean_abs_diff(tp, m.decode(tp, ps, z_b_c, z_b_d, Side::B), x_b);

  L.cont_a = mean_abs_diff(tp, e_ab, z_a_c);
  L.cont_b = mean_abs_diff(tp, e_ba, z_b_c);

  L.dom_a = mean_abs_diff(tp, m.domain_encode(tp, ps, x_ba, Side::A), prior_a);
  L.dom_b = mean_abs_diff(tp, m.domain_encode(tp, ps, x_ab, Side::B), prior_b);

  L.total = weighted_sum<T>(
      tp, {{T(1), L.adv_a},
           {T(1), L.adv_b},
           {T(w.lambda_cyc), L.cyc_a},
           {T(w.lambda_cyc), L.cyc_b},
           {T(w.lambda_feat), L.feat_a},
           {T(w.lambda_feat), L.feat_b},
           {T(w.lambda_cont), L.cont_a},
           {T(w.lambda_cont), L.cont_b},
           {T(w.lambda_dom), L.dom_a},
           {T(w.lambda_dom), L.dom_b}});
  return L;
}

template <typename T>
struct BaselineLossVars {
  Var adv_a, adv_b;
  Var cyc_a, cyc_b;
  Var total;
};

template <typename T>
BaselineLossVars<T> build_baseline_generator_loss(Tape<T>& tp, ParamStore<T>& ps,
                                                  const UNetGenerators<T>& m, Var x_a, Var x_b,
                                                  float lambda_cyc) {
  BaselineLossVars<T> L;
  Var x_ab = m.generate(tp, ps, x_a, Side::A);
  Var x_ba = m.generate(tp, ps, x_b, Side::B);
  L.adv_a = g_adv_loss_op(tp, m.discriminate(tp, ps, x_ba, Side::A));
  L.adv_b = g_adv_loss_op(tp, m.discriminate(tp, ps, x_ab, Side::B));
  L.cyc_a = mean_abs_diff(tp, m.generate(tp, ps, x_ab, Side::B), x_a);
  L.cyc_b = mean_abs_diff(tp, m.generate(tp, ps, x_ba, Side::A), x_b);
  L.total = weighted_sum<T>(tp, {{T(1), L.adv_a},
                                 {T(1), L.adv_b},
                                 {T(lambda_cyc), L.cyc_a},
                                 {T(lambda_cyc), L.cyc_b}});
  return L;
}

}  // namespace sda

#endif  // SDA_LOSSES_HPP_
