// Copyright 2026 The sdagan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Central finite-difference verification of tape gradients. The probed
// coordinates cycle round-robin over parameter entries so every network in a
// store is exercised even when a few entries dominate the coordinate count.

#ifndef SDA_GRADCHECK_HPP_
#define SDA_GRADCHECK_HPP_

#include <cmath>
#include <functional>
#include <string>

#include "sda/params.hpp"
#include "sda/rng.hpp"

namespace sda {

// Evaluates the scalar loss for the current store contents. When with_grad is
// set, the callee must backpropagate into the store's gradient buffers
// (which arrive zeroed).
template <typename T>
using LossFn = std::function<T(ParamStore<T>&, bool with_grad)>;

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::string worst_param;
  int64_t worst_index = -1;
  double analytic = 0.0, numeric = 0.0;
  int probes = 0;
};

template <typename T>
GradCheckReport grad_check(const LossFn<T>& f, ParamStore<T>& store, int n_probes, T eps_fd,
                           RngStream& rng) {
  store.zero_grads();
  const T base = f(store, true);
  if (!std::isfinite(static_cast<double>(base))) throw NonFiniteLoss("grad_check: loss not finite");

  GradCheckReport rep;
  int trainable = 0;
  for (int i = 0; i < store.size(); ++i)
    if (store.at(i).trainable) ++trainable;
  if (trainable == 0) return rep;

  int entry_cursor = -1;
  for (int p = 0; p < n_probes; ++p) {
    do {
      entry_cursor = (entry_cursor + 1) % store.size();
    } while (!store.at(entry_cursor).trainable);
    auto& e = store.at(entry_cursor);
    const int64_t idx = static_cast<int64_t>(rng.next_below(static_cast<uint64_t>(e.value.numel())));

    const T saved = e.value[idx];
    e.value[idx] = saved + eps_fd;
    const T up = f(store, false);
    e.value[idx] = saved - eps_fd;
    const T dn = f(store, false);
    e.value[idx] = saved;

    const double numeric = (static_cast<double>(up) - static_cast<double>(dn)) /
                           (2.0 * static_cast<double>(eps_fd));
    const double analytic = static_cast<double>(e.grad[idx]);
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
    const double rel = std::abs(analytic - numeric) / denom;
    if (rel > rep.max_rel_err) {
      rep.max_rel_err = rel;
      rep.worst_param = e.name;
      rep.worst_index = idx;
      rep.analytic = analytic;
      rep.numeric = numeric;
    }
    ++rep.probes;
  }
  return rep;
}

}  // namespace sda

#endif  // SDA_GRADCHECK_HPP_
