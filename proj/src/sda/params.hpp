// Copyright 2026 The sdagan Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SDA_PARAMS_HPP_
#define SDA_PARAMS_HPP_

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sda/rng.hpp"
#include "sda/tape.hpp"
#include "sda/tensor.hpp"

namespace sda {

// Named parameter registry with paired gradient buffers. Insertion order is
// stable and defines the serialization order. Gradient accumulation is
// single-owner: one training step owns the store exclusively.
template <typename T>
class ParamStore {
 public:
  struct Entry {
    std::string name;
    Tensor<T> value;
    Tensor<T> grad;
    bool trainable = true;
  };

  int add(const std::string& name, Tensor<T> init) {
    if (index_.count(name)) throw InvalidConfig("duplicate parameter name: " + name);
    Entry e;
    e.name = name;
    e.grad = Tensor<T>(init.shape);
    e.value = std::move(init);
    entries_.push_back(std::move(e));
    const int id = static_cast<int>(entries_.size()) - 1;
    index_[name] = id;
    return id;
  }

  Entry& at(int id) { return entries_[static_cast<size_t>(id)]; }
  const Entry& at(int id) const { return entries_[static_cast<size_t>(id)]; }

  int find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
  }

  int size() const { return static_cast<int>(entries_.size()); }

  void zero_grads() {
    for (auto& e : entries_) e.grad.zero();
  }

  // Toggle trainability for every entry whose name starts with `prefix`.
  void set_trainable(const std::string& prefix, bool trainable) {
    for (auto& e : entries_)
      if (e.name.rfind(prefix, 0) == 0) e.trainable = trainable;
  }

  // Lease a parameter onto a tape. Frozen entries join as constants so no
  // weight gradient work is spent on them.
  Var lease(Tape<T>& tape, int id) {
    Entry& e = entries_[static_cast<size_t>(id)];
    return tape.leaf(&e.value, e.trainable ? &e.grad : nullptr);
  }

  int64_t total_coords() const {
    int64_t n = 0;
    for (const auto& e : entries_) n += e.value.numel();
    return n;
  }

  bool all_finite() const {
    for (const auto& e : entries_)
      if (!e.value.all_finite()) return false;
    return true;
  }

  template <typename U>
  ParamStore<U> cast() const {
    ParamStore<U> out;
    for (const auto& e : entries_) {
      out.add(e.name, e.value.template cast<U>());
      out.at(out.size() - 1).trainable = e.trainable;
    }
    return out;
  }

  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<Entry>& entries() { return entries_; }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, int> index_;
};

// Fan-in-scaled truncated normal: |z| <= 2 resampled, std = sqrt(2/fan_in).
template <typename T>
Tensor<T> init_trunc_normal(const std::vector<int64_t>& shape, int64_t fan_in, RngStream& rng) {
  Tensor<T> t(shape);
  const double std = std::sqrt(2.0 / static_cast<double>(fan_in));
  for (int64_t i = 0; i < t.numel(); ++i) {
    double z;
    do {
      z = rng.next_gauss();
    } while (std::abs(z) > 2.0);
    t[i] = static_cast<T>(z * std);
  }
  return t;
}

}  // namespace sda

#endif  // SDA_PARAMS_HPP_
