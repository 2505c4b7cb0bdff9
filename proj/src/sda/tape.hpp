// Copyright 2026 The sdagan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Reverse-mode autodiff tape. Ops append nodes in topological order; each
// node carries its forward value and a closure that scatters the node's
// output gradient to its inputs. Works in 32-bit for training and 64-bit
// for finite-difference verification.

#ifndef SDA_TAPE_HPP_
#define SDA_TAPE_HPP_

#include <cassert>
#include <functional>
#include <utility>
#include <vector>

#include "sda/tensor.hpp"

namespace sda {

struct Var {
  int32_t id = -1;
  bool valid() const { return id >= 0; }
};

template <typename T>
class Tape {
 public:
  using BackFn = std::function<void(Tape&)>;

  // Constant input: participates in forward only.
  Var constant(Tensor<T> v) {
    nodes_.push_back(Node{std::move(v), nullptr, nullptr, false, nullptr});
    return Var{static_cast<int32_t>(nodes_.size() - 1)};
  }

  // Leaf referencing externally owned storage (a ParamStore entry). If
  // grad_sink is null the leaf is frozen: no gradient is computed for it or,
  // when all inputs of an op are frozen/constant, through it.
  Var leaf(const Tensor<T>* value, Tensor<T>* grad_sink) {
    nodes_.push_back(Node{Tensor<T>{}, value, grad_sink, grad_sink != nullptr, nullptr});
    return Var{static_cast<int32_t>(nodes_.size() - 1)};
  }

  // Op result. Attach the backward closure afterwards with set_back; it may
  // capture the returned Var.
  Var make(Tensor<T> v, bool needs_grad) {
    nodes_.push_back(Node{std::move(v), nullptr, nullptr, needs_grad, nullptr});
    return Var{static_cast<int32_t>(nodes_.size() - 1)};
  }

  void set_back(Var v, BackFn fn) { nodes_[static_cast<size_t>(v.id)].back = std::move(fn); }

  const Tensor<T>& val(Var v) const {
    const Node& n = nodes_[static_cast<size_t>(v.id)];
    return n.external ? *n.external : n.value;
  }

  bool needs_grad(Var v) const { return nodes_[static_cast<size_t>(v.id)].needs_grad; }

  // Gradient buffer of a node, allocated (zeroed) on first access. Only
  // meaningful during backward().
  Tensor<T>& grad(Var v) {
    Node& n = nodes_[static_cast<size_t>(v.id)];
    if (n.grad.numel() == 0) n.grad = Tensor<T>(val(v).shape);
    return n.grad;
  }

  bool grad_allocated(Var v) const { return nodes_[static_cast<size_t>(v.id)].grad.numel() != 0; }

  // Backpropagate from a scalar loss. Accumulates leaf gradients into their
  // grad sinks; a tape is single-shot (build, backward, discard).
  void backward(Var loss) {
    assert(val(loss).numel() == 1);
    grad(loss)[0] = T(1);
    for (int32_t i = loss.id; i >= 0; --i) {
      Node& n = nodes_[static_cast<size_t>(i)];
      if (!n.needs_grad || n.grad.numel() == 0) continue;
      if (n.back) n.back(*this);
    }
    for (Node& n : nodes_) {
      if (n.grad_sink && n.grad.numel() != 0)
        for (int64_t i = 0; i < n.grad.numel(); ++i) (*n.grad_sink)[i] += n.grad[i];
    }
  }

  size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor<T> value;           // owned value (ops, constants)
    const Tensor<T>* external; // set for leaves
    Tensor<T>* grad_sink;      // set for trainable leaves
    bool needs_grad;
    BackFn back;
    Tensor<T> grad;            // lazily allocated
  };
  std::vector<Node> nodes_;
};

}  // namespace sda

#endif  // SDA_TAPE_HPP_
