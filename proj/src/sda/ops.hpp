// Copyright 2026 The sdagan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Differentiable building blocks over the tape: 2-D convolution and its
// exact transpose, dense layers, instance/adaptive instance normalization,
// activations, pooling, and the scalar reductions the losses need.
//
// Convolutions use same-style padding (output extent = ceil(input/stride))
// and are lowered to GEMM via im2col with the batch folded into the column
// dimension. tconv2d is the exact adjoint of conv2d, so
// <conv2d(x), y> == <x, tconv2d(y)> holds for a shared weight tensor.

#ifndef SDA_OPS_HPP_
#define SDA_OPS_HPP_

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sda/tape.hpp"
#include "sda/tensor.hpp"

namespace sda {
namespace detail {

template <typename T>
using EMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// C(m x n) (+)= A(m x k) * B(k x n), all row-major.
template <typename T>
void gemm(const T* A, const T* B, T* C, int64_t m, int64_t k, int64_t n, bool accum) {
  Eigen::Map<const EMat<T>> a(A, m, k), b(B, k, n);
  Eigen::Map<EMat<T>> c(C, m, n);
  if (accum)
    c.noalias() += a * b;
  else
    c.noalias() = a * b;
}

// C(m x n) (+)= A(k x m)^T * B(k x n)
template <typename T>
void gemm_at(const T* A, const T* B, T* C, int64_t m, int64_t k, int64_t n, bool accum) {
  Eigen::Map<const EMat<T>> a(A, k, m), b(B, k, n);
  Eigen::Map<EMat<T>> c(C, m, n);
  if (accum)
    c.noalias() += a.transpose() * b;
  else
    c.noalias() = a.transpose() * b;
}

// C(m x n) (+)= A(m x k) * B(n x k)^T
template <typename T>
void gemm_bt(const T* A, const T* B, T* C, int64_t m, int64_t k, int64_t n, bool accum) {
  Eigen::Map<const EMat<T>> a(A, m, k), b(B, n, k);
  Eigen::Map<EMat<T>> c(C, m, n);
  if (accum)
    c.noalias() += a * b.transpose();
  else
    c.noalias() = a * b.transpose();
}

struct ConvDims {
  int64_t B, Ci, Ti, Fi;  // input feature map
  int64_t Co, kt, kf;     // kernel
  int64_t st, sf;         // stride
  int64_t To, Fo;         // output extents
  int64_t pt0, pf0;       // leading pads
  int64_t K() const { return Ci * kt * kf; }
  int64_t P() const { return To * Fo; }
  int64_t N() const { return B * P(); }
};

inline ConvDims conv_dims(int64_t B, int64_t Ci, int64_t Ti, int64_t Fi, int64_t Co, int64_t kt,
                          int64_t kf, int64_t st, int64_t sf) {
  ConvDims d{B, Ci, Ti, Fi, Co, kt, kf, st, sf, 0, 0, 0, 0};
  d.To = (Ti + st - 1) / st;
  d.Fo = (Fi + sf - 1) / sf;
  const int64_t tp = std::max<int64_t>((d.To - 1) * st + kt - Ti, 0);
  const int64_t fp = std::max<int64_t>((d.Fo - 1) * sf + kf - Fi, 0);
  d.pt0 = tp / 2;
  d.pf0 = fp / 2;
  return d;
}

// cols: (K x B*P) row-major, column index = b*P + to*Fo + fo.
template <typename T>
void im2col(const T* x, const ConvDims& d, T* cols) {
  const int64_t P = d.P(), N = d.N();
  for (int64_t ci = 0; ci < d.Ci; ++ci) {
    for (int64_t dt = 0; dt < d.kt; ++dt) {
      for (int64_t df = 0; df < d.kf; ++df) {
        T* row = cols + ((ci * d.kt + dt) * d.kf + df) * N;
        for (int64_t b = 0; b < d.B; ++b) {
          const T* xb = x + (b * d.Ci + ci) * d.Ti * d.Fi;
          T* dst = row + b * P;
          for (int64_t to = 0; to < d.To; ++to) {
            const int64_t ti = to * d.st + dt - d.pt0;
            T* drow = dst + to * d.Fo;
            if (ti < 0 || ti >= d.Ti) {
              std::fill(drow, drow + d.Fo, T(0));
              continue;
            }
            const T* xrow = xb + ti * d.Fi;
            for (int64_t fo = 0; fo < d.Fo; ++fo) {
              const int64_t fi = fo * d.sf + df - d.pf0;
              drow[fo] = (fi >= 0 && fi < d.Fi) ? xrow[fi] : T(0);
            }
          }
        }
      }
    }
  }
}

// Adjoint of im2col: scatter-adds cols back into x.
template <typename T>
void col2im(const T* cols, const ConvDims& d, T* x) {
  const int64_t P = d.P(), N = d.N();
  for (int64_t ci = 0; ci < d.Ci; ++ci) {
    for (int64_t dt = 0; dt < d.kt; ++dt) {
      for (int64_t df = 0; df < d.kf; ++df) {
        const T* row = cols + ((ci * d.kt + dt) * d.kf + df) * N;
        for (int64_t b = 0; b < d.B; ++b) {
          T* xb = x + (b * d.Ci + ci) * d.Ti * d.Fi;
          const T* src = row + b * P;
          for (int64_t to = 0; to < d.To; ++to) {
            const int64_t ti = to * d.st + dt - d.pt0;
            if (ti < 0 || ti >= d.Ti) continue;
            T* xrow = xb + ti * d.Fi;
            const T* srow = src + to * d.Fo;
            for (int64_t fo = 0; fo < d.Fo; ++fo) {
              const int64_t fi = fo * d.sf + df - d.pf0;
              if (fi >= 0 && fi < d.Fi) xrow[fi] += srow[fo];
            }
          }
        }
      }
    }
  }
}

// (B,C,P) -> (C, B*P)
template <typename T>
void gather_bc(const T* x, int64_t B, int64_t C, int64_t P, T* out) {
  for (int64_t c = 0; c < C; ++c)
    for (int64_t b = 0; b < B; ++b)
      std::memcpy(out + c * B * P + b * P, x + (b * C + c) * P, sizeof(T) * static_cast<size_t>(P));
}

// (C, B*P) -> (B,C,P); non-accumulating form adds an optional per-channel bias.
template <typename T>
void scatter_bc(const T* y, int64_t B, int64_t C, int64_t P, T* out, bool accum, const T* bias) {
  for (int64_t c = 0; c < C; ++c) {
    const T add = bias ? bias[c] : T(0);
    for (int64_t b = 0; b < B; ++b) {
      const T* src = y + c * B * P + b * P;
      T* dst = out + (b * C + c) * P;
      if (accum)
        for (int64_t p = 0; p < P; ++p) dst[p] += src[p];
      else
        for (int64_t p = 0; p < P; ++p) dst[p] = src[p] + add;
    }
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Convolutions and dense layers
// ---------------------------------------------------------------------------

// x: (B,Ci,T,F), w: (Co,Ci,kt,kf), b: (Co) or invalid for none.
// Output (B,Co,ceil(T/st),ceil(F/sf)).
template <typename T>
Var conv2d(Tape<T>& tp, Var x, Var w, Var b, int64_t st, int64_t sf) {
  const Tensor<T>& xv = tp.val(x);
  const Tensor<T>& wv = tp.val(w);
  if (xv.rank() != 4 || wv.rank() != 4) throw ShapeMismatch("conv2d: rank");
  if (xv.dim(1) != wv.dim(1))
    throw ShapeMismatch("conv2d: channels " + xv.shape_str() + " vs " + wv.shape_str());
  const auto d = detail::conv_dims(xv.dim(0), xv.dim(1), xv.dim(2), xv.dim(3), wv.dim(0),
                                   wv.dim(2), wv.dim(3), st, sf);
  std::vector<T> cols(static_cast<size_t>(d.K() * d.N()));
  std::vector<T> ybuf(static_cast<size_t>(d.Co * d.N()));
  detail::im2col(xv.ptr(), d, cols.data());
  detail::gemm(wv.ptr(), cols.data(), ybuf.data(), d.Co, d.K(), d.N(), false);

  Tensor<T> out({d.B, d.Co, d.To, d.Fo});
  detail::scatter_bc(ybuf.data(), d.B, d.Co, d.P(), out.ptr(), false,
                     b.valid() ? tp.val(b).ptr() : nullptr);

  const bool ng = tp.needs_grad(x) || tp.needs_grad(w) || (b.valid() && tp.needs_grad(b));
  Var y = tp.make(std::move(out), ng);
  if (ng) {
    tp.set_back(y, [x, w, b, y, d](Tape<T>& t) {
      const Tensor<T>& gy = t.grad(y);
      const int64_t N = d.N();
      std::vector<T> dy(static_cast<size_t>(d.Co * N));
      detail::gather_bc(gy.ptr(), d.B, d.Co, d.P(), dy.data());
      if (t.needs_grad(w)) {
        std::vector<T> cols2(static_cast<size_t>(d.K() * N));
        detail::im2col(t.val(x).ptr(), d, cols2.data());
        detail::gemm_bt(dy.data(), cols2.data(), t.grad(w).ptr(), d.Co, N, d.K(), true);
      }
      if (t.needs_grad(x)) {
        std::vector<T> dcols(static_cast<size_t>(d.K() * N));
        detail::gemm_at(t.val(w).ptr(), dy.data(), dcols.data(), d.K(), d.Co, N, false);
        detail::col2im(dcols.data(), d, t.grad(x).ptr());
      }
      if (b.valid() && t.needs_grad(b)) {
        Tensor<T>& gb = t.grad(b);
        for (int64_t c = 0; c < d.Co; ++c) {
          T s = 0;
          const T* row = dy.data() + c * N;
          for (int64_t i = 0; i < N; ++i) s += row[i];
          gb[c] += s;
        }
      }
    });
  }
  return y;
}

// x: (B,Cz,T,F), w: (Cz,Cv,kt,kf), b: (Cv) or invalid.
// Output (B,Cv,T*st,F*sf); exact adjoint of conv2d sharing the weight tensor.
template <typename T>
Var tconv2d(Tape<T>& tp, Var x, Var w, Var b, int64_t st, int64_t sf) {
  const Tensor<T>& xv = tp.val(x);
  const Tensor<T>& wv = tp.val(w);
  if (xv.rank() != 4 || wv.rank() != 4) throw ShapeMismatch("tconv2d: rank");
  if (xv.dim(1) != wv.dim(0))
    throw ShapeMismatch("tconv2d: channels " + xv.shape_str() + " vs " + wv.shape_str());
  const int64_t B = xv.dim(0), Cz = xv.dim(1), Ti = xv.dim(2), Fi = xv.dim(3);
  const int64_t Cv = wv.dim(1), kt = wv.dim(2), kf = wv.dim(3);
  // Dims of the conv this op is the adjoint of: (B,Cv,Ti*st,Fi*sf) -> (B,Cz,Ti,Fi).
  const auto d = detail::conv_dims(B, Cv, Ti * st, Fi * sf, Cz, kt, kf, st, sf);
  const int64_t N = d.N();

  std::vector<T> z(static_cast<size_t>(Cz * N));
  detail::gather_bc(xv.ptr(), B, Cz, d.P(), z.data());
  std::vector<T> dcols(static_cast<size_t>(d.K() * N));
  detail::gemm_at(wv.ptr(), z.data(), dcols.data(), d.K(), Cz, N, false);

  Tensor<T> out({B, Cv, Ti * st, Fi * sf});
  detail::col2im(dcols.data(), d, out.ptr());
  if (b.valid()) {
    const Tensor<T>& bv = tp.val(b);
    const int64_t S = Ti * st * Fi * sf;
    for (int64_t bb = 0; bb < B; ++bb)
      for (int64_t c = 0; c < Cv; ++c) {
        T* row = out.ptr() + (bb * Cv + c) * S;
        for (int64_t i = 0; i < S; ++i) row[i] += bv[c];
      }
  }

  const bool ng = tp.needs_grad(x) || tp.needs_grad(w) || (b.valid() && tp.needs_grad(b));
  Var y = tp.make(std::move(out), ng);
  if (ng) {
    tp.set_back(y, [x, w, b, y, d, B, Cz, Cv](Tape<T>& t) {
      const Tensor<T>& gy = t.grad(y);  // (B,Cv,Ts,Fs): the conv "input" side
      const int64_t N2 = d.N();
      std::vector<T> cols(static_cast<size_t>(d.K() * N2));
      detail::im2col(gy.ptr(), d, cols.data());
      if (t.needs_grad(x)) {
        std::vector<T> dz(static_cast<size_t>(Cz * N2));
        detail::gemm(t.val(w).ptr(), cols.data(), dz.data(), Cz, d.K(), N2, false);
        detail::scatter_bc(dz.data(), B, Cz, d.P(), t.grad(x).ptr(), true,
                           static_cast<const T*>(nullptr));
      }
      if (t.needs_grad(w)) {
        std::vector<T> z2(static_cast<size_t>(Cz * N2));
        detail::gather_bc(t.val(x).ptr(), B, Cz, d.P(), z2.data());
        detail::gemm_bt(z2.data(), cols.data(), t.grad(w).ptr(), Cz, N2, d.K(), true);
      }
      if (b.valid() && t.needs_grad(b)) {
        Tensor<T>& gb = t.grad(b);
        const int64_t S = d.Ti * d.Fi;
        for (int64_t bb = 0; bb < B; ++bb)
          for (int64_t c = 0; c < Cv; ++c) {
            T s = 0;
            const T* row = gy.ptr() + (bb * Cv + c) * S;
            for (int64_t i = 0; i < S; ++i) s += row[i];
            gb[c] += s;
          }
      }
    });
  }
  return y;
}

// x: (B,n), w: (m,n), b: (m) or invalid. Output (B,m) = x w^T + b.
template <typename T>
Var dense(Tape<T>& tp, Var x, Var w, Var b) {
  const Tensor<T>& xv = tp.val(x);
  const Tensor<T>& wv = tp.val(w);
  if (xv.rank() != 2 || wv.rank() != 2 || xv.dim(1) != wv.dim(1))
    throw ShapeMismatch("dense: " + xv.shape_str() + " vs " + wv.shape_str());
  const int64_t B = xv.dim(0), n = xv.dim(1), m = wv.dim(0);
  Tensor<T> out({B, m});
  detail::gemm_bt(xv.ptr(), wv.ptr(), out.ptr(), B, n, m, false);
  if (b.valid()) {
    const Tensor<T>& bv = tp.val(b);
    for (int64_t i = 0; i < B; ++i)
      for (int64_t j = 0; j < m; ++j) out[i * m + j] += bv[j];
  }
  const bool ng = tp.needs_grad(x) || tp.needs_grad(w) || (b.valid() && tp.needs_grad(b));
  Var y = tp.make(std::move(out), ng);
  if (ng) {
    tp.set_back(y, [x, w, b, y, B, n, m](Tape<T>& t) {
      const Tensor<T>& gy = t.grad(y);
      if (t.needs_grad(x)) detail::gemm(gy.ptr(), t.val(w).ptr(), t.grad(x).ptr(), B, m, n, true);
      if (t.needs_grad(w)) detail::gemm_at(gy.ptr(), t.val(x).ptr(), t.grad(w).ptr(), m, B, n, true);
      if (b.valid() && t.needs_grad(b)) {
        Tensor<T>& gb = t.grad(b);
        for (int64_t i = 0; i < B; ++i)
          for (int64_t j = 0; j < m; ++j) gb[j] += gy[i * m + j];
      }
    });
  }
  return y;
}

// ---------------------------------------------------------------------------
// Activations and elementwise ops
// ---------------------------------------------------------------------------

template <typename T>
Var leaky_relu(Tape<T>& tp, Var x, T slope = T(0.2)) {
  const Tensor<T>& xv = tp.val(x);
  Tensor<T> out(xv.shape);
  for (int64_t i = 0; i < xv.numel(); ++i) out[i] = xv[i] > 0 ? xv[i] : slope * xv[i];
  Var y = tp.make(std::move(out), tp.needs_grad(x));
  if (tp.needs_grad(x)) {
    tp.set_back(y, [x, y, slope](Tape<T>& t) {
      const Tensor<T>& gy = t.grad(y);
      const Tensor<T>& xv2 = t.val(x);
      Tensor<T>& gx = t.grad(x);
      for (int64_t i = 0; i < gy.numel(); ++i) gx[i] += xv2[i] > 0 ? gy[i] : slope * gy[i];
    });
  }
  return y;
}

template <typename T>
Var relu(Tape<T>& tp, Var x) {
  return leaky_relu(tp, x, T(0));
}

template <typename T>
Var tanh_act(Tape<T>& tp, Var x) {
  const Tensor<T>& xv = tp.val(x);
  Tensor<T> out(xv.shape);
  for (int64_t i = 0; i < xv.numel(); ++i) out[i] = std::tanh(xv[i]);
  Var y = tp.make(std::move(out), tp.needs_grad(x));
  if (tp.needs_grad(x)) {
    tp.set_back(y, [x, y](Tape<T>& t) {
      const Tensor<T>& gy = t.grad(y);
      const Tensor<T>& yv = t.val(y);
      Tensor<T>& gx = t.grad(x);
      for (int64_t i = 0; i < gy.numel(); ++i) gx[i] += gy[i] * (T(1) - yv[i] * yv[i]);
    });
  }
  return y;
}

template <typename T>
Var sigmoid(Tape<T>& tp, Var x) {
  const Tensor<T>& xv = tp.val(x);
  Tensor<T> out(xv.shape);
  for (int64_t i = 0; i < xv.numel(); ++i) out[i] = T(1) / (T(1) + std::exp(-xv[i]));
  Var y = tp.make(std::move(out), tp.needs_grad(x));
  if (tp.needs_grad(x)) {
    tp.set_back(y, [x, y](Tape<T>& t) {
      const Tensor<T>& gy = t.grad(y);
      const Tensor<T>& yv = t.val(y);
      Tensor<T>& gx = t.grad(x);
      for (int64_t i = 0; i < gy.numel(); ++i) gx[i] += gy[i] * yv[i] * (T(1) - yv[i]);
    });
  }
  return y;
}

template <typename T>
Var add(Tape<T>& tp, Var a, Var b) {
  const Tensor<T>& av = tp.val(a);
  const Tensor<T>& bv = tp.val(b);
  if (!av.same_shape(bv)) throw ShapeMismatch("add: " + av.shape_str() + " vs " + bv.shape_str());
  Tensor<T> out(av.shape);
  for (int64_t i = 0; i < av.numel(); ++i) out[i] = av[i] + bv[i];
  const bool ng = tp.needs_grad(a) || tp.needs_grad(b);
  Var y = tp.make(std::move(out), ng);
  if (ng) {
    tp.set_back(y, [a, b, y](Tape<T>& t) {
      const Tensor<T>& gy = t.grad(y);
      if (t.needs_grad(a)) {
        Tensor<T>& ga = t.grad(a);
        for (int64_t i = 0; i < gy.numel(); ++i) ga[i] += gy[i];
      }
      if (t.needs_grad(b)) {
        Tensor<T>& gb = t.grad(b);
        for (int64_t i = 0; i < gy.numel(); ++i) gb[i] += gy[i];
      }
    });
  }
  return y;
}

template <typename T>
Var sub(Tape<T>& tp, Var a, Var b) {
  const Tensor<T>& av = tp.val(a);
  const Tensor<T>& bv = tp.val(b);
  if (!av.same_shape(bv)) throw ShapeMismatch("sub: " + av.shape_str() + " vs " + bv.shape_str());
  Tensor<T> out(av.shape);
  for (int64_t i = 0; i < av.numel(); ++i) out[i] = av[i] - bv[i];
  const bool ng = tp.needs_grad(a) || tp.needs_grad(b);
  Var y = tp.make(std::move(out), ng);
  if (ng) {
    tp.set_back(y, [a, b, y](Tape<T>& t) {
      const Tensor<T>& gy = t.grad(y);
      if (t.needs_grad(a)) {
        Tensor<T>& ga = t.grad(a);
        for (int64_t i = 0; i < gy.numel(); ++i) ga[i] += gy[i];
      }
      if (t.needs_grad(b)) {
        Tensor<T>& gb = t.grad(b);
        for (int64_t i = 0; i < gy.numel(); ++i) gb[i] -= gy[i];
      }
    });
  }
  return y;
}

template <typename T>
Var mul(Tape<T>& tp, Var a, Var b) {
  const Tensor<T>& av = tp.val(a);
  const Tensor<T>& bv = tp.val(b);
  if (!av.same_shape(bv)) throw ShapeMismatch("mul: " + av.shape_str() + " vs " + bv.shape_str());
  Tensor<T> out(av.shape);
  for (int64_t i = 0; i < av.numel(); ++i) out[i] = av[i] * bv[i];
  const bool ng = tp.needs_grad(a) || tp.needs_grad(b);
  Var y = tp.make(std::move(out), ng);
  if (ng) {
    tp.set_back(y, [a, b, y](Tape<T>& t) {
      const Tensor<T>& gy = t.grad(y);
      if (t.needs_grad(a)) {
        const Tensor<T>& bv2 = t.val(b);
        Tensor<T>& ga = t.grad(a);
        for (int64_t i = 0; i < gy.numel(); ++i) ga[i] += gy[i] * bv2[i];
      }
      if (t.needs_grad(b)) {
        const Tensor<T>& av2 = t.val(a);
        Tensor<T>& gb = t.grad(b);
        for (int64_t i = 0; i < gy.numel(); ++i) gb[i] += gy[i] * av2[i];
      }
    });
  }
  return y;
}

template <typename T>
Var scale(Tape<T>& tp, Var x, T s) {
  const Tensor<T>& xv = tp.val(x);
  Tensor<T> out(xv.shape);
  for (int64_t i = 0; i < xv.numel(); ++i) out[i] = s * xv[i];
  Var y = tp.make(std::move(out), tp.needs_grad(x));
  if (tp.needs_grad(x)) {
    tp.set_back(y, [x, y, s](Tape<T>& t) {
      const Tensor<T>& gy = t.grad(y);
      Tensor<T>& gx = t.grad(x);
      for (int64_t i = 0; i < gy.numel(); ++i) gx[i] += s * gy[i];
    });
  }
  return y;
}

template <typename T>
Var add_scalar(Tape<T>& tp, Var x, T c) {
  const Tensor<T>& xv = tp.val(x);
  Tensor<T> out(xv.shape);
  for (int64_t i = 0; i < xv.numel(); ++i) out[i] = xv[i] + c;
  Var y = tp.make(std::move(out), tp.needs_grad(x));
  if (tp.needs_grad(x)) {
    tp.set_back(y, [x, y](Tape<T>& t) {
      const Tensor<T>& gy = t.grad(y);
      Tensor<T>& gx = t.grad(x);
      for (int64_t i = 0; i < gy.numel(); ++i) gx[i] += gy[i];
    });
  }
  return y;
}

// Elementwise natural log; inputs must be positive (clamp first).
template <typename T>
Var log_op(Tape<T>& tp, Var x) {
  const Tensor<T>& xv = tp.val(x);
  Tensor<T> out(xv.shape);
  for (int64_t i = 0; i < xv.numel(); ++i) out[i] = std::log(xv[i]);
  Var y = tp.make(std::move(out), tp.needs_grad(x));
  if (tp.needs_grad(x)) {
    tp.set_back(y, [x, y](Tape<T>& t) {
      const Tensor<T>& gy = t.grad(y);
      const Tensor<T>& xv2 = t.val(x);
      Tensor<T>& gx = t.grad(x);
      for (int64_t i = 0; i < gy.numel(); ++i) gx[i] += gy[i] / xv2[i];
    });
  }
  return y;
}

// Clamp with zero gradient outside [lo, hi].
template <typename T>
Var clamp(Tape<T>& tp, Var x, T lo, T hi) {
  const Tensor<T>& xv = tp.val(x);
  Tensor<T> out(xv.shape);
  for (int64_t i = 0; i < xv.numel(); ++i) out[i] = std::min(hi, std::max(lo, xv[i]));
  Var y = tp.make(std::move(out), tp.needs_grad(x));
  if (tp.needs_grad(x)) {
    tp.set_back(y, [x, y, lo, hi](Tape<T>& t) {
      const Tensor<T>& gy = t.grad(y);
      const Tensor<T>& xv2 = t.val(x);
      Tensor<T>& gx = t.grad(x);
      for (int64_t i = 0; i < gy.numel(); ++i)
        if (xv2[i] >= lo && xv2[i] <= hi) gx[i] += gy[i];
    });
  }
  return y;
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

namespace detail {

template <typename T>
struct NormStatsCache {
  std::vector<T> mean, inv_std;  // per (b,c)
};

template <typename T>
std::shared_ptr<NormStatsCache<T>> compute_bc_stats(const Tensor<T>& x, T eps) {
  const int64_t B = x.dim(0), C = x.dim(1), S = x.dim(2) * x.dim(3);
  auto cache = std::make_shared<NormStatsCache<T>>();
  cache->mean.resize(static_cast<size_t>(B * C));
  cache->inv_std.resize(static_cast<size_t>(B * C));
  for (int64_t bc = 0; bc < B * C; ++bc) {
    const T* p = x.ptr() + bc * S;
    T m = 0;
    for (int64_t i = 0; i < S; ++i) m += p[i];
    m /= static_cast<T>(S);
    T v = 0;
    for (int64_t i = 0; i < S; ++i) {
      const T dd = p[i] - m;
      v += dd * dd;
    }
    v /= static_cast<T>(S);
    cache->mean[static_cast<size_t>(bc)] = m;
    cache->inv_std[static_cast<size_t>(bc)] = T(1) / std::sqrt(v + eps);
  }
  return cache;
}

// dx += inv_std * (dxhat - mean(dxhat) - xhat * mean(dxhat*xhat)), per (b,c).
template <typename T>
void in_backward_slice(const T* dxhat, const T* xhat, T inv_std, int64_t S, T* gx) {
  T s1 = 0, s2 = 0;
  for (int64_t i = 0; i < S; ++i) {
    s1 += dxhat[i];
    s2 += dxhat[i] * xhat[i];
  }
  s1 /= static_cast<T>(S);
  s2 /= static_cast<T>(S);
  for (int64_t i = 0; i < S; ++i) gx[i] += inv_std * (dxhat[i] - s1 - xhat[i] * s2);
}

}  // namespace detail

// Per-sample, per-channel normalization over the spatial axes; no learnable
// affine parameters.
template <typename T>
Var instance_norm(Tape<T>& tp, Var x, T eps = T(1e-5)) {
  const Tensor<T>& xv = tp.val(x);
  if (xv.rank() != 4) throw ShapeMismatch("instance_norm: rank");
  const int64_t B = xv.dim(0), C = xv.dim(1), S = xv.dim(2) * xv.dim(3);
  auto cache = detail::compute_bc_stats(xv, eps);
  Tensor<T> out(xv.shape);
  for (int64_t bc = 0; bc < B * C; ++bc) {
    const T m = cache->mean[static_cast<size_t>(bc)], is = cache->inv_std[static_cast<size_t>(bc)];
    const T* p = xv.ptr() + bc * S;
    T* o = out.ptr() + bc * S;
    for (int64_t i = 0; i < S; ++i) o[i] = (p[i] - m) * is;
  }
  Var y = tp.make(std::move(out), tp.needs_grad(x));
  if (tp.needs_grad(x)) {
    tp.set_back(y, [x, y, cache, B, C, S](Tape<T>& t) {
      const Tensor<T>& gy = t.grad(y);
      const Tensor<T>& yv = t.val(y);  // yv is xhat
      Tensor<T>& gx = t.grad(x);
      for (int64_t bc = 0; bc < B * C; ++bc)
        detail::in_backward_slice(gy.ptr() + bc * S, yv.ptr() + bc * S,
                                  cache->inv_std[static_cast<size_t>(bc)], S, gx.ptr() + bc * S);
    });
  }
  return y;
}

// Adaptive instance normalization: y = gamma[b,c] * xhat + beta[b,c], with
// gamma/beta (B,C) supplied externally (from the domain code).
template <typename T>
Var adain(Tape<T>& tp, Var x, Var gamma, Var beta, T eps = T(1e-5)) {
  const Tensor<T>& xv = tp.val(x);
  const Tensor<T>& gv = tp.val(gamma);
  const Tensor<T>& bv = tp.val(beta);
  if (xv.rank() != 4) throw ShapeMismatch("adain: rank");
  const int64_t B = xv.dim(0), C = xv.dim(1), S = xv.dim(2) * xv.dim(3);
  if (gv.shape != std::vector<int64_t>{B, C} || bv.shape != std::vector<int64_t>{B, C})
    throw ShapeMismatch("adain: affine params " + gv.shape_str() + "/" + bv.shape_str() +
                        " for input " + xv.shape_str());
  auto cache = detail::compute_bc_stats(xv, eps);
  Tensor<T> out(xv.shape);
  for (int64_t bc = 0; bc < B * C; ++bc) {
    const T m = cache->mean[static_cast<size_t>(bc)], is = cache->inv_std[static_cast<size_t>(bc)];
    const T g = gv[bc], bb = bv[bc];
    const T* p = xv.ptr() + bc * S;
    T* o = out.ptr() + bc * S;
    for (int64_t i = 0; i < S; ++i) o[i] = g * (p[i] - m) * is + bb;
  }
  const bool ng = tp.needs_grad(x) || tp.needs_grad(gamma) || tp.needs_grad(beta);
  Var y = tp.make(std::move(out), ng);
  if (ng) {
    tp.set_back(y, [x, gamma, beta, y, cache, B, C, S](Tape<T>& t) {
      const Tensor<T>& gy = t.grad(y);
      const Tensor<T>& xv2 = t.val(x);
      const Tensor<T>& gv2 = t.val(gamma);
      std::vector<T> xhat(static_cast<size_t>(S)), dxhat(static_cast<size_t>(S));
      for (int64_t bc = 0; bc < B * C; ++bc) {
        const T m = cache->mean[static_cast<size_t>(bc)];
        const T is = cache->inv_std[static_cast<size_t>(bc)];
        const T* p = xv2.ptr() + bc * S;
        const T* g = gy.ptr() + bc * S;
        for (int64_t i = 0; i < S; ++i) xhat[static_cast<size_t>(i)] = (p[i] - m) * is;
        if (t.needs_grad(beta)) {
          T s = 0;
          for (int64_t i = 0; i < S; ++i) s += g[i];
          t.grad(beta)[bc] += s;
        }
        if (t.needs_grad(gamma)) {
          T s = 0;
          for (int64_t i = 0; i < S; ++i) s += g[i] * xhat[static_cast<size_t>(i)];
          t.grad(gamma)[bc] += s;
        }
        if (t.needs_grad(x)) {
          const T gm = gv2[bc];
          for (int64_t i = 0; i < S; ++i) dxhat[static_cast<size_t>(i)] = g[i] * gm;
          detail::in_backward_slice(dxhat.data(), xhat.data(), is, S, t.grad(x).ptr() + bc * S);
        }
      }
    });
  }
  return y;
}

// ---------------------------------------------------------------------------
// Shape ops, pooling, reductions
// ---------------------------------------------------------------------------

// Concatenate along the channel axis.
template <typename T>
Var concat_channels(Tape<T>& tp, Var a, Var b) {
  const Tensor<T>& av = tp.val(a);
  const Tensor<T>& bv = tp.val(b);
  if (av.rank() != 4 || bv.rank() != 4 || av.dim(0) != bv.dim(0) || av.dim(2) != bv.dim(2) ||
      av.dim(3) != bv.dim(3))
    throw ShapeMismatch("concat_channels: " + av.shape_str() + " vs " + bv.shape_str());
  const int64_t B = av.dim(0), Ca = av.dim(1), Cb = bv.dim(1), S = av.dim(2) * av.dim(3);
  Tensor<T> out({B, Ca + Cb, av.dim(2), av.dim(3)});
  for (int64_t i = 0; i < B; ++i) {
    std::memcpy(out.ptr() + i * (Ca + Cb) * S, av.ptr() + i * Ca * S,
                sizeof(T) * static_cast<size_t>(Ca * S));
    std::memcpy(out.ptr() + (i * (Ca + Cb) + Ca) * S, bv.ptr() + i * Cb * S,
                sizeof(T) * static_cast<size_t>(Cb * S));
  }
  const bool ng = tp.needs_grad(a) || tp.needs_grad(b);
  Var y = tp.make(std::move(out), ng);
  if (ng) {
    tp.set_back(y, [a, b, y, B, Ca, Cb, S](Tape<T>& t) {
      const Tensor<T>& gy = t.grad(y);
      for (int64_t i = 0; i < B; ++i) {
        if (t.needs_grad(a)) {
          T* ga = t.grad(a).ptr() + i * Ca * S;
          const T* src = gy.ptr() + i * (Ca + Cb) * S;
          for (int64_t j = 0; j < Ca * S; ++j) ga[j] += src[j];
        }
        if (t.needs_grad(b)) {
          T* gb = t.grad(b).ptr() + i * Cb * S;
          const T* src = gy.ptr() + (i * (Ca + Cb) + Ca) * S;
          for (int64_t j = 0; j < Cb * S; ++j) gb[j] += src[j];
        }
      }
    });
  }
  return y;
}

// (B,C,T,F) -> (B, C*T*F)
template <typename T>
Var flatten_spatial(Tape<T>& tp, Var x) {
  const Tensor<T>& xv = tp.val(x);
  if (xv.rank() != 4) throw ShapeMismatch("flatten_spatial: rank");
  Tensor<T> out({xv.dim(0), xv.dim(1) * xv.dim(2) * xv.dim(3)});
  out.data = xv.data;
  Var y = tp.make(std::move(out), tp.needs_grad(x));
  if (tp.needs_grad(x)) {
    tp.set_back(y, [x, y](Tape<T>& t) {
      const Tensor<T>& gy = t.grad(y);
      Tensor<T>& gx = t.grad(x);
      for (int64_t i = 0; i < gy.numel(); ++i) gx[i] += gy[i];
    });
  }
  return y;
}

// (B,n) -> (B, len) columns [start, start+len)
template <typename T>
Var slice_cols(Tape<T>& tp, Var x, int64_t start, int64_t len) {
  const Tensor<T>& xv = tp.val(x);
  if (xv.rank() != 2 || start < 0 || start + len > xv.dim(1))
    throw ShapeMismatch("slice_cols: " + xv.shape_str());
  const int64_t B = xv.dim(0), n = xv.dim(1);
  Tensor<T> out({B, len});
  for (int64_t i = 0; i < B; ++i)
    std::memcpy(out.ptr() + i * len, xv.ptr() + i * n + start, sizeof(T) * static_cast<size_t>(len));
  Var y = tp.make(std::move(out), tp.needs_grad(x));
  if (tp.needs_grad(x)) {
    tp.set_back(y, [x, y, start, len, B, n](Tape<T>& t) {
      const Tensor<T>& gy = t.grad(y);
      Tensor<T>& gx = t.grad(x);
      for (int64_t i = 0; i < B; ++i)
        for (int64_t j = 0; j < len; ++j) gx[i * n + start + j] += gy[i * len + j];
    });
  }
  return y;
}

// (B,C,T,F) -> (B,C,1,F), mean over the time axis.
template <typename T>
Var mean_over_time(Tape<T>& tp, Var x) {
  const Tensor<T>& xv = tp.val(x);
  if (xv.rank() != 4) throw ShapeMismatch("mean_over_time: rank");
  const int64_t B = xv.dim(0), C = xv.dim(1), Tt = xv.dim(2), F = xv.dim(3);
  Tensor<T> out({B, C, 1, F});
  for (int64_t bc = 0; bc < B * C; ++bc) {
    const T* p = xv.ptr() + bc * Tt * F;
    T* o = out.ptr() + bc * F;
    for (int64_t tt = 0; tt < Tt; ++tt)
      for (int64_t f = 0; f < F; ++f) o[f] += p[tt * F + f];
    for (int64_t f = 0; f < F; ++f) o[f] /= static_cast<T>(Tt);
  }
  Var y = tp.make(std::move(out), tp.needs_grad(x));
  if (tp.needs_grad(x)) {
    tp.set_back(y, [x, y, B, C, Tt, F](Tape<T>& t) {
      const Tensor<T>& gy = t.grad(y);
      Tensor<T>& gx = t.grad(x);
      const T inv = T(1) / static_cast<T>(Tt);
      for (int64_t bc = 0; bc < B * C; ++bc)
        for (int64_t tt = 0; tt < Tt; ++tt)
          for (int64_t f = 0; f < F; ++f) gx[bc * Tt * F + tt * F + f] += gy[bc * F + f] * inv;
    });
  }
  return y;
}

// Adaptive average pooling of the frequency axis to out_f bins, window
// [floor(i*F/out_f), ceil((i+1)*F/out_f)).
template <typename T>
Var adaptive_avg_pool_freq(Tape<T>& tp, Var x, int64_t out_f) {
  const Tensor<T>& xv = tp.val(x);
  if (xv.rank() != 4) throw ShapeMismatch("adaptive_avg_pool_freq: rank");
  const int64_t B = xv.dim(0), C = xv.dim(1), Tt = xv.dim(2), F = xv.dim(3);
  Tensor<T> out({B, C, Tt, out_f});
  auto lo = [&](int64_t i) { return i * F / out_f; };
  auto hi = [&](int64_t i) { return ((i + 1) * F + out_f - 1) / out_f; };
  for (int64_t bct = 0; bct < B * C * Tt; ++bct) {
    const T* p = xv.ptr() + bct * F;
    T* o = out.ptr() + bct * out_f;
    for (int64_t i = 0; i < out_f; ++i) {
      T s = 0;
      for (int64_t f = lo(i); f < hi(i); ++f) s += p[f];
      o[i] = s / static_cast<T>(hi(i) - lo(i));
    }
  }
  Var y = tp.make(std::move(out), tp.needs_grad(x));
  if (tp.needs_grad(x)) {
    tp.set_back(y, [x, y, B, C, Tt, F, out_f](Tape<T>& t) {
      const Tensor<T>& gy = t.grad(y);
      Tensor<T>& gx = t.grad(x);
      auto lo = [&](int64_t i) { return i * F / out_f; };
      auto hi = [&](int64_t i) { return ((i + 1) * F + out_f - 1) / out_f; };
      for (int64_t bct = 0; bct < B * C * Tt; ++bct) {
        const T* g = gy.ptr() + bct * out_f;
        T* gp = gx.ptr() + bct * F;
        for (int64_t i = 0; i < out_f; ++i) {
          const T w = g[i] / static_cast<T>(hi(i) - lo(i));
          for (int64_t f = lo(i); f < hi(i); ++f) gp[f] += w;
        }
      }
    });
  }
  return y;
}

// Mean over all elements -> scalar {1}.
template <typename T>
Var mean_all(Tape<T>& tp, Var x) {
  const Tensor<T>& xv = tp.val(x);
  T s = 0;
  for (int64_t i = 0; i < xv.numel(); ++i) s += xv[i];
  const int64_t n = xv.numel();
  Tensor<T> out({1});
  out[0] = s / static_cast<T>(n);
  Var y = tp.make(std::move(out), tp.needs_grad(x));
  if (tp.needs_grad(x)) {
    tp.set_back(y, [x, y, n](Tape<T>& t) {
      const T g = t.grad(y)[0] / static_cast<T>(n);
      Tensor<T>& gx = t.grad(x);
      for (int64_t i = 0; i < gx.numel(); ++i) gx[i] += g;
    });
  }
  return y;
}

// Mean of |x| over all elements -> scalar {1}.
template <typename T>
Var mean_abs(Tape<T>& tp, Var x) {
  const Tensor<T>& xv = tp.val(x);
  T s = 0;
  for (int64_t i = 0; i < xv.numel(); ++i) s += std::abs(xv[i]);
  const int64_t n = xv.numel();
  Tensor<T> out({1});
  out[0] = s / static_cast<T>(n);
  Var y = tp.make(std::move(out), tp.needs_grad(x));
  if (tp.needs_grad(x)) {
    tp.set_back(y, [x, y, n](Tape<T>& t) {
      const T g = t.grad(y)[0] / static_cast<T>(n);
      const Tensor<T>& xv2 = t.val(x);
      Tensor<T>& gx = t.grad(x);
      for (int64_t i = 0; i < gx.numel(); ++i)
        gx[i] += xv2[i] > 0 ? g : (xv2[i] < 0 ? -g : T(0));
    });
  }
  return y;
}

// Mean elementwise L1 distance -> scalar.
template <typename T>
Var mean_abs_diff(Tape<T>& tp, Var a, Var b) {
  return mean_abs(tp, sub(tp, a, b));
}

// weights[i].first * weights[i].second, summed; all vars must share a shape.
template <typename T>
Var weighted_sum(Tape<T>& tp, const std::vector<std::pair<T, Var>>& terms) {
  if (terms.empty()) throw ShapeMismatch("weighted_sum: empty");
  const Tensor<T>& first = tp.val(terms[0].second);
  Tensor<T> out(first.shape);
  bool ng = false;
  for (const auto& [c, v] : terms) {
    const Tensor<T>& tv = tp.val(v);
    if (!tv.same_shape(first)) throw ShapeMismatch("weighted_sum: shapes");
    for (int64_t i = 0; i < tv.numel(); ++i) out[i] += c * tv[i];
    ng = ng || tp.needs_grad(v);
  }
  Var y = tp.make(std::move(out), ng);
  if (ng) {
    auto terms_copy = terms;
    tp.set_back(y, [terms_copy, y](Tape<T>& t) {
      const Tensor<T>& gy = t.grad(y);
      for (const auto& [c, v] : terms_copy) {
        if (!t.needs_grad(v)) continue;
        Tensor<T>& gv = t.grad(v);
        for (int64_t i = 0; i < gy.numel(); ++i) gv[i] += c * gy[i];
      }
    });
  }
  return y;
}

}  // namespace sda

#endif  // SDA_OPS_HPP_
