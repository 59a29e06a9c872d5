#pragma once

// Tape-based reverse-mode differentiation over dense double matrices.
//
// Every op records its output value and a backward closure on the tape.
// `Tape::backward` walks the tape in reverse from a scalar loss and returns
// the gradient of every parameter in the store (zeros for parameters the loss
// does not reach). A tape belongs to one thread; throw it away after use.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sgsum/error.hpp"
#include "sgsum/params.hpp"
#include "sgsum/rng.hpp"
#include "sgsum/tensor.hpp"

namespace sgsum {

class Tape;

class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  const Tensor& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  std::size_t id() const { return id_; }
  Tape* tape() const { return tape_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t)>;

  Var constant(Tensor value) {
    check_finite("constant", value);
    nodes_.push_back(Node{std::move(value), {}, false, false, {}, {}, {}});
    return Var(this, nodes_.size() - 1);
  }

  // One leaf per parameter name; repeated lookups share the node so its
  // gradient accumulates in one place.
  Var param(const ParamStore& store, const std::string& name) {
    if (auto it = param_ids_.find(name); it != param_ids_.end()) return Var(this, it->second);
    nodes_.push_back(Node{store.get(name), {}, true, false, {}, {}, name});
    param_ids_.emplace(name, nodes_.size() - 1);
    return Var(this, nodes_.size() - 1);
  }

  Var record(std::string_view op, Tensor value, std::vector<std::size_t> inputs, BackwardFn fn) {
    check_finite(op, value);
    bool needs = false;
    for (std::size_t in : inputs) needs = needs || nodes_.at(in).requires_grad;
    nodes_.push_back(Node{std::move(value), {}, needs, false, std::move(inputs),
                          needs ? std::move(fn) : BackwardFn{}, {}});
    return Var(this, nodes_.size() - 1);
  }

  const Tensor& value(std::size_t id) const { return nodes_.at(id).value; }
  const Tensor& grad(std::size_t id) const { return nodes_.at(id).grad; }
  bool requires_grad(std::size_t id) const { return nodes_.at(id).requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  // Accumulation target for an input's gradient, or nullptr when that input
  // does not lead to any parameter.
  Tensor* grad_target(std::size_t id) {
    Node& node = nodes_.at(id);
    if (!node.requires_grad) return nullptr;
    if (!node.has_grad) {
      node.grad = Tensor(node.value.shape());
      node.has_grad = true;
    }
    return &node.grad;
  }

  Gradients backward(Var loss, const ParamStore& store) {
    SGSUM_CHECK(loss.tape() == this, "backward: loss belongs to another tape");
    SGSUM_CHECK(loss.value().size() == 1, "backward: loss must be a scalar, got shape ",
                loss.value().shape_str());
    for (Node& n : nodes_) {
      n.has_grad = false;
      n.grad = Tensor();
    }
    if (Tensor* g = grad_target(loss.id())) (*g)[0] = 1.0;
    for (std::size_t id = loss.id() + 1; id-- > 0;) {
      Node& node = nodes_[id];
      if (node.has_grad && node.fn) node.fn(*this, id);
    }
    Gradients out = store.zero_gradients();
    for (const auto& [name, id] : param_ids_) {
      const Node& node = nodes_[id];
      if (!node.has_grad) continue;
      auto it = out.find(name);
      if (it != out.end()) it->second = node.grad;
    }
    return out;
  }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    bool has_grad = false;
    std::vector<std::size_t> inputs;
    BackwardFn fn;
    std::string param;
  };

  static void check_finite(std::string_view op, const Tensor& t) {
    SGSUM_CHECK(t.all_finite(), op, ": produced a non-finite value (shape ", t.shape_str(), ")");
  }

  std::deque<Node> nodes_;
  std::unordered_map<std::string, std::size_t> param_ids_;
};

inline const Tensor& Var::value() const { return tape_->value(id_); }

namespace detail {

inline Tape& tape_of(const Var& a) {
  SGSUM_CHECK(a.valid(), "operation on an unbound Var");
  return *a.tape();
}

inline Tape& tape_of(const Var& a, const Var& b) {
  SGSUM_CHECK(a.valid() && b.valid() && a.tape() == b.tape(),
              "operands belong to different tapes");
  return *a.tape();
}

inline void check_same_shape(std::string_view op, const Tensor& a, const Tensor& b) {
  SGSUM_CHECK(a.rows() == b.rows() && a.cols() == b.cols(), op, ": shape mismatch ",
              a.shape_str(), " vs ", b.shape_str());
}

}  // namespace detail

// C = A B
inline Var matmul(const Var& a, const Var& b) {
  Tape& tape = detail::tape_of(a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  SGSUM_CHECK(A.cols() == B.rows(), "matmul: shape mismatch ", A.shape_str(), " x ",
              B.shape_str());
  const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
  Tensor C = Tensor::matrix(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = A(i, p);
      for (std::size_t j = 0; j < n; ++j) C(i, j) += aip * B(p, j);
    }
  }
  const std::size_t ia = a.id(), ib = b.id();
  return tape.record("matmul", std::move(C), {ia, ib}, [ia, ib, m, k, n](Tape& t, std::size_t self) {
    const Tensor& dC = t.grad(self);
    if (Tensor* dA = t.grad_target(ia)) {
      const Tensor& B = t.value(ib);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += dC(i, j) * B(p, j);
          (*dA)(i, p) += s;
        }
      }
    }
    if (Tensor* dB = t.grad_target(ib)) {
      const Tensor& A = t.value(ia);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          const double aip = A(i, p);
          for (std::size_t j = 0; j < n; ++j) (*dB)(p, j) += aip * dC(i, j);
        }
      }
    }
  });
}

inline Var transpose(const Var& a) {
  Tape& tape = detail::tape_of(a);
  const std::size_t ia = a.id();
  return tape.record("transpose", transpose(a.value()), {ia}, [ia](Tape& t, std::size_t self) {
    Tensor* dA = t.grad_target(ia);
    const Tensor& dY = t.grad(self);
    for (std::size_t r = 0; r < dY.rows(); ++r) {
      for (std::size_t c = 0; c < dY.cols(); ++c) (*dA)(c, r) += dY(r, c);
    }
  });
}

inline Var add(const Var& a, const Var& b) {
  Tape& tape = detail::tape_of(a, b);
  detail::check_same_shape("add", a.value(), b.value());
  Tensor out = Tensor::matrix(a.rows(), a.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] + b.value()[i];
  const std::size_t ia = a.id(), ib = b.id();
  return tape.record("add", std::move(out), {ia, ib}, [ia, ib](Tape& t, std::size_t self) {
    const Tensor& dY = t.grad(self);
    for (std::size_t in : {ia, ib}) {
      if (Tensor* d = t.grad_target(in)) {
        for (std::size_t i = 0; i < dY.size(); ++i) (*d)[i] += dY[i];
      }
    }
  });
}

// A + 1 b^T: adds the row vector b to every row of A.
inline Var add_row(const Var& a, const Var& b) {
  Tape& tape = detail::tape_of(a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  SGSUM_CHECK(B.size() == A.cols(), "add_row: shape mismatch ", A.shape_str(), " + row ",
              B.shape_str());
  Tensor out = Tensor::matrix(A.rows(), A.cols());
  for (std::size_t r = 0; r < A.rows(); ++r) {
    for (std::size_t c = 0; c < A.cols(); ++c) out(r, c) = A(r, c) + B[c];
  }
  const std::size_t ia = a.id(), ib = b.id();
  return tape.record("add_row", std::move(out), {ia, ib}, [ia, ib](Tape& t, std::size_t self) {
    const Tensor& dY = t.grad(self);
    if (Tensor* dA = t.grad_target(ia)) {
      for (std::size_t i = 0; i < dY.size(); ++i) (*dA)[i] += dY[i];
    }
    if (Tensor* dB = t.grad_target(ib)) {
      for (std::size_t r = 0; r < dY.rows(); ++r) {
        for (std::size_t c = 0; c < dY.cols(); ++c) (*dB)[c] += dY(r, c);
      }
    }
  });
}

inline Var mul(const Var& a, const Var& b) {
  Tape& tape = detail::tape_of(a, b);
  detail::check_same_shape("mul", a.value(), b.value());
  Tensor out = Tensor::matrix(a.rows(), a.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] * b.value()[i];
  const std::size_t ia = a.id(), ib = b.id();
  return tape.record("mul", std::move(out), {ia, ib}, [ia, ib](Tape& t, std::size_t self) {
    const Tensor& dY = t.grad(self);
    if (Tensor* dA = t.grad_target(ia)) {
      const Tensor& B = t.value(ib);
      for (std::size_t i = 0; i < dY.size(); ++i) (*dA)[i] += dY[i] * B[i];
    }
    if (Tensor* dB = t.grad_target(ib)) {
      const Tensor& A = t.value(ia);
      for (std::size_t i = 0; i < dY.size(); ++i) (*dB)[i] += dY[i] * A[i];
    }
  });
}

inline Var scale(const Var& a, double s) {
  Tape& tape = detail::tape_of(a);
  Tensor out = Tensor::matrix(a.rows(), a.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] * s;
  const std::size_t ia = a.id();
  return tape.record("scale", std::move(out), {ia}, [ia, s](Tape& t, std::size_t self) {
    const Tensor& dY = t.grad(self);
    Tensor* dA = t.grad_target(ia);
    for (std::size_t i = 0; i < dY.size(); ++i) (*dA)[i] += dY[i] * s;
  });
}

inline Var add_scalar(const Var& a, double s) {
  Tape& tape = detail::tape_of(a);
  Tensor out = Tensor::matrix(a.rows(), a.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] + s;
  const std::size_t ia = a.id();
  return tape.record("add_scalar", std::move(out), {ia}, [ia](Tape& t, std::size_t self) {
    const Tensor& dY = t.grad(self);
    Tensor* dA = t.grad_target(ia);
    for (std::size_t i = 0; i < dY.size(); ++i) (*dA)[i] += dY[i];
  });
}

inline Var sub(const Var& a, const Var& b) { return add(a, scale(b, -1.0)); }

// x W + b
inline Var affine(const Var& x, const Var& w, const Var& b) { return add_row(matmul(x, w), b); }

// Row-wise softmax; the row max is subtracted before exponentiation.
inline Var softmax_rows(const Var& a) {
  Tape& tape = detail::tape_of(a);
  const Tensor& A = a.value();
  Tensor Y = Tensor::matrix(A.rows(), A.cols());
  for (std::size_t r = 0; r < A.rows(); ++r) {
    double mx = A(r, 0);
    for (std::size_t c = 1; c < A.cols(); ++c) mx = std::max(mx, A(r, c));
    double z = 0.0;
    for (std::size_t c = 0; c < A.cols(); ++c) {
      Y(r, c) = std::exp(A(r, c) - mx);
      z += Y(r, c);
    }
    for (std::size_t c = 0; c < A.cols(); ++c) Y(r, c) /= z;
  }
  const std::size_t ia = a.id();
  return tape.record("softmax_rows", std::move(Y), {ia}, [ia](Tape& t, std::size_t self) {
    const Tensor& dY = t.grad(self);
    const Tensor& Y = t.value(self);
    Tensor* dA = t.grad_target(ia);
    for (std::size_t r = 0; r < Y.rows(); ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < Y.cols(); ++c) s += dY(r, c) * Y(r, c);
      for (std::size_t c = 0; c < Y.cols(); ++c) (*dA)(r, c) += Y(r, c) * (dY(r, c) - s);
    }
  });
}

// Per-row normalization to zero mean and unit variance, then gain and bias.
inline Var layer_norm(const Var& x, const Var& gain, const Var& bias, double eps) {
  Tape& tape = detail::tape_of(x, gain);
  detail::tape_of(x, bias);
  const Tensor& X = x.value();
  const std::size_t rows = X.rows(), n = X.cols();
  SGSUM_CHECK(gain.value().size() == n && bias.value().size() == n,
              "layer_norm: shape mismatch ", X.shape_str(), " with gain ",
              gain.value().shape_str(), " and bias ", bias.value().shape_str());
  Tensor xhat = Tensor::matrix(rows, n);
  std::vector<double> inv_std(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double mean = 0.0;
    for (std::size_t c = 0; c < n; ++c) mean += X(r, c);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t c = 0; c < n; ++c) var += (X(r, c) - mean) * (X(r, c) - mean);
    var /= static_cast<double>(n);
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t c = 0; c < n; ++c) xhat(r, c) = (X(r, c) - mean) * inv_std[r];
  }
  Tensor Y = Tensor::matrix(rows, n);
  const Tensor& G = gain.value();
  const Tensor& B = bias.value();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < n; ++c) Y(r, c) = xhat(r, c) * G[c] + B[c];
  }
  const std::size_t ix = x.id(), ig = gain.id(), ib = bias.id();
  return tape.record(
      "layer_norm", std::move(Y), {ix, ig, ib},
      [ix, ig, ib, xhat = std::move(xhat), inv_std = std::move(inv_std)](Tape& t, std::size_t self) {
        const Tensor& dY = t.grad(self);
        const Tensor& G = t.value(ig);
        const std::size_t rows = dY.rows(), n = dY.cols();
        if (Tensor* dG = t.grad_target(ig)) {
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < n; ++c) (*dG)[c] += dY(r, c) * xhat(r, c);
          }
        }
        if (Tensor* dB = t.grad_target(ib)) {
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < n; ++c) (*dB)[c] += dY(r, c);
          }
        }
        if (Tensor* dX = t.grad_target(ix)) {
          const double nn = static_cast<double>(n);
          std::vector<double> dxhat(n);
          for (std::size_t r = 0; r < rows; ++r) {
            double sum = 0.0, sum_xhat = 0.0;
            for (std::size_t c = 0; c < n; ++c) {
              dxhat[c] = dY(r, c) * G[c];
              sum += dxhat[c];
              sum_xhat += dxhat[c] * xhat(r, c);
            }
            for (std::size_t c = 0; c < n; ++c) {
              (*dX)(r, c) += inv_std[r] / nn * (nn * dxhat[c] - sum - xhat(r, c) * sum_xhat);
            }
          }
        }
      });
}

inline Var relu(const Var& a) {
  Tape& tape = detail::tape_of(a);
  Tensor out = Tensor::matrix(a.rows(), a.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(0.0, a.value()[i]);
  const std::size_t ia = a.id();
  return tape.record("relu", std::move(out), {ia}, [ia](Tape& t, std::size_t self) {
    const Tensor& dY = t.grad(self);
    const Tensor& A = t.value(ia);
    Tensor* dA = t.grad_target(ia);
    for (std::size_t i = 0; i < dY.size(); ++i) {
      if (A[i] > 0.0) (*dA)[i] += dY[i];
    }
  });
}

inline Var sigmoid(const Var& a) {
  Tape& tape = detail::tape_of(a);
  Tensor out = Tensor::matrix(a.rows(), a.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-a.value()[i]));
  const std::size_t ia = a.id();
  return tape.record("sigmoid", std::move(out), {ia}, [ia](Tape& t, std::size_t self) {
    const Tensor& dY = t.grad(self);
    const Tensor& Y = t.value(self);
    Tensor* dA = t.grad_target(ia);
    for (std::size_t i = 0; i < dY.size(); ++i) (*dA)[i] += dY[i] * Y[i] * (1.0 - Y[i]);
  });
}

inline Var log(const Var& a) {
  Tape& tape = detail::tape_of(a);
  Tensor out = Tensor::matrix(a.rows(), a.cols());
  for (std::size_t i = 0; i < out.size(); ++i) {
    SGSUM_CHECK(a.value()[i] > 0.0, "log: non-positive input ", a.value()[i]);
    out[i] = std::log(a.value()[i]);
  }
  const std::size_t ia = a.id();
  return tape.record("log", std::move(out), {ia}, [ia](Tape& t, std::size_t self) {
    const Tensor& dY = t.grad(self);
    const Tensor& A = t.value(ia);
    Tensor* dA = t.grad_target(ia);
    for (std::size_t i = 0; i < dY.size(); ++i) (*dA)[i] += dY[i] / A[i];
  });
}

// Gradient passes only where the input lies strictly inside [lo, hi].
inline Var clamp(const Var& a, double lo, double hi) {
  Tape& tape = detail::tape_of(a);
  Tensor out = Tensor::matrix(a.rows(), a.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(a.value()[i], lo, hi);
  const std::size_t ia = a.id();
  return tape.record("clamp", std::move(out), {ia}, [ia, lo, hi](Tape& t, std::size_t self) {
    const Tensor& dY = t.grad(self);
    const Tensor& A = t.value(ia);
    Tensor* dA = t.grad_target(ia);
    for (std::size_t i = 0; i < dY.size(); ++i) {
      if (A[i] > lo && A[i] < hi) (*dA)[i] += dY[i];
    }
  });
}

inline Var concat_cols(std::span<const Var> parts) {
  SGSUM_CHECK(!parts.empty(), "concat_cols: no inputs");
  Tape& tape = detail::tape_of(parts[0]);
  const std::size_t rows = parts[0].rows();
  std::size_t cols = 0;
  std::vector<std::size_t> ids;
  std::vector<std::size_t> offsets;
  for (const Var& p : parts) {
    detail::tape_of(parts[0], p);
    SGSUM_CHECK(p.rows() == rows, "concat_cols: row mismatch ", parts[0].value().shape_str(),
                " vs ", p.value().shape_str());
    offsets.push_back(cols);
    cols += p.cols();
    ids.push_back(p.id());
  }
  Tensor out = Tensor::matrix(rows, cols);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Tensor& P = parts[k].value();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < P.cols(); ++c) out(r, offsets[k] + c) = P(r, c);
    }
  }
  return tape.record("concat_cols", std::move(out), ids, [ids, offsets](Tape& t, std::size_t self) {
    const Tensor& dY = t.grad(self);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      Tensor* d = t.grad_target(ids[k]);
      if (!d) continue;
      for (std::size_t r = 0; r < d->rows(); ++r) {
        for (std::size_t c = 0; c < d->cols(); ++c) (*d)(r, c) += dY(r, offsets[k] + c);
      }
    }
  });
}

inline Var concat_rows(std::span<const Var> parts) {
  SGSUM_CHECK(!parts.empty(), "concat_rows: no inputs");
  Tape& tape = detail::tape_of(parts[0]);
  const std::size_t cols = parts[0].cols();
  std::size_t rows = 0;
  std::vector<std::size_t> ids;
  std::vector<std::size_t> offsets;
  for (const Var& p : parts) {
    detail::tape_of(parts[0], p);
    SGSUM_CHECK(p.cols() == cols, "concat_rows: column mismatch ", parts[0].value().shape_str(),
                " vs ", p.value().shape_str());
    offsets.push_back(rows);
    rows += p.rows();
    ids.push_back(p.id());
  }
  Tensor out = Tensor::matrix(rows, cols);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Tensor& P = parts[k].value();
    std::copy(P.data().begin(), P.data().end(),
              out.data().begin() + static_cast<std::ptrdiff_t>(offsets[k] * cols));
  }
  return tape.record("concat_rows", std::move(out), ids,
                     [ids, offsets, cols](Tape& t, std::size_t self) {
                       const Tensor& dY = t.grad(self);
                       for (std::size_t k = 0; k < ids.size(); ++k) {
                         Tensor* d = t.grad_target(ids[k]);
                         if (!d) continue;
                         for (std::size_t i = 0; i < d->size(); ++i) {
                           (*d)[i] += dY[offsets[k] * cols + i];
                         }
                       }
                     });
}

inline Var slice_cols(const Var& a, std::size_t start, std::size_t len) {
  Tape& tape = detail::tape_of(a);
  const Tensor& A = a.value();
  SGSUM_CHECK(start + len <= A.cols(), "slice_cols: columns [", start, ",", start + len,
              ") out of range for ", A.shape_str());
  Tensor out = Tensor::matrix(A.rows(), len);
  for (std::size_t r = 0; r < A.rows(); ++r) {
    for (std::size_t c = 0; c < len; ++c) out(r, c) = A(r, start + c);
  }
  const std::size_t ia = a.id();
  return tape.record("slice_cols", std::move(out), {ia}, [ia, start](Tape& t, std::size_t self) {
    const Tensor& dY = t.grad(self);
    Tensor* dA = t.grad_target(ia);
    for (std::size_t r = 0; r < dY.rows(); ++r) {
      for (std::size_t c = 0; c < dY.cols(); ++c) (*dA)(r, start + c) += dY(r, c);
    }
  });
}

// Rows of `a` at the given indices (repeats allowed).
inline Var gather_rows(const Var& a, std::vector<std::size_t> idx) {
  Tape& tape = detail::tape_of(a);
  const Tensor& A = a.value();
  Tensor out = Tensor::matrix(idx.size(), A.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    SGSUM_CHECK(idx[k] < A.rows(), "gather_rows: index ", idx[k], " out of range for ",
                A.shape_str());
    for (std::size_t c = 0; c < A.cols(); ++c) out(k, c) = A(idx[k], c);
  }
  const std::size_t ia = a.id();
  return tape.record("gather_rows", std::move(out), {ia},
                     [ia, idx = std::move(idx)](Tape& t, std::size_t self) {
                       const Tensor& dY = t.grad(self);
                       Tensor* dA = t.grad_target(ia);
                       for (std::size_t k = 0; k < idx.size(); ++k) {
                         for (std::size_t c = 0; c < dY.cols(); ++c) (*dA)(idx[k], c) += dY(k, c);
                       }
                     });
}

// Column means as a 1 x cols row.
inline Var mean_rows(const Var& a) {
  Tape& tape = detail::tape_of(a);
  const Tensor& A = a.value();
  SGSUM_CHECK(A.rows() > 0, "mean_rows: empty input");
  Tensor out = Tensor::matrix(1, A.cols());
  for (std::size_t r = 0; r < A.rows(); ++r) {
    for (std::size_t c = 0; c < A.cols(); ++c) out[c] += A(r, c);
  }
  const double inv = 1.0 / static_cast<double>(A.rows());
  for (std::size_t c = 0; c < A.cols(); ++c) out[c] *= inv;
  const std::size_t ia = a.id();
  return tape.record("mean_rows", std::move(out), {ia}, [ia, inv](Tape& t, std::size_t self) {
    const Tensor& dY = t.grad(self);
    Tensor* dA = t.grad_target(ia);
    for (std::size_t r = 0; r < dA->rows(); ++r) {
      for (std::size_t c = 0; c < dA->cols(); ++c) (*dA)(r, c) += dY[c] * inv;
    }
  });
}

inline Var sum(const Var& a) {
  Tape& tape = detail::tape_of(a);
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  const std::size_t ia = a.id();
  return tape.record("sum", Tensor::scalar(s), {ia}, [ia](Tape& t, std::size_t self) {
    const double g = t.grad(self)[0];
    Tensor* dA = t.grad_target(ia);
    for (double& v : dA->data()) v += g;
  });
}

// Cosine between two flattened tensors of equal size, as a 1x1 scalar.
// A zero-norm operand is a checked failure.
inline Var cosine_similarity(const Var& u, const Var& v) {
  Tape& tape = detail::tape_of(u, v);
  const Tensor& U = u.value();
  const Tensor& V = v.value();
  SGSUM_CHECK(U.size() == V.size(), "cosine_similarity: shape mismatch ", U.shape_str(), " vs ",
              V.shape_str());
  const double uu = dot(U.data(), U.data());
  const double vv = dot(V.data(), V.data());
  SGSUM_CHECK(uu > 0.0 && vv > 0.0, "cosine_similarity: zero-norm operand");
  const double uv = dot(U.data(), V.data());
  const double denom = std::sqrt(uu * vv);
  const double c = uv / denom;
  const std::size_t iu = u.id(), iv = v.id();
  return tape.record("cosine_similarity", Tensor::scalar(c), {iu, iv},
                     [iu, iv, uu, vv, denom, c](Tape& t, std::size_t self) {
                       const double g = t.grad(self)[0];
                       const Tensor& U = t.value(iu);
                       const Tensor& V = t.value(iv);
                       if (Tensor* dU = t.grad_target(iu)) {
                         for (std::size_t i = 0; i < U.size(); ++i) {
                           (*dU)[i] += g * (V[i] / denom - c * U[i] / uu);
                         }
                       }
                       if (Tensor* dV = t.grad_target(iv)) {
                         for (std::size_t i = 0; i < V.size(); ++i) {
                           (*dV)[i] += g * (U[i] / denom - c * V[i] / vv);
                         }
                       }
                     });
}

enum class Mode { kTrain, kEval };

// Inverted dropout. Identity in eval mode or when p == 0.
inline Var dropout(const Var& x, double p, Mode mode, Rng& rng) {
  SGSUM_CHECK(p >= 0.0 && p < 1.0, "dropout: p must be in [0, 1), got ", p);
  if (mode == Mode::kEval || p == 0.0) return x;
  Tape& tape = detail::tape_of(x);
  Tensor mask = Tensor::matrix(x.rows(), x.cols());
  const double keep_scale = 1.0 / (1.0 - p);
  for (double& m : mask.data()) m = rng.uniform() < p ? 0.0 : keep_scale;
  return mul(x, tape.constant(std::move(mask)));
}

}  // namespace sgsum
