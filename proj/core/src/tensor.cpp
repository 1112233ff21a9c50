#include "heatnet/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace heatnet {

std::string shape_str(const std::vector<int>& shape) {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

int64_t shape_size(const std::vector<int>& shape) {
  int64_t n = 1;
  for (int d : shape) {
    if (d < 0) throw DimensionError("negative dimension in shape " + shape_str(shape));
    n *= d;
  }
  return n;
}

Tensor::Tensor(std::vector<int> shape, std::vector<double> values) {
  if (shape_size(shape) != static_cast<int64_t>(values.size())) {
    throw DimensionError("shape " + shape_str(shape) + " does not hold " +
                         std::to_string(values.size()) + " values");
  }
  shape_ = std::move(shape);
  values_ = std::make_shared<const std::vector<double>>(std::move(values));
}

Tensor Tensor::zeros(std::vector<int> shape) {
  std::vector<double> v(static_cast<size_t>(shape_size(shape)), 0.0);
  return Tensor(std::move(shape), std::move(v));
}

Tensor Tensor::full(std::vector<int> shape, double value) {
  std::vector<double> v(static_cast<size_t>(shape_size(shape)), value);
  return Tensor(std::move(shape), std::move(v));
}

Tensor Tensor::scalar(double v) { return Tensor({1}, {v}); }

double Tensor::value() const {
  if (size() != 1) {
    throw DimensionError("scalar access on tensor of shape " + shape_str(shape_));
  }
  return (*values_)[0];
}

double Tensor::at(int i) const {
  if (rank() != 1) throw DimensionError("rank-1 access on shape " + shape_str(shape_));
  return (*values_)[static_cast<size_t>(i)];
}

double Tensor::at(int i, int j) const {
  if (rank() != 2) throw DimensionError("rank-2 access on shape " + shape_str(shape_));
  return (*values_)[static_cast<size_t>(i) * shape_[1] + j];
}

Tensor Tensor::detached() const {
  Tensor t;
  t.shape_ = shape_;
  t.values_ = values_;
  return t;
}

// ---------------------------------------------------------------------------
// Tape
// ---------------------------------------------------------------------------

Tensor Tape::record(std::vector<int> shape, std::vector<double> values,
                    std::vector<int> parents, BackwardFn back) {
  Tensor t(std::move(shape), std::move(values));
  t.tape_ = this;
  t.node_ = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{t.shape_, std::move(parents), std::move(back)});
  return t;
}

Tensor Tape::watch(const Tensor& t) {
  if (!t.defined()) throw Error("watch: undefined tensor");
  Tensor leaf = t.detached();
  leaf.tape_ = this;
  leaf.node_ = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{leaf.shape_, {}, nullptr});
  leaves_.push_back(leaf.node_);
  return leaf;
}

void Tape::accumulate(int node_id, const double* grad, size_t n) {
  auto& buf = grads_[static_cast<size_t>(node_id)];
  if (buf.empty()) buf.assign(n, 0.0);
  for (size_t i = 0; i < n; ++i) buf[i] += grad[i];
}

GradMap Tape::backward(const Tensor& loss) {
  if (loss.tape() != this) throw Error("backward: loss is not on this tape");
  if (loss.size() != 1) {
    throw DimensionError("backward: loss must be scalar, got rank " +
                         std::to_string(loss.rank()) + " shape " + shape_str(loss.shape()));
  }
  grads_.assign(nodes_.size(), {});
  grads_[static_cast<size_t>(loss.node())] = {1.0};
  for (int id = loss.node(); id >= 0; --id) {
    auto& g = grads_[static_cast<size_t>(id)];
    if (g.empty()) continue;
    auto& node = nodes_[static_cast<size_t>(id)];
    if (node.back) node.back(g, *this);
  }
  GradMap out;
  for (int leaf : leaves_) {
    auto& g = grads_[static_cast<size_t>(leaf)];
    const auto& shape = nodes_[static_cast<size_t>(leaf)].shape;
    if (g.empty()) {
      out.grads_.emplace(leaf, Tensor::zeros(shape));
    } else {
      out.grads_.emplace(leaf, Tensor(shape, std::move(g)));
    }
  }
  grads_.clear();
  return out;
}

GradMap backward(const Tensor& loss) {
  if (!loss.tracked()) throw Error("backward: loss is not on an active tape");
  return loss.tape()->backward(loss);
}

const Tensor& GradMap::at(const Tensor& leaf) const {
  if (!leaf.tracked()) throw Error("GradMap: tensor is not tracked");
  return at_node(leaf.node());
}

const Tensor& GradMap::at_node(int node_id) const {
  auto it = grads_.find(node_id);
  if (it == grads_.end()) throw Error("GradMap: node " + std::to_string(node_id) + " is not a leaf");
  return it->second;
}

bool GradMap::contains(int node_id) const { return grads_.count(node_id) > 0; }

Tape* common_tape(std::initializer_list<const Tensor*> ts) {
  Tape* tape = nullptr;
  for (const Tensor* t : ts) {
    if (!t->tracked()) continue;
    if (tape && tape != t->tape()) throw Error("operands live on different tapes");
    tape = t->tape();
  }
  return tape;
}

// ---------------------------------------------------------------------------
// Primitives
// ---------------------------------------------------------------------------

namespace {

int parent_or_skip(const Tensor& t) { return t.tracked() ? t.node() : -1; }

std::vector<int> tracked_parents(std::initializer_list<const Tensor*> ts) {
  std::vector<int> parents;
  for (const Tensor* t : ts) {
    if (t->tracked()) parents.push_back(t->node());
  }
  return parents;
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2) {
    throw DimensionError("matmul: expected rank-2 operands, got " + shape_str(a.shape()) +
                         " and " + shape_str(b.shape()));
  }
  if (a.dim(1) != b.dim(0)) {
    throw DimensionError("matmul: inner dimensions disagree: " + shape_str(a.shape()) +
                         " vs " + shape_str(b.shape()));
  }
  const int m = a.dim(0), k = a.dim(1), nn = b.dim(1);
  std::vector<double> out(static_cast<size_t>(m) * nn, 0.0);
  const double* pa = a.size() ? a.data() : nullptr;
  const double* pb = b.size() ? b.data() : nullptr;
  for (int i = 0; i < m; ++i) {
    for (int kk = 0; kk < k; ++kk) {
      const double aik = pa[static_cast<size_t>(i) * k + kk];
      const double* brow = pb + static_cast<size_t>(kk) * nn;
      double* orow = out.data() + static_cast<size_t>(i) * nn;
      for (int j = 0; j < nn; ++j) orow[j] += aik * brow[j];
    }
  }
  Tape* tape = common_tape({&a, &b});
  if (!tape) return Tensor({m, nn}, std::move(out));
  const int pa_id = parent_or_skip(a), pb_id = parent_or_skip(b);
  return tape->record(
      {m, nn}, std::move(out), tracked_parents({&a, &b}),
      [a, b, m, k, nn, pa_id, pb_id](const std::vector<double>& g, Tape& t) {
        if (pa_id >= 0) {
          // dA = G * B^T
          std::vector<double> da(static_cast<size_t>(m) * k, 0.0);
          const double* pb2 = b.size() ? b.data() : nullptr;
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < nn; ++j) {
              const double gij = g[static_cast<size_t>(i) * nn + j];
              for (int kk = 0; kk < k; ++kk)
                da[static_cast<size_t>(i) * k + kk] += gij * pb2[static_cast<size_t>(kk) * nn + j];
            }
          t.accumulate(pa_id, da.data(), da.size());
        }
        if (pb_id >= 0) {
          // dB = A^T * G
          std::vector<double> db(static_cast<size_t>(k) * nn, 0.0);
          const double* pa2 = a.size() ? a.data() : nullptr;
          for (int kk = 0; kk < k; ++kk)
            for (int i = 0; i < m; ++i) {
              const double aik = pa2[static_cast<size_t>(i) * k + kk];
              const double* grow = g.data() + static_cast<size_t>(i) * nn;
              double* drow = db.data() + static_cast<size_t>(kk) * nn;
              for (int j = 0; j < nn; ++j) drow[j] += aik * grow[j];
            }
          t.accumulate(pb_id, db.data(), db.size());
        }
      });
}

Tensor concat(const std::vector<Tensor>& parts, int axis) {
  if (parts.empty()) throw DimensionError("concat: no parts");
  const int rank = parts[0].rank();
  if (axis < 0 || axis >= rank) {
    throw DimensionError("concat: axis " + std::to_string(axis) + " out of range for rank " +
                         std::to_string(rank));
  }
  std::vector<int> shape = parts[0].shape();
  for (size_t p = 1; p < parts.size(); ++p) {
    if (parts[p].rank() != rank) {
      throw DimensionError("concat: rank mismatch: " + shape_str(parts[0].shape()) + " vs " +
                           shape_str(parts[p].shape()));
    }
    for (int d = 0; d < rank; ++d) {
      if (d == axis) continue;
      if (parts[p].dim(d) != shape[static_cast<size_t>(d)]) {
        throw DimensionError("concat: side dimensions disagree: " + shape_str(parts[0].shape()) +
                             " vs " + shape_str(parts[p].shape()));
      }
    }
  }
  int total_axis = 0;
  for (const auto& p : parts) total_axis += p.dim(axis);
  shape[static_cast<size_t>(axis)] = total_axis;

  // outer = product of dims before axis, inner = product after.
  int64_t outer = 1, inner = 1;
  for (int d = 0; d < axis; ++d) outer *= shape[static_cast<size_t>(d)];
  for (int d = axis + 1; d < rank; ++d) inner *= shape[static_cast<size_t>(d)];

  std::vector<double> out(static_cast<size_t>(shape_size(shape)));
  const int64_t out_stride = static_cast<int64_t>(total_axis) * inner;
  int64_t axis_offset = 0;
  for (const auto& p : parts) {
    const int64_t p_stride = static_cast<int64_t>(p.dim(axis)) * inner;
    const double* src = p.size() ? p.data() : nullptr;
    for (int64_t o = 0; o < outer; ++o) {
      std::copy(src + o * p_stride, src + (o + 1) * p_stride,
                out.data() + o * out_stride + axis_offset * inner);
    }
    axis_offset += p.dim(axis);
  }

  Tape* tape = nullptr;
  for (const auto& p : parts) {
    Tape* t = common_tape({&p});
    if (t) {
      if (tape && tape != t) throw Error("operands live on different tapes");
      tape = t;
    }
  }
  if (!tape) return Tensor(std::move(shape), std::move(out));

  std::vector<int> parents;
  for (const auto& p : parts)
    if (p.tracked()) parents.push_back(p.node());
  std::vector<Tensor> held = parts;
  return tape->record(
      std::move(shape), std::move(out), std::move(parents),
      [held, axis, outer, inner, total_axis](const std::vector<double>& g, Tape& t) {
        const int64_t out_stride = static_cast<int64_t>(total_axis) * inner;
        int64_t axis_offset = 0;
        for (const auto& p : held) {
          const int64_t p_stride = static_cast<int64_t>(p.dim(axis)) * inner;
          if (p.tracked()) {
            std::vector<double> gp(static_cast<size_t>(outer * p_stride));
            for (int64_t o = 0; o < outer; ++o) {
              const double* src = g.data() + o * out_stride + axis_offset * inner;
              std::copy(src, src + p_stride, gp.data() + o * p_stride);
            }
            t.accumulate(p.node(), gp.data(), gp.size());
          }
          axis_offset += p.dim(axis);
        }
      });
}

Tensor softmax_masked(const Tensor& logits, const std::vector<bool>& mask) {
  if (logits.rank() != 1) {
    throw DimensionError("softmax_masked: expected rank-1 logits, got " +
                         shape_str(logits.shape()));
  }
  const size_t n = static_cast<size_t>(logits.size());
  if (mask.size() != n) {
    throw DimensionError("softmax_masked: mask length " + std::to_string(mask.size()) +
                         " vs logits " + shape_str(logits.shape()));
  }
  double max_logit = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (size_t i = 0; i < n; ++i) {
    if (mask[i]) {
      any = true;
      max_logit = std::max(max_logit, logits.data()[i]);
    }
  }
  if (!any) throw EmptyNeighborhoodError("softmax_masked: mask leaves no surviving entry");

  std::vector<double> out(n, 0.0);
  double denom = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (mask[i]) {
      out[i] = std::exp(logits.data()[i] - max_logit);
      denom += out[i];
    }
  }
  for (size_t i = 0; i < n; ++i)
    if (mask[i]) out[i] /= denom;

  Tape* tape = common_tape({&logits});
  if (!tape) return Tensor(logits.shape(), std::move(out));
  std::vector<double> y = out;  // captured for the gradient
  const int parent = logits.node();
  return tape->record(
      logits.shape(), std::move(out), {parent},
      [y, mask, parent](const std::vector<double>& g, Tape& t) {
        double dot = 0.0;
        for (size_t i = 0; i < y.size(); ++i)
          if (mask[i]) dot += g[i] * y[i];
        std::vector<double> dx(y.size(), 0.0);
        for (size_t i = 0; i < y.size(); ++i)
          if (mask[i]) dx[i] = y[i] * (g[i] - dot);
        t.accumulate(parent, dx.data(), dx.size());
      });
}

namespace {

enum class Unary { kSigmoid, kTanh, kLeakyRelu };

Tensor unary_op(const Tensor& x, Unary kind, double slope) {
  const size_t n = static_cast<size_t>(x.size());
  std::vector<double> out(n);
  for (size_t i = 0; i < n; ++i) {
    const double v = x.data()[i];
    switch (kind) {
      case Unary::kSigmoid: out[i] = 1.0 / (1.0 + std::exp(-v)); break;
      case Unary::kTanh: out[i] = std::tanh(v); break;
      case Unary::kLeakyRelu: out[i] = v > 0.0 ? v : slope * v; break;
    }
  }
  Tape* tape = common_tape({&x});
  if (!tape) return Tensor(x.shape(), std::move(out));
  const int parent = x.node();
  std::vector<double> y = out;
  return tape->record(x.shape(), std::move(out), {parent},
                      [x, y, kind, slope, parent](const std::vector<double>& g, Tape& t) {
                        std::vector<double> dx(y.size());
                        for (size_t i = 0; i < y.size(); ++i) {
                          switch (kind) {
                            case Unary::kSigmoid: dx[i] = g[i] * y[i] * (1.0 - y[i]); break;
                            case Unary::kTanh: dx[i] = g[i] * (1.0 - y[i] * y[i]); break;
                            case Unary::kLeakyRelu:
                              dx[i] = g[i] * (x.data()[i] > 0.0 ? 1.0 : slope);
                              break;
                          }
                        }
                        t.accumulate(parent, dx.data(), dx.size());
                      });
}

enum class Binary { kAdd, kSub, kMul };

// Same-shape elementwise, or scalar (size-1) broadcast on either side.
Tensor binary_op(const Tensor& a, const Tensor& b, Binary kind) {
  const bool a_scalar = a.size() == 1;
  const bool b_scalar = b.size() == 1;
  if (!a_scalar && !b_scalar && a.shape() != b.shape()) {
    throw DimensionError("elementwise op: incompatible shapes " + shape_str(a.shape()) +
                         " and " + shape_str(b.shape()));
  }
  const Tensor& big = (!a_scalar || b_scalar) ? a : b;
  const std::vector<int>& shape = (a_scalar && !b_scalar) ? b.shape() : big.shape();
  const size_t n = static_cast<size_t>(shape_size(shape));
  std::vector<double> out(n);
  for (size_t i = 0; i < n; ++i) {
    const double av = a_scalar ? a.data()[0] : a.data()[i];
    const double bv = b_scalar ? b.data()[0] : b.data()[i];
    switch (kind) {
      case Binary::kAdd: out[i] = av + bv; break;
      case Binary::kSub: out[i] = av - bv; break;
      case Binary::kMul: out[i] = av * bv; break;
    }
  }
  Tape* tape = common_tape({&a, &b});
  if (!tape) return Tensor(shape, std::move(out));
  const int pa = parent_or_skip(a), pb = parent_or_skip(b);
  return tape->record(
      shape, std::move(out), tracked_parents({&a, &b}),
      [a, b, kind, pa, pb, a_scalar, b_scalar](const std::vector<double>& g, Tape& t) {
        const size_t n = g.size();
        auto push = [&](int id, bool scalar, auto per_element) {
          if (id < 0) return;
          if (scalar && n > 1) {
            double acc = 0.0;
            for (size_t i = 0; i < n; ++i) acc += per_element(i);
            t.accumulate(id, &acc, 1);
          } else {
            std::vector<double> d(n);
            for (size_t i = 0; i < n; ++i) d[i] = per_element(i);
            t.accumulate(id, d.data(), d.size());
          }
        };
        switch (kind) {
          case Binary::kAdd:
            push(pa, a_scalar, [&](size_t i) { return g[i]; });
            push(pb, b_scalar, [&](size_t i) { return g[i]; });
            break;
          case Binary::kSub:
            push(pa, a_scalar, [&](size_t i) { return g[i]; });
            push(pb, b_scalar, [&](size_t i) { return -g[i]; });
            break;
          case Binary::kMul:
            push(pa, a_scalar, [&](size_t i) { return g[i] * (b_scalar ? b.data()[0] : b.data()[i]); });
            push(pb, b_scalar, [&](size_t i) { return g[i] * (a_scalar ? a.data()[0] : a.data()[i]); });
            break;
        }
      });
}

}  // namespace

Tensor sigmoid(const Tensor& x) { return unary_op(x, Unary::kSigmoid, 0.0); }
Tensor tanh(const Tensor& x) { return unary_op(x, Unary::kTanh, 0.0); }
Tensor leaky_relu(const Tensor& x, double slope) { return unary_op(x, Unary::kLeakyRelu, slope); }
Tensor add(const Tensor& a, const Tensor& b) { return binary_op(a, b, Binary::kAdd); }
Tensor sub(const Tensor& a, const Tensor& b) { return binary_op(a, b, Binary::kSub); }
Tensor mul(const Tensor& a, const Tensor& b) { return binary_op(a, b, Binary::kMul); }

Tensor sum(const Tensor& x) {
  double acc = 0.0;
  for (int64_t i = 0; i < x.size(); ++i) acc += x.data()[i];
  Tape* tape = common_tape({&x});
  if (!tape) return Tensor::scalar(acc);
  const int parent = x.node();
  const size_t n = static_cast<size_t>(x.size());
  return tape->record({1}, {acc}, {parent},
                      [parent, n](const std::vector<double>& g, Tape& t) {
                        std::vector<double> d(n, g[0]);
                        t.accumulate(parent, d.data(), d.size());
                      });
}

Tensor reshape(const Tensor& x, std::vector<int> shape) {
  if (shape_size(shape) != x.size()) {
    throw DimensionError("reshape: " + shape_str(x.shape()) + " to " + shape_str(shape) +
                         " changes element count");
  }
  std::vector<double> out(x.values());
  Tape* tape = common_tape({&x});
  if (!tape) return Tensor(std::move(shape), std::move(out));
  const int parent = x.node();
  return tape->record(std::move(shape), std::move(out), {parent},
                      [parent](const std::vector<double>& g, Tape& t) {
                        t.accumulate(parent, g.data(), g.size());
                      });
}

Tensor take_rows(const Tensor& x, const std::vector<int>& rows) {
  if (x.rank() != 2) throw DimensionError("take_rows: expected rank-2, got " + shape_str(x.shape()));
  const int cols = x.dim(1);
  std::vector<int64_t> idx;
  idx.reserve(rows.size() * static_cast<size_t>(cols));
  for (int r : rows) {
    if (r < 0 || r >= x.dim(0)) {
      throw DimensionError("take_rows: row " + std::to_string(r) + " out of range for " +
                           shape_str(x.shape()));
    }
    for (int c = 0; c < cols; ++c) idx.push_back(static_cast<int64_t>(r) * cols + c);
  }
  return take_flat(x, idx, {static_cast<int>(rows.size()), cols});
}

Tensor take_flat(const Tensor& x, const std::vector<int64_t>& indices,
                 std::vector<int> out_shape) {
  if (shape_size(out_shape) != static_cast<int64_t>(indices.size())) {
    throw DimensionError("take_flat: output shape " + shape_str(out_shape) + " does not hold " +
                         std::to_string(indices.size()) + " indices");
  }
  std::vector<double> out(indices.size());
  for (size_t i = 0; i < indices.size(); ++i) {
    const int64_t j = indices[i];
    if (j >= x.size()) throw DimensionError("take_flat: index out of range");
    out[i] = j < 0 ? 0.0 : x.data()[j];
  }
  Tape* tape = common_tape({&x});
  if (!tape) return Tensor(std::move(out_shape), std::move(out));
  const int parent = x.node();
  const size_t src_size = static_cast<size_t>(x.size());
  return tape->record(std::move(out_shape), std::move(out), {parent},
                      [parent, indices, src_size](const std::vector<double>& g, Tape& t) {
                        std::vector<double> d(src_size, 0.0);
                        for (size_t i = 0; i < indices.size(); ++i)
                          if (indices[i] >= 0) d[static_cast<size_t>(indices[i])] += g[i];
                        t.accumulate(parent, d.data(), d.size());
                      });
}

}  // namespace heatnet
