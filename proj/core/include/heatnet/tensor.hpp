#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "heatnet/error.hpp"

namespace heatnet {

class Tape;

std::string shape_str(const std::vector<int>& shape);
int64_t shape_size(const std::vector<int>& shape);

// Dense row-major f64 tensor with value semantics. The value buffer is shared
// between copies and never mutated after construction; ops produce new tensors.
// A tensor recorded on a tape additionally carries its tape-node id.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::vector<int> shape, std::vector<double> values);

  static Tensor zeros(std::vector<int> shape);
  static Tensor full(std::vector<int> shape, double v);
  static Tensor scalar(double v);

  bool defined() const { return values_ != nullptr; }
  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<size_t>(i)]; }
  int64_t size() const { return values_ ? static_cast<int64_t>(values_->size()) : 0; }

  const std::vector<double>& values() const { return *values_; }
  const double* data() const { return values_->data(); }
  double value() const;           // requires size() == 1
  double at(int i) const;         // rank-1 access
  double at(int i, int j) const;  // rank-2 access

  bool tracked() const { return tape_ != nullptr; }
  Tape* tape() const { return tape_; }
  int node() const { return node_; }
  Tensor detached() const;

 private:
  friend class Tape;
  std::vector<int> shape_;
  std::shared_ptr<const std::vector<double>> values_;
  Tape* tape_ = nullptr;
  int node_ = -1;
};

// Result of backward(): gradient tensor per tape-node id. Every watched leaf
// has an entry; leaves the loss never touched map to zeros.
class GradMap {
 public:
  const Tensor& at(const Tensor& leaf) const;
  const Tensor& at_node(int node_id) const;
  bool contains(int node_id) const;
  size_t size() const { return grads_.size(); }

 private:
  friend class Tape;
  std::unordered_map<int, Tensor> grads_;
};

// Records one forward pass. Nodes are appended in execution order, so parents
// always precede children. A tape and everything recorded on it belong to a
// single thread; independent tapes may run in parallel.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Registers a leaf whose gradient backward() must report.
  Tensor watch(const Tensor& t);

  GradMap backward(const Tensor& loss);

  size_t node_count() const { return nodes_.size(); }

  // --- recording interface used by the op implementations ---
  using BackwardFn = std::function<void(const std::vector<double>& out_grad, Tape&)>;
  Tensor record(std::vector<int> shape, std::vector<double> values,
                std::vector<int> parents, BackwardFn back);
  void accumulate(int node_id, const double* grad, size_t n);

 private:
  struct Node {
    std::vector<int> shape;
    std::vector<int> parents;
    BackwardFn back;
  };
  std::vector<Node> nodes_;
  std::vector<int> leaves_;
  std::vector<std::vector<double>> grads_;
};

// Returns the tape shared by the tracked inputs (nullptr if none are tracked);
// throws if two inputs live on different tapes.
Tape* common_tape(std::initializer_list<const Tensor*> ts);

// ---- primitives (each records its gradient rule when any input is tracked) ----
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor concat(const std::vector<Tensor>& parts, int axis);
Tensor softmax_masked(const Tensor& logits, const std::vector<bool>& mask);
Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);
Tensor leaky_relu(const Tensor& x, double slope = 0.2);
Tensor add(const Tensor& a, const Tensor& b);  // same shape, or either side scalar
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor sum(const Tensor& x);  // full reduction to a [1] scalar
Tensor reshape(const Tensor& x, std::vector<int> shape);
// Gathers rows of a rank-2 tensor; duplicate rows accumulate on backward.
Tensor take_rows(const Tensor& x, const std::vector<int>& rows);
// Gathers arbitrary flat elements; index -1 yields 0.0 and receives no gradient.
Tensor take_flat(const Tensor& x, const std::vector<int64_t>& indices,
                 std::vector<int> out_shape);

GradMap backward(const Tensor& loss);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator+(const Tensor& a, double b) { return add(a, Tensor::scalar(b)); }
inline Tensor operator-(const Tensor& a, double b) { return sub(a, Tensor::scalar(b)); }
inline Tensor operator*(const Tensor& a, double b) { return mul(a, Tensor::scalar(b)); }
inline Tensor operator+(double a, const Tensor& b) { return add(Tensor::scalar(a), b); }
inline Tensor operator-(double a, const Tensor& b) { return sub(Tensor::scalar(a), b); }
inline Tensor operator*(double a, const Tensor& b) { return mul(Tensor::scalar(a), b); }

}  // namespace heatnet
