#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "agdn/graph.hpp"

namespace agdn {

class Tape;

/// Thrown when operand shapes are incompatible.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense row-major matrix with an optional gradient buffer.
///
/// A Tensor is a shared handle: copies alias the same storage, which is how the
/// tape's backward closures reach the tensors they write gradients into. Use
/// clone() for an independent copy.
class Tensor {
 public:
  Tensor() = default;
  Tensor(index_t rows, index_t cols, bool requires_grad = false);
  Tensor(index_t rows, index_t cols, std::vector<double> values, bool requires_grad = false);

  bool defined() const { return static_cast<bool>(s_); }
  index_t rows() const { return s_->rows; }
  index_t cols() const { return s_->cols; }
  index_t size() const { return s_->rows * s_->cols; }

  std::span<double> values() { return s_->values; }
  std::span<const double> values() const { return s_->values; }
  double& at(index_t r, index_t c) { return s_->values[r * s_->cols + c]; }
  double at(index_t r, index_t c) const { return s_->values[r * s_->cols + c]; }
  /// Value of a 1x1 tensor.
  double item() const;

  bool requires_grad() const { return s_->requires_grad; }
  void set_requires_grad(bool on) { s_->requires_grad = on; }

  bool has_grad() const { return !s_->grad.empty(); }
  std::span<double> grad() { return s_->grad; }
  std::span<const double> grad() const { return s_->grad; }
  /// Allocates a zero gradient if none exists yet.
  std::span<double> ensure_grad() const;
  void zero_grad() { s_->grad.clear(); }

  /// Deep copy of values and flags; the gradient is not copied.
  Tensor clone() const;

  /// Same storage?
  bool same(const Tensor& other) const { return s_ == other.s_; }

  /// Producing tape (nullptr for leaves) and op index within it.
  const Tape* tape() const { return s_->tape; }
  std::size_t tape_id() const { return s_->tape_id; }

 private:
  friend class Tape;
  struct Storage {
    index_t rows = 0;
    index_t cols = 0;
    std::vector<double> values;
    std::vector<double> grad;
    bool requires_grad = false;
    const Tape* tape = nullptr;
    std::size_t tape_id = static_cast<std::size_t>(-1);
  };
  std::shared_ptr<Storage> s_;
};

/// Ordered record of differentiable operations for one forward pass.
///
/// Ops append a closure that reads the output gradient and accumulates into
/// the inputs. backward() replays them in reverse. A tape serves one forward
/// pass: call reset() before recording the next one.
class Tape {
 public:
  using BackwardFn = std::function<void()>;

  /// Registers `out` as produced by the op at the next index.
  void record(Tensor& out, BackwardFn fn);

  /// Seeds d(loss)/d(loss) = 1 and runs every recorded closure in reverse.
  void backward(Tensor& loss);

  void reset();
  std::size_t size() const { return ops_.size(); }
  bool consumed() const { return consumed_; }

 private:
  std::vector<BackwardFn> ops_;
  bool consumed_ = false;
};

enum class Mode { train, eval };

}  // namespace agdn
