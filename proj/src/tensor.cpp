#include "agdn/tensor.hpp"

namespace agdn {

Tensor::Tensor(index_t rows, index_t cols, bool requires_grad)
    : Tensor(rows, cols, std::vector<double>(rows * cols, 0.0), requires_grad) {}

Tensor::Tensor(index_t rows, index_t cols, std::vector<double> values, bool requires_grad)
    : s_(std::make_shared<Storage>()) {
  if (rows < 0 || cols < 0) throw ShapeError("tensor: negative shape");
  if (static_cast<index_t>(values.size()) != rows * cols)
    throw ShapeError("tensor: " + std::to_string(values.size()) + " values for shape " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  s_->rows = rows;
  s_->cols = cols;
  s_->values = std::move(values);
  s_->requires_grad = requires_grad;
}

double Tensor::item() const {
  if (size() != 1) throw ShapeError("item(): tensor is not 1x1");
  return s_->values[0];
}

std::span<double> Tensor::ensure_grad() const {
  if (s_->grad.empty()) s_->grad.assign(s_->values.size(), 0.0);
  return s_->grad;
}

Tensor Tensor::clone() const {
  return Tensor(rows(), cols(), s_->values, s_->requires_grad);
}

void Tape::record(Tensor& out, BackwardFn fn) {
  if (consumed_) throw std::logic_error("tape: recording after backward; call reset() first");
  out.s_->tape = this;
  out.s_->tape_id = ops_.size();
  ops_.push_back(std::move(fn));
}

void Tape::backward(Tensor& loss) {
  if (consumed_) throw std::logic_error("tape: backward called twice without reset()");
  if (loss.size() != 1) throw ShapeError("backward: loss must be a 1x1 tensor");
  if (loss.tape() != this || loss.tape_id() >= ops_.size())
    throw std::logic_error("backward: loss was not produced on this tape");
  consumed_ = true;
  loss.ensure_grad()[0] = 1.0;
  for (std::size_t i = loss.tape_id() + 1; i-- > 0;) ops_[i]();
}

void Tape::reset() {
  ops_.clear();
  consumed_ = false;
}

}  // namespace agdn
