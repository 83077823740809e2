#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "semnav/errors.hpp"

namespace semnav {

namespace detail {

struct TensorNode {
    int rows = 0;
    int cols = 0;
    std::vector<double> val;
    std::vector<double> grad;       // always same size as val
    bool requires_grad = false;     // leaf owned by an optimizer
    bool needs_grad = false;        // this node or some ancestor requires grad
    std::vector<std::shared_ptr<TensorNode>> parents;
    std::function<void(TensorNode&)> backward_fn;  // distributes grad into parents

    TensorNode(int r, int c) : rows(r), cols(c), val(static_cast<std::size_t>(r) * c, 0.0),
                               grad(static_cast<std::size_t>(r) * c, 0.0) {}
};

}  // namespace detail

// Thread-local switch: with grads disabled, ops produce plain value nodes and
// never record the graph. Used for rollout collection and evaluation.
bool grad_enabled();
void set_grad_enabled(bool);

struct NoGradGuard {
    NoGradGuard() : prev_(grad_enabled()) { set_grad_enabled(false); }
    ~NoGradGuard() { set_grad_enabled(prev_); }
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool prev_;
};

// Dense 2-d matrix of doubles participating in a reverse-mode tape. Copying a
// Tensor copies the handle; the payload is shared.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(int rows, int cols, bool requires_grad = false);
    static Tensor from_values(int rows, int cols, std::vector<double> v, bool requires_grad = false);
    static Tensor row(std::vector<double> v, bool requires_grad = false);
    static Tensor column(std::vector<double> v, bool requires_grad = false);
    static Tensor scalar(double v, bool requires_grad = false);

    bool defined() const { return static_cast<bool>(node_); }
    int rows() const { return node_->rows; }
    int cols() const { return node_->cols; }
    int size() const { return node_->rows * node_->cols; }

    std::vector<double>& values() { return node_->val; }
    const std::vector<double>& values() const { return node_->val; }
    std::vector<double>& grad() { return node_->grad; }
    const std::vector<double>& grad() const { return node_->grad; }

    double at(int r, int c) const { return node_->val[static_cast<std::size_t>(r) * node_->cols + c]; }
    double& at(int r, int c) { return node_->val[static_cast<std::size_t>(r) * node_->cols + c]; }
    double item() const;  // value of a 1x1 tensor

    bool requires_grad() const { return node_->requires_grad; }
    void zero_grad() { std::fill(node_->grad.begin(), node_->grad.end(), 0.0); }

    // Reverse pass from a scalar. Leaf grads accumulate across calls; interior
    // grads are scratch and reset on every call.
    void backward() const;

    std::shared_ptr<detail::TensorNode> node() const { return node_; }

private:
    explicit Tensor(std::shared_ptr<detail::TensorNode> n) : node_(std::move(n)) {}
    std::shared_ptr<detail::TensorNode> node_;

    friend Tensor make_op(int rows, int cols, std::vector<Tensor> parents,
                          std::function<void(detail::TensorNode&)> backward_fn);
};

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);        // elementwise
Tensor scale(const Tensor& x, double c);
Tensor add_row_bias(const Tensor& m, const Tensor& bias);  // bias is 1 x cols
Tensor relu(const Tensor& x);
Tensor concat(const std::vector<Tensor>& xs, int axis);
Tensor concat(const Tensor& a, const Tensor& b, int axis);
Tensor softmax(const Tensor& x);       // row-wise, max-subtracted
Tensor log_softmax(const Tensor& x);   // row-wise, max-subtracted
Tensor sum(const Tensor& x);           // all elements -> 1x1
Tensor select(const Tensor& x, int r, int c);  // single entry -> 1x1
Tensor transpose(const Tensor& x);

}  // namespace semnav
