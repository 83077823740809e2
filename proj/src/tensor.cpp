#include "semnav/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

namespace semnav {

namespace {

thread_local bool g_grad_enabled = true;

std::string shape_str(const Tensor& t) {
    std::ostringstream os;
    os << t.rows() << "x" << t.cols();
    return os.str();
}

}  // namespace

bool grad_enabled() { return g_grad_enabled; }
void set_grad_enabled(bool on) { g_grad_enabled = on; }

Tensor make_op(int rows, int cols, std::vector<Tensor> parents,
               std::function<void(detail::TensorNode&)> backward_fn) {
    auto node = std::make_shared<detail::TensorNode>(rows, cols);
    bool needs = false;
    if (g_grad_enabled) {
        for (const Tensor& p : parents) {
            if (p.node()->needs_grad) {
                needs = true;
                break;
            }
        }
    }
    if (needs) {
        node->needs_grad = true;
        node->parents.reserve(parents.size());
        for (const Tensor& p : parents) node->parents.push_back(p.node());
        node->backward_fn = std::move(backward_fn);
    }
    return Tensor(std::move(node));
}

Tensor Tensor::zeros(int rows, int cols, bool requires_grad) {
    if (rows <= 0 || cols <= 0) throw ShapeError("tensor dims must be positive");
    auto node = std::make_shared<detail::TensorNode>(rows, cols);
    node->requires_grad = requires_grad;
    node->needs_grad = requires_grad;
    return Tensor(std::move(node));
}

Tensor Tensor::from_values(int rows, int cols, std::vector<double> v, bool requires_grad) {
    if (static_cast<std::size_t>(rows) * cols != v.size()) {
        throw ShapeError("from_values: element count does not match shape");
    }
    Tensor t = zeros(rows, cols, requires_grad);
    t.values() = std::move(v);
    return t;
}

Tensor Tensor::row(std::vector<double> v, bool requires_grad) {
    const int n = static_cast<int>(v.size());
    return from_values(1, n, std::move(v), requires_grad);
}

Tensor Tensor::column(std::vector<double> v, bool requires_grad) {
    const int n = static_cast<int>(v.size());
    return from_values(n, 1, std::move(v), requires_grad);
}

Tensor Tensor::scalar(double v, bool requires_grad) {
    return from_values(1, 1, {v}, requires_grad);
}

double Tensor::item() const {
    if (size() != 1) throw ContractError("item: tensor is not scalar (" + shape_str(*this) + ")");
    return node_->val[0];
}

void Tensor::backward() const {
    if (!node_) throw ContractError("backward: undefined tensor");
    if (size() != 1) {
        throw ContractError("backward: loss must be scalar, got " + shape_str(*this));
    }
    if (!node_->needs_grad) return;  // constant loss: nothing reachable requires grad

    // Postorder DFS: emits ancestors before consumers; replayed in reverse so
    // every node runs after all of its consumers have deposited gradient.
    std::vector<detail::TensorNode*> order;
    std::unordered_set<detail::TensorNode*> seen;
    struct Frame {
        detail::TensorNode* node;
        std::size_t next_parent;
    };
    std::vector<Frame> stack;
    stack.push_back({node_.get(), 0});
    seen.insert(node_.get());
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next_parent < f.node->parents.size()) {
            detail::TensorNode* p = f.node->parents[f.next_parent++].get();
            if (p->needs_grad && !seen.count(p)) {
                seen.insert(p);
                stack.push_back({p, 0});
            }
        } else {
            order.push_back(f.node);
            stack.pop_back();
        }
    }

    for (detail::TensorNode* n : order) {
        if (n->backward_fn) std::fill(n->grad.begin(), n->grad.end(), 0.0);
    }
    node_->grad[0] = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        detail::TensorNode* n = *it;
        if (n->backward_fn) n->backward_fn(*n);
    }
}

namespace {

// Row-major gemm helpers for the backward closures.
void gemm_nn(const std::vector<double>& a, int am, int an,
             const std::vector<double>& b, int bn, std::vector<double>& out) {
    for (int i = 0; i < am; ++i) {
        for (int k = 0; k < an; ++k) {
            const double av = a[static_cast<std::size_t>(i) * an + k];
            if (av == 0.0) continue;
            const std::size_t brow = static_cast<std::size_t>(k) * bn;
            const std::size_t orow = static_cast<std::size_t>(i) * bn;
            for (int j = 0; j < bn; ++j) out[orow + j] += av * b[brow + j];
        }
    }
}

// out[am x bm] += a[am x n] * b[bm x n]^T
void accum_nt(const std::vector<double>& a, int am, int n,
              const std::vector<double>& b, int bm, std::vector<double>& out) {
    for (int i = 0; i < am; ++i) {
        for (int j = 0; j < bm; ++j) {
            double s = 0.0;
            const std::size_t ar = static_cast<std::size_t>(i) * n;
            const std::size_t br = static_cast<std::size_t>(j) * n;
            for (int k = 0; k < n; ++k) s += a[ar + k] * b[br + k];
            out[static_cast<std::size_t>(i) * bm + j] += s;
        }
    }
}

// out[an x bn] += a[m x an]^T * b[m x bn]
void accum_tn(const std::vector<double>& a, int m, int an,
              const std::vector<double>& b, int bn, std::vector<double>& out) {
    for (int k = 0; k < m; ++k) {
        const std::size_t ar = static_cast<std::size_t>(k) * an;
        const std::size_t br = static_cast<std::size_t>(k) * bn;
        for (int i = 0; i < an; ++i) {
            const double av = a[ar + i];
            if (av == 0.0) continue;
            const std::size_t orow = static_cast<std::size_t>(i) * bn;
            for (int j = 0; j < bn; ++j) out[orow + j] += av * b[br + j];
        }
    }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError(std::string(op) + ": shape mismatch: " + shape_str(a) + " vs " + shape_str(b));
    }
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: inner dimensions disagree: " + shape_str(a) + " vs " + shape_str(b));
    }
    const int m = a.rows(), k = a.cols(), n = b.cols();
    Tensor out = make_op(m, n, {a, b}, [m, k, n](detail::TensorNode& self) {
        auto& pa = *self.parents[0];
        auto& pb = *self.parents[1];
        accum_nt(self.grad, m, n, pb.val, k, pa.grad);  // dA += G * B^T
        accum_tn(pa.val, m, k, self.grad, n, pb.grad);  // dB += A^T * G
    });
    gemm_nn(a.values(), m, k, b.values(), n, out.values());
    return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    Tensor out = make_op(a.rows(), a.cols(), {a, b}, [](detail::TensorNode& self) {
        auto& pa = *self.parents[0];
        auto& pb = *self.parents[1];
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
            pa.grad[i] += self.grad[i];
            pb.grad[i] += self.grad[i];
        }
    });
    for (int i = 0; i < a.size(); ++i) out.values()[i] = a.values()[i] + b.values()[i];
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    Tensor out = make_op(a.rows(), a.cols(), {a, b}, [](detail::TensorNode& self) {
        auto& pa = *self.parents[0];
        auto& pb = *self.parents[1];
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
            pa.grad[i] += self.grad[i];
            pb.grad[i] -= self.grad[i];
        }
    });
    for (int i = 0; i < a.size(); ++i) out.values()[i] = a.values()[i] - b.values()[i];
    return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    Tensor out = make_op(a.rows(), a.cols(), {a, b}, [](detail::TensorNode& self) {
        auto& pa = *self.parents[0];
        auto& pb = *self.parents[1];
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
            pa.grad[i] += self.grad[i] * pb.val[i];
            pb.grad[i] += self.grad[i] * pa.val[i];
        }
    });
    for (int i = 0; i < a.size(); ++i) out.values()[i] = a.values()[i] * b.values()[i];
    return out;
}

Tensor scale(const Tensor& x, double c) {
    Tensor out = make_op(x.rows(), x.cols(), {x}, [c](detail::TensorNode& self) {
        auto& px = *self.parents[0];
        for (std::size_t i = 0; i < self.grad.size(); ++i) px.grad[i] += c * self.grad[i];
    });
    for (int i = 0; i < x.size(); ++i) out.values()[i] = c * x.values()[i];
    return out;
}

Tensor add_row_bias(const Tensor& m, const Tensor& bias) {
    if (bias.rows() != 1 || bias.cols() != m.cols()) {
        throw ShapeError("add_row_bias: bias must be 1x" + std::to_string(m.cols()) +
                         ", got " + shape_str(bias));
    }
    const int rows = m.rows(), cols = m.cols();
    Tensor out = make_op(rows, cols, {m, bias}, [rows, cols](detail::TensorNode& self) {
        auto& pm = *self.parents[0];
        auto& pb = *self.parents[1];
        for (int i = 0; i < rows; ++i) {
            const std::size_t r = static_cast<std::size_t>(i) * cols;
            for (int j = 0; j < cols; ++j) {
                pm.grad[r + j] += self.grad[r + j];
                pb.grad[j] += self.grad[r + j];
            }
        }
    });
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            out.values()[static_cast<std::size_t>(i) * cols + j] =
                m.values()[static_cast<std::size_t>(i) * cols + j] + bias.values()[j];
        }
    }
    return out;
}

Tensor relu(const Tensor& x) {
    Tensor out = make_op(x.rows(), x.cols(), {x}, [](detail::TensorNode& self) {
        auto& px = *self.parents[0];
        // subgradient at 0 is 0
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
            if (px.val[i] > 0.0) px.grad[i] += self.grad[i];
        }
    });
    for (int i = 0; i < x.size(); ++i) out.values()[i] = std::max(0.0, x.values()[i]);
    return out;
}

Tensor concat(const Tensor& a, const Tensor& b, int axis) { return concat({a, b}, axis); }

Tensor concat(const std::vector<Tensor>& xs, int axis) {
    if (xs.empty()) throw ShapeError("concat: empty input list");
    if (axis != 0 && axis != 1) throw ShapeError("concat: axis must be 0 or 1");
    int rows = xs[0].rows(), cols = xs[0].cols();
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (axis == 0) {
            if (xs[i].cols() != cols) {
                throw ShapeError("concat: column mismatch: " + shape_str(xs[0]) + " vs " + shape_str(xs[i]));
            }
            rows += xs[i].rows();
        } else {
            if (xs[i].rows() != rows) {
                throw ShapeError("concat: row mismatch: " + shape_str(xs[0]) + " vs " + shape_str(xs[i]));
            }
            cols += xs[i].cols();
        }
    }
    std::vector<std::pair<int, int>> shapes;
    shapes.reserve(xs.size());
    for (const Tensor& t : xs) shapes.emplace_back(t.rows(), t.cols());

    Tensor out = make_op(rows, cols, xs, [axis, shapes, cols](detail::TensorNode& self) {
        int off = 0;
        for (std::size_t p = 0; p < self.parents.size(); ++p) {
            auto& par = *self.parents[p];
            const int pr = shapes[p].first, pc = shapes[p].second;
            if (axis == 0) {
                for (int i = 0; i < pr; ++i) {
                    for (int j = 0; j < pc; ++j) {
                        par.grad[static_cast<std::size_t>(i) * pc + j] +=
                            self.grad[static_cast<std::size_t>(off + i) * cols + j];
                    }
                }
                off += pr;
            } else {
                for (int i = 0; i < pr; ++i) {
                    for (int j = 0; j < pc; ++j) {
                        par.grad[static_cast<std::size_t>(i) * pc + j] +=
                            self.grad[static_cast<std::size_t>(i) * cols + off + j];
                    }
                }
                off += pc;
            }
        }
    });

    int off = 0;
    for (const Tensor& t : xs) {
        const int pr = t.rows(), pc = t.cols();
        if (axis == 0) {
            for (int i = 0; i < pr; ++i) {
                for (int j = 0; j < pc; ++j) {
                    out.values()[static_cast<std::size_t>(off + i) * cols + j] =
                        t.values()[static_cast<std::size_t>(i) * pc + j];
                }
            }
            off += pr;
        } else {
            for (int i = 0; i < pr; ++i) {
                for (int j = 0; j < pc; ++j) {
                    out.values()[static_cast<std::size_t>(i) * cols + off + j] =
                        t.values()[static_cast<std::size_t>(i) * pc + j];
                }
            }
            off += pc;
        }
    }
    return out;
}

namespace {

void check_finite(const Tensor& x, const char* op) {
    for (double v : x.values()) {
        if (!std::isfinite(v)) throw NumericError(std::string(op) + ": non-finite input");
    }
}

}  // namespace

Tensor softmax(const Tensor& x) {
    check_finite(x, "softmax");
    const int rows = x.rows(), cols = x.cols();
    Tensor out = make_op(rows, cols, {x}, [rows, cols](detail::TensorNode& self) {
        auto& px = *self.parents[0];
        for (int i = 0; i < rows; ++i) {
            const std::size_t r = static_cast<std::size_t>(i) * cols;
            double dot = 0.0;
            for (int j = 0; j < cols; ++j) dot += self.grad[r + j] * self.val[r + j];
            for (int j = 0; j < cols; ++j) {
                px.grad[r + j] += self.val[r + j] * (self.grad[r + j] - dot);
            }
        }
    });
    for (int i = 0; i < rows; ++i) {
        const std::size_t r = static_cast<std::size_t>(i) * cols;
        double m = x.values()[r];
        for (int j = 1; j < cols; ++j) m = std::max(m, x.values()[r + j]);
        double z = 0.0;
        for (int j = 0; j < cols; ++j) {
            const double e = std::exp(x.values()[r + j] - m);
            out.values()[r + j] = e;
            z += e;
        }
        for (int j = 0; j < cols; ++j) out.values()[r + j] /= z;
    }
    return out;
}

Tensor log_softmax(const Tensor& x) {
    check_finite(x, "log_softmax");
    const int rows = x.rows(), cols = x.cols();
    Tensor out = make_op(rows, cols, {x}, [rows, cols](detail::TensorNode& self) {
        auto& px = *self.parents[0];
        for (int i = 0; i < rows; ++i) {
            const std::size_t r = static_cast<std::size_t>(i) * cols;
            double gsum = 0.0;
            for (int j = 0; j < cols; ++j) gsum += self.grad[r + j];
            for (int j = 0; j < cols; ++j) {
                px.grad[r + j] += self.grad[r + j] - std::exp(self.val[r + j]) * gsum;
            }
        }
    });
    for (int i = 0; i < rows; ++i) {
        const std::size_t r = static_cast<std::size_t>(i) * cols;
        double m = x.values()[r];
        for (int j = 1; j < cols; ++j) m = std::max(m, x.values()[r + j]);
        double z = 0.0;
        for (int j = 0; j < cols; ++j) z += std::exp(x.values()[r + j] - m);
        const double logz = m + std::log(z);
        for (int j = 0; j < cols; ++j) out.values()[r + j] = x.values()[r + j] - logz;
    }
    return out;
}

Tensor sum(const Tensor& x) {
    Tensor out = make_op(1, 1, {x}, [](detail::TensorNode& self) {
        auto& px = *self.parents[0];
        for (std::size_t i = 0; i < px.grad.size(); ++i) px.grad[i] += self.grad[0];
    });
    double s = 0.0;
    for (double v : x.values()) s += v;
    out.values()[0] = s;
    return out;
}

Tensor select(const Tensor& x, int r, int c) {
    if (r < 0 || r >= x.rows() || c < 0 || c >= x.cols()) {
        throw ShapeError("select: index (" + std::to_string(r) + "," + std::to_string(c) +
                         ") out of range for " + shape_str(x));
    }
    const std::size_t idx = static_cast<std::size_t>(r) * x.cols() + c;
    Tensor out = make_op(1, 1, {x}, [idx](detail::TensorNode& self) {
        self.parents[0]->grad[idx] += self.grad[0];
    });
    out.values()[0] = x.values()[idx];
    return out;
}

Tensor transpose(const Tensor& x) {
    const int rows = x.rows(), cols = x.cols();
    Tensor out = make_op(cols, rows, {x}, [rows, cols](detail::TensorNode& self) {
        auto& px = *self.parents[0];
        for (int i = 0; i < rows; ++i) {
            for (int j = 0; j < cols; ++j) {
                px.grad[static_cast<std::size_t>(i) * cols + j] +=
                    self.grad[static_cast<std::size_t>(j) * rows + i];
            }
        }
    });
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            out.values()[static_cast<std::size_t>(j) * rows + i] =
                x.values()[static_cast<std::size_t>(i) * cols + j];
        }
    }
    return out;
}

}  // namespace semnav
