#pragma once

#include <functional>
#include <vector>

#include "guesr/tensor.hpp"

namespace guesr {

// Handle to a tape node.
struct Var {
    int id = -1;
    bool valid() const { return id >= 0; }
};

// Eager expression recorder with reverse-mode differentiation. Every op
// computes its value immediately, verifies it is finite, and registers a
// pullback closure replayed by backward() in reverse tape order.
class Tape {
public:
    Var constant(Tensor t);  // no gradient tracking
    Var leaf(Tensor t);      // gradient-tracked input / parameter

    // elementwise; b may be a 1xC row vector (added per row) or a 1x1 scalar
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    // elementwise; either operand may be a 1x1 scalar
    Var mul(Var a, Var b);
    // elementwise; b may be a 1x1 scalar
    Var div(Var a, Var b);

    Var scale(Var a, double c);
    Var add_const(Var a, double c);

    Var matmul(Var a, Var b);
    Var transpose(Var a);

    Var gather_rows(Var table, std::vector<int> rows);
    Var concat_rows(const std::vector<Var>& xs);
    Var concat_cols(const std::vector<Var>& xs);
    Var slice_rows(Var a, int r0, int r1);
    Var slice_cols(Var a, int c0, int c1);

    Var softmax_rows(Var a);
    // keep a where mask==1, substitute fill elsewhere; mask entries must be 0/1
    Var masked_fill(Var a, Tensor mask, double fill);

    Var relu(Var a);
    Var sigmoid(Var a);
    Var exp(Var a);
    Var log(Var a);
    Var tanh(Var a);
    Var sqrt(Var a);
    Var clamp(Var a, double lo, double hi);

    Var sum(Var a);
    Var mean(Var a);
    Var l2_norm(Var a);  // sqrt of the elementwise square sum, as a 1x1

    // loss must be scalar (1x1); fills grad() for every tracked node
    void backward(Var loss);

    const Tensor& val(Var v) const { return nodes_[v.id].val; }
    const Tensor& grad(Var v) const;
    double scalar(Var v) const { return nodes_[v.id].val.v[0]; }

    size_t size() const { return nodes_.size(); }

private:
    struct Node {
        Tensor val;
        Tensor grad;
        std::function<void(Tape&)> back;
        bool track = false;
    };

    int push(Tensor value, bool track, const char* op);
    bool tracked(Var v) const { return nodes_[v.id].track; }
    Tensor& grad_ref(Var v) { return nodes_[v.id].grad; }
    Var binary_add(Var a, Var b, double sign, const char* op);

    std::vector<Node> nodes_;
    bool grads_ready_ = false;
};

}  // namespace guesr
