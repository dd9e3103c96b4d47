#pragma once

#include <cstddef>
#include <functional>
#include <unordered_map>
#include <vector>

#include "optim.hpp"
#include "rng.hpp"
#include "tensor.hpp"

namespace sdtgcn {

// Handle to a node on a Tape.
struct Var {
    std::size_t idx = 0;
};

// Reverse-mode autodiff over a dynamically recorded op tape. Every op
// validates shapes and rejects non-finite outputs. One backward pass per
// tape; repeated param() calls for the same Parameter return the same node,
// so parameters shared across snapshots accumulate one gradient.
class Tape {
public:
    explicit Tape(bool record = true) : record_(record) {}

    Var constant(Tensor value);
    Var param(Parameter& p);

    Var matmul(Var a, Var b);
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);  // elementwise
    Var scale(Var a, double c);
    Var add_row_bias(Var m, Var bias);  // bias is 1 x c, broadcast over rows
    Var mul_row_scale(Var m, Var scale);  // scale is 1 x c, broadcast over rows
    Var relu(Var a);
    Var concat_cols(Var a, Var b);
    Var stack_rows(const std::vector<Var>& parts);
    Var slice_rows(Var a, std::size_t row0, std::size_t row1);
    Var row_sums(Var a);  // r x c -> r x 1
    Var sum_all(Var a);   // -> 1 x 1
    Var sqrt_elem(Var a);  // elementwise sqrt; inputs must be >= 0

    // Shifts row blocks forward in time: with rows laid out as t*block + n,
    // output block t reads input block t - steps, zero for t < steps.
    Var shift_blocks(Var a, std::size_t block, std::size_t steps);

    // Per-row standardization: zero mean, unit variance across each row's
    // entries, with variance epsilon. No learned scale or shift.
    Var standardize_rows(Var a, double eps = 1e-5);

    // Inverted dropout: zero with probability p, survivors scaled 1/(1-p).
    // Identity when training is false or p == 0.
    Var dropout(Var a, double p, Rng& rng, bool training);

    void backward(Var loss);

    const Tensor& value(Var v) const { return nodes_[v.idx].value; }
    const Tensor& grad(Var v) const { return nodes_[v.idx].grad; }
    bool recording() const { return record_; }

private:
    struct Node {
        Tensor value;
        Tensor grad;
        bool requires_grad = false;
        Parameter* bound = nullptr;
        std::function<void(Tape&)> back;
    };

    Var push(Tensor value, bool requires_grad, const char* op);
    bool needs_grad(Var v) const { return record_ && nodes_[v.idx].requires_grad; }
    Tensor& grad_mut(Var v) { return nodes_[v.idx].grad; }

    std::vector<Node> nodes_;
    std::unordered_map<const Parameter*, std::size_t> param_nodes_;
    bool record_ = true;
    bool backward_done_ = false;
};

}  // namespace sdtgcn
