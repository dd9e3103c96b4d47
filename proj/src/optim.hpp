#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "tensor.hpp"

namespace sdtgcn {

class Rng;

// A named learnable tensor with its gradient accumulator.
struct Parameter {
    std::string name;
    Tensor value;
    Tensor grad;

    Parameter() = default;
    Parameter(std::string n, Tensor v)
        : name(std::move(n)), value(std::move(v)), grad(value.rows, value.cols) {}

    void zero_grad() { std::fill(grad.data.begin(), grad.data.end(), 0.0); }
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Standard Adam with bias-corrected moments. Moment slots are keyed by the
// parameter list order, which must stay stable across steps.
class Adam {
public:
    explicit Adam(AdamConfig cfg) : cfg_(cfg) {}

    void step(const std::vector<Parameter*>& params);

    std::int64_t step_count() const { return step_; }
    const AdamConfig& config() const { return cfg_; }

private:
    struct Slot {
        Tensor m;
        Tensor v;
    };

    AdamConfig cfg_;
    std::vector<Slot> slots_;
    std::int64_t step_ = 0;
};

// Glorot-uniform initialization, limit sqrt(6 / (fan_in + fan_out)).
void glorot_init(Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng);

}  // namespace sdtgcn
