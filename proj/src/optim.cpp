#include "optim.hpp"

#include <cmath>

#include "errors.hpp"
#include "rng.hpp"

namespace sdtgcn {

void Adam::step(const std::vector<Parameter*>& params) {
    if (slots_.empty()) {
        slots_.reserve(params.size());
        for (const Parameter* p : params) {
            slots_.push_back({Tensor(p->value.rows, p->value.cols),
                              Tensor(p->value.rows, p->value.cols)});
        }
    }
    if (slots_.size() != params.size()) {
        throw ConfigError("adam: parameter list size changed between steps");
    }

    ++step_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));

    for (std::size_t i = 0; i < params.size(); ++i) {
        Parameter& p = *params[i];
        if (!all_finite(p.grad)) {
            throw NumericError("adam: non-finite gradient in parameter '" + p.name + "'");
        }
        Slot& s = slots_[i];
        for (std::size_t j = 0; j < p.value.data.size(); ++j) {
            const double g = p.grad.data[j];
            s.m.data[j] = cfg_.beta1 * s.m.data[j] + (1.0 - cfg_.beta1) * g;
            s.v.data[j] = cfg_.beta2 * s.v.data[j] + (1.0 - cfg_.beta2) * g * g;
            const double mhat = s.m.data[j] / bc1;
            const double vhat = s.v.data[j] / bc2;
            p.value.data[j] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
    }
}

void glorot_init(Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& v : t.data) v = rng.uniform(-limit, limit);
}

}  // namespace sdtgcn
