#pragma once

#include <functional>
#include <string>
#include <vector>

#include "optim.hpp"

namespace sdtgcn {

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::string worst_param;
    std::size_t worst_index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
};

// Compares reverse-mode gradients against central differences
// (f(x+eps) - f(x-eps)) / 2eps per coordinate of every parameter.
// Relative error is |a - b| / max(1e-8, |a| + |b|).
//
// loss_value must be a deterministic pure evaluation at the current
// parameter values; accumulate_grads must leave d(loss)/d(param) in each
// parameter's grad field (grads are zeroed here first).
GradCheckReport finite_diff_check(const std::vector<Parameter*>& params,
                                  const std::function<double()>& loss_value,
                                  const std::function<void()>& accumulate_grads,
                                  double epsilon = 1e-5);

}  // namespace sdtgcn
