#pragma once

#include <string>
#include <vector>

#include "tensor.hpp"

namespace sdtgcn {

struct EvalReport {
    double mae = 0.0;
    double mse = 0.0;
    double var = 0.0;  // explained variance: 1 - Var(residual)/Var(truth)
    std::size_t n_windows = 0;
    std::string space = "normalized";  // "normalized" | "count"
    bool var_undefined = false;        // Var(truth) == 0; var reported as 0
    // retained when averaging over runs
    std::vector<double> run_mae;
    std::vector<double> run_mse;
    std::vector<double> run_var;
};

// MAE = mean |y - yhat|, MSE = mean (y - yhat)^2,
// Var = 1 - Var(y - yhat) / Var(y) with population variances pooled over
// all entries. Var(y) == 0 is reported as score 0 with the warning flag set.
EvalReport evaluate(const Tensor& preds, const Tensor& truths,
                    const std::string& space = "normalized", std::size_t n_windows = 0);

// Arithmetic mean per metric; per-run values retained in the run_* fields.
EvalReport average_runs(const std::vector<EvalReport>& reports);

}  // namespace sdtgcn
