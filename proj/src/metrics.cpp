#include "metrics.hpp"

#include <cmath>

#include "errors.hpp"

namespace sdtgcn {

EvalReport evaluate(const Tensor& preds, const Tensor& truths, const std::string& space,
                    std::size_t n_windows) {
    if (!preds.same_shape(truths)) {
        throw ShapeError("evaluate: " + preds.shape_str() + " vs " + truths.shape_str());
    }
    if (preds.size() == 0) throw ShapeError("evaluate: empty input");

    const std::size_t n = preds.size();
    const double dn = static_cast<double>(n);

    EvalReport r;
    r.space = space;
    r.n_windows = n_windows;

    double abs_sum = 0.0, sq_sum = 0.0, res_sum = 0.0, truth_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = truths.data[i] - preds.data[i];
        abs_sum += std::abs(d);
        sq_sum += d * d;
        res_sum += d;
        truth_sum += truths.data[i];
    }
    r.mae = abs_sum / dn;
    r.mse = sq_sum / dn;

    const double res_mean = res_sum / dn;
    const double truth_mean = truth_sum / dn;
    double res_var = 0.0, truth_var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = truths.data[i] - preds.data[i];
        res_var += (d - res_mean) * (d - res_mean);
        truth_var += (truths.data[i] - truth_mean) * (truths.data[i] - truth_mean);
    }
    res_var /= dn;
    truth_var /= dn;
    if (truth_var == 0.0) {
        r.var = 0.0;
        r.var_undefined = true;
    } else {
        r.var = 1.0 - res_var / truth_var;
    }
    return r;
}

EvalReport average_runs(const std::vector<EvalReport>& reports) {
    if (reports.empty()) throw ConfigError("average_runs: no reports");
    EvalReport avg;
    avg.space = reports.front().space;
    avg.n_windows = reports.front().n_windows;
    // shifted accumulation keeps the mean of identical values exact
    double mae_shift = 0.0, mse_shift = 0.0, var_shift = 0.0;
    for (const EvalReport& r : reports) {
        if (r.space != avg.space) {
            throw ConfigError("average_runs: mixed space tags '" + avg.space + "' and '" +
                              r.space + "'");
        }
        mae_shift += r.mae - reports.front().mae;
        mse_shift += r.mse - reports.front().mse;
        var_shift += r.var - reports.front().var;
        avg.var_undefined = avg.var_undefined || r.var_undefined;
        avg.run_mae.push_back(r.mae);
        avg.run_mse.push_back(r.mse);
        avg.run_var.push_back(r.var);
    }
    const double k = static_cast<double>(reports.size());
    avg.mae = reports.front().mae + mae_shift / k;
    avg.mse = reports.front().mse + mse_shift / k;
    avg.var = reports.front().var + var_shift / k;
    return avg;
}

}  // namespace sdtgcn
