#include "gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace sdtgcn {

GradCheckReport finite_diff_check(const std::vector<Parameter*>& params,
                                  const std::function<double()>& loss_value,
                                  const std::function<void()>& accumulate_grads,
                                  double epsilon) {
    for (Parameter* p : params) p->zero_grad();
    accumulate_grads();

    GradCheckReport report;
    for (Parameter* p : params) {
        for (std::size_t i = 0; i < p->value.data.size(); ++i) {
            double& theta = p->value.data[i];
            const double saved = theta;
            theta = saved + epsilon;
            const double up = loss_value();
            theta = saved - epsilon;
            const double down = loss_value();
            theta = saved;
            const double numeric = (up - down) / (2.0 * epsilon);
            const double analytic = p->grad.data[i];
            const double rel = std::abs(analytic - numeric) /
                               std::max(1e-8, std::abs(analytic) + std::abs(numeric));
            if (rel > report.max_rel_error) {
                report.max_rel_error = rel;
                report.worst_param = p->name;
                report.worst_index = i;
                report.analytic = analytic;
                report.numeric = numeric;
            }
        }
    }
    return report;
}

}  // namespace sdtgcn
