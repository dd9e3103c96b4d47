#include "baselines.hpp"

#include "errors.hpp"

namespace sdtgcn {

std::vector<double> ha_predict(std::span<const GraphSnapshot> window) {
    if (window.empty()) throw ShapeError("ha_predict: empty window");
    const std::size_t n = window.front().targets.size();
    std::vector<double> mean(n, 0.0);
    for (const GraphSnapshot& snap : window) {
        for (std::size_t i = 0; i < n; ++i) mean[i] += static_cast<double>(snap.targets[i]);
    }
    for (double& v : mean) v /= static_cast<double>(window.size());
    return mean;
}

}  // namespace sdtgcn
