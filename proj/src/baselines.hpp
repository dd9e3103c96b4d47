#pragma once

#include <span>
#include <vector>

#include "dataset.hpp"

namespace sdtgcn {

// Historical average: per-topic arithmetic mean of the window's target
// vectors, in raw count space. Training-free and deterministic.
//
// The two ablation baselines (TCN-only and GCN-only) are ModelKind variants
// of SdtgcnModel sharing its training protocol; see model.hpp.
std::vector<double> ha_predict(std::span<const GraphSnapshot> window);

}  // namespace sdtgcn
