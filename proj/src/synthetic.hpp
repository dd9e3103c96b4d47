#pragma once

#include <cstdint>

#include "dataset.hpp"

namespace sdtgcn {

// Planted-dynamics benchmark generator. Topic counts follow
//   y_n(t+1) = round(alpha * y_n(t)
//              + spatial_strength * sum_v A[n][v] * y_v(t) / deg(n)
//              + trend_n + noise * xi)
// clamped at 0, with xi a standard normal scaled by the topic's current
// level and its volatility multiplier. The first `hubs` topics are volatile
// drivers that the remaining topics cite heavily, so a topic's next count
// hinges on its hubs' current counts. The transition into year t+1 reads
// year t+1's adjacency: a year's citations are not observable before its
// papers exist. Edge weights are resampled every year around fixed per-edge
// means, so the graph itself is dynamic. With spatial_strength = 0 every
// topic is an independent AR(1)-plus-trend series with a closed-form
// forecast.
struct SyntheticConfig {
    std::size_t n_topics = 20;
    std::size_t n_years = 40;
    double spatial_strength = 0.8;
    double noise = 0.0;
    std::uint64_t seed = 0;
    int w = 4;
    int start_year = 1980;

    // series shape
    double alpha = 0.15;       // own-history coefficient
    double trend_min = 15.0;
    double trend_max = 45.0;
    std::size_t hubs = 4;          // volatile driver topics
    double hub_noise_mult = 1.0;   // hub relative noise scale
    double follower_noise_mult = 0.2;
    double hub_edge_prob = 0.5;    // follower -> hub citation probability
    double edge_prob = 0.08;       // density between non-hub topics
    // edge weights oscillate around their fixed means with per-edge phase
    // (citation intensity waxes and wanes); one snapshot cannot tell a
    // rising edge from a falling one
    double weight_cycle_amp = 0.9;
    double weight_cycle_period = 10.0;
    // residual yearly resampling noise on top of the cycle
    double weight_jitter = 0.1;
    long long initial_min = 8;
    long long initial_max = 40;
    // years simulated before recording starts
    std::size_t burn_in = 20;
};

struct SyntheticData {
    SnapshotSequence seq;
    Tensor truth;                 // n_years x n_topics count series
    std::vector<double> trend;    // per-topic planted trend
    std::vector<Tensor> adjacency;  // per-year graphs, including pre-window years
};

SyntheticData generate_synthetic(const SyntheticConfig& cfg);

}  // namespace sdtgcn
