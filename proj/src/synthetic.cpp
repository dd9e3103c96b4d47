#include "synthetic.hpp"

#include <cmath>

#include "errors.hpp"
#include "rng.hpp"

namespace sdtgcn {

SyntheticData generate_synthetic(const SyntheticConfig& cfg) {
    if (cfg.n_topics < 2) throw ConfigError("generate_synthetic: need at least 2 topics");
    if (cfg.w < 1) throw ConfigError("generate_synthetic: w must be >= 1");
    if (cfg.n_years < static_cast<std::size_t>(cfg.w) + 2) {
        throw ConfigError("generate_synthetic: need at least w + 2 years");
    }
    if (cfg.spatial_strength < 0.0 || cfg.noise < 0.0) {
        throw ConfigError("generate_synthetic: spatial_strength and noise must be >= 0");
    }

    const std::size_t n = cfg.n_topics;
    Rng root(cfg.seed);
    Rng graph_rng = root.child("graph");
    Rng series_rng = root.child("series");
    Rng jitter_rng = root.child("jitter");

    // hub-and-spoke base graph with fixed per-edge mean weights: followers
    // cite hubs heavily, everything else is sparse
    const std::size_t n_hubs = cfg.hubs < n ? cfg.hubs : n - 1;
    Tensor edge_mean(n, n);
    for (std::size_t u = 0; u < n; ++u) {
        std::size_t out_degree = 0;
        for (std::size_t v = 0; v < n; ++v) {
            if (u == v) continue;
            const bool to_hub = v < n_hubs && u >= n_hubs;
            const double p = to_hub ? cfg.hub_edge_prob : cfg.edge_prob;
            if (graph_rng.uniform() < p) {
                edge_mean.at(u, v) =
                    (to_hub ? 3.0 : 2.0) + static_cast<double>(graph_rng.uniform_below(3));
                ++out_degree;
            }
        }
        if (out_degree == 0) {
            std::size_t v = graph_rng.uniform_below(n - 1);
            if (v >= u) ++v;
            edge_mean.at(u, v) = 2.0 + static_cast<double>(graph_rng.uniform_below(3));
        }
    }

    std::vector<double> trend(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        trend[i] = series_rng.uniform(cfg.trend_min, cfg.trend_max);
        y[i] = static_cast<double>(
            cfg.initial_min +
            static_cast<long long>(series_rng.uniform_below(
                static_cast<std::uint64_t>(cfg.initial_max - cfg.initial_min + 1))));
    }

    SyntheticData data;
    data.trend = trend;
    data.truth = Tensor(cfg.n_years, n);
    std::vector<Tensor> adjacency(cfg.n_years);

    // per-edge phase of the citation-intensity cycle
    Tensor edge_phase(n, n);
    for (double& p : edge_phase.data) p = graph_rng.uniform(0.0, 2.0 * 3.14159265358979);

    std::size_t clock = 0;  // absolute year index, including burn-in
    const auto sample_adjacency = [&]() {
        const double angle = 2.0 * 3.14159265358979 * static_cast<double>(clock) /
                             cfg.weight_cycle_period;
        ++clock;
        Tensor a(n, n);
        for (std::size_t u = 0; u < n; ++u) {
            for (std::size_t v = 0; v < n; ++v) {
                const double m = edge_mean.at(u, v);
                if (m == 0.0) continue;
                const double cycled =
                    m * (1.0 + cfg.weight_cycle_amp * std::sin(angle + edge_phase.at(u, v)));
                const double jittered =
                    std::round(cycled + cfg.weight_jitter * m * jitter_rng.normal());
                a.at(u, v) = jittered > 0.0 ? jittered : 0.0;
            }
        }
        return a;
    };
    const auto advance = [&](const Tensor& at) {
        std::vector<double> next(n);
        for (std::size_t i = 0; i < n; ++i) {
            double deg = 0.0, weighted = 0.0;
            for (std::size_t v = 0; v < n; ++v) {
                deg += at.at(i, v);
                weighted += at.at(i, v) * y[v];
            }
            const double spatial = deg > 0.0 ? weighted / deg : 0.0;
            // xi is a standard normal scaled by the topic's current level
            // and volatility class, so `noise` acts as a fractional scale
            const double mult = i < n_hubs ? cfg.hub_noise_mult : cfg.follower_noise_mult;
            const double xi = series_rng.normal() * y[i] * mult;
            double val = std::round(cfg.alpha * y[i] + cfg.spatial_strength * spatial +
                                    trend[i] + cfg.noise * xi);
            next[i] = val > 0.0 ? val : 0.0;
        }
        y = std::move(next);
    };

    for (std::size_t t = 0; t < cfg.burn_in; ++t) advance(sample_adjacency());

    // The transition into year t+1 is driven by year t+1's adjacency: the
    // citations of a year materialize together with its papers, so they are
    // not observable from the snapshot being predicted from.
    adjacency[0] = sample_adjacency();
    for (std::size_t i = 0; i < n; ++i) data.truth.at(0, i) = y[i];
    for (std::size_t t = 0; t + 1 < cfg.n_years; ++t) {
        adjacency[t + 1] = sample_adjacency();
        advance(adjacency[t + 1]);
        for (std::size_t i = 0; i < n; ++i) data.truth.at(t + 1, i) = y[i];
    }

    // assemble snapshots with the usual windowed features
    std::vector<std::string> topics;
    topics.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::string name = "topic_";
        if (i < 10) name += "0";
        name += std::to_string(i);
        topics.push_back(std::move(name));
    }
    SnapshotSequence seq;
    seq.vocab = TopicVocabulary::from_topics(std::move(topics));
    seq.w = cfg.w;
    for (std::size_t t = static_cast<std::size_t>(cfg.w) - 1; t < cfg.n_years; ++t) {
        GraphSnapshot snap;
        snap.year = cfg.start_year + static_cast<int>(t);
        snap.adjacency = adjacency[t];
        snap.features = Tensor(n, static_cast<std::size_t>(cfg.w));
        snap.targets.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            snap.targets[i] = static_cast<long long>(data.truth.at(t, i));
            for (int j = 0; j < cfg.w; ++j) {
                snap.features.at(i, static_cast<std::size_t>(j)) =
                    data.truth.at(t - static_cast<std::size_t>(cfg.w - 1 - j), i);
            }
        }
        seq.snapshots.push_back(std::move(snap));
    }

    data.adjacency = std::move(adjacency);
    data.seq = std::move(seq);
    return data;
}

}  // namespace sdtgcn
