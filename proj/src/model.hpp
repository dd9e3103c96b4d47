#pragma once

#include <span>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "gcn.hpp"
#include "tcn.hpp"

namespace sdtgcn {

// Predictor variants sharing one interface: the full model, the
// training-free historical average, and the two single-module ablations.
enum class ModelKind { Sdtgcn, Ha, TcnOnly, GcnOnly };

std::string model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

struct ModelConfig {
    ModelKind kind = ModelKind::Sdtgcn;
    std::size_t n_topics = 0;
    std::size_t T = 8;
    int w = 4;
    std::size_t hidden = 32;
    std::size_t kernel = 3;
    double dropout = 0.2;
};

// End-to-end model: per-snapshot spatial encoding (propagation, two GCN
// layers, citation-count enhancement), time-stacked embeddings through the
// dilated causal TCN, one prediction per node per step in normalized space.
class SdtgcnModel {
public:
    SdtgcnModel(ModelConfig cfg, NormStats stats, const Rng& init_rng);

    const ModelConfig& config() const { return cfg_; }
    const NormStats& stats() const { return stats_; }

    // Steps emitted per window: T for temporal models, 1 for GCN-only / HA.
    std::size_t output_steps() const;

    std::vector<Parameter*> parameters();
    std::size_t parameter_count();  // total scalar count

    // Normalized-space predictions as an (output_steps * N) x 1 column,
    // rows laid out time-major (step * N + node).
    Var forward(Tape& tape, std::span<const GraphSnapshot> window, bool training,
                Rng& dropout_rng);

    // Final-step prediction per topic, normalized space, dropout off.
    std::vector<double> predict_normalized(std::span<const GraphSnapshot> window);

    // Final-step prediction per topic in count space, clamped at >= 0.
    std::vector<double> predict(std::span<const GraphSnapshot> window);

private:
    ModelConfig cfg_;
    NormStats stats_;
    std::vector<GcnLayer> gcn_layers_;
    TcnStack tcn_;         // TCN models only
    Parameter gcn_head_w_;  // GCN-only linear head
    Parameter gcn_head_b_;

    Var spatial_embedding(Tape& tape, const GraphSnapshot& snap, bool training,
                          Rng& dropout_rng);
    Tensor normalized_features(const GraphSnapshot& snap) const;
    bool has_gcn() const;
    bool has_tcn() const;
};

}  // namespace sdtgcn
