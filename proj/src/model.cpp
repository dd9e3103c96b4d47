#include "model.hpp"

#include "baselines.hpp"
#include "errors.hpp"

namespace sdtgcn {

std::string model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::Sdtgcn: return "sdtgcn";
        case ModelKind::Ha: return "ha";
        case ModelKind::TcnOnly: return "tcn";
        case ModelKind::GcnOnly: return "gcn";
    }
    throw ConfigError("unknown model kind");
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "sdtgcn") return ModelKind::Sdtgcn;
    if (name == "ha") return ModelKind::Ha;
    if (name == "tcn") return ModelKind::TcnOnly;
    if (name == "gcn") return ModelKind::GcnOnly;
    throw ConfigError("unknown model '" + name + "', expected sdtgcn|ha|tcn|gcn");
}

bool SdtgcnModel::has_gcn() const {
    return cfg_.kind == ModelKind::Sdtgcn || cfg_.kind == ModelKind::GcnOnly;
}

bool SdtgcnModel::has_tcn() const {
    return cfg_.kind == ModelKind::Sdtgcn || cfg_.kind == ModelKind::TcnOnly;
}

SdtgcnModel::SdtgcnModel(ModelConfig cfg, NormStats stats, const Rng& init_rng)
    : cfg_(cfg), stats_(std::move(stats)) {
    if (cfg_.kind == ModelKind::Ha) return;
    Rng rng = init_rng.child("init");
    const std::size_t w = static_cast<std::size_t>(cfg_.w);
    if (has_gcn()) {
        gcn_layers_.push_back(make_gcn_layer(w, cfg_.hidden, rng, "gcn1"));
        gcn_layers_.push_back(make_gcn_layer(cfg_.hidden, cfg_.hidden, rng, "gcn2"));
    }
    if (has_tcn()) {
        // TCN-only feeds the raw windowed features, so its input is w wide
        const std::size_t in_dim = has_gcn() ? cfg_.hidden + 1 : w;
        const std::size_t layers = required_layers(cfg_.T, cfg_.kernel);
        tcn_ = make_tcn_stack(in_dim, cfg_.hidden, cfg_.kernel, layers, rng);
    } else {
        Tensor head(cfg_.hidden + 1, 1);
        glorot_init(head, cfg_.hidden + 1, 1, rng);
        gcn_head_w_ = Parameter("head.w", std::move(head));
        gcn_head_b_ = Parameter("head.b", Tensor(1, 1));
    }
}

std::size_t SdtgcnModel::output_steps() const {
    return has_tcn() ? cfg_.T : 1;
}

std::vector<Parameter*> SdtgcnModel::parameters() {
    std::vector<Parameter*> params;
    for (GcnLayer& l : gcn_layers_) {
        params.push_back(&l.theta);
        params.push_back(&l.bias);
        params.push_back(&l.norm_gain);
        params.push_back(&l.norm_bias);
        if (l.residual_proj) params.push_back(&*l.residual_proj);
    }
    if (has_tcn()) {
        for (TcnLayer& l : tcn_.layers) {
            for (Parameter& k : l.kernel) params.push_back(&k);
            params.push_back(&l.bias);
            params.push_back(&l.norm_gain);
            params.push_back(&l.norm_bias);
            if (l.residual_proj) params.push_back(&*l.residual_proj);
        }
        params.push_back(&tcn_.head_w);
        params.push_back(&tcn_.head_b);
    } else if (cfg_.kind == ModelKind::GcnOnly) {
        params.push_back(&gcn_head_w_);
        params.push_back(&gcn_head_b_);
    }
    return params;
}

std::size_t SdtgcnModel::parameter_count() {
    std::size_t total = 0;
    for (Parameter* p : parameters()) total += p->value.size();
    return total;
}

Tensor SdtgcnModel::normalized_features(const GraphSnapshot& snap) const {
    const Tensor& x = snap.features;
    Tensor out(x.rows, x.cols);
    for (std::size_t n = 0; n < x.rows; ++n)
        for (std::size_t j = 0; j < x.cols; ++j)
            out.at(n, j) = stats_.normalize_count(n, x.at(n, j));
    return out;
}

Var SdtgcnModel::spatial_embedding(Tape& tape, const GraphSnapshot& snap, bool training,
                                   Rng& dropout_rng) {
    Var x = tape.constant(normalized_features(snap));
    if (!has_gcn()) return x;
    Var p = tape.constant(propagation_matrix(snap.adjacency));
    GcnOptions opts;
    opts.dropout = cfg_.dropout;
    opts.training = training;
    Var h = gcn_forward(tape, p, x, gcn_layers_, opts, dropout_rng);
    return enhance(tape, h, citation_counts(snap.adjacency), stats_);
}

Var SdtgcnModel::forward(Tape& tape, std::span<const GraphSnapshot> window, bool training,
                         Rng& dropout_rng) {
    if (cfg_.kind == ModelKind::Ha) {
        throw ConfigError("forward: HA is training-free and has no forward pass");
    }
    if (window.size() != cfg_.T) {
        throw ShapeError("forward: window length " + std::to_string(window.size()) +
                         " != T " + std::to_string(cfg_.T));
    }
    const std::size_t n = cfg_.n_topics;
    if (window.front().targets.size() != n) {
        throw ShapeError("forward: snapshot has " +
                         std::to_string(window.front().targets.size()) + " topics, model has " +
                         std::to_string(n));
    }

    if (cfg_.kind == ModelKind::GcnOnly) {
        Var z = spatial_embedding(tape, window.back(), training, dropout_rng);
        Var pred = tape.matmul(z, tape.param(gcn_head_w_));
        return tape.add_row_bias(pred, tape.param(gcn_head_b_));
    }

    std::vector<Var> embeddings;
    embeddings.reserve(window.size());
    for (const GraphSnapshot& snap : window) {
        embeddings.push_back(spatial_embedding(tape, snap, training, dropout_rng));
    }
    Var stacked = tape.stack_rows(embeddings);
    TcnOptions opts;
    opts.dropout = cfg_.dropout;
    opts.training = training;
    return tcn_forward(tape, stacked, tcn_, n, opts, dropout_rng);
}

std::vector<double> SdtgcnModel::predict_normalized(std::span<const GraphSnapshot> window) {
    const std::size_t n = cfg_.n_topics;
    if (cfg_.kind == ModelKind::Ha) {
        std::vector<double> counts = ha_predict(window);
        for (std::size_t i = 0; i < n; ++i)
            counts[i] = stats_.normalize_count(i, counts[i]);
        return counts;
    }
    Tape tape(false);
    Rng unused(0);
    Var preds = forward(tape, window, false, unused);
    const Tensor& v = tape.value(preds);
    const std::size_t steps = output_steps();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = v.at((steps - 1) * n + i, 0);
    return out;
}

std::vector<double> SdtgcnModel::predict(std::span<const GraphSnapshot> window) {
    if (cfg_.kind == ModelKind::Ha) return ha_predict(window);
    std::vector<double> normed = predict_normalized(window);
    for (std::size_t i = 0; i < normed.size(); ++i)
        normed[i] = stats_.denormalize_count(i, normed[i]);
    return normed;
}

}  // namespace sdtgcn
