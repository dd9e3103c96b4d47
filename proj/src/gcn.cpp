#include "gcn.hpp"

#include <cmath>

#include "errors.hpp"

namespace sdtgcn {

Tensor propagation_matrix(const Tensor& adjacency) {
    if (adjacency.rows != adjacency.cols) {
        throw ShapeError("propagation_matrix: adjacency must be square, got " +
                         adjacency.shape_str());
    }
    const std::size_t n = adjacency.rows;
    std::vector<double> inv_sqrt_deg(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double deg = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double a = adjacency.at(i, j);
            if (a < 0.0) {
                throw DataError("propagation_matrix: negative adjacency entry at (" +
                                std::to_string(i) + "," + std::to_string(j) + ")");
            }
            deg += a;
        }
        inv_sqrt_deg[i] = deg > 0.0 ? 1.0 / std::sqrt(deg) : 0.0;
    }
    Tensor p(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            p.at(i, j) = adjacency.at(i, j) * inv_sqrt_deg[i] * inv_sqrt_deg[j];
        }
        p.at(i, i) += 1.0;
    }
    return p;
}

std::vector<double> citation_counts(const Tensor& adjacency) {
    if (adjacency.rows != adjacency.cols) {
        throw ShapeError("citation_counts: adjacency must be square, got " +
                         adjacency.shape_str());
    }
    std::vector<double> ref(adjacency.rows, 0.0);
    for (std::size_t i = 0; i < adjacency.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < adjacency.cols; ++j) {
            if (adjacency.at(i, j) < 0.0) {
                throw DataError("citation_counts: negative adjacency entry in row " +
                                std::to_string(i));
            }
            s += adjacency.at(i, j);
        }
        ref[i] = s;
    }
    return ref;
}

GcnLayer make_gcn_layer(std::size_t in_dim, std::size_t out_dim, Rng& rng,
                        const std::string& name_prefix) {
    GcnLayer layer;
    Tensor theta(in_dim, out_dim);
    glorot_init(theta, in_dim, out_dim, rng);
    layer.theta = Parameter(name_prefix + ".theta", std::move(theta));
    layer.bias = Parameter(name_prefix + ".bias", Tensor(1, out_dim));
    Tensor gain(1, out_dim);
    for (double& g : gain.data) g = 1.0;
    layer.norm_gain = Parameter(name_prefix + ".norm_gain", std::move(gain));
    layer.norm_bias = Parameter(name_prefix + ".norm_bias", Tensor(1, out_dim));
    if (in_dim != out_dim) {
        Tensor proj(in_dim, out_dim);
        glorot_init(proj, in_dim, out_dim, rng);
        layer.residual_proj = Parameter(name_prefix + ".proj", std::move(proj));
    }
    return layer;
}

Var gcn_layer_forward(Tape& tape, Var P, Var X, GcnLayer& layer, const GcnOptions& opts,
                      Rng& dropout_rng) {
    if (tape.value(X).cols != layer.in_dim()) {
        throw ShapeError("gcn_layer_forward: input " + tape.value(X).shape_str() +
                         " vs theta " + layer.theta.value.shape_str());
    }
    Var propagated = tape.matmul(tape.matmul(P, X), tape.param(layer.theta));
    Var pre = tape.add_row_bias(propagated, tape.param(layer.bias));
    Var out = opts.activation ? tape.relu(pre) : pre;
    if (opts.residual) {
        Var res = layer.residual_proj
                      ? tape.matmul(X, tape.param(*layer.residual_proj))
                      : X;
        out = tape.add(out, res);
    }
    if (opts.normalize) {
        out = tape.standardize_rows(out);
        out = tape.mul_row_scale(out, tape.param(layer.norm_gain));
        out = tape.add_row_bias(out, tape.param(layer.norm_bias));
    }
    out = tape.dropout(out, opts.dropout, dropout_rng, opts.training);
    return out;
}

Var gcn_forward(Tape& tape, Var P, Var X, std::vector<GcnLayer>& layers,
                const GcnOptions& opts, Rng& dropout_rng) {
    Var h = X;
    for (GcnLayer& layer : layers) {
        h = gcn_layer_forward(tape, P, h, layer, opts, dropout_rng);
    }
    return h;
}

Var enhance(Tape& tape, Var H, const std::vector<double>& ref, const NormStats& stats) {
    const std::size_t n = tape.value(H).rows;
    if (ref.size() != n) {
        throw ShapeError("enhance: H has " + std::to_string(n) + " rows, REF has " +
                         std::to_string(ref.size()));
    }
    Tensor col(n, 1);
    for (std::size_t i = 0; i < n; ++i) col.at(i, 0) = stats.normalize_ref(i, ref[i]);
    return tape.concat_cols(H, tape.constant(std::move(col)));
}

}  // namespace sdtgcn
