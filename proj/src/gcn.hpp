#pragma once

#include <optional>
#include <vector>

#include "dataset.hpp"
#include "tape.hpp"

namespace sdtgcn {

// One graph convolution layer. The same layer object is applied to every
// snapshot in a window, so its parameters are shared across time.
struct GcnLayer {
    Parameter theta;  // C x F
    Parameter bias;   // 1 x F
    Parameter norm_gain;  // 1 x F, learned scale after standardization
    Parameter norm_bias;  // 1 x F
    std::optional<Parameter> residual_proj;  // C x F, present iff C != F

    std::size_t in_dim() const { return theta.value.rows; }
    std::size_t out_dim() const { return theta.value.cols; }
};

// Block composition toggles. Tests drive the bare propagation path by
// switching everything off.
struct GcnOptions {
    bool activation = true;
    bool residual = true;
    bool normalize = true;
    double dropout = 0.0;
    bool training = false;
};

// P = I_N + D^{-1/2} A D^{-1/2} with D = diag of row sums of A. Rows and
// columns of zero-out-degree nodes get a 0 scaling factor; the identity
// component stays.
Tensor propagation_matrix(const Tensor& adjacency);

// REF[u] = sum_i A[u][i], the citation row sums of the raw adjacency.
std::vector<double> citation_counts(const Tensor& adjacency);

GcnLayer make_gcn_layer(std::size_t in_dim, std::size_t out_dim, Rng& rng,
                        const std::string& name_prefix);

// One layer: out = relu(P in theta + bias) + residual(in), then per-node
// standardization and dropout, per the configured options.
Var gcn_layer_forward(Tape& tape, Var P, Var X, GcnLayer& layer, const GcnOptions& opts,
                      Rng& dropout_rng);

// Two-layer (or more) GCN over one snapshot.
Var gcn_forward(Tape& tape, Var P, Var X, std::vector<GcnLayer>& layers,
                const GcnOptions& opts, Rng& dropout_rng);

// Z = [H | normalized REF column]. REF is log1p'd and z-scored with the
// training-era stats.
Var enhance(Tape& tape, Var H, const std::vector<double>& ref, const NormStats& stats);

}  // namespace sdtgcn
