#pragma once

#include <optional>
#include <vector>

#include "tape.hpp"

namespace sdtgcn {

// One dilated causal convolution layer. The kernel is k matrices of
// C_in x C_out, tap i reading input step t - d*i.
struct TcnLayer {
    std::vector<Parameter> kernel;  // k entries, each C_in x C_out
    Parameter bias;                 // 1 x C_out
    Parameter norm_gain;            // 1 x C_out, learned scale after standardization
    Parameter norm_bias;            // 1 x C_out
    std::size_t dilation = 1;
    std::optional<Parameter> residual_proj;  // C_in x C_out, present iff dims differ

    std::size_t in_dim() const { return kernel.front().value.rows; }
    std::size_t out_dim() const { return kernel.front().value.cols; }
    std::size_t kernel_size() const { return kernel.size(); }
};

// Stacked layers with exponentially increasing dilation (2^layer) and a
// shared linear head emitting one prediction per node per time step.
struct TcnStack {
    std::vector<TcnLayer> layers;
    Parameter head_w;  // C x 1
    Parameter head_b;  // 1 x 1
};

struct TcnOptions {
    bool activation = true;
    bool residual = true;
    bool normalize = true;
    double dropout = 0.0;
    bool training = false;
};

// Smallest L >= 1 with 1 + (k-1)(2^L - 1) >= T.
std::size_t required_layers(std::size_t T, std::size_t k);

// Receptive field of an L-layer stack: 1 + (k-1)(2^L - 1).
std::size_t receptive_field(std::size_t layer_count, std::size_t k);

TcnStack make_tcn_stack(std::size_t in_dim, std::size_t hidden, std::size_t k,
                        std::size_t layer_count, Rng& rng);

// Input rows are laid out time-major as t*block + n (block = node count).
// out(t) = sum_i input(t - d*i) f_i + bias with zero left padding, then
// relu, per-row standardization, dropout and residual add per the options.
Var causal_conv(Tape& tape, Var x, TcnLayer& layer, std::size_t block,
                const TcnOptions& opts, Rng& dropout_rng);

// Full stack plus head: (T*block) x C_in -> (T*block) x 1. Nodes never mix;
// every node's sequence is processed by the same shared parameters.
Var tcn_forward(Tape& tape, Var x, TcnStack& stack, std::size_t block,
                const TcnOptions& opts, Rng& dropout_rng);

}  // namespace sdtgcn
