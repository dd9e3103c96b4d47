#include "tcn.hpp"

#include "errors.hpp"

namespace sdtgcn {

std::size_t required_layers(std::size_t T, std::size_t k) {
    if (T < 1) throw ConfigError("required_layers: T must be >= 1");
    if (k < 2) throw ConfigError("required_layers: kernel size must be >= 2");
    std::size_t layers = 1;
    while (receptive_field(layers, k) < T) ++layers;
    return layers;
}

std::size_t receptive_field(std::size_t layer_count, std::size_t k) {
    return 1 + (k - 1) * ((std::size_t{1} << layer_count) - 1);
}

TcnStack make_tcn_stack(std::size_t in_dim, std::size_t hidden, std::size_t k,
                        std::size_t layer_count, Rng& rng) {
    TcnStack stack;
    std::size_t c_in = in_dim;
    for (std::size_t l = 0; l < layer_count; ++l) {
        TcnLayer layer;
        layer.dilation = std::size_t{1} << l;
        const std::string prefix = "tcn" + std::to_string(l);
        for (std::size_t i = 0; i < k; ++i) {
            Tensor ker(c_in, hidden);
            glorot_init(ker, k * c_in, hidden, rng);
            layer.kernel.emplace_back(prefix + ".k" + std::to_string(i), std::move(ker));
        }
        layer.bias = Parameter(prefix + ".bias", Tensor(1, hidden));
        Tensor gain(1, hidden);
        for (double& g : gain.data) g = 1.0;
        layer.norm_gain = Parameter(prefix + ".norm_gain", std::move(gain));
        layer.norm_bias = Parameter(prefix + ".norm_bias", Tensor(1, hidden));
        if (c_in != hidden) {
            Tensor proj(c_in, hidden);
            glorot_init(proj, c_in, hidden, rng);
            layer.residual_proj = Parameter(prefix + ".proj", std::move(proj));
        }
        stack.layers.push_back(std::move(layer));
        c_in = hidden;
    }
    Tensor head(hidden, 1);
    glorot_init(head, hidden, 1, rng);
    stack.head_w = Parameter("head.w", std::move(head));
    stack.head_b = Parameter("head.b", Tensor(1, 1));
    return stack;
}

Var causal_conv(Tape& tape, Var x, TcnLayer& layer, std::size_t block,
                const TcnOptions& opts, Rng& dropout_rng) {
    const Tensor& vx = tape.value(x);
    if (vx.cols != layer.in_dim()) {
        throw ShapeError("causal_conv: input " + vx.shape_str() + " vs kernel " +
                         layer.kernel.front().value.shape_str());
    }
    Var acc = tape.matmul(x, tape.param(layer.kernel[0]));
    for (std::size_t i = 1; i < layer.kernel_size(); ++i) {
        Var shifted = tape.shift_blocks(x, block, i * layer.dilation);
        acc = tape.add(acc, tape.matmul(shifted, tape.param(layer.kernel[i])));
    }
    Var out = tape.add_row_bias(acc, tape.param(layer.bias));
    if (opts.activation) out = tape.relu(out);
    if (opts.normalize) {
        out = tape.standardize_rows(out);
        out = tape.mul_row_scale(out, tape.param(layer.norm_gain));
        out = tape.add_row_bias(out, tape.param(layer.norm_bias));
    }
    out = tape.dropout(out, opts.dropout, dropout_rng, opts.training);
    if (opts.residual) {
        Var res = layer.residual_proj ? tape.matmul(x, tape.param(*layer.residual_proj)) : x;
        out = tape.add(out, res);
    }
    return out;
}

Var tcn_forward(Tape& tape, Var x, TcnStack& stack, std::size_t block,
                const TcnOptions& opts, Rng& dropout_rng) {
    Var h = x;
    for (TcnLayer& layer : stack.layers) {
        h = causal_conv(tape, h, layer, block, opts, dropout_rng);
    }
    Var pred = tape.matmul(h, tape.param(stack.head_w));
    return tape.add_row_bias(pred, tape.param(stack.head_b));
}

}  // namespace sdtgcn
