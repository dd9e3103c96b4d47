#include "tape.hpp"

#include <cmath>

#include "errors.hpp"

namespace sdtgcn {

Var Tape::push(Tensor value, bool requires_grad, const char* op) {
    if (!all_finite(value)) {
        throw NumericError(std::string(op) + ": non-finite value in " + value.shape_str() +
                           " output");
    }
    Node n;
    n.requires_grad = record_ && requires_grad;
    if (n.requires_grad) n.grad = Tensor(value.rows, value.cols);
    n.value = std::move(value);
    nodes_.push_back(std::move(n));
    return Var{nodes_.size() - 1};
}

Var Tape::constant(Tensor value) {
    return push(std::move(value), false, "constant");
}

Var Tape::param(Parameter& p) {
    auto it = param_nodes_.find(&p);
    if (it != param_nodes_.end()) return Var{it->second};
    Var v = push(p.value, true, "param");
    nodes_[v.idx].bound = &p;
    param_nodes_[&p] = v.idx;
    return v;
}

Var Tape::matmul(Var a, Var b) {
    const Tensor& va = value(a);
    const Tensor& vb = value(b);
    if (va.cols != vb.rows) {
        throw ShapeError("matmul: " + va.shape_str() + " * " + vb.shape_str());
    }
    Var out = push(matmul_value(va, vb), needs_grad(a) || needs_grad(b), "matmul");
    if (nodes_[out.idx].requires_grad) {
        nodes_[out.idx].back = [a, b, out](Tape& t) {
            const Tensor& g = t.grad(out);
            if (t.needs_grad(a)) {
                Tensor ga = matmul_value(g, transpose_value(t.value(b)));
                Tensor& acc = t.grad_mut(a);
                for (std::size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += ga.data[i];
            }
            if (t.needs_grad(b)) {
                Tensor gb = matmul_value(transpose_value(t.value(a)), g);
                Tensor& acc = t.grad_mut(b);
                for (std::size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += gb.data[i];
            }
        };
    }
    return out;
}

Var Tape::add(Var a, Var b) {
    const Tensor& va = value(a);
    const Tensor& vb = value(b);
    if (!va.same_shape(vb)) {
        throw ShapeError("add: " + va.shape_str() + " vs " + vb.shape_str());
    }
    Tensor v = va;
    for (std::size_t i = 0; i < v.data.size(); ++i) v.data[i] += vb.data[i];
    Var out = push(std::move(v), needs_grad(a) || needs_grad(b), "add");
    if (nodes_[out.idx].requires_grad) {
        nodes_[out.idx].back = [a, b, out](Tape& t) {
            const Tensor& g = t.grad(out);
            if (t.needs_grad(a)) {
                Tensor& acc = t.grad_mut(a);
                for (std::size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += g.data[i];
            }
            if (t.needs_grad(b)) {
                Tensor& acc = t.grad_mut(b);
                for (std::size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += g.data[i];
            }
        };
    }
    return out;
}

Var Tape::sub(Var a, Var b) {
    const Tensor& va = value(a);
    const Tensor& vb = value(b);
    if (!va.same_shape(vb)) {
        throw ShapeError("sub: " + va.shape_str() + " vs " + vb.shape_str());
    }
    Tensor v = va;
    for (std::size_t i = 0; i < v.data.size(); ++i) v.data[i] -= vb.data[i];
    Var out = push(std::move(v), needs_grad(a) || needs_grad(b), "sub");
    if (nodes_[out.idx].requires_grad) {
        nodes_[out.idx].back = [a, b, out](Tape& t) {
            const Tensor& g = t.grad(out);
            if (t.needs_grad(a)) {
                Tensor& acc = t.grad_mut(a);
                for (std::size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += g.data[i];
            }
            if (t.needs_grad(b)) {
                Tensor& acc = t.grad_mut(b);
                for (std::size_t i = 0; i < acc.data.size(); ++i) acc.data[i] -= g.data[i];
            }
        };
    }
    return out;
}

Var Tape::mul(Var a, Var b) {
    const Tensor& va = value(a);
    const Tensor& vb = value(b);
    if (!va.same_shape(vb)) {
        throw ShapeError("mul: " + va.shape_str() + " vs " + vb.shape_str());
    }
    Tensor v = va;
    for (std::size_t i = 0; i < v.data.size(); ++i) v.data[i] *= vb.data[i];
    Var out = push(std::move(v), needs_grad(a) || needs_grad(b), "mul");
    if (nodes_[out.idx].requires_grad) {
        nodes_[out.idx].back = [a, b, out](Tape& t) {
            const Tensor& g = t.grad(out);
            if (t.needs_grad(a)) {
                Tensor& acc = t.grad_mut(a);
                const Tensor& vb2 = t.value(b);
                for (std::size_t i = 0; i < acc.data.size(); ++i)
                    acc.data[i] += g.data[i] * vb2.data[i];
            }
            if (t.needs_grad(b)) {
                Tensor& acc = t.grad_mut(b);
                const Tensor& va2 = t.value(a);
                for (std::size_t i = 0; i < acc.data.size(); ++i)
                    acc.data[i] += g.data[i] * va2.data[i];
            }
        };
    }
    return out;
}

Var Tape::scale(Var a, double c) {
    Tensor v = value(a);
    for (double& x : v.data) x *= c;
    Var out = push(std::move(v), needs_grad(a), "scale");
    if (nodes_[out.idx].requires_grad) {
        nodes_[out.idx].back = [a, c, out](Tape& t) {
            const Tensor& g = t.grad(out);
            Tensor& acc = t.grad_mut(a);
            for (std::size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += c * g.data[i];
        };
    }
    return out;
}

Var Tape::add_row_bias(Var m, Var bias) {
    const Tensor& vm = value(m);
    const Tensor& vb = value(bias);
    if (vb.rows != 1 || vb.cols != vm.cols) {
        throw ShapeError("add_row_bias: " + vm.shape_str() + " + " + vb.shape_str());
    }
    Tensor v = vm;
    for (std::size_t i = 0; i < v.rows; ++i)
        for (std::size_t j = 0; j < v.cols; ++j) v.at(i, j) += vb.at(0, j);
    Var out = push(std::move(v), needs_grad(m) || needs_grad(bias), "add_row_bias");
    if (nodes_[out.idx].requires_grad) {
        nodes_[out.idx].back = [m, bias, out](Tape& t) {
            const Tensor& g = t.grad(out);
            if (t.needs_grad(m)) {
                Tensor& acc = t.grad_mut(m);
                for (std::size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += g.data[i];
            }
            if (t.needs_grad(bias)) {
                Tensor& acc = t.grad_mut(bias);
                for (std::size_t i = 0; i < g.rows; ++i)
                    for (std::size_t j = 0; j < g.cols; ++j) acc.at(0, j) += g.at(i, j);
            }
        };
    }
    return out;
}

Var Tape::mul_row_scale(Var m, Var scale) {
    const Tensor& vm = value(m);
    const Tensor& vs = value(scale);
    if (vs.rows != 1 || vs.cols != vm.cols) {
        throw ShapeError("mul_row_scale: " + vm.shape_str() + " * " + vs.shape_str());
    }
    Tensor v = vm;
    for (std::size_t i = 0; i < v.rows; ++i)
        for (std::size_t j = 0; j < v.cols; ++j) v.at(i, j) *= vs.at(0, j);
    Var out = push(std::move(v), needs_grad(m) || needs_grad(scale), "mul_row_scale");
    if (nodes_[out.idx].requires_grad) {
        nodes_[out.idx].back = [m, scale, out](Tape& t) {
            const Tensor& g = t.grad(out);
            if (t.needs_grad(m)) {
                Tensor& acc = t.grad_mut(m);
                const Tensor& vs2 = t.value(scale);
                for (std::size_t i = 0; i < acc.rows; ++i)
                    for (std::size_t j = 0; j < acc.cols; ++j)
                        acc.at(i, j) += g.at(i, j) * vs2.at(0, j);
            }
            if (t.needs_grad(scale)) {
                Tensor& acc = t.grad_mut(scale);
                const Tensor& vm2 = t.value(m);
                for (std::size_t i = 0; i < g.rows; ++i)
                    for (std::size_t j = 0; j < g.cols; ++j)
                        acc.at(0, j) += g.at(i, j) * vm2.at(i, j);
            }
        };
    }
    return out;
}

Var Tape::relu(Var a) {
    Tensor v = value(a);
    for (double& x : v.data) x = x > 0.0 ? x : 0.0;
    Var out = push(std::move(v), needs_grad(a), "relu");
    if (nodes_[out.idx].requires_grad) {
        nodes_[out.idx].back = [a, out](Tape& t) {
            const Tensor& g = t.grad(out);
            const Tensor& va = t.value(a);
            Tensor& acc = t.grad_mut(a);
            // subgradient at 0 is 0
            for (std::size_t i = 0; i < acc.data.size(); ++i)
                if (va.data[i] > 0.0) acc.data[i] += g.data[i];
        };
    }
    return out;
}

Var Tape::concat_cols(Var a, Var b) {
    const Tensor& va = value(a);
    const Tensor& vb = value(b);
    if (va.rows != vb.rows) {
        throw ShapeError("concat_cols: " + va.shape_str() + " | " + vb.shape_str());
    }
    Tensor v(va.rows, va.cols + vb.cols);
    for (std::size_t i = 0; i < va.rows; ++i) {
        for (std::size_t j = 0; j < va.cols; ++j) v.at(i, j) = va.at(i, j);
        for (std::size_t j = 0; j < vb.cols; ++j) v.at(i, va.cols + j) = vb.at(i, j);
    }
    Var out = push(std::move(v), needs_grad(a) || needs_grad(b), "concat_cols");
    if (nodes_[out.idx].requires_grad) {
        const std::size_t ca = va.cols;
        nodes_[out.idx].back = [a, b, out, ca](Tape& t) {
            const Tensor& g = t.grad(out);
            if (t.needs_grad(a)) {
                Tensor& acc = t.grad_mut(a);
                for (std::size_t i = 0; i < acc.rows; ++i)
                    for (std::size_t j = 0; j < acc.cols; ++j) acc.at(i, j) += g.at(i, j);
            }
            if (t.needs_grad(b)) {
                Tensor& acc = t.grad_mut(b);
                for (std::size_t i = 0; i < acc.rows; ++i)
                    for (std::size_t j = 0; j < acc.cols; ++j) acc.at(i, j) += g.at(i, ca + j);
            }
        };
    }
    return out;
}

Var Tape::stack_rows(const std::vector<Var>& parts) {
    if (parts.empty()) throw ShapeError("stack_rows: empty part list");
    const std::size_t cols = value(parts[0]).cols;
    std::size_t rows = 0;
    bool rg = false;
    for (Var p : parts) {
        if (value(p).cols != cols) {
            throw ShapeError("stack_rows: column mismatch " + value(p).shape_str());
        }
        rows += value(p).rows;
        rg = rg || needs_grad(p);
    }
    Tensor v(rows, cols);
    std::size_t r = 0;
    for (Var p : parts) {
        const Tensor& vp = value(p);
        std::copy(vp.data.begin(), vp.data.end(), v.data.begin() + r * cols);
        r += vp.rows;
    }
    Var out = push(std::move(v), rg, "stack_rows");
    if (nodes_[out.idx].requires_grad) {
        nodes_[out.idx].back = [parts, out](Tape& t) {
            const Tensor& g = t.grad(out);
            std::size_t r0 = 0;
            for (Var p : parts) {
                const std::size_t pr = t.value(p).rows;
                if (t.needs_grad(p)) {
                    Tensor& acc = t.grad_mut(p);
                    for (std::size_t i = 0; i < acc.data.size(); ++i)
                        acc.data[i] += g.data[r0 * g.cols + i];
                }
                r0 += pr;
            }
        };
    }
    return out;
}

Var Tape::slice_rows(Var a, std::size_t row0, std::size_t row1) {
    const Tensor& va = value(a);
    if (row0 >= row1 || row1 > va.rows) {
        throw ShapeError("slice_rows: [" + std::to_string(row0) + "," + std::to_string(row1) +
                         ") of " + va.shape_str());
    }
    Tensor v(row1 - row0, va.cols);
    std::copy(va.data.begin() + row0 * va.cols, va.data.begin() + row1 * va.cols,
              v.data.begin());
    Var out = push(std::move(v), needs_grad(a), "slice_rows");
    if (nodes_[out.idx].requires_grad) {
        nodes_[out.idx].back = [a, out, row0](Tape& t) {
            const Tensor& g = t.grad(out);
            Tensor& acc = t.grad_mut(a);
            for (std::size_t i = 0; i < g.data.size(); ++i)
                acc.data[row0 * g.cols + i] += g.data[i];
        };
    }
    return out;
}

Var Tape::row_sums(Var a) {
    const Tensor& va = value(a);
    Tensor v(va.rows, 1);
    for (std::size_t i = 0; i < va.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < va.cols; ++j) s += va.at(i, j);
        v.at(i, 0) = s;
    }
    Var out = push(std::move(v), needs_grad(a), "row_sums");
    if (nodes_[out.idx].requires_grad) {
        nodes_[out.idx].back = [a, out](Tape& t) {
            const Tensor& g = t.grad(out);
            Tensor& acc = t.grad_mut(a);
            for (std::size_t i = 0; i < acc.rows; ++i)
                for (std::size_t j = 0; j < acc.cols; ++j) acc.at(i, j) += g.at(i, 0);
        };
    }
    return out;
}

Var Tape::sum_all(Var a) {
    const Tensor& va = value(a);
    Tensor v(1, 1);
    double s = 0.0;
    for (double x : va.data) s += x;
    v.at(0, 0) = s;
    Var out = push(std::move(v), needs_grad(a), "sum_all");
    if (nodes_[out.idx].requires_grad) {
        nodes_[out.idx].back = [a, out](Tape& t) {
            const double g = t.grad(out).at(0, 0);
            Tensor& acc = t.grad_mut(a);
            for (double& x : acc.data) x += g;
        };
    }
    return out;
}

Var Tape::sqrt_elem(Var a) {
    const Tensor& va = value(a);
    Tensor v(va.rows, va.cols);
    for (std::size_t i = 0; i < v.data.size(); ++i) {
        if (va.data[i] < 0.0) throw NumericError("sqrt_elem: negative input");
        v.data[i] = std::sqrt(va.data[i]);
    }
    Var out = push(std::move(v), needs_grad(a), "sqrt_elem");
    if (nodes_[out.idx].requires_grad) {
        nodes_[out.idx].back = [a, out](Tape& t) {
            const Tensor& g = t.grad(out);
            const Tensor& y = t.value(out);
            Tensor& acc = t.grad_mut(a);
            for (std::size_t i = 0; i < acc.data.size(); ++i)
                acc.data[i] += g.data[i] * 0.5 / std::max(y.data[i], 1e-12);
        };
    }
    return out;
}

Var Tape::shift_blocks(Var a, std::size_t block, std::size_t steps) {
    const Tensor& va = value(a);
    if (block == 0 || va.rows % block != 0) {
        throw ShapeError("shift_blocks: rows " + std::to_string(va.rows) +
                         " not a multiple of block " + std::to_string(block));
    }
    const std::size_t shift = steps * block;
    Tensor v(va.rows, va.cols);
    for (std::size_t r = shift; r < va.rows; ++r)
        for (std::size_t j = 0; j < va.cols; ++j) v.at(r, j) = va.at(r - shift, j);
    Var out = push(std::move(v), needs_grad(a), "shift_blocks");
    if (nodes_[out.idx].requires_grad) {
        nodes_[out.idx].back = [a, out, shift](Tape& t) {
            const Tensor& g = t.grad(out);
            Tensor& acc = t.grad_mut(a);
            for (std::size_t r = shift; r < g.rows; ++r)
                for (std::size_t j = 0; j < g.cols; ++j) acc.at(r - shift, j) += g.at(r, j);
        };
    }
    return out;
}

Var Tape::standardize_rows(Var a, double eps) {
    const Tensor& va = value(a);
    if (va.cols == 0) throw ShapeError("standardize_rows: empty rows");
    const double n = static_cast<double>(va.cols);
    Tensor v(va.rows, va.cols);
    Tensor inv_s(va.rows, 1);
    for (std::size_t i = 0; i < va.rows; ++i) {
        double mu = 0.0;
        for (std::size_t j = 0; j < va.cols; ++j) mu += va.at(i, j);
        mu /= n;
        double var = 0.0;
        for (std::size_t j = 0; j < va.cols; ++j) {
            const double d = va.at(i, j) - mu;
            var += d * d;
        }
        var /= n;
        const double s = std::sqrt(var + eps);
        inv_s.at(i, 0) = 1.0 / s;
        for (std::size_t j = 0; j < va.cols; ++j) v.at(i, j) = (va.at(i, j) - mu) / s;
    }
    Var out = push(std::move(v), needs_grad(a), "standardize_rows");
    if (nodes_[out.idx].requires_grad) {
        nodes_[out.idx].back = [a, out, inv_s, n](Tape& t) {
            const Tensor& g = t.grad(out);
            const Tensor& y = t.value(out);
            Tensor& acc = t.grad_mut(a);
            // dx = (g - mean(g) - y * mean(g.y)) / s, per row
            for (std::size_t i = 0; i < g.rows; ++i) {
                double gm = 0.0, gym = 0.0;
                for (std::size_t j = 0; j < g.cols; ++j) {
                    gm += g.at(i, j);
                    gym += g.at(i, j) * y.at(i, j);
                }
                gm /= n;
                gym /= n;
                const double is = inv_s.at(i, 0);
                for (std::size_t j = 0; j < g.cols; ++j)
                    acc.at(i, j) += (g.at(i, j) - gm - y.at(i, j) * gym) * is;
            }
        };
    }
    return out;
}

Var Tape::dropout(Var a, double p, Rng& rng, bool training) {
    if (p < 0.0 || p >= 1.0) {
        throw ConfigError("dropout: probability " + std::to_string(p) + " not in [0, 1)");
    }
    if (!training || p == 0.0) return a;
    const Tensor& va = value(a);
    Tensor mask(va.rows, va.cols);
    const double keep_scale = 1.0 / (1.0 - p);
    for (double& m : mask.data) m = rng.uniform() < p ? 0.0 : keep_scale;
    Tensor v = va;
    for (std::size_t i = 0; i < v.data.size(); ++i) v.data[i] *= mask.data[i];
    Var out = push(std::move(v), needs_grad(a), "dropout");
    if (nodes_[out.idx].requires_grad) {
        nodes_[out.idx].back = [a, out, mask](Tape& t) {
            const Tensor& g = t.grad(out);
            Tensor& acc = t.grad_mut(a);
            for (std::size_t i = 0; i < acc.data.size(); ++i)
                acc.data[i] += g.data[i] * mask.data[i];
        };
    }
    return out;
}

void Tape::backward(Var loss) {
    if (!record_) throw ConfigError("backward on a non-recording tape");
    if (backward_done_) throw ConfigError("backward called twice on one tape");
    backward_done_ = true;
    const Tensor& lv = value(loss);
    if (lv.rows != 1 || lv.cols != 1) {
        throw ShapeError("backward: loss must be 1x1, got " + lv.shape_str());
    }
    if (!nodes_[loss.idx].requires_grad) return;
    nodes_[loss.idx].grad.at(0, 0) = 1.0;
    for (std::size_t i = loss.idx + 1; i-- > 0;) {
        if (nodes_[i].back) nodes_[i].back(*this);
    }
    for (auto& [p, idx] : param_nodes_) {
        Parameter& pp = *nodes_[idx].bound;
        const Tensor& g = nodes_[idx].grad;
        for (std::size_t i = 0; i < g.data.size(); ++i) pp.grad.data[i] += g.data[i];
    }
}

}  // namespace sdtgcn
