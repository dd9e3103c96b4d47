#include "trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "baselines.hpp"
#include "errors.hpp"
#include "synthetic.hpp"

namespace sdtgcn {

PreparedData prepare_data(SnapshotSequence seq, std::size_t T, const SplitRatios& ratios) {
    PreparedData data;
    data.T = T;
    data.windows = make_windows(seq, T);
    data.splits = split_windows(data.windows, ratios);
    // training era: through the last training window's target year
    const std::size_t train_end = data.splits.train.size() + T;
    seq.norm = fit_norm_stats(seq, train_end);
    data.seq = std::move(seq);
    return data;
}

LossReport weighted_loss_report(const Tensor& preds, const Tensor& targets) {
    if (!preds.same_shape(targets)) {
        throw ShapeError("weighted_loss: " + preds.shape_str() + " vs " + targets.shape_str());
    }
    const std::size_t steps = preds.rows;
    const double t = static_cast<double>(steps);
    LossReport report;
    report.step_losses.resize(steps);
    report.weights.resize(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        double sq = 0.0;
        for (std::size_t j = 0; j < preds.cols; ++j) {
            const double d = targets.at(i, j) - preds.at(i, j);
            sq += d * d;
        }
        report.step_losses[i] = sq / static_cast<double>(preds.cols);
        report.weights[i] = static_cast<double>(i + 1) / t;
        report.total += report.weights[i] * report.step_losses[i];
    }
    return report;
}

Tensor window_targets_normalized(const PreparedData& data, const Window& w,
                                 std::size_t steps) {
    const NormStats& stats = *data.seq.norm;
    const std::size_t n = data.seq.topic_count();
    Tensor targets(steps, n);
    for (std::size_t j = 0; j < steps; ++j) {
        const std::size_t snap_index = w.start + (data.T - steps) + j + 1;
        const GraphSnapshot& snap = data.seq.snapshots[snap_index];
        for (std::size_t i = 0; i < n; ++i) {
            targets.at(j, i) =
                stats.normalize_count(i, static_cast<double>(snap.targets[i]));
        }
    }
    return targets;
}

Var training_loss(Tape& tape, Var preds, const Tensor& targets, bool euclidean) {
    const std::size_t steps = targets.rows;
    const std::size_t n = targets.cols;
    if (tape.value(preds).rows != steps * n || tape.value(preds).cols != 1) {
        throw ShapeError("training_loss: predictions " + tape.value(preds).shape_str() +
                         " vs targets " + targets.shape_str());
    }
    Tensor target_col(steps * n, 1);
    for (std::size_t i = 0; i < steps; ++i)
        for (std::size_t j = 0; j < n; ++j) target_col.at(i * n + j, 0) = targets.at(i, j);
    Var diff = tape.sub(preds, tape.constant(std::move(target_col)));
    Var sq = tape.mul(diff, diff);
    const double t = static_cast<double>(steps);

    if (euclidean) {
        Var total = tape.constant(Tensor(1, 1));
        for (std::size_t i = 0; i < steps; ++i) {
            Var step_sq = tape.sum_all(tape.slice_rows(sq, i * n, (i + 1) * n));
            Var norm = tape.sqrt_elem(step_sq);
            total = tape.add(total, tape.scale(norm, static_cast<double>(i + 1) / t));
        }
        return total;
    }

    Tensor weights(steps * n, 1);
    for (std::size_t i = 0; i < steps; ++i) {
        const double wi = static_cast<double>(i + 1) / t / static_cast<double>(n);
        for (std::size_t j = 0; j < n; ++j) weights.at(i * n + j, 0) = wi;
    }
    return tape.sum_all(tape.mul(sq, tape.constant(std::move(weights))));
}

double validation_mse(SdtgcnModel& model, const PreparedData& data,
                      const std::vector<Window>& windows) {
    const NormStats& stats = *data.seq.norm;
    const std::size_t n = data.seq.topic_count();
    double sq_sum = 0.0;
    for (const Window& w : windows) {
        const std::vector<double> pred = model.predict_normalized(data.window_input(w));
        const GraphSnapshot& target = data.seq.snapshots[data.target_index(w)];
        for (std::size_t i = 0; i < n; ++i) {
            const double truth =
                stats.normalize_count(i, static_cast<double>(target.targets[i]));
            const double d = truth - pred[i];
            sq_sum += d * d;
        }
    }
    return sq_sum / (static_cast<double>(windows.size()) * static_cast<double>(n));
}

TrainResult train(SdtgcnModel& model, const PreparedData& data, const TrainConfig& cfg) {
    TrainResult result;
    if (model.config().kind == ModelKind::Ha) {
        result.best_val = validation_mse(model, data, data.splits.val);
        return result;
    }

    std::vector<Parameter*> params = model.parameters();
    Adam adam(AdamConfig{.lr = cfg.lr});
    Rng root(cfg.seed);
    Rng shuffle_rng = root.child("shuffle");
    Rng dropout_rng = root.child("dropout");

    const std::size_t steps = model.output_steps();
    std::vector<std::size_t> order(data.splits.train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<Tensor> best_params;
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t best_epoch = 0;
    std::size_t streak = 0;

    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
            const std::size_t j = i + shuffle_rng.uniform_below(order.size() - i);
            std::swap(order[i], order[j]);
        }

        double train_loss_sum = 0.0;
        for (std::size_t oi = 0; oi < order.size(); ++oi) {
            const Window& w = data.splits.train[order[oi]];
            try {
                Tape tape;
                Var preds = model.forward(tape, data.window_input(w), true, dropout_rng);
                const Tensor targets = window_targets_normalized(data, w, steps);
                Var loss = training_loss(tape, preds, targets, cfg.euclidean_step_loss);
                train_loss_sum += tape.value(loss).at(0, 0);
                for (Parameter* p : params) p->zero_grad();
                tape.backward(loss);
                adam.step(params);
            } catch (const NumericError& e) {
                throw NumericError("epoch " + std::to_string(epoch) + ", window starting at " +
                                   std::to_string(w.start) + ": " + e.what());
            }
        }

        const double train_loss = train_loss_sum / static_cast<double>(order.size());
        const double val_loss = validation_mse(model, data, data.splits.val);
        const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();
        result.history.push_back({epoch, train_loss, val_loss, cfg.lr, elapsed});
        result.epochs_run = epoch;

        if (val_loss < best_val) {
            best_val = val_loss;
            best_epoch = epoch;
            streak = 0;
            best_params.clear();
            for (Parameter* p : params) best_params.push_back(p->value);
        } else if (epoch > cfg.patience_start) {
            // patience counting starts after epoch patience_start
            if (++streak >= cfg.patience) {
                result.early_stopped = true;
                break;
            }
        }
    }

    if (!best_params.empty()) {
        for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best_params[i];
    }
    result.best_val = best_val;
    result.best_epoch = best_epoch;
    return result;
}

GradCheckReport run_model_gradcheck(std::size_t n_topics, std::size_t T, int w,
                                    std::uint64_t seed, double epsilon) {
    SyntheticConfig syn;
    syn.n_topics = n_topics;
    syn.n_years = static_cast<std::size_t>(w) + T + 2;
    syn.spatial_strength = 0.7;
    syn.noise = 0.3;
    syn.seed = seed;
    syn.w = w;
    SyntheticData data = generate_synthetic(syn);
    SnapshotSequence& seq = data.seq;
    seq.norm = fit_norm_stats(seq, seq.size());

    ModelConfig cfg;
    cfg.kind = ModelKind::Sdtgcn;
    cfg.n_topics = n_topics;
    cfg.T = T;
    cfg.w = w;
    cfg.dropout = 0.0;
    SdtgcnModel model(cfg, *seq.norm, Rng(seed));

    const std::span<const GraphSnapshot> window{seq.snapshots.data(), T};
    Tensor targets(T, n_topics);
    for (std::size_t j = 0; j < T; ++j) {
        const GraphSnapshot& snap = seq.snapshots[j + 1];
        for (std::size_t i = 0; i < n_topics; ++i) {
            targets.at(j, i) =
                seq.norm->normalize_count(i, static_cast<double>(snap.targets[i]));
        }
    }

    Rng unused(0);
    const auto loss_value = [&]() {
        Tape tape(false);
        Var preds = model.forward(tape, window, false, unused);
        Var loss = training_loss(tape, preds, targets, false);
        return tape.value(loss).at(0, 0);
    };
    const auto accumulate = [&]() {
        Tape tape;
        Var preds = model.forward(tape, window, false, unused);
        Var loss = training_loss(tape, preds, targets, false);
        tape.backward(loss);
    };
    return finite_diff_check(model.parameters(), loss_value, accumulate, epsilon);
}

SplitEval evaluate_split(SdtgcnModel& model, const PreparedData& data,
                         const std::vector<Window>& windows) {
    if (windows.empty()) throw ConfigError("evaluate_split: no windows");
    const NormStats& stats = *data.seq.norm;
    const std::size_t n = data.seq.topic_count();
    Tensor preds_norm(windows.size(), n), truth_norm(windows.size(), n);
    Tensor preds_count(windows.size(), n), truth_count(windows.size(), n);

    for (std::size_t wi = 0; wi < windows.size(); ++wi) {
        const Window& w = windows[wi];
        const GraphSnapshot& target = data.seq.snapshots[data.target_index(w)];
        if (model.config().kind == ModelKind::Ha) {
            const std::vector<double> counts = ha_predict(data.window_input(w));
            for (std::size_t i = 0; i < n; ++i) {
                preds_count.at(wi, i) = counts[i];
                preds_norm.at(wi, i) = stats.normalize_count(i, counts[i]);
            }
        } else {
            const std::vector<double> normed =
                model.predict_normalized(data.window_input(w));
            for (std::size_t i = 0; i < n; ++i) {
                preds_norm.at(wi, i) = normed[i];
                preds_count.at(wi, i) = stats.denormalize_count(i, normed[i]);
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double y = static_cast<double>(target.targets[i]);
            truth_count.at(wi, i) = y;
            truth_norm.at(wi, i) = stats.normalize_count(i, y);
        }
    }

    SplitEval eval;
    eval.normalized = evaluate(preds_norm, truth_norm, "normalized", windows.size());
    eval.count = evaluate(preds_count, truth_count, "count", windows.size());
    return eval;
}

}  // namespace sdtgcn
