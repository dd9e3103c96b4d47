#pragma once

#include <cstdint>
#include <vector>

#include "gradcheck.hpp"
#include "metrics.hpp"
#include "model.hpp"

namespace sdtgcn {

struct TrainConfig {
    std::size_t T = 8;
    std::size_t hidden = 32;
    std::size_t kernel = 3;
    double dropout = 0.2;
    double lr = 1e-3;
    std::size_t max_epochs = 500;
    std::size_t patience = 50;
    std::size_t patience_start = 100;
    std::uint64_t seed = 0;
    SplitRatios ratios{};
    // Reads the per-step error as the plain Euclidean norm instead of the
    // node-mean squared error.
    bool euclidean_step_loss = false;
};

// Snapshot sequence with fitted normalization plus its chronological window
// splits. Stats are fit on the training era only: snapshots
// [0, n_train_windows + T), which covers every training input and target.
struct PreparedData {
    SnapshotSequence seq;
    std::vector<Window> windows;
    WindowSplits splits;
    std::size_t T = 0;

    std::span<const GraphSnapshot> window_input(const Window& w) const {
        return {seq.snapshots.data() + w.start, T};
    }
    std::size_t target_index(const Window& w) const { return w.start + T; }
};

PreparedData prepare_data(SnapshotSequence seq, std::size_t T, const SplitRatios& ratios);

// Per-step losses and their time-distance weights: loss_i is the node-mean
// squared error at step i, weight_i = i/t (1-based), total = sum of
// weight_i * loss_i.
struct LossReport {
    std::vector<double> step_losses;
    std::vector<double> weights;
    double total = 0.0;
};

LossReport weighted_loss_report(const Tensor& preds, const Tensor& targets);

// Normalized targets for a window: steps rows, row j holds the target year
// of step (T - steps + j), i.e. the year after that step's snapshot.
Tensor window_targets_normalized(const PreparedData& data, const Window& w,
                                 std::size_t steps);

// Differentiable weighted loss over a (steps*N) x 1 prediction column.
Var training_loss(Tape& tape, Var preds, const Tensor& targets, bool euclidean);

struct EpochRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double lr = 0.0;
    std::int64_t elapsed_ms = 0;
};

struct TrainResult {
    std::vector<EpochRecord> history;
    double best_val = 0.0;
    std::size_t best_epoch = 0;
    std::size_t epochs_run = 0;
    bool early_stopped = false;
};

// Adam on the weighted loss, one step per training window, windows shuffled
// per epoch. Validation loss is the unweighted final-step MSE. From epoch
// patience_start + 1 on, `patience` consecutive epochs without improvement
// stop training. The parameters of the best validation epoch are restored
// into the model before returning.
TrainResult train(SdtgcnModel& model, const PreparedData& data, const TrainConfig& cfg);

// Unweighted final-step MSE in normalized space, pooled over the windows.
double validation_mse(SdtgcnModel& model, const PreparedData& data,
                      const std::vector<Window>& windows);

struct SplitEval {
    EvalReport normalized;
    EvalReport count;
};

// Final-step predictions vs truth pooled over the given windows, reported in
// both normalized and count space.
SplitEval evaluate_split(SdtgcnModel& model, const PreparedData& data,
                         const std::vector<Window>& windows);

// Full-model gradient check on a random instance: reverse-mode gradients of
// the weighted loss vs central differences over every parameter coordinate.
// Dropout off, RNG pinned.
GradCheckReport run_model_gradcheck(std::size_t n_topics, std::size_t T, int w,
                                    std::uint64_t seed, double epsilon = 1e-5);

}  // namespace sdtgcn
