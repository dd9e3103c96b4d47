#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "errors.hpp"
#include "serialize.hpp"
#include "synthetic.hpp"
#include "trainer.hpp"

using namespace sdtgcn;

namespace {

struct YearRange {
    int start = 0;
    int end = 0;
};

YearRange parse_year_range(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw InputError("year range must look like 1970:2019, got '" + text + "'");
    }
    YearRange r;
    try {
        r.start = std::stoi(text.substr(0, colon));
        r.end = std::stoi(text.substr(colon + 1));
    } catch (const std::exception&) {
        throw InputError("year range must look like 1970:2019, got '" + text + "'");
    }
    if (r.start > r.end) throw InputError("year range start exceeds end");
    return r;
}

std::size_t find_year_index(const SnapshotSequence& seq, int year) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (seq.snapshots[i].year == year) return i;
    }
    throw InputError("year " + std::to_string(year) + " not present in bundle (" +
                     std::to_string(seq.snapshots.front().year) + ".." +
                     std::to_string(seq.snapshots.back().year) + ")");
}

struct TrainFlags {
    std::string data;
    std::string model = "sdtgcn";
    std::size_t T = 8;
    std::uint64_t seed = 0;
    std::string out = "ckpt.json";
    std::string history;
    std::size_t hidden = 32;
    std::size_t kernel = 3;
    double dropout = 0.2;
    double lr = 1e-3;
    std::size_t max_epochs = 500;
    std::size_t patience = 50;
    std::size_t patience_start = 100;
    double train_ratio = 0.6;
    double val_ratio = 0.1;
    double test_ratio = 0.1;
    bool euclidean_loss = false;
    bool timings = false;
};

// Flat key=value config file support: values are injected as flags right
// after the subcommand, skipping keys the command line already provides, so
// explicit flags always win.
std::vector<std::string> apply_config_file(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    std::string config_path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        }
    }
    if (config_path.empty() || args.size() < 2) return args;

    std::ifstream in(config_path);
    if (!in) throw InputError("cannot open config file '" + config_path + "'");
    const auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::vector<std::string> injected;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InputError("config file: expected key=value, got '" + line + "'");
        }
        const std::string key = "--" + trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        bool overridden = false;
        for (std::size_t i = 2; i < args.size(); ++i) {
            if (args[i] == key || args[i].rfind(key + "=", 0) == 0) {
                overridden = true;
                break;
            }
        }
        if (!overridden) {
            injected.push_back(key);
            injected.push_back(value);
        }
    }
    args.insert(args.begin() + 2, injected.begin(), injected.end());
    return args;
}

int cmd_train(const TrainFlags& f) {
    SnapshotSequence seq = read_bundle_file(f.data);
    TrainConfig cfg;
    cfg.T = f.T;
    cfg.hidden = f.hidden;
    cfg.kernel = f.kernel;
    cfg.dropout = f.dropout;
    cfg.lr = f.lr;
    cfg.max_epochs = f.max_epochs;
    cfg.patience = f.patience;
    cfg.patience_start = f.patience_start;
    cfg.seed = f.seed;
    cfg.ratios = {f.train_ratio, f.val_ratio, f.test_ratio};
    cfg.euclidean_step_loss = f.euclidean_loss;

    PreparedData data = prepare_data(std::move(seq), cfg.T, cfg.ratios);

    ModelConfig mc;
    mc.kind = model_kind_from_name(f.model);
    mc.n_topics = data.seq.topic_count();
    mc.T = cfg.T;
    mc.w = data.seq.w;
    mc.hidden = cfg.hidden;
    mc.kernel = cfg.kernel;
    mc.dropout = cfg.dropout;
    SdtgcnModel model(mc, *data.seq.norm, Rng(cfg.seed));

    TrainResult result = train(model, data, cfg);
    write_checkpoint_file(model, f.out);
    if (!f.history.empty()) write_history_csv(f.history, result.history, f.timings);

    std::cout << "model: " << f.model << ", windows: " << data.windows.size() << " ("
              << data.splits.train.size() << "/" << data.splits.val.size() << "/"
              << data.splits.test.size() << " train/val/test)\n";
    if (!result.history.empty()) {
        std::cout << "epochs run: " << result.epochs_run
                  << (result.early_stopped ? " (early stop)" : "")
                  << ", best epoch: " << result.best_epoch << "\n";
    }
    std::cout << "best validation mse = " << format_double(result.best_val) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SDTGCN: research-topic trend forecasting over dynamic citation graphs"};
    app.require_subcommand(1);
    std::string config_file;  // handled by apply_config_file before parsing

    // ---- build ----
    auto* build = app.add_subcommand("build", "Build a snapshot bundle from JSONL records");
    build->add_option("--config", config_file, "Flat key=value config file");
    std::string b_input, b_out = "bundle.json", b_years = "1970:2019";
    std::size_t b_top_k = 20000, b_sample_n = 500;
    int b_w = 4;
    std::uint64_t b_seed = 0;
    bool b_cumulative = false;
    build->add_option("--input", b_input, "Records file (JSON Lines)")->required();
    build->add_option("--out", b_out, "Output bundle path");
    build->add_option("--top-k", b_top_k, "Rank pool size for vocabulary selection");
    build->add_option("--sample-n", b_sample_n, "Vocabulary sample size");
    build->add_option("--w", b_w, "Feature window length");
    build->add_option("--years", b_years, "Corpus year range, start:end");
    build->add_option("--seed", b_seed, "Random seed");
    build->add_flag("--cumulative", b_cumulative, "Accumulate adjacency over years");

    // ---- synth ----
    auto* synth = app.add_subcommand("synth", "Generate a synthetic snapshot bundle");
    synth->add_option("--config", config_file, "Flat key=value config file");
    SyntheticConfig syn;
    std::string s_out = "bundle.json";
    synth->add_option("--topics", syn.n_topics, "Number of topics");
    synth->add_option("--years", syn.n_years, "Number of simulated years");
    synth->add_option("--spatial", syn.spatial_strength, "Neighbor coupling strength");
    synth->add_option("--noise", syn.noise, "Relative noise level");
    synth->add_option("--seed", syn.seed, "Random seed");
    synth->add_option("--w", syn.w, "Feature window length");
    synth->add_option("--start-year", syn.start_year, "Calendar year of the first snapshot");
    synth->add_option("--out", s_out, "Output bundle path");

    // ---- train ----
    auto* tr = app.add_subcommand("train", "Train a model on a snapshot bundle");
    tr->add_option("--config", config_file, "Flat key=value config file");
    TrainFlags tf;
    tr->add_option("--data", tf.data, "Snapshot bundle")->required();
    tr->add_option("--model", tf.model, "Model: sdtgcn|ha|tcn|gcn");
    tr->add_option("--T", tf.T, "Input window length");
    tr->add_option("--seed", tf.seed, "Random seed");
    tr->add_option("--out", tf.out, "Checkpoint path");
    tr->add_option("--history", tf.history, "Training history CSV path");
    tr->add_option("--hidden", tf.hidden, "Hidden width");
    tr->add_option("--kernel", tf.kernel, "TCN kernel size");
    tr->add_option("--dropout", tf.dropout, "Dropout probability");
    tr->add_option("--lr", tf.lr, "Learning rate");
    tr->add_option("--max-epochs", tf.max_epochs, "Epoch cap");
    tr->add_option("--patience", tf.patience, "Early-stop patience");
    tr->add_option("--patience-start", tf.patience_start,
                   "Epoch patience counting starts after");
    tr->add_option("--train-ratio", tf.train_ratio, "Training split ratio");
    tr->add_option("--val-ratio", tf.val_ratio, "Validation split ratio");
    tr->add_option("--test-ratio", tf.test_ratio, "Test split ratio");
    tr->add_flag("--euclidean-loss", tf.euclidean_loss,
                 "Per-step Euclidean norm instead of node-mean squared error");
    tr->add_flag("--timings", tf.timings, "Write real elapsed_ms into the history CSV");

    // ---- eval ----
    auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on a bundle split");
    ev->add_option("--config", config_file, "Flat key=value config file");
    std::string e_data, e_ckpt, e_split = "test", e_out = "results.csv",
                e_space = "normalized";
    std::size_t e_runs = 1;
    std::uint64_t e_seed = 0;
    double e_train_ratio = 0.6, e_val_ratio = 0.1, e_test_ratio = 0.1;
    ev->add_option("--data", e_data, "Snapshot bundle")->required();
    ev->add_option("--ckpt", e_ckpt, "Checkpoint path")->required();
    ev->add_option("--split", e_split, "Split: train|val|test");
    ev->add_option("--runs", e_runs, "Evaluation repetitions");
    ev->add_option("--out", e_out, "Results CSV (appended)");
    ev->add_option("--space", e_space, "Metric space: normalized|count|both");
    ev->add_option("--seed", e_seed, "Seed recorded in the results rows");
    ev->add_option("--train-ratio", e_train_ratio, "Training split ratio");
    ev->add_option("--val-ratio", e_val_ratio, "Validation split ratio");
    ev->add_option("--test-ratio", e_test_ratio, "Test split ratio");

    // ---- predict ----
    auto* pr = app.add_subcommand("predict", "Predict next-year counts for one window");
    pr->add_option("--config", config_file, "Flat key=value config file");
    std::string p_data, p_ckpt, p_out = "preds.csv";
    int p_window_end = 0;
    pr->add_option("--data", p_data, "Snapshot bundle")->required();
    pr->add_option("--ckpt", p_ckpt, "Checkpoint path")->required();
    pr->add_option("--window-end", p_window_end, "Last input year")->required();
    pr->add_option("--out", p_out, "Predictions CSV");

    // ---- gradcheck ----
    auto* gc = app.add_subcommand("gradcheck", "Finite-difference gradient check");
    gc->add_option("--config", config_file, "Flat key=value config file");
    std::size_t g_n = 6, g_T = 8;
    int g_w = 3;
    std::uint64_t g_seed = 0;
    double g_eps = 1e-5, g_tol = 1e-4;
    gc->add_option("--n", g_n, "Number of topics");
    gc->add_option("--T", g_T, "Window length");
    gc->add_option("--w", g_w, "Feature window length");
    gc->add_option("--seed", g_seed, "Random seed");
    gc->add_option("--epsilon", g_eps, "Central-difference step");
    gc->add_option("--tol", g_tol, "Maximum allowed relative error");

    // ---- plot-data ----
    auto* pd = app.add_subcommand("plot-data",
                                  "Export predicted-vs-actual rows for plotting");
    pd->add_option("--config", config_file, "Flat key=value config file");
    std::string d_data, d_ckpt, d_out = "fig3.csv";
    std::size_t d_topics = 50;
    std::uint64_t d_seed = 0;
    pd->add_option("--data", d_data, "Snapshot bundle")->required();
    pd->add_option("--ckpt", d_ckpt, "Checkpoint path")->required();
    pd->add_option("--topics", d_topics, "Number of sampled topics");
    pd->add_option("--out", d_out, "Output CSV");
    pd->add_option("--seed", d_seed, "Sampling seed");

    std::vector<std::string> args;
    try {
        args = apply_config_file(argc, argv);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (build->parsed()) {
            const YearRange range = parse_year_range(b_years);
            const std::vector<PaperRecord> records = read_records_file(b_input);
            TopicVocabulary vocab = build_vocabulary(records, b_top_k, b_sample_n, b_seed);
            BuildReport report;
            BuildOptions opts;
            opts.cumulative_adjacency = b_cumulative;
            SnapshotSequence seq =
                build_snapshots(records, vocab, range.start, range.end, b_w, opts, &report);
            write_bundle_file(seq, b_out);
            std::cout << "vocabulary size: " << seq.topic_count() << "\n"
                      << "year span: " << range.start << ".." << range.end << " (snapshots "
                      << seq.snapshots.front().year << ".." << seq.snapshots.back().year
                      << ")\n"
                      << "dangling references: " << report.dangling_references << "\n";
        } else if (synth->parsed()) {
            SyntheticData data = generate_synthetic(syn);
            write_bundle_file(data.seq, s_out);
            std::cout << "topics: " << data.seq.topic_count()
                      << ", snapshots: " << data.seq.size() << " ("
                      << data.seq.snapshots.front().year << ".."
                      << data.seq.snapshots.back().year << ")\n";
        } else if (tr->parsed()) {
            return cmd_train(tf);
        } else if (ev->parsed()) {
            if (e_space != "normalized" && e_space != "count" && e_space != "both") {
                throw ConfigError("--space must be normalized, count or both");
            }
            SnapshotSequence seq = read_bundle_file(e_data);
            SdtgcnModel model = read_checkpoint_file(e_ckpt);
            PreparedData data = prepare_data(std::move(seq), model.config().T,
                                             {e_train_ratio, e_val_ratio, e_test_ratio});
            const std::vector<Window>* windows = nullptr;
            if (e_split == "train") windows = &data.splits.train;
            else if (e_split == "val") windows = &data.splits.val;
            else if (e_split == "test") windows = &data.splits.test;
            else throw ConfigError("--split must be train, val or test");

            const SplitEval eval = evaluate_split(model, data, *windows);
            const std::string model_name = model_kind_name(model.config().kind);
            const std::string seed_str = std::to_string(e_seed);
            std::vector<EvalReport> norm_runs, count_runs;
            for (std::size_t r = 0; r < e_runs; ++r) {
                if (e_space != "count") {
                    append_results_csv(e_out, model_name, model.config().T, seed_str,
                                       eval.normalized);
                    norm_runs.push_back(eval.normalized);
                }
                if (e_space != "normalized") {
                    append_results_csv(e_out, model_name, model.config().T, seed_str,
                                       eval.count);
                    count_runs.push_back(eval.count);
                }
            }
            if (e_runs > 1) {
                if (!norm_runs.empty()) {
                    append_results_csv(e_out, model_name, model.config().T, "avg",
                                       average_runs(norm_runs));
                }
                if (!count_runs.empty()) {
                    append_results_csv(e_out, model_name, model.config().T, "avg",
                                       average_runs(count_runs));
                }
            }
            std::cout << "split: " << e_split << ", windows: " << windows->size() << "\n"
                      << "normalized: mae=" << format_double(eval.normalized.mae)
                      << " mse=" << format_double(eval.normalized.mse)
                      << " var=" << format_double(eval.normalized.var) << "\n"
                      << "count: mae=" << format_double(eval.count.mae)
                      << " mse=" << format_double(eval.count.mse)
                      << " var=" << format_double(eval.count.var) << "\n";
        } else if (pr->parsed()) {
            SnapshotSequence seq = read_bundle_file(p_data);
            SdtgcnModel model = read_checkpoint_file(p_ckpt);
            const std::size_t T = model.config().T;
            const std::size_t end = find_year_index(seq, p_window_end);
            if (end + 1 < T) {
                throw InputError("window ending " + std::to_string(p_window_end) + " needs " +
                                 std::to_string(T) + " snapshots of history");
            }
            const std::span<const GraphSnapshot> window{seq.snapshots.data() + (end + 1 - T),
                                                        T};
            const std::vector<double> preds = model.predict(window);
            const GraphSnapshot* actual =
                end + 1 < seq.size() ? &seq.snapshots[end + 1] : nullptr;
            std::ofstream out(p_out);
            if (!out) throw InputError("cannot write '" + p_out + "'");
            out << "topic,predicted,actual\n";
            for (std::size_t i = 0; i < seq.topic_count(); ++i) {
                out << seq.vocab.topics[i] << "," << format_double(preds[i]) << ",";
                if (actual) out << actual->targets[i];
                out << "\n";
            }
            std::cout << "predicted year " << p_window_end + 1 << " for "
                      << seq.topic_count() << " topics"
                      << (actual ? "" : " (no actuals in bundle)") << "\n";
        } else if (gc->parsed()) {
            const GradCheckReport report = run_model_gradcheck(g_n, g_T, g_w, g_seed, g_eps);
            std::cout << "max relative error = " << format_double(report.max_rel_error)
                      << " (param " << report.worst_param << "[" << report.worst_index
                      << "], analytic " << format_double(report.analytic) << ", numeric "
                      << format_double(report.numeric) << ")\n";
            if (report.max_rel_error >= g_tol) {
                std::cerr << "gradient check FAILED at tolerance " << g_tol << "\n";
                return 4;
            }
        } else if (pd->parsed()) {
            SnapshotSequence seq = read_bundle_file(d_data);
            SdtgcnModel model = read_checkpoint_file(d_ckpt);
            const std::size_t T = model.config().T;
            if (seq.size() < T + 1) {
                throw DatasetTooSmallError("bundle has " + std::to_string(seq.size()) +
                                           " snapshots, need " + std::to_string(T + 1));
            }
            const std::size_t n = seq.topic_count();
            if (d_topics > n) {
                throw InputError("requested " + std::to_string(d_topics) +
                                 " topics, bundle has " + std::to_string(n));
            }
            // last window whose target year is still inside the bundle
            const std::size_t start = seq.size() - T - 1;
            const std::span<const GraphSnapshot> window{seq.snapshots.data() + start, T};
            const std::vector<double> preds = model.predict(window);
            const GraphSnapshot& actual = seq.snapshots[seq.size() - 1];

            Rng rng = Rng(d_seed).child("plot-sample");
            std::vector<std::size_t> ids(n);
            for (std::size_t i = 0; i < n; ++i) ids[i] = i;
            for (std::size_t i = 0; i < d_topics; ++i) {
                const std::size_t j = i + rng.uniform_below(n - i);
                std::swap(ids[i], ids[j]);
            }
            ids.resize(d_topics);
            std::sort(ids.begin(), ids.end());

            std::ofstream out(d_out);
            if (!out) throw InputError("cannot write '" + d_out + "'");
            out << "topic_id,topic_name,predicted,actual\n";
            for (std::size_t id : ids) {
                out << id << "," << seq.vocab.topics[id] << "," << format_double(preds[id])
                    << "," << actual.targets[id] << "\n";
            }
            std::cout << "wrote " << d_topics << " topics for target year " << actual.year
                      << "\n";
        }
    } catch (const DatasetTooSmallError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
