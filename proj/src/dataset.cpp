#include "dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "errors.hpp"
#include "rng.hpp"

namespace sdtgcn {

TopicVocabulary TopicVocabulary::from_topics(std::vector<std::string> topics) {
    TopicVocabulary v;
    v.topics = std::move(topics);
    for (std::size_t i = 0; i < v.topics.size(); ++i) {
        if (!v.index.emplace(v.topics[i], i).second) {
            throw DataError("vocabulary: duplicate topic '" + v.topics[i] + "'");
        }
    }
    return v;
}

double NormStats::normalize_count(std::size_t topic, double raw) const {
    return (std::log1p(raw) - count_mean[topic]) / count_std[topic];
}

double NormStats::denormalize_count(std::size_t topic, double normed) const {
    const double raw = std::expm1(count_mean[topic] + count_std[topic] * normed);
    return raw > 0.0 ? raw : 0.0;
}

double NormStats::normalize_ref(std::size_t topic, double raw) const {
    return (std::log1p(raw) - ref_mean[topic]) / ref_std[topic];
}

TopicVocabulary build_vocabulary(const std::vector<PaperRecord>& records, std::size_t top_k,
                                 std::size_t sample_n, std::uint64_t seed) {
    if (sample_n < 1 || top_k < sample_n) {
        throw ConfigError("build_vocabulary: need top_k >= sample_n >= 1, got top_k=" +
                          std::to_string(top_k) + " sample_n=" + std::to_string(sample_n));
    }
    // ordered map gives deterministic tie handling before the explicit sort
    std::map<std::string, std::size_t> counts;
    for (const PaperRecord& r : records) {
        for (const std::string& t : r.topics) ++counts[t];
    }
    if (counts.size() < sample_n) {
        throw DatasetTooSmallError("build_vocabulary: corpus has " +
                                   std::to_string(counts.size()) + " distinct topics, need " +
                                   std::to_string(sample_n));
    }

    std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > top_k) ranked.resize(top_k);

    // partial Fisher-Yates over the top_k pool
    Rng rng = Rng(seed).child("vocab-sample");
    std::vector<std::size_t> order(ranked.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = 0; i < sample_n; ++i) {
        const std::size_t j = i + rng.uniform_below(order.size() - i);
        std::swap(order[i], order[j]);
    }
    std::vector<std::size_t> picked(order.begin(), order.begin() + sample_n);
    std::sort(picked.begin(), picked.end());  // ranked[] is already (count desc, lex)

    std::vector<std::string> topics;
    topics.reserve(sample_n);
    for (std::size_t i : picked) topics.push_back(ranked[i].first);
    return TopicVocabulary::from_topics(std::move(topics));
}

namespace {

std::vector<std::size_t> vocab_topic_ids(const PaperRecord& r, const TopicVocabulary& vocab) {
    std::vector<std::size_t> ids;
    for (const std::string& t : r.topics) {
        auto it = vocab.index.find(t);
        if (it != vocab.index.end()) ids.push_back(it->second);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

}  // namespace

SnapshotSequence build_snapshots(const std::vector<PaperRecord>& records,
                                 const TopicVocabulary& vocab, int year_start, int year_end,
                                 int w, const BuildOptions& opts, BuildReport* report) {
    if (w < 1) throw ConfigError("build_snapshots: w must be >= 1");
    if (year_start + w - 1 > year_end) {
        throw DatasetTooSmallError("build_snapshots: no snapshot years in [" +
                                   std::to_string(year_start) + ", " +
                                   std::to_string(year_end) + "] with w=" + std::to_string(w));
    }
    BuildReport local_report;
    BuildReport& rep = report ? *report : local_report;

    const std::size_t n_topics = vocab.size();
    const std::size_t n_years = static_cast<std::size_t>(year_end - year_start + 1);

    std::unordered_map<std::string, const PaperRecord*> by_id;
    by_id.reserve(records.size() * 2);
    std::vector<const PaperRecord*> in_range;
    in_range.reserve(records.size());
    for (const PaperRecord& r : records) {
        if (r.year < year_start || r.year > year_end) {
            ++rep.records_out_of_range;
            continue;
        }
        in_range.push_back(&r);
        if (!by_id.emplace(r.id, &r).second) {
            throw InputError("build_snapshots: duplicate paper id '" + r.id + "'");
        }
    }

    // per-topic yearly paper counts over the full year range
    std::vector<std::vector<long long>> counts(n_topics,
                                               std::vector<long long>(n_years, 0));
    for (const PaperRecord* r : in_range) {
        const auto ids = vocab_topic_ids(*r, vocab);
        if (ids.empty()) {
            ++rep.records_without_vocab_topics;
            continue;
        }
        const std::size_t yi = static_cast<std::size_t>(r->year - year_start);
        for (std::size_t n : ids) ++counts[n][yi];
    }

    // per-year citation matrices: a paper with k topics contributes one unit
    // to every (citing topic, cited topic) pair
    std::vector<Tensor> yearly_adj(n_years);
    for (auto& a : yearly_adj) a = Tensor(n_topics, n_topics);
    for (const PaperRecord* r : in_range) {
        const auto citing = vocab_topic_ids(*r, vocab);
        const std::size_t yi = static_cast<std::size_t>(r->year - year_start);
        for (const std::string& ref : r->references) {
            auto it = by_id.find(ref);
            if (it == by_id.end()) {
                ++rep.dangling_references;
                continue;
            }
            if (citing.empty()) continue;
            const auto cited = vocab_topic_ids(*it->second, vocab);
            for (std::size_t u : citing)
                for (std::size_t v : cited) yearly_adj[yi].at(u, v) += 1.0;
        }
    }

    SnapshotSequence seq;
    seq.vocab = vocab;
    seq.w = w;
    Tensor cumulative(n_topics, n_topics);
    for (int year = year_start; year <= year_end; ++year) {
        const std::size_t yi = static_cast<std::size_t>(year - year_start);
        if (opts.cumulative_adjacency) {
            for (std::size_t i = 0; i < cumulative.data.size(); ++i)
                cumulative.data[i] += yearly_adj[yi].data[i];
        }
        if (year < year_start + w - 1) continue;

        GraphSnapshot snap;
        snap.year = year;
        snap.adjacency = opts.cumulative_adjacency ? cumulative : yearly_adj[yi];
        snap.features = Tensor(n_topics, static_cast<std::size_t>(w));
        snap.targets.resize(n_topics);
        for (std::size_t n = 0; n < n_topics; ++n) {
            snap.targets[n] = counts[n][yi];
            for (int j = 0; j < w; ++j) {
                snap.features.at(n, static_cast<std::size_t>(j)) =
                    static_cast<double>(counts[n][yi - static_cast<std::size_t>(w - 1 - j)]);
            }
        }
        seq.snapshots.push_back(std::move(snap));
    }
    return seq;
}

NormStats fit_norm_stats(const SnapshotSequence& seq, std::size_t train_end_index) {
    if (train_end_index < 1) {
        throw ConfigError("fit_norm_stats: train_end_index must be >= 1");
    }
    if (train_end_index > seq.size()) {
        throw ConfigError("fit_norm_stats: train_end_index " +
                          std::to_string(train_end_index) + " exceeds sequence length " +
                          std::to_string(seq.size()));
    }
    const std::size_t n_topics = seq.topic_count();
    const double m = static_cast<double>(train_end_index);

    NormStats stats;
    stats.count_mean.assign(n_topics, 0.0);
    stats.count_std.assign(n_topics, 0.0);
    stats.ref_mean.assign(n_topics, 0.0);
    stats.ref_std.assign(n_topics, 0.0);

    std::vector<double> ref_val(train_end_index);
    for (std::size_t n = 0; n < n_topics; ++n) {
        double mean = 0.0;
        for (std::size_t t = 0; t < train_end_index; ++t)
            mean += std::log1p(static_cast<double>(seq.snapshots[t].targets[n]));
        mean /= m;
        double var = 0.0;
        for (std::size_t t = 0; t < train_end_index; ++t) {
            const double d =
                std::log1p(static_cast<double>(seq.snapshots[t].targets[n])) - mean;
            var += d * d;
        }
        stats.count_mean[n] = mean;
        stats.count_std[n] = std::max(std::sqrt(var / m), 1e-8);

        for (std::size_t t = 0; t < train_end_index; ++t) {
            const Tensor& a = seq.snapshots[t].adjacency;
            double row = 0.0;
            for (std::size_t j = 0; j < a.cols; ++j) row += a.at(n, j);
            ref_val[t] = std::log1p(row);
        }
        double rmean = 0.0;
        for (double v : ref_val) rmean += v;
        rmean /= m;
        double rvar = 0.0;
        for (double v : ref_val) rvar += (v - rmean) * (v - rmean);
        stats.ref_mean[n] = rmean;
        stats.ref_std[n] = std::max(std::sqrt(rvar / m), 1e-8);
    }
    return stats;
}

std::vector<Window> make_windows(const SnapshotSequence& seq, std::size_t T) {
    if (T < 1) throw ConfigError("make_windows: T must be >= 1");
    if (seq.size() < T + 1) {
        throw DatasetTooSmallError("make_windows: need at least " + std::to_string(T + 1) +
                                   " snapshots for T=" + std::to_string(T) + ", have " +
                                   std::to_string(seq.size()));
    }
    std::vector<Window> windows(seq.size() - T);
    for (std::size_t i = 0; i < windows.size(); ++i) windows[i].start = i;
    return windows;
}

WindowSplits split_windows(const std::vector<Window>& windows, const SplitRatios& ratios) {
    for (double r : {ratios.train, ratios.val, ratios.test}) {
        if (!(r > 0.0 && r <= 1.0)) {
            throw ConfigError("split_windows: ratios must each be in (0, 1]");
        }
    }
    if (ratios.train + ratios.val + ratios.test > 1.0 + 1e-12) {
        throw ConfigError("split_windows: ratios sum above 1");
    }
    const double n = static_cast<double>(windows.size());
    const std::size_t n_train = static_cast<std::size_t>(std::floor(ratios.train * n));
    const std::size_t n_val = static_cast<std::size_t>(std::floor(ratios.val * n));
    const std::size_t n_test = static_cast<std::size_t>(std::floor(ratios.test * n));
    if (n_train == 0 || n_val == 0 || n_test == 0) {
        throw DatasetTooSmallError("split_windows: split too small (" + std::to_string(n_train) +
                                   "/" + std::to_string(n_val) + "/" + std::to_string(n_test) +
                                   " of " + std::to_string(windows.size()) + " windows)");
    }
    WindowSplits splits;
    splits.train.assign(windows.begin(), windows.begin() + n_train);
    splits.val.assign(windows.begin() + n_train, windows.begin() + n_train + n_val);
    splits.test.assign(windows.begin() + n_train + n_val,
                       windows.begin() + n_train + n_val + n_test);
    return splits;
}

}  // namespace sdtgcn
