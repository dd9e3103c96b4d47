#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tensor.hpp"

namespace sdtgcn {

// One bibliographic entry. References may dangle (ids outside the corpus);
// the snapshot builder skips and counts them.
struct PaperRecord {
    std::string id;
    int year = 0;
    std::vector<std::string> topics;
    std::vector<std::string> references;
};

// Fixed global topic set. Node ids are positions in `topics`, which is
// ordered by (paper count desc, lexicographic) so ids are stable across runs.
struct TopicVocabulary {
    std::vector<std::string> topics;
    std::unordered_map<std::string, std::size_t> index;

    std::size_t size() const { return topics.size(); }
    static TopicVocabulary from_topics(std::vector<std::string> topics);
};

// One year's state of the topic graph.
//   adjacency[u][v] = citations from topic-u papers published this year to
//                     topic-v papers (non-negative integer counts)
//   features[n][j]  = paper count of topic n in year (year - w + 1 + j)
//   targets[n]      = paper count of topic n in this year
// features[:, w-1] always equals targets.
struct GraphSnapshot {
    int year = 0;
    Tensor adjacency;  // N x N
    Tensor features;   // N x w
    std::vector<long long> targets;
};

// Per-topic mean/std of log1p(count) over the training era, plus the same
// statistics for the citation row sums (REF). Stds are floored at 1e-8.
struct NormStats {
    std::vector<double> count_mean;
    std::vector<double> count_std;
    std::vector<double> ref_mean;
    std::vector<double> ref_std;

    double normalize_count(std::size_t topic, double raw) const;
    double denormalize_count(std::size_t topic, double normed) const;  // clamped at 0
    double normalize_ref(std::size_t topic, double raw) const;
};

struct SnapshotSequence {
    TopicVocabulary vocab;
    int w = 1;
    std::vector<GraphSnapshot> snapshots;  // consecutive years, no gaps
    std::optional<NormStats> norm;

    std::size_t topic_count() const { return vocab.size(); }
    std::size_t size() const { return snapshots.size(); }
};

struct BuildReport {
    std::size_t dangling_references = 0;
    std::size_t records_out_of_range = 0;
    std::size_t records_without_vocab_topics = 0;
};

struct BuildOptions {
    bool cumulative_adjacency = false;  // off by default: per-year edges
};

// Ranks topics by total paper count descending (ties lexicographic), keeps
// the top `top_k`, samples `sample_n` uniformly without replacement, and
// returns them re-ordered by (count desc, lexicographic).
TopicVocabulary build_vocabulary(const std::vector<PaperRecord>& records, std::size_t top_k,
                                 std::size_t sample_n, std::uint64_t seed);

// Materializes one snapshot per year in [start + w - 1, end].
SnapshotSequence build_snapshots(const std::vector<PaperRecord>& records,
                                 const TopicVocabulary& vocab, int year_start, int year_end,
                                 int w, const BuildOptions& opts = {},
                                 BuildReport* report = nullptr);

// Per-topic stats of log1p(count) over snapshots [0, train_end_index).
NormStats fit_norm_stats(const SnapshotSequence& seq, std::size_t train_end_index);

// Window i covers snapshots [start, start + T); its target is the Y vector at
// snapshot start + T.
struct Window {
    std::size_t start = 0;
};

std::vector<Window> make_windows(const SnapshotSequence& seq, std::size_t T);

struct SplitRatios {
    double train = 0.6;
    double val = 0.1;
    double test = 0.1;
};

struct WindowSplits {
    std::vector<Window> train;
    std::vector<Window> val;
    std::vector<Window> test;
};

// Chronological split: first floor(train*n) windows, then floor(val*n), then
// floor(test*n); the remainder is unused.
WindowSplits split_windows(const std::vector<Window>& windows, const SplitRatios& ratios);

}  // namespace sdtgcn
