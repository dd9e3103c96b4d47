#include "serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "errors.hpp"
#include "json.hpp"

namespace sdtgcn {

using nlohmann::json;

namespace {

json parse_or_throw(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw InputError(what + ": invalid JSON");
    return j;
}

std::vector<std::string> dedup_strings(const json& arr) {
    std::vector<std::string> out;
    for (const auto& v : arr) {
        const std::string s = v.get<std::string>();
        bool seen = false;
        for (const std::string& t : out) {
            if (t == s) {
                seen = true;
                break;
            }
        }
        if (!seen) out.push_back(s);
    }
    return out;
}

}  // namespace

std::vector<PaperRecord> read_records_jsonl(std::istream& in) {
    std::vector<PaperRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw InputError("line " + std::to_string(line_no) + ": invalid JSON record");
        }
        PaperRecord r;
        try {
            r.id = j.at("id").get<std::string>();
            r.year = j.at("year").get<int>();
            if (!j.at("topics").is_array() || j.at("topics").empty()) {
                throw InputError("topics must be a non-empty array");
            }
            r.topics = dedup_strings(j.at("topics"));
            if (j.contains("references")) {
                if (!j.at("references").is_array()) {
                    throw InputError("references must be an array");
                }
                r.references = dedup_strings(j.at("references"));
            }
        } catch (const json::exception& e) {
            throw InputError("line " + std::to_string(line_no) + ": " + e.what());
        } catch (const InputError& e) {
            throw InputError("line " + std::to_string(line_no) + ": " + e.what());
        }
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<PaperRecord> read_records_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open records file '" + path + "'");
    return read_records_jsonl(in);
}

std::string bundle_to_json(const SnapshotSequence& seq) {
    json j;
    j["vocab"] = seq.vocab.topics;
    j["w"] = seq.w;
    std::vector<int> years;
    years.reserve(seq.size());
    for (const GraphSnapshot& s : seq.snapshots) years.push_back(s.year);
    j["years"] = years;
    json snaps = json::array();
    for (const GraphSnapshot& s : seq.snapshots) {
        json snap;
        snap["year"] = s.year;
        json a = json::array();
        for (std::size_t i = 0; i < s.adjacency.rows; ++i) {
            json row = json::array();
            for (std::size_t k = 0; k < s.adjacency.cols; ++k) {
                row.push_back(static_cast<long long>(s.adjacency.at(i, k)));
            }
            a.push_back(std::move(row));
        }
        snap["A"] = std::move(a);
        json x = json::array();
        for (std::size_t i = 0; i < s.features.rows; ++i) {
            json row = json::array();
            for (std::size_t k = 0; k < s.features.cols; ++k) {
                row.push_back(s.features.at(i, k));
            }
            x.push_back(std::move(row));
        }
        snap["X"] = std::move(x);
        snap["Y"] = s.targets;
        snaps.push_back(std::move(snap));
    }
    j["snapshots"] = std::move(snaps);
    return j.dump();
}

SnapshotSequence bundle_from_json(const std::string& text) {
    json j = parse_or_throw(text, "bundle");
    SnapshotSequence seq;
    try {
        seq.vocab = TopicVocabulary::from_topics(
            j.at("vocab").get<std::vector<std::string>>());
        seq.w = j.at("w").get<int>();
        const std::size_t n = seq.vocab.size();
        for (const json& snap : j.at("snapshots")) {
            GraphSnapshot s;
            s.year = snap.at("year").get<int>();
            const json& a = snap.at("A");
            s.adjacency = Tensor(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t k = 0; k < n; ++k)
                    s.adjacency.at(i, k) = a.at(i).at(k).get<double>();
            const json& x = snap.at("X");
            s.features = Tensor(n, static_cast<std::size_t>(seq.w));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t k = 0; k < static_cast<std::size_t>(seq.w); ++k)
                    s.features.at(i, k) = x.at(i).at(k).get<double>();
            s.targets = snap.at("Y").get<std::vector<long long>>();
            if (s.targets.size() != n) throw InputError("bundle: Y length mismatch");
            seq.snapshots.push_back(std::move(s));
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("bundle: ") + e.what());
    }
    for (std::size_t i = 1; i < seq.size(); ++i) {
        if (seq.snapshots[i].year != seq.snapshots[i - 1].year + 1) {
            throw InputError("bundle: snapshot years must be consecutive");
        }
    }
    return seq;
}

void write_bundle_file(const SnapshotSequence& seq, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write bundle file '" + path + "'");
    out << bundle_to_json(seq) << "\n";
}

SnapshotSequence read_bundle_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open bundle file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return bundle_from_json(ss.str());
}

namespace {

json stats_to_json(const NormStats& stats) {
    json j;
    j["count_mean"] = stats.count_mean;
    j["count_std"] = stats.count_std;
    j["ref_mean"] = stats.ref_mean;
    j["ref_std"] = stats.ref_std;
    return j;
}

NormStats stats_from_json(const json& j) {
    NormStats stats;
    stats.count_mean = j.at("count_mean").get<std::vector<double>>();
    stats.count_std = j.at("count_std").get<std::vector<double>>();
    stats.ref_mean = j.at("ref_mean").get<std::vector<double>>();
    stats.ref_std = j.at("ref_std").get<std::vector<double>>();
    return stats;
}

}  // namespace

std::string checkpoint_to_json(SdtgcnModel& model) {
    const ModelConfig& cfg = model.config();
    json j;
    j["version"] = 1;
    json c;
    c["model"] = model_kind_name(cfg.kind);
    c["n_topics"] = cfg.n_topics;
    c["T"] = cfg.T;
    c["w"] = cfg.w;
    c["hidden"] = cfg.hidden;
    c["kernel"] = cfg.kernel;
    c["dropout"] = cfg.dropout;
    j["config"] = std::move(c);
    j["norm_stats"] = stats_to_json(model.stats());
    json params = json::array();
    for (Parameter* p : model.parameters()) {
        json pj;
        pj["name"] = p->name;
        pj["shape"] = std::vector<std::size_t>{p->value.rows, p->value.cols};
        pj["data"] = p->value.data;
        params.push_back(std::move(pj));
    }
    j["params"] = std::move(params);
    return j.dump();
}

SdtgcnModel model_from_checkpoint_json(const std::string& text) {
    json j = parse_or_throw(text, "checkpoint");
    try {
        const json& c = j.at("config");
        ModelConfig cfg;
        cfg.kind = model_kind_from_name(c.at("model").get<std::string>());
        cfg.n_topics = c.at("n_topics").get<std::size_t>();
        cfg.T = c.at("T").get<std::size_t>();
        cfg.w = c.at("w").get<int>();
        cfg.hidden = c.at("hidden").get<std::size_t>();
        cfg.kernel = c.at("kernel").get<std::size_t>();
        cfg.dropout = c.at("dropout").get<double>();
        SdtgcnModel model(cfg, stats_from_json(j.at("norm_stats")), Rng(0));

        std::vector<Parameter*> params = model.parameters();
        const json& pj = j.at("params");
        if (pj.size() != params.size()) {
            throw InputError("checkpoint: expected " + std::to_string(params.size()) +
                             " parameters, found " + std::to_string(pj.size()));
        }
        for (std::size_t i = 0; i < params.size(); ++i) {
            const json& p = pj.at(i);
            if (p.at("name").get<std::string>() != params[i]->name) {
                throw InputError("checkpoint: parameter order mismatch at '" +
                                 params[i]->name + "'");
            }
            const auto shape = p.at("shape").get<std::vector<std::size_t>>();
            if (shape.size() != 2 || shape[0] != params[i]->value.rows ||
                shape[1] != params[i]->value.cols) {
                throw InputError("checkpoint: shape mismatch for '" + params[i]->name + "'");
            }
            params[i]->value.data = p.at("data").get<std::vector<double>>();
            if (params[i]->value.data.size() != shape[0] * shape[1]) {
                throw InputError("checkpoint: data length mismatch for '" +
                                 params[i]->name + "'");
            }
        }
        return model;
    } catch (const json::exception& e) {
        throw InputError(std::string("checkpoint: ") + e.what());
    }
}

void write_checkpoint_file(SdtgcnModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write checkpoint file '" + path + "'");
    out << checkpoint_to_json(model) << "\n";
}

SdtgcnModel read_checkpoint_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open checkpoint file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return model_from_checkpoint_json(ss.str());
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_history_csv(const std::string& path, const std::vector<EpochRecord>& history,
                       bool include_timings) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write history file '" + path + "'");
    out << "epoch,train_loss,val_loss,lr,elapsed_ms\n";
    for (const EpochRecord& r : history) {
        out << r.epoch << "," << format_double(r.train_loss) << ","
            << format_double(r.val_loss) << "," << format_double(r.lr) << ","
            << (include_timings ? r.elapsed_ms : 0) << "\n";
    }
}

void append_results_csv(const std::string& path, const std::string& model, std::size_t T,
                        const std::string& seed, const EvalReport& report) {
    const bool exists = static_cast<bool>(std::ifstream(path));
    std::ofstream out(path, std::ios::app);
    if (!out) throw InputError("cannot write results file '" + path + "'");
    if (!exists) out << "model,T,seed,space,mae,mse,var\n";
    out << model << "," << T << "," << seed << "," << report.space << ","
        << format_double(report.mae) << "," << format_double(report.mse) << ","
        << format_double(report.var) << "\n";
}

}  // namespace sdtgcn
