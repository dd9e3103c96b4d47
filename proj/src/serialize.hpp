#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "model.hpp"
#include "trainer.hpp"

namespace sdtgcn {

// JSON Lines corpus: one record per line,
//   {"id": str, "year": int, "topics": [str], "references": [str]}
// Unknown fields are ignored; malformed lines raise InputError naming the
// line number. Duplicate topics/references within a record are deduplicated.
std::vector<PaperRecord> read_records_jsonl(std::istream& in);
std::vector<PaperRecord> read_records_file(const std::string& path);

// Snapshot bundle, one JSON document:
//   {"vocab": [...], "years": [...], "w": int,
//    "snapshots": [{"year": int, "A": [[int]], "X": [[number]], "Y": [int]}]}
std::string bundle_to_json(const SnapshotSequence& seq);
SnapshotSequence bundle_from_json(const std::string& text);
void write_bundle_file(const SnapshotSequence& seq, const std::string& path);
SnapshotSequence read_bundle_file(const std::string& path);

// Parameter checkpoint:
//   {"version": 1, "params": [{"name", "shape", "data"}],
//    "config": {...}, "norm_stats": {...}}
// Values round-trip in full double precision.
std::string checkpoint_to_json(SdtgcnModel& model);
SdtgcnModel model_from_checkpoint_json(const std::string& text);
void write_checkpoint_file(SdtgcnModel& model, const std::string& path);
SdtgcnModel read_checkpoint_file(const std::string& path);

// Floats in CSV output carry 17 significant digits.
std::string format_double(double v);

// Training history CSV: epoch,train_loss,val_loss,lr,elapsed_ms. Timings are
// written as 0 unless include_timings is set, keeping the file byte-identical
// across reruns with the same seed.
void write_history_csv(const std::string& path, const std::vector<EpochRecord>& history,
                       bool include_timings);

// Results CSV row(s): model,T,seed,space,mae,mse,var. Creates the file with a
// header when missing, appends otherwise. The seed column carries "avg" for
// averaged rows.
void append_results_csv(const std::string& path, const std::string& model,
                        std::size_t T, const std::string& seed, const EvalReport& report);

}  // namespace sdtgcn
