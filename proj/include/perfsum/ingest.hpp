#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "perfsum/confusion.hpp"
#include "perfsum/indicator.hpp"
#include "perfsum/pgm.hpp"

namespace perfsum {

// ROC-style description of one source: the prior plus the two conditional
// rates, with optional redundant fields for consistency checking.
struct RocIndicatorRow {
    double prior_pos = 0.0;
    IndicatorValue fpr;
    IndicatorValue tpr;
    std::optional<double> tau_pos;
    std::optional<double> ppv;
};

// One ingested row: (algorithm, category, video) plus either raw counts or a
// ROC-style indicator row.
struct EvaluationRecord {
    std::string algorithm;
    std::string category;
    std::string video_id;
    std::variant<ConfusionCounts, RocIndicatorRow> payload;
    std::optional<std::uint64_t> size;
    int line = 0; // 1-based data row position, for diagnostics

    bool has_counts() const noexcept {
        return std::holds_alternative<ConfusionCounts>(payload);
    }
    const ConfusionCounts& counts() const { return std::get<ConfusionCounts>(payload); }
    const RocIndicatorRow& roc() const { return std::get<RocIndicatorRow>(payload); }
};

enum class RecordFormat : std::uint8_t { counts_csv, roc_csv, json };

// Loads per-video evaluation data. (algorithm, video) pairs must be unique.
// Errors: ParseError(line, reason), SchemaError (header mismatch),
// DomainError (value out of range).
std::vector<EvaluationRecord> read_records(const std::filesystem::path& path,
                                           RecordFormat format);

// Inverse of read_records for the same format; payload kinds must match the
// format (json accepts both).
void write_records(const std::filesystem::path& path, std::span<const EvaluationRecord> records,
                   RecordFormat format);

// Normalized confusion of a record: direct normalization for counts,
// reconstruction through the prior/fpr/tpr triple for ROC rows.
NormalizedConfusion record_confusion(const EvaluationRecord& record);

// Explicit size when present, total count for counts payloads, nullopt
// otherwise.
std::optional<std::uint64_t> record_size(const EvaluationRecord& record);

struct ConsistencyViolation {
    std::string field;   // "tau_pos" or "ppv"
    double expected = 0; // value implied by prior/fpr/tpr
    double actual = 0;   // value found in the row
};

// Verifies the optional redundant fields of a ROC row against the values the
// required fields imply. Reports, never throws; an empty result means ok.
std::vector<ConsistencyViolation> check_consistency(const RocIndicatorRow& row,
                                                    double tolerance);

// Classification of ground-truth gray levels and the prediction threshold.
struct LabelMapping {
    std::set<std::uint8_t> positive_values;
    std::set<std::uint8_t> negative_values;
    std::set<std::uint8_t> ignore_values;
    std::uint8_t prediction_threshold = 128;

    // Benchmark convention: 255 foreground, 0 background, 50 hard shadow
    // counted as background, 85 and 170 ignored.
    static LabelMapping defaults();

    // Throws std::invalid_argument when the three sets overlap.
    void validate() const;
};

// Counts pixel outcomes over a ground-truth / prediction pair. Pixels whose
// ground-truth value is ignored are excluded; a prediction is positive iff
// its value is >= the threshold. Errors: DimensionMismatchError,
// UnmappedLabelError.
ConfusionCounts count_from_masks(const GrayImage& gt_map, const GrayImage& pred_map,
                                 const LabelMapping& mapping);

// One video of a mask manifest: directories of paired ground-truth and
// prediction graymaps.
struct MaskManifestEntry {
    std::string algorithm;
    std::string video_id;
    std::string category;
    std::filesystem::path gt_dir;
    std::filesystem::path pred_dir;
    LabelMapping mapping = LabelMapping::defaults();
};

// Parses the JSON manifest (array of entries). Relative directories are
// resolved against the manifest location.
std::vector<MaskManifestEntry> read_mask_manifest(const std::filesystem::path& path);

} // namespace perfsum
