#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "perfsum/ingest.hpp"
#include "perfsum/summarize.hpp"
#include "perfsum/spaces.hpp"

namespace perfsum {

enum class OutputFormat : std::uint8_t { csv, json, tsv_plot };

// Everything one run needs; built by the CLI, consumed by the cmd_ functions.
struct RunConfig {
    std::filesystem::path input;
    RecordFormat input_format = RecordFormat::counts_csv;

    WeightScheme::Kind weight_kind = WeightScheme::Kind::uniform;
    // Explicit weights file ("video,weight" CSV) for Kind::explicit_weights.
    std::optional<std::filesystem::path> weight_file;

    std::vector<IndicatorSpec> indicators;
    bool run_ours = true;
    bool run_legacy = true;
    UndefinedPolicy undefined_policy = UndefinedPolicy::skip;

    std::filesystem::path out_dir;
    std::set<OutputFormat> formats = {OutputFormat::csv};

    // Tolerance for check_consistency warnings on ROC rows.
    double consistency_tolerance = 1e-6;

    // Throws ConfigError when no procedure or no indicator is requested.
    void validate() const;
};

// Per-procedure results of one algorithm; `values` aligns with the report's
// indicator list. The confusion is present for the summarization procedure
// only, the legacy means have no coherent confusion behind them.
struct ProcedureValues {
    std::optional<NormalizedConfusion> confusion;
    std::vector<IndicatorValue> values;
    // ROC / PR coordinates used by the plot outputs.
    IndicatorValue fpr, tpr, ppv;
};

struct ComparisonRow {
    std::string algorithm;
    std::optional<ProcedureValues> ours;
    std::optional<ProcedureValues> legacy;
};

struct ComparisonReport {
    std::vector<IndicatorSpec> indicators;
    std::vector<ComparisonRow> rows; // input (first appearance) order
    std::string weight_scheme;
    std::string source_digest; // 16 hex digits over the ingested records
};

// Runs both summarization procedures per algorithm and writes the requested
// output files into config.out_dir. Returns the in-memory report.
ComparisonReport cmd_summarize(const RunConfig& config);

struct RankRow {
    std::string algorithm;
    IndicatorValue ours_value;
    int ours_rank = 0; // 0 when the procedure was not run
    IndicatorValue legacy_value;
    int legacy_rank = 0;
    std::optional<bool> discordant; // set only when both procedures ran
};

// Ranks the algorithms under each requested procedure for one indicator and
// writes ranks.csv / ranks.json. Requires at least two algorithms.
std::vector<RankRow> cmd_rank(const RunConfig& config, const IndicatorSpec& indicator);

enum class ConvertDirection : std::uint8_t { roc_to_pr, pr_to_roc };

// Thin wrapper over the space conversions; returns the one-line result
// ("<x> <y>" in the target space's coordinate order, NA for an undefined
// point).
std::string cmd_convert(ConvertDirection direction, double x, double y, double prior_pos);

// Counts outcomes for every entry of the manifest and writes one counts CSV
// row per (algorithm, video), size column filled with the non-ignored pixel
// totals.
void cmd_ingest_masks(const std::filesystem::path& manifest_path,
                      const std::filesystem::path& out_csv);

} // namespace perfsum
