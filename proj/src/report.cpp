#include "perfsum/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>

#include <json.hpp>

#include "perfsum/errors.hpp"
#include "perfsum/format.hpp"

namespace perfsum {

namespace {

using nlohmann::json;

// Re-raises known error types with an "algorithm/video" prefix so CLI
// diagnostics always carry their context.
template <typename Fn>
auto with_context(const std::string& context, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const UndefinedIndicatorError& e) {
        throw UndefinedIndicatorError(context + ": " + e.what());
    } catch (const NoDefinedValuesError& e) {
        throw NoDefinedValuesError(context + ": " + e.what());
    } catch (const MissingIndicatorError& e) {
        throw MissingIndicatorError(context + ": " + e.what());
    } catch (const MissingSizeError& e) {
        throw MissingSizeError(context + ": " + e.what());
    } catch (const MissingCategoryError& e) {
        throw MissingCategoryError(context + ": " + e.what());
    } catch (const AllZeroWeightsError& e) {
        throw AllZeroWeightsError(context + ": " + e.what());
    } catch (const WeightError& e) {
        throw WeightError(context + ": " + e.what());
    } catch (const ZeroTotalError& e) {
        throw ZeroTotalError(context + ": " + e.what());
    } catch (const Error& e) {
        throw Error(context + ": " + e.what());
    } catch (const std::logic_error& e) {
        throw Error(context + ": " + e.what());
    }
}

std::uint64_t fnv1a_mix(std::uint64_t hash, std::string_view text) {
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    hash ^= 0x1eu; // field separator
    hash *= 1099511628211ull;
    return hash;
}

std::string source_digest(std::span<const EvaluationRecord> records) {
    std::uint64_t hash = 1469598103934665603ull;
    for (const EvaluationRecord& rec : records) {
        hash = fnv1a_mix(hash, rec.algorithm);
        hash = fnv1a_mix(hash, rec.category);
        hash = fnv1a_mix(hash, rec.video_id);
        if (rec.has_counts()) {
            const ConfusionCounts& c = rec.counts();
            for (std::uint64_t v : {c.tn, c.fp, c.fn, c.tp})
                hash = fnv1a_mix(hash, std::to_string(v));
        } else {
            const RocIndicatorRow& row = rec.roc();
            hash = fnv1a_mix(hash, format_real(row.prior_pos));
            hash = fnv1a_mix(hash, format_indicator(row.fpr));
            hash = fnv1a_mix(hash, format_indicator(row.tpr));
            hash = fnv1a_mix(hash, row.tau_pos ? format_real(*row.tau_pos) : "");
            hash = fnv1a_mix(hash, row.ppv ? format_real(*row.ppv) : "");
        }
        hash = fnv1a_mix(hash, rec.size ? std::to_string(*rec.size) : "");
    }
    std::string out(16, '0');
    static const char* digits = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[hash & 0xf];
        hash >>= 4;
    }
    return out;
}

std::map<std::string, double> read_weight_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open weight file '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("weight file '" + path.string() + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "video,weight")
        throw SchemaError("bad weight file header '" + line + "', expected 'video,weight'");

    std::map<std::string, double> weights;
    double sum = 0.0;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
            throw ParseError(line_no, "expected 2 fields");
        const std::string video = line.substr(0, comma);
        const std::string text = line.substr(comma + 1);
        if (video.empty()) throw ParseError(line_no, "empty video field");
        double w = 0.0;
        auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), w);
        if (ec != std::errc{} || end != text.data() + text.size())
            throw ParseError(line_no, "weight is not a number: '" + text + "'");
        if (std::isnan(w) || w < 0.0)
            throw DomainError(line_no, "weight must be non-negative: " + text);
        if (!weights.emplace(video, w).second)
            throw ParseError(line_no, "duplicate weight for video '" + video + "'");
        sum += w;
    }
    if (weights.empty()) throw SchemaError("weight file '" + path.string() + "' has no rows");
    if (std::abs(sum - 1.0) > 1e-9)
        std::cerr << "note: explicit weights sum to " << format_real(sum)
                  << "; normalizing\n";
    return weights;
}

WeightScheme scheme_for(const RunConfig& config) {
    switch (config.weight_kind) {
    case WeightScheme::Kind::uniform: return WeightScheme::uniform();
    case WeightScheme::Kind::size_proportional: return WeightScheme::size_proportional();
    case WeightScheme::Kind::category_hierarchical:
        return WeightScheme::category_hierarchical();
    case WeightScheme::Kind::explicit_weights:
        if (!config.weight_file)
            throw ConfigError("explicit weights need a weight file");
        return WeightScheme::explicit_weights(read_weight_file(*config.weight_file));
    }
    throw std::logic_error("unhandled weight scheme kind");
}

struct LoadedData {
    std::vector<std::string> algorithm_order;
    std::map<std::string, SourceSet> sets;
    std::string digest;
};

LoadedData load_and_group(const RunConfig& config) {
    const std::vector<EvaluationRecord> records =
        read_records(config.input, config.input_format);
    if (records.empty()) throw Error("input '" + config.input.string() + "' holds no records");

    LoadedData data;
    data.digest = source_digest(records);

    std::map<std::string, std::vector<SourceRecord>> grouped;
    for (const EvaluationRecord& rec : records) {
        if (!rec.has_counts()) {
            for (const ConsistencyViolation& v :
                 check_consistency(rec.roc(), config.consistency_tolerance))
                std::cerr << "warning: line " << rec.line << " (algorithm '" << rec.algorithm
                          << "', video '" << rec.video_id << "'): " << v.field << " is "
                          << format_real(v.actual) << " but prior/fpr/tpr imply "
                          << format_real(v.expected) << "\n";
        }
        const std::string context =
            "algorithm '" + rec.algorithm + "', video '" + rec.video_id + "'";
        SourceRecord source{rec.video_id, rec.category, record_size(rec),
                            with_context(context, [&] { return record_confusion(rec); })};
        auto [it, inserted] = grouped.emplace(rec.algorithm, std::vector<SourceRecord>{});
        if (inserted) data.algorithm_order.push_back(rec.algorithm);
        it->second.push_back(std::move(source));
    }
    for (const std::string& algorithm : data.algorithm_order) {
        data.sets.emplace(algorithm,
                          with_context("algorithm '" + algorithm + "'", [&] {
                              return SourceSet(std::move(grouped.at(algorithm)));
                          }));
    }
    return data;
}

ProcedureValues ours_values(const std::string& algorithm, const SourceSet& set,
                            const WeightScheme& scheme,
                            std::span<const IndicatorSpec> indicators) {
    return with_context("algorithm '" + algorithm + "'", [&] {
        std::vector<IndicatorSpec> cache_specs(indicators.begin(), indicators.end());
        cache_specs.push_back(indicators::fpr());
        cache_specs.push_back(indicators::tpr());
        cache_specs.push_back(indicators::ppv());
        const Summary summary =
            summarize(set, make_weights(set, scheme), cache_specs);
        ProcedureValues out;
        out.confusion = summary.confusion();
        for (const IndicatorSpec& spec : indicators) out.values.push_back(summary.indicator(spec));
        out.fpr = summary.indicator(indicators::fpr());
        out.tpr = summary.indicator(indicators::tpr());
        out.ppv = summary.indicator(indicators::ppv());
        return out;
    });
}

ProcedureValues legacy_values(const std::string& algorithm, const SourceSet& set,
                              std::span<const IndicatorSpec> indicators,
                              UndefinedPolicy policy, bool with_plot_points) {
    return with_context("algorithm '" + algorithm + "'", [&] {
        ProcedureValues out;
        for (const IndicatorSpec& spec : indicators)
            out.values.push_back(summarize_legacy_mean(set, spec, policy));
        if (with_plot_points) {
            out.fpr = summarize_legacy_mean(set, indicators::fpr(), policy);
            out.tpr = summarize_legacy_mean(set, indicators::tpr(), policy);
            out.ppv = summarize_legacy_mean(set, indicators::ppv(), policy);
        }
        return out;
    });
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

std::string csv_value(const IndicatorValue& v) { return format_indicator(v); }

void write_summary_csv(const ComparisonReport& report, const std::filesystem::path& path) {
    std::string out = "algorithm,procedure,p_tn,p_fp,p_fn,p_tp";
    for (const IndicatorSpec& spec : report.indicators) out += ',' + spec.name();
    out += '\n';
    const auto row_for = [&](const std::string& algorithm, const char* procedure,
                             const ProcedureValues& values) {
        std::string row = algorithm;
        row += ',';
        row += procedure;
        if (values.confusion) {
            for (Outcome o : kAllOutcomes)
                row += ',' + format_real(values.confusion->probability(o));
        } else {
            row += ",NA,NA,NA,NA";
        }
        for (const IndicatorValue& v : values.values) row += ',' + csv_value(v);
        row += '\n';
        return row;
    };
    for (const ComparisonRow& row : report.rows) {
        if (row.ours) out += row_for(row.algorithm, "ours", *row.ours);
        if (row.legacy) out += row_for(row.algorithm, "legacy", *row.legacy);
    }
    write_text_file(path, out);
}

json indicator_json(const IndicatorValue& v) {
    return v.is_defined() ? json(v.value()) : json();
}

void write_summary_json(const ComparisonReport& report, const RunConfig& config,
                        const std::filesystem::path& path) {
    json doc;
    json metadata;
    metadata["weight_scheme"] = report.weight_scheme;
    metadata["source_digest"] = report.source_digest;
    json names = json::array();
    for (const IndicatorSpec& spec : report.indicators) names.push_back(spec.name());
    metadata["indicators"] = std::move(names);
    json procedures = json::array();
    if (config.run_ours) procedures.push_back("ours");
    if (config.run_legacy) procedures.push_back("legacy");
    metadata["procedures"] = std::move(procedures);
    doc["metadata"] = std::move(metadata);

    json algorithms = json::array();
    for (const ComparisonRow& row : report.rows) {
        json entry;
        entry["algorithm"] = row.algorithm;
        const auto procedure_json = [&](const ProcedureValues& values) {
            json p;
            if (values.confusion) {
                json confusion;
                confusion["p_tn"] = values.confusion->tn();
                confusion["p_fp"] = values.confusion->fp();
                confusion["p_fn"] = values.confusion->fn();
                confusion["p_tp"] = values.confusion->tp();
                p["confusion"] = std::move(confusion);
            }
            json values_json;
            for (std::size_t i = 0; i < report.indicators.size(); ++i)
                values_json[report.indicators[i].name()] = indicator_json(values.values[i]);
            p["indicators"] = std::move(values_json);
            return p;
        };
        if (row.ours) entry["ours"] = procedure_json(*row.ours);
        if (row.legacy) entry["legacy"] = procedure_json(*row.legacy);
        if (row.ours && row.legacy) {
            json diff;
            for (std::size_t i = 0; i < report.indicators.size(); ++i) {
                const IndicatorValue& a = row.ours->values[i];
                const IndicatorValue& b = row.legacy->values[i];
                diff[report.indicators[i].name()] =
                    a.is_defined() && b.is_defined() ? json(std::abs(a.value() - b.value()))
                                                     : json();
            }
            entry["abs_diff"] = std::move(diff);
        }
        algorithms.push_back(std::move(entry));
    }
    doc["algorithms"] = std::move(algorithms);
    write_text_file(path, doc.dump(2) + "\n");
}

void write_plot_file(const ComparisonReport& report, const std::filesystem::path& path,
                     bool roc_space, bool ours) {
    std::string out = "# space=";
    out += roc_space ? "roc" : "pr";
    out += "\tprocedure=";
    out += ours ? "ours" : "legacy";
    out += roc_space ? "\tx=fpr\ty=tpr\tx_log_hint=true" : "\tx=recall\ty=precision\tx_log_hint=false";
    out += "\nlabel\tx\ty\n";
    for (const ComparisonRow& row : report.rows) {
        const std::optional<ProcedureValues>& values = ours ? row.ours : row.legacy;
        if (!values) continue;
        const IndicatorValue& x = roc_space ? values->fpr : values->tpr;
        const IndicatorValue& y = roc_space ? values->tpr : values->ppv;
        if (!x.is_defined() || !y.is_defined()) continue; // nothing to plot
        out += row.algorithm + '\t' + format_real(x.value()) + '\t' + format_real(y.value()) +
               '\n';
    }
    write_text_file(path, out);
}

} // namespace

void RunConfig::validate() const {
    if (!run_ours && !run_legacy)
        throw ConfigError("at least one procedure (ours, legacy) must be selected");
    if (indicators.empty()) throw ConfigError("at least one indicator must be requested");
    if (formats.empty()) throw ConfigError("at least one output format must be selected");
    if (out_dir.empty()) throw ConfigError("an output directory is required");
}

ComparisonReport cmd_summarize(const RunConfig& config) {
    config.validate();
    const WeightScheme scheme = scheme_for(config);
    const LoadedData data = load_and_group(config);
    const bool want_plots = config.formats.count(OutputFormat::tsv_plot) > 0;

    ComparisonReport report;
    report.indicators = config.indicators;
    report.weight_scheme = std::string(scheme.name());
    report.source_digest = data.digest;
    for (const std::string& algorithm : data.algorithm_order) {
        const SourceSet& set = data.sets.at(algorithm);
        ComparisonRow row;
        row.algorithm = algorithm;
        if (config.run_ours)
            row.ours = ours_values(algorithm, set, scheme, config.indicators);
        if (config.run_legacy)
            row.legacy = legacy_values(algorithm, set, config.indicators,
                                       config.undefined_policy, want_plots);
        report.rows.push_back(std::move(row));
    }

    std::filesystem::create_directories(config.out_dir);
    if (config.formats.count(OutputFormat::csv))
        write_summary_csv(report, config.out_dir / "summary.csv");
    if (config.formats.count(OutputFormat::json))
        write_summary_json(report, config, config.out_dir / "summary.json");
    if (want_plots) {
        if (config.run_ours) {
            write_plot_file(report, config.out_dir / "roc_ours.tsv", true, true);
            write_plot_file(report, config.out_dir / "pr_ours.tsv", false, true);
        }
        if (config.run_legacy) {
            write_plot_file(report, config.out_dir / "roc_legacy.tsv", true, false);
            write_plot_file(report, config.out_dir / "pr_legacy.tsv", false, false);
        }
    }
    return report;
}

std::vector<RankRow> cmd_rank(const RunConfig& config, const IndicatorSpec& indicator) {
    config.validate();
    const WeightScheme scheme = scheme_for(config);
    const LoadedData data = load_and_group(config);
    if (data.algorithm_order.size() < 2)
        throw Error("ranking needs at least 2 algorithms, got " +
                    std::to_string(data.algorithm_order.size()));

    const std::vector<IndicatorSpec> wanted{indicator};
    std::map<std::string, IndicatorValue> ours_map;
    std::map<std::string, IndicatorValue> legacy_map;
    for (const std::string& algorithm : data.algorithm_order) {
        const SourceSet& set = data.sets.at(algorithm);
        if (config.run_ours)
            ours_map.emplace(algorithm,
                             ours_values(algorithm, set, scheme, wanted).values.front());
        if (config.run_legacy)
            legacy_map.emplace(algorithm,
                               legacy_values(algorithm, set, wanted,
                                             config.undefined_policy, false)
                                   .values.front());
    }

    std::map<std::string, RankRow> rows;
    for (const std::string& algorithm : data.algorithm_order)
        rows[algorithm].algorithm = algorithm;
    if (config.run_ours)
        for (const RankedEntry& entry : rank_algorithms(ours_map)) {
            rows[entry.algorithm].ours_value = entry.value;
            rows[entry.algorithm].ours_rank = entry.rank;
        }
    if (config.run_legacy)
        for (const RankedEntry& entry : rank_algorithms(legacy_map)) {
            rows[entry.algorithm].legacy_value = entry.value;
            rows[entry.algorithm].legacy_rank = entry.rank;
        }
    std::vector<RankRow> out;
    out.reserve(rows.size());
    for (auto& [algorithm, row] : rows) {
        if (config.run_ours && config.run_legacy)
            row.discordant = row.ours_rank != row.legacy_rank;
        out.push_back(std::move(row));
    }
    std::sort(out.begin(), out.end(), [&](const RankRow& a, const RankRow& b) {
        const int ra = config.run_ours ? a.ours_rank : a.legacy_rank;
        const int rb = config.run_ours ? b.ours_rank : b.legacy_rank;
        if (ra != rb) return ra < rb;
        return a.algorithm < b.algorithm;
    });

    std::filesystem::create_directories(config.out_dir);
    if (config.formats.count(OutputFormat::csv)) {
        std::string text =
            "indicator,algorithm,value_ours,rank_ours,value_legacy,rank_legacy,discordant\n";
        for (const RankRow& row : out) {
            text += indicator.name() + ',' + row.algorithm + ',';
            text += config.run_ours ? csv_value(row.ours_value) : "NA";
            text += ',';
            text += config.run_ours ? std::to_string(row.ours_rank) : "NA";
            text += ',';
            text += config.run_legacy ? csv_value(row.legacy_value) : "NA";
            text += ',';
            text += config.run_legacy ? std::to_string(row.legacy_rank) : "NA";
            text += ',';
            text += row.discordant ? (*row.discordant ? "true" : "false") : "NA";
            text += '\n';
        }
        write_text_file(config.out_dir / "ranks.csv", text);
    }
    if (config.formats.count(OutputFormat::json)) {
        json doc;
        doc["indicator"] = indicator.name();
        doc["source_digest"] = data.digest;
        doc["weight_scheme"] = std::string(scheme.name());
        json rows_json = json::array();
        for (const RankRow& row : out) {
            json r;
            r["algorithm"] = row.algorithm;
            if (config.run_ours) {
                r["value_ours"] = indicator_json(row.ours_value);
                r["rank_ours"] = row.ours_rank;
            }
            if (config.run_legacy) {
                r["value_legacy"] = indicator_json(row.legacy_value);
                r["rank_legacy"] = row.legacy_rank;
            }
            if (row.discordant) r["discordant"] = *row.discordant;
            rows_json.push_back(std::move(r));
        }
        doc["rows"] = std::move(rows_json);
        write_text_file(config.out_dir / "ranks.json", doc.dump(2) + "\n");
    }
    return out;
}

std::string cmd_convert(ConvertDirection direction, double x, double y, double prior_pos) {
    if (direction == ConvertDirection::roc_to_pr) {
        const std::optional<PrPoint> pr = roc_to_pr(RocPoint{x, y}, prior_pos);
        if (!pr) return "NA NA";
        return format_real(pr->recall) + ' ' + format_real(pr->precision);
    }
    const RocPoint roc = pr_to_roc(PrPoint{x, y}, prior_pos);
    return format_real(roc.fpr) + ' ' + format_real(roc.tpr);
}

namespace {

std::map<std::string, std::filesystem::path> list_graymaps(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw Error("'" + dir.string() + "' is not a directory");
    std::map<std::string, std::filesystem::path> frames;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string ext = entry.path().extension().string();
        if (ext != ".pgm" && ext != ".PGM") continue;
        const std::string stem = entry.path().stem().string();
        if (!frames.emplace(stem, entry.path()).second)
            throw Error("duplicate frame stem '" + stem + "' in '" + dir.string() + "'");
    }
    return frames;
}

std::string join_stems(const std::map<std::string, std::filesystem::path>& frames,
                       const std::map<std::string, std::filesystem::path>& other) {
    std::string out;
    std::size_t listed = 0;
    for (const auto& [stem, path] : frames) {
        if (other.count(stem)) continue;
        if (listed == 8) {
            out += ", ...";
            break;
        }
        if (listed) out += ", ";
        out += stem;
        ++listed;
    }
    return out;
}

} // namespace

void cmd_ingest_masks(const std::filesystem::path& manifest_path,
                      const std::filesystem::path& out_csv) {
    const std::vector<MaskManifestEntry> entries = read_mask_manifest(manifest_path);
    if (entries.empty()) throw Error("manifest '" + manifest_path.string() + "' has no entries");

    std::vector<EvaluationRecord> records;
    std::set<std::pair<std::string, std::string>> seen;
    int index = 0;
    for (const MaskManifestEntry& entry : entries) {
        ++index;
        const std::string context =
            "algorithm '" + entry.algorithm + "', video '" + entry.video_id + "'";
        with_context(context, [&] {
            if (!seen.emplace(entry.algorithm, entry.video_id).second)
                throw Error("duplicate manifest entry");
            const auto gt_frames = list_graymaps(entry.gt_dir);
            const auto pred_frames = list_graymaps(entry.pred_dir);
            if (gt_frames.empty() && pred_frames.empty())
                throw Error("no .pgm frames found under '" + entry.gt_dir.string() + "' and '" +
                            entry.pred_dir.string() + "'");
            const std::string gt_only = join_stems(gt_frames, pred_frames);
            const std::string pred_only = join_stems(pred_frames, gt_frames);
            if (!gt_only.empty() || !pred_only.empty()) {
                std::string message = "frame stems do not pair up";
                if (!gt_only.empty()) message += "; ground truth only: " + gt_only;
                if (!pred_only.empty()) message += "; prediction only: " + pred_only;
                throw Error(message);
            }

            ConfusionCounts counts;
            for (const auto& [stem, gt_path] : gt_frames) {
                const GrayImage gt = read_pgm(gt_path);
                const GrayImage pred = read_pgm(pred_frames.at(stem));
                try {
                    counts += count_from_masks(gt, pred, entry.mapping);
                } catch (const Error& e) {
                    throw Error("frame '" + stem + "': " + e.what());
                }
            }
            if (counts.total() == 0)
                throw Error("every pixel is ignored; no counts to report");

            EvaluationRecord rec;
            rec.algorithm = entry.algorithm;
            rec.category = entry.category;
            rec.video_id = entry.video_id;
            rec.payload = counts;
            rec.size = counts.total();
            rec.line = index;
            records.push_back(std::move(rec));
        });
    }
    if (out_csv.has_parent_path()) std::filesystem::create_directories(out_csv.parent_path());
    write_records(out_csv, records, RecordFormat::counts_csv);
}

} // namespace perfsum
