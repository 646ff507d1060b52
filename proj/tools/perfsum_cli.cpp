// perfsum: summarize two-class performance indicators across evaluation
// sources, compare against the hierarchical-mean baseline, convert between
// ROC and PR spaces, and count outcomes from segmentation masks.

#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "perfsum/errors.hpp"
#include "perfsum/report.hpp"

namespace {

using namespace perfsum;

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ','))
        if (!item.empty()) items.push_back(item);
    return items;
}

RecordFormat parse_input_format(const std::string& text) {
    if (text == "counts") return RecordFormat::counts_csv;
    if (text == "roc") return RecordFormat::roc_csv;
    if (text == "json") return RecordFormat::json;
    throw ConfigError("unknown input format '" + text + "' (expected counts, roc, or json)");
}

void parse_weights(const std::string& text, RunConfig& config) {
    if (text == "uniform") {
        config.weight_kind = WeightScheme::Kind::uniform;
    } else if (text == "size") {
        config.weight_kind = WeightScheme::Kind::size_proportional;
    } else if (text == "hierarchical") {
        config.weight_kind = WeightScheme::Kind::category_hierarchical;
    } else if (text.rfind("file:", 0) == 0) {
        config.weight_kind = WeightScheme::Kind::explicit_weights;
        config.weight_file = text.substr(5);
        if (config.weight_file->empty()) throw ConfigError("empty weight file path");
    } else {
        throw ConfigError("unknown weight scheme '" + text +
                          "' (expected uniform, size, hierarchical, or file:<path>)");
    }
}

void parse_indicators(const std::string& text, RunConfig& config) {
    config.indicators.clear();
    for (const std::string& item : split_list(text)) {
        IndicatorSpec spec = IndicatorSpec::parse(item);
        if (std::find(config.indicators.begin(), config.indicators.end(), spec) ==
            config.indicators.end())
            config.indicators.push_back(spec);
    }
}

void parse_procedures(const std::string& text, RunConfig& config) {
    config.run_ours = false;
    config.run_legacy = false;
    for (const std::string& item : split_list(text)) {
        if (item == "ours") config.run_ours = true;
        else if (item == "legacy") config.run_legacy = true;
        else throw ConfigError("unknown procedure '" + item + "' (expected ours or legacy)");
    }
}

void parse_formats(const std::string& text, RunConfig& config) {
    config.formats.clear();
    for (const std::string& item : split_list(text)) {
        if (item == "csv") config.formats.insert(OutputFormat::csv);
        else if (item == "json") config.formats.insert(OutputFormat::json);
        else if (item == "tsv-plot") config.formats.insert(OutputFormat::tsv_plot);
        else throw ConfigError("unknown output format '" + item +
                               "' (expected csv, json, or tsv-plot)");
    }
}

UndefinedPolicy parse_policy(const std::string& text) {
    if (text == "error") return UndefinedPolicy::error;
    if (text == "skip") return UndefinedPolicy::skip;
    throw ConfigError("unknown undefined policy '" + text + "' (expected error or skip)");
}

struct CommonOptions {
    std::string input;
    std::string input_format = "counts";
    std::string weights = "uniform";
    std::string indicators = "F,TPR,FPR,PPV";
    std::string procedures = "ours,legacy";
    std::string policy = "skip";
    std::string out_dir;
    std::string formats = "csv";
    double consistency_tolerance = 1e-6;
};

void add_common_options(CLI::App& cmd, CommonOptions& options) {
    cmd.add_option("input", options.input, "Input record file")->required();
    cmd.add_option("--input-format", options.input_format,
                   "Input format: counts, roc, or json (default counts)");
    cmd.add_option("--weights", options.weights,
                   "Weight scheme: uniform|size|hierarchical|file:<path>");
    cmd.add_option("--procedures", options.procedures,
                   "Procedures to run, subset of ours,legacy");
    cmd.add_option("--undefined-policy", options.policy,
                   "Legacy handling of undefined per-video values: error|skip");
    cmd.add_option("--out", options.out_dir, "Output directory")->required();
    cmd.add_option("--format", options.formats,
                   "Output formats, subset of csv,json,tsv-plot");
    cmd.add_option("--consistency-tolerance", options.consistency_tolerance,
                   "Tolerance for redundant-field warnings on roc rows");
}

RunConfig build_config(const CommonOptions& options) {
    RunConfig config;
    config.input = options.input;
    config.input_format = parse_input_format(options.input_format);
    parse_weights(options.weights, config);
    parse_indicators(options.indicators, config);
    parse_procedures(options.procedures, config);
    config.undefined_policy = parse_policy(options.policy);
    config.out_dir = options.out_dir;
    parse_formats(options.formats, config);
    config.consistency_tolerance = options.consistency_tolerance;
    config.validate();
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Summarize two-class performance indicators across evaluation sources"};
    app.require_subcommand(1);

    CommonOptions summarize_options;
    CLI::App* summarize_cmd = app.add_subcommand(
        "summarize", "Summarize indicators per algorithm under both procedures");
    add_common_options(*summarize_cmd, summarize_options);
    summarize_cmd->add_option("--indicators", summarize_options.indicators,
                              "Indicators: names or set expressions like '{tp}|{fn,tp}'");

    CommonOptions rank_options;
    std::string rank_indicator = "F";
    CLI::App* rank_cmd =
        app.add_subcommand("rank", "Rank algorithms per procedure on one indicator");
    add_common_options(*rank_cmd, rank_options);
    rank_cmd->add_option("--indicator", rank_indicator, "Ranking indicator (default F)");

    std::string convert_direction;
    double convert_x = 0.0, convert_y = 0.0, convert_prior = 0.0;
    CLI::App* convert_cmd = app.add_subcommand(
        "convert", "Convert one point between ROC (fpr tpr) and PR (recall precision)");
    convert_cmd->add_option("direction", convert_direction, "roc2pr or pr2roc")->required();
    convert_cmd->add_option("x", convert_x, "First coordinate (fpr or recall)")->required();
    convert_cmd->add_option("y", convert_y, "Second coordinate (tpr or precision)")->required();
    convert_cmd->add_option("--prior", convert_prior, "Positive-class prior")->required();

    std::string masks_manifest;
    std::string masks_out;
    CLI::App* masks_cmd = app.add_subcommand(
        "ingest-masks", "Count outcomes from paired ground-truth/prediction graymaps");
    masks_cmd->add_option("manifest", masks_manifest, "JSON mask manifest")->required();
    masks_cmd->add_option("--out", masks_out, "Output directory for counts.csv")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    try {
        if (summarize_cmd->parsed()) {
            perfsum::cmd_summarize(build_config(summarize_options));
            std::cerr << "wrote summary files to " << summarize_options.out_dir << "\n";
            return 0;
        }
        if (rank_cmd->parsed()) {
            RunConfig config;
            IndicatorSpec indicator = indicators::f_score();
            try {
                config = build_config(rank_options);
                indicator = IndicatorSpec::parse(rank_indicator);
            } catch (const InvalidSpecError& e) {
                std::cerr << "error: " << e.what() << "\n";
                return 1;
            }
            perfsum::cmd_rank(config, indicator);
            std::cerr << "wrote rank files to " << rank_options.out_dir << "\n";
            return 0;
        }
        if (convert_cmd->parsed()) {
            ConvertDirection direction;
            if (convert_direction == "roc2pr") direction = ConvertDirection::roc_to_pr;
            else if (convert_direction == "pr2roc") direction = ConvertDirection::pr_to_roc;
            else throw ConfigError("unknown direction '" + convert_direction +
                                   "' (expected roc2pr or pr2roc)");
            std::cout << perfsum::cmd_convert(direction, convert_x, convert_y, convert_prior)
                      << "\n";
            return 0;
        }
        if (masks_cmd->parsed()) {
            perfsum::cmd_ingest_masks(masks_manifest,
                                      std::filesystem::path(masks_out) / "counts.csv");
            std::cerr << "wrote " << (std::filesystem::path(masks_out) / "counts.csv").string()
                      << "\n";
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const InvalidSpecError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const perfsum::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
