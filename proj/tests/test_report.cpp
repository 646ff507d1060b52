#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "perfsum/errors.hpp"
#include "perfsum/format.hpp"
#include "perfsum/report.hpp"

using namespace perfsum;

namespace {

constexpr double kTol = 1e-12;

std::filesystem::path test_dir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    const std::filesystem::path dir = std::filesystem::path(::testing::TempDir()) /
                                      "perfsum_report" /
                                      (std::string(info->test_suite_name()) + "_" + info->name());
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::filesystem::path write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    EXPECT_TRUE(in.good()) << "missing file " << path;
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == sep) {
            fields.push_back(field);
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(field);
    return fields;
}

const char* kFixtureCsv =
    "algorithm,category,video,tn,fp,fn,tp\n"
    "algoX,cat,v1,50,10,20,20\n"
    "algoX,cat,v2,70,10,5,15\n";

RunConfig fixture_config(const std::filesystem::path& dir) {
    RunConfig config;
    config.input = write_file(dir / "input.csv", kFixtureCsv);
    config.input_format = RecordFormat::counts_csv;
    config.weight_kind = WeightScheme::Kind::uniform;
    config.indicators = {indicators::f_score(), indicators::tpr(), indicators::fpr(),
                         indicators::ppv()};
    config.out_dir = dir / "out";
    config.formats = {OutputFormat::csv, OutputFormat::json, OutputFormat::tsv_plot};
    return config;
}

int run_cli(const std::string& args, const std::filesystem::path& dir) {
    const std::string command = std::string(PERFSUM_CLI_PATH) + " " + args + " > " +
                                (dir / "stdout.txt").string() + " 2> " +
                                (dir / "stderr.txt").string();
    const int status = std::system(command.c_str());
    return WEXITSTATUS(status);
}

} // namespace

TEST(CmdSummarize, FixtureValuesForBothProcedures) {
    const auto dir = test_dir();
    const ComparisonReport report = cmd_summarize(fixture_config(dir));
    ASSERT_EQ(report.rows.size(), 1u);
    const ComparisonRow& row = report.rows[0];
    EXPECT_EQ(row.algorithm, "algoX");
    ASSERT_TRUE(row.ours && row.legacy);
    EXPECT_NEAR(row.ours->values[0].value(), 14.0 / 23.0, kTol);   // F, summarized
    EXPECT_NEAR(row.legacy->values[0].value(), 13.0 / 21.0, kTol); // F, nested means
    EXPECT_NEAR(row.ours->values[1].value(), 7.0 / 12.0, kTol);    // TPR
    ASSERT_TRUE(row.ours->confusion.has_value());
    EXPECT_NEAR(row.ours->confusion->tp(), 0.175, kTol);
    EXPECT_EQ(report.weight_scheme, "uniform");
    EXPECT_EQ(report.source_digest.size(), 16u);

    for (const char* name : {"summary.csv", "summary.json", "roc_ours.tsv", "pr_ours.tsv",
                             "roc_legacy.tsv", "pr_legacy.tsv"})
        EXPECT_TRUE(std::filesystem::exists(dir / "out" / name)) << name;
}

TEST(CmdSummarize, EmittedCsvIsCoherent) {
    const auto dir = test_dir();
    const RunConfig config = fixture_config(dir);
    cmd_summarize(config);

    std::istringstream csv(read_file(dir / "out" / "summary.csv"));
    std::string line;
    ASSERT_TRUE(std::getline(csv, line));
    EXPECT_EQ(line, "algorithm,procedure,p_tn,p_fp,p_fn,p_tp,F,TPR,FPR,PPV");
    bool seen_ours = false;
    while (std::getline(csv, line)) {
        const std::vector<std::string> fields = split(line, ',');
        ASSERT_EQ(fields.size(), 10u);
        if (fields[1] != "ours") continue;
        seen_ours = true;
        // Re-deriving every indicator from the emitted confusion must
        // reproduce the emitted values.
        const NormalizedConfusion nc(std::stod(fields[2]), std::stod(fields[3]),
                                     std::stod(fields[4]), std::stod(fields[5]));
        const std::vector<IndicatorSpec> specs = config.indicators;
        for (std::size_t i = 0; i < specs.size(); ++i) {
            const IndicatorValue expected = indicator_value(nc, specs[i]);
            const std::string& text = fields[6 + i];
            if (!expected.is_defined()) {
                EXPECT_EQ(text, "NA");
            } else {
                EXPECT_NEAR(std::stod(text), expected.value(), kTol);
            }
        }
    }
    EXPECT_TRUE(seen_ours);
}

TEST(CmdSummarize, PlotFilesCarryTheSummarizedPoints) {
    const auto dir = test_dir();
    cmd_summarize(fixture_config(dir));
    const std::string roc = read_file(dir / "out" / "roc_ours.tsv");
    std::istringstream stream(roc);
    std::string header_comment, header, data;
    ASSERT_TRUE(std::getline(stream, header_comment));
    EXPECT_NE(header_comment.find("space=roc"), std::string::npos);
    EXPECT_NE(header_comment.find("x_log_hint=true"), std::string::npos);
    ASSERT_TRUE(std::getline(stream, header));
    EXPECT_EQ(header, "label\tx\ty");
    ASSERT_TRUE(std::getline(stream, data));
    const std::vector<std::string> fields = split(data, '\t');
    ASSERT_EQ(fields.size(), 3u);
    EXPECT_EQ(fields[0], "algoX");
    EXPECT_NEAR(std::stod(fields[1]), 1.0 / 7.0, kTol);
    EXPECT_NEAR(std::stod(fields[2]), 7.0 / 12.0, kTol);

    const std::string pr = read_file(dir / "out" / "pr_legacy.tsv");
    EXPECT_NE(pr.find("x_log_hint=false"), std::string::npos);
    EXPECT_NE(pr.find("procedure=legacy"), std::string::npos);
}

TEST(CmdSummarize, RunsAreByteIdentical) {
    const auto dir = test_dir();
    RunConfig config = fixture_config(dir);
    cmd_summarize(config);
    RunConfig second = config;
    second.out_dir = dir / "out2";
    cmd_summarize(second);
    for (const char* name : {"summary.csv", "summary.json", "roc_ours.tsv", "pr_ours.tsv",
                             "roc_legacy.tsv", "pr_legacy.tsv"})
        EXPECT_EQ(read_file(config.out_dir / name), read_file(second.out_dir / name)) << name;
}

TEST(CmdSummarize, SingleVideoMakesProceduresAgree) {
    const auto dir = test_dir();
    RunConfig config = fixture_config(dir);
    config.input = write_file(dir / "single.csv",
                              "algorithm,category,video,tn,fp,fn,tp\n"
                              "algoX,cat,v1,50,10,20,20\n");
    const ComparisonReport report = cmd_summarize(config);
    const ComparisonRow& row = report.rows[0];
    for (std::size_t i = 0; i < report.indicators.size(); ++i) {
        ASSERT_TRUE(row.ours->values[i].is_defined());
        EXPECT_NEAR(row.ours->values[i].value(), row.legacy->values[i].value(), kTol);
    }
}

TEST(CmdSummarize, LegacyErrorPolicyAborts) {
    const auto dir = test_dir();
    RunConfig config = fixture_config(dir);
    config.input = write_file(dir / "undef.csv",
                              "algorithm,category,video,tn,fp,fn,tp\n"
                              "algoX,cat,allneg,100,0,0,0\n"
                              "algoX,cat,v2,70,10,5,15\n");
    config.undefined_policy = UndefinedPolicy::error;
    EXPECT_THROW(cmd_summarize(config), UndefinedIndicatorError);
    config.undefined_policy = UndefinedPolicy::skip;
    EXPECT_NO_THROW(cmd_summarize(config));
}

TEST(CmdSummarize, ValidatesConfig) {
    const auto dir = test_dir();
    RunConfig config = fixture_config(dir);
    config.run_ours = false;
    config.run_legacy = false;
    EXPECT_THROW(cmd_summarize(config), ConfigError);
    config.run_ours = true;
    config.indicators.clear();
    EXPECT_THROW(cmd_summarize(config), ConfigError);
}

TEST(CmdRank, SizeSensitiveAlgorithmFlipsOrder) {
    const auto dir = test_dir();
    RunConfig config;
    config.input = write_file(dir / "rank.csv",
                              "algorithm,category,video,tn,fp,fn,tp,size\n"
                              "algo1,cat,small,5,0,0,5,10\n"
                              "algo1,cat,large,500,0,450,50,1000\n"
                              "algo2,cat,small,4,2,2,2,10\n"
                              "algo2,cat,large,400,200,200,200,1000\n");
    config.weight_kind = WeightScheme::Kind::size_proportional;
    config.indicators = {indicators::f_score()};
    config.out_dir = dir / "out";
    config.formats = {OutputFormat::csv, OutputFormat::json};

    const std::vector<RankRow> rows = cmd_rank(config, indicators::f_score());
    ASSERT_EQ(rows.size(), 2u);
    // Size-weighted summarization favors the consistent algorithm; the
    // per-video mean favors the one that shines on the tiny video.
    EXPECT_EQ(rows[0].algorithm, "algo2");
    EXPECT_EQ(rows[0].ours_rank, 1);
    EXPECT_EQ(rows[0].legacy_rank, 2);
    EXPECT_EQ(rows[1].algorithm, "algo1");
    EXPECT_EQ(rows[1].ours_rank, 2);
    EXPECT_EQ(rows[1].legacy_rank, 1);
    EXPECT_TRUE(rows[0].discordant.value());
    EXPECT_TRUE(rows[1].discordant.value());

    const std::string csv = read_file(dir / "out" / "ranks.csv");
    EXPECT_NE(csv.find("indicator,algorithm,value_ours,rank_ours,value_legacy,rank_legacy,"
                       "discordant"),
              std::string::npos);
    EXPECT_NE(csv.find("F,algo2,"), std::string::npos);
    EXPECT_NE(csv.find(",true"), std::string::npos);
}

TEST(CmdRank, IdenticalProceduresShowNoDiscordance) {
    const auto dir = test_dir();
    RunConfig config;
    config.input = write_file(dir / "rank.csv",
                              "algorithm,category,video,tn,fp,fn,tp\n"
                              "a,cat,v,50,10,20,20\n"
                              "b,cat,v,70,10,5,15\n");
    config.indicators = {indicators::f_score()};
    config.out_dir = dir / "out";
    const std::vector<RankRow> rows = cmd_rank(config, indicators::f_score());
    for (const RankRow& row : rows) EXPECT_FALSE(row.discordant.value());
}

TEST(CmdRank, NeedsTwoAlgorithms) {
    const auto dir = test_dir();
    RunConfig config = fixture_config(dir);
    EXPECT_THROW(cmd_rank(config, indicators::f_score()), Error);
}

TEST(CmdConvert, RoundTripsThroughBothDirections) {
    const std::string pr = cmd_convert(ConvertDirection::roc_to_pr, 1.0 / 7.0, 7.0 / 12.0, 0.3);
    std::istringstream stream(pr);
    double recall = 0, precision = 0;
    stream >> recall >> precision;
    EXPECT_NEAR(recall, 7.0 / 12.0, kTol);
    EXPECT_NEAR(precision, 7.0 / 11.0, kTol);

    const std::string roc = cmd_convert(ConvertDirection::pr_to_roc, recall, precision, 0.3);
    std::istringstream stream2(roc);
    double fpr = 0, tpr = 0;
    stream2 >> fpr >> tpr;
    EXPECT_NEAR(fpr, 1.0 / 7.0, kTol);
    EXPECT_NEAR(tpr, 7.0 / 12.0, kTol);

    EXPECT_EQ(cmd_convert(ConvertDirection::roc_to_pr, 0.0, 0.0, 0.5), "NA NA");
    EXPECT_THROW(cmd_convert(ConvertDirection::pr_to_roc, 1.0, 0.25, 0.5), AchievabilityError);
}

TEST(CmdIngestMasks, WritesCountsCsvWithSizes) {
    const auto dir = test_dir();
    std::filesystem::create_directories(dir / "gt");
    std::filesystem::create_directories(dir / "pred");

    GrayImage gt = GrayImage::filled(2, 2, 0);
    gt.at(0, 0) = 255;
    gt.at(1, 0) = 0;
    gt.at(0, 1) = 85;
    gt.at(1, 1) = 255;
    GrayImage pred = GrayImage::filled(2, 2, 0);
    pred.at(0, 0) = 200;
    pred.at(1, 0) = 10;
    pred.at(0, 1) = 255;
    pred.at(1, 1) = 90;
    write_pgm(dir / "gt" / "f0.pgm", gt);
    write_pgm(dir / "pred" / "f0.pgm", pred);

    write_file(dir / "manifest.json", R"([
        {"algorithm": "algoM", "video_id": "vid", "category": "cat",
         "gt_dir": "gt", "pred_dir": "pred"}
    ])");
    cmd_ingest_masks(dir / "manifest.json", dir / "counts.csv");
    const std::string csv = read_file(dir / "counts.csv");
    EXPECT_EQ(csv,
              "algorithm,category,video,tn,fp,fn,tp,size\n"
              "algoM,cat,vid,1,0,1,1,3\n");

    // A second frame with the same content doubles every count.
    write_pgm(dir / "gt" / "f1.pgm", gt);
    write_pgm(dir / "pred" / "f1.pgm", pred);
    cmd_ingest_masks(dir / "manifest.json", dir / "counts2.csv");
    EXPECT_NE(read_file(dir / "counts2.csv").find("algoM,cat,vid,2,0,2,2,6"),
              std::string::npos);
}

TEST(CmdIngestMasks, UnpairedFrameStemsAreAnError) {
    const auto dir = test_dir();
    std::filesystem::create_directories(dir / "gt");
    std::filesystem::create_directories(dir / "pred");
    write_pgm(dir / "gt" / "only_in_gt.pgm", GrayImage::filled(2, 2, 0));
    write_file(dir / "manifest.json", R"([
        {"algorithm": "a", "video_id": "v", "gt_dir": "gt", "pred_dir": "pred"}
    ])");
    try {
        cmd_ingest_masks(dir / "manifest.json", dir / "counts.csv");
        FAIL() << "expected Error";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("only_in_gt"), std::string::npos);
    }
}

TEST(Cli, ExitCodeContract) {
    const auto dir = test_dir();
    // Usage errors exit with 1.
    EXPECT_EQ(run_cli("", dir), 1);
    EXPECT_EQ(run_cli("summarize", dir), 1); // missing required options
    write_file(dir / "input.csv", kFixtureCsv);
    EXPECT_EQ(run_cli("summarize " + (dir / "input.csv").string() +
                          " --out " + (dir / "out").string() + " --indicators bogus",
                      dir),
              1);
    // Data errors exit with 2.
    EXPECT_EQ(run_cli("summarize " + (dir / "missing.csv").string() + " --out " +
                          (dir / "out").string(),
                      dir),
              2);
    EXPECT_EQ(run_cli("convert pr2roc 1 0.25 --prior 0.5", dir), 2);
    // Success exits with 0 and prints results to stdout only.
    EXPECT_EQ(run_cli("convert roc2pr 0 0 --prior 0.5", dir), 0);
    EXPECT_EQ(read_file(dir / "stdout.txt"), "NA NA\n");
}

TEST(Cli, SummarizeWritesFiles) {
    const auto dir = test_dir();
    write_file(dir / "input.csv", kFixtureCsv);
    const int code = run_cli("summarize " + (dir / "input.csv").string() + " --out " +
                                 (dir / "out").string() +
                                 " --indicators F,TPR --format csv,json",
                             dir);
    EXPECT_EQ(code, 0);
    EXPECT_TRUE(std::filesystem::exists(dir / "out" / "summary.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "out" / "summary.json"));
    EXPECT_TRUE(read_file(dir / "stdout.txt").empty()); // diagnostics go to stderr
}
