#include "perfsum/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <utility>

#include <json.hpp>

#include "perfsum/errors.hpp"
#include "perfsum/format.hpp"

namespace perfsum {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

std::uint64_t parse_count(const std::string& text, int line, const std::string& column) {
    if (text.empty()) throw ParseError(line, "empty " + column + " field");
    if (text.front() == '-')
        throw DomainError(line, column + " is negative: " + text);
    std::uint64_t value = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc::result_out_of_range)
        throw DomainError(line, column + " exceeds the 64-bit range: " + text);
    if (ec != std::errc{} || end != text.data() + text.size())
        throw ParseError(line, column + " is not an unsigned integer: '" + text + "'");
    return value;
}

double parse_unit_real(const std::string& text, int line, const std::string& column) {
    if (text.empty()) throw ParseError(line, "empty " + column + " field");
    double value = 0.0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size())
        throw ParseError(line, column + " is not a number: '" + text + "'");
    if (std::isnan(value) || value < 0.0 || value > 1.0)
        throw DomainError(line, column + " outside [0,1]: " + text);
    return value;
}

IndicatorValue parse_rate(const std::string& text, int line, const std::string& column) {
    if (text == "NA") return IndicatorValue::undefined();
    return IndicatorValue::defined(parse_unit_real(text, line, column));
}

std::uint64_t parse_size(const std::string& text, int line) {
    const std::uint64_t size = parse_count(text, line, "size");
    if (size == 0) throw DomainError(line, "size must be at least 1");
    return size;
}

void check_count_total(const ConfusionCounts& c, int line) {
    std::uint64_t sum = c.tn;
    for (std::uint64_t v : {c.fp, c.fn, c.tp}) {
        if (sum > std::numeric_limits<std::uint64_t>::max() - v)
            throw DomainError(line, "count total exceeds the 64-bit range");
        sum += v;
    }
}

constexpr std::array<const char*, 7> kCountsColumns{"algorithm", "category", "video",
                                                    "tn",        "fp",       "fn",
                                                    "tp"};
constexpr std::array<const char*, 6> kRocColumns{"algorithm", "category",  "video",
                                                 "prior_pos", "fpr",       "tpr"};

// Maps optional trailing header names to their field index; -1 means absent.
struct OptionalColumns {
    int tau_pos = -1;
    int ppv = -1;
    int size = -1;
};

template <std::size_t N>
OptionalColumns check_header(const std::vector<std::string>& header,
                             const std::array<const char*, N>& required,
                             bool allow_roc_extras, const std::string& format_name) {
    const auto fail = [&](const std::string& why) {
        throw SchemaError("bad " + format_name + " header: " + why);
    };
    if (header.size() < N) fail("expected at least " + std::to_string(N) + " columns");
    for (std::size_t i = 0; i < N; ++i)
        if (header[i] != required[i])
            fail("column " + std::to_string(i + 1) + " is '" + header[i] + "', expected '" +
                 required[i] + "'");
    OptionalColumns optional;
    for (std::size_t i = N; i < header.size(); ++i) {
        const std::string& name = header[i];
        int* slot = nullptr;
        if (name == "size") slot = &optional.size;
        else if (allow_roc_extras && name == "tau_pos") slot = &optional.tau_pos;
        else if (allow_roc_extras && name == "ppv") slot = &optional.ppv;
        if (slot == nullptr) fail("unexpected column '" + name + "'");
        if (*slot != -1) fail("duplicate column '" + name + "'");
        *slot = static_cast<int>(i);
    }
    return optional;
}

void check_unique(std::set<std::pair<std::string, std::string>>& seen,
                  const EvaluationRecord& rec) {
    if (!seen.emplace(rec.algorithm, rec.video_id).second)
        throw ParseError(rec.line, "duplicate record for algorithm '" + rec.algorithm +
                                       "', video '" + rec.video_id + "'");
}

std::vector<EvaluationRecord> read_csv(const std::filesystem::path& path, bool counts_format) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open record file '" + path.string() + "'");

    std::string line;
    if (!std::getline(in, line)) throw SchemaError("record file '" + path.string() + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split_csv(line);
    const OptionalColumns optional =
        counts_format
            ? check_header(header, kCountsColumns, false, "counts CSV")
            : check_header(header, kRocColumns, true, "roc CSV");

    std::vector<EvaluationRecord> records;
    std::set<std::pair<std::string, std::string>> seen;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv(line);
        if (fields.size() != header.size())
            throw ParseError(line_no, "expected " + std::to_string(header.size()) +
                                          " fields, got " + std::to_string(fields.size()));

        EvaluationRecord rec;
        rec.line = line_no;
        rec.algorithm = fields[0];
        rec.category = fields[1];
        rec.video_id = fields[2];
        if (rec.algorithm.empty()) throw ParseError(line_no, "empty algorithm field");
        if (rec.video_id.empty()) throw ParseError(line_no, "empty video field");

        if (counts_format) {
            ConfusionCounts counts;
            counts.tn = parse_count(fields[3], line_no, "tn");
            counts.fp = parse_count(fields[4], line_no, "fp");
            counts.fn = parse_count(fields[5], line_no, "fn");
            counts.tp = parse_count(fields[6], line_no, "tp");
            check_count_total(counts, line_no);
            rec.payload = counts;
        } else {
            RocIndicatorRow row;
            row.prior_pos = parse_unit_real(fields[3], line_no, "prior_pos");
            row.fpr = parse_rate(fields[4], line_no, "fpr");
            row.tpr = parse_rate(fields[5], line_no, "tpr");
            if (optional.tau_pos != -1 && !fields[optional.tau_pos].empty() &&
                fields[optional.tau_pos] != "NA")
                row.tau_pos = parse_unit_real(fields[optional.tau_pos], line_no, "tau_pos");
            if (optional.ppv != -1 && !fields[optional.ppv].empty() &&
                fields[optional.ppv] != "NA")
                row.ppv = parse_unit_real(fields[optional.ppv], line_no, "ppv");
            rec.payload = row;
        }
        if (optional.size != -1 && !fields[optional.size].empty())
            rec.size = parse_size(fields[optional.size], line_no);

        check_unique(seen, rec);
        records.push_back(std::move(rec));
    }
    return records;
}

double json_unit_real(const json& v, int line, const std::string& key) {
    if (!v.is_number()) throw ParseError(line, key + " must be a number");
    const double value = v.get<double>();
    if (std::isnan(value) || value < 0.0 || value > 1.0)
        throw DomainError(line, key + " outside [0,1]: " + format_real(value));
    return value;
}

std::uint64_t json_count(const json& v, int line, const std::string& key) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer())
        throw DomainError(line, key + " is negative: " + std::to_string(v.get<std::int64_t>()));
    throw ParseError(line, key + " must be an unsigned integer");
}

IndicatorValue json_rate(const json& obj, int line, const std::string& key) {
    const json& v = obj.at(key);
    if (v.is_null() || (v.is_string() && v.get<std::string>() == "NA"))
        return IndicatorValue::undefined();
    return IndicatorValue::defined(json_unit_real(v, line, key));
}

std::vector<EvaluationRecord> read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open record file '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(0, std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw SchemaError("record file must hold a JSON array");

    static const std::set<std::string> known_keys{
        "algorithm", "category", "video",   "tn",  "fp",  "fn",
        "tp",        "prior_pos", "fpr",    "tpr", "tau_pos", "ppv", "size"};

    std::vector<EvaluationRecord> records;
    std::set<std::pair<std::string, std::string>> seen;
    int index = 0;
    for (const json& obj : doc) {
        const int line = ++index;
        if (!obj.is_object()) throw SchemaError("record " + std::to_string(line) + " is not an object");
        for (const auto& item : obj.items())
            if (!known_keys.count(item.key()))
                throw SchemaError("record " + std::to_string(line) + " has unknown key '" +
                                  item.key() + "'");

        const auto text = [&](const char* key, bool required) -> std::string {
            if (!obj.contains(key)) {
                if (required) throw SchemaError("record " + std::to_string(line) +
                                                " is missing key '" + key + "'");
                return {};
            }
            if (!obj.at(key).is_string())
                throw ParseError(line, std::string(key) + " must be a string");
            return obj.at(key).get<std::string>();
        };

        EvaluationRecord rec;
        rec.line = line;
        rec.algorithm = text("algorithm", true);
        rec.category = text("category", false);
        rec.video_id = text("video", true);
        if (rec.algorithm.empty()) throw ParseError(line, "empty algorithm field");
        if (rec.video_id.empty()) throw ParseError(line, "empty video field");

        const bool has_counts = obj.contains("tn") || obj.contains("fp") ||
                                obj.contains("fn") || obj.contains("tp");
        if (has_counts) {
            for (const char* key : {"tn", "fp", "fn", "tp"})
                if (!obj.contains(key))
                    throw SchemaError("record " + std::to_string(line) + " is missing count '" +
                                      key + "'");
            ConfusionCounts counts{json_count(obj.at("tn"), line, "tn"),
                                   json_count(obj.at("fp"), line, "fp"),
                                   json_count(obj.at("fn"), line, "fn"),
                                   json_count(obj.at("tp"), line, "tp")};
            check_count_total(counts, line);
            rec.payload = counts;
        } else {
            for (const char* key : {"prior_pos", "fpr", "tpr"})
                if (!obj.contains(key))
                    throw SchemaError("record " + std::to_string(line) + " is missing key '" +
                                      key + "'");
            RocIndicatorRow row;
            row.prior_pos = json_unit_real(obj.at("prior_pos"), line, "prior_pos");
            row.fpr = json_rate(obj, line, "fpr");
            row.tpr = json_rate(obj, line, "tpr");
            if (obj.contains("tau_pos") && !obj.at("tau_pos").is_null())
                row.tau_pos = json_unit_real(obj.at("tau_pos"), line, "tau_pos");
            if (obj.contains("ppv") && !obj.at("ppv").is_null())
                row.ppv = json_unit_real(obj.at("ppv"), line, "ppv");
            rec.payload = row;
        }
        if (obj.contains("size") && !obj.at("size").is_null()) {
            const std::uint64_t size = json_count(obj.at("size"), line, "size");
            if (size == 0) throw DomainError(line, "size must be at least 1");
            rec.size = size;
        }
        check_unique(seen, rec);
        records.push_back(std::move(rec));
    }
    return records;
}

void require_no_comma(const std::string& value, const std::string& what) {
    if (value.find(',') != std::string::npos || value.find('\n') != std::string::npos)
        throw Error(what + " '" + value + "' contains a CSV delimiter");
}

} // namespace

std::vector<EvaluationRecord> read_records(const std::filesystem::path& path,
                                           RecordFormat format) {
    switch (format) {
    case RecordFormat::counts_csv: return read_csv(path, true);
    case RecordFormat::roc_csv: return read_csv(path, false);
    case RecordFormat::json: return read_json(path);
    }
    throw std::logic_error("unhandled record format");
}

void write_records(const std::filesystem::path& path, std::span<const EvaluationRecord> records,
                   RecordFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write record file '" + path.string() + "'");

    const bool any_size =
        std::any_of(records.begin(), records.end(),
                    [](const EvaluationRecord& r) { return r.size.has_value(); });

    const auto common_fields = [&](const EvaluationRecord& rec) {
        require_no_comma(rec.algorithm, "algorithm");
        require_no_comma(rec.category, "category");
        require_no_comma(rec.video_id, "video");
        return rec.algorithm + ',' + rec.category + ',' + rec.video_id;
    };

    switch (format) {
    case RecordFormat::counts_csv: {
        out << "algorithm,category,video,tn,fp,fn,tp" << (any_size ? ",size" : "") << '\n';
        for (const EvaluationRecord& rec : records) {
            if (!rec.has_counts())
                throw SchemaError("record for video '" + rec.video_id +
                                  "' has no counts payload");
            const ConfusionCounts& c = rec.counts();
            out << common_fields(rec) << ',' << c.tn << ',' << c.fp << ',' << c.fn << ','
                << c.tp;
            if (any_size) {
                out << ',';
                if (rec.size) out << *rec.size;
            }
            out << '\n';
        }
        break;
    }
    case RecordFormat::roc_csv: {
        const bool any_tau = std::any_of(records.begin(), records.end(), [](const auto& r) {
            return !r.has_counts() && r.roc().tau_pos.has_value();
        });
        const bool any_ppv = std::any_of(records.begin(), records.end(), [](const auto& r) {
            return !r.has_counts() && r.roc().ppv.has_value();
        });
        out << "algorithm,category,video,prior_pos,fpr,tpr";
        if (any_tau) out << ",tau_pos";
        if (any_ppv) out << ",ppv";
        if (any_size) out << ",size";
        out << '\n';
        for (const EvaluationRecord& rec : records) {
            if (rec.has_counts())
                throw SchemaError("record for video '" + rec.video_id +
                                  "' has no roc payload");
            const RocIndicatorRow& row = rec.roc();
            out << common_fields(rec) << ',' << format_real(row.prior_pos) << ','
                << format_indicator(row.fpr) << ',' << format_indicator(row.tpr);
            if (any_tau) out << ',' << (row.tau_pos ? format_real(*row.tau_pos) : "");
            if (any_ppv) out << ',' << (row.ppv ? format_real(*row.ppv) : "");
            if (any_size) {
                out << ',';
                if (rec.size) out << *rec.size;
            }
            out << '\n';
        }
        break;
    }
    case RecordFormat::json: {
        json doc = json::array();
        for (const EvaluationRecord& rec : records) {
            json obj;
            obj["algorithm"] = rec.algorithm;
            obj["category"] = rec.category;
            obj["video"] = rec.video_id;
            if (rec.has_counts()) {
                const ConfusionCounts& c = rec.counts();
                obj["tn"] = c.tn;
                obj["fp"] = c.fp;
                obj["fn"] = c.fn;
                obj["tp"] = c.tp;
            } else {
                const RocIndicatorRow& row = rec.roc();
                obj["prior_pos"] = row.prior_pos;
                obj["fpr"] = row.fpr.is_defined() ? json(row.fpr.value()) : json();
                obj["tpr"] = row.tpr.is_defined() ? json(row.tpr.value()) : json();
                if (row.tau_pos) obj["tau_pos"] = *row.tau_pos;
                if (row.ppv) obj["ppv"] = *row.ppv;
            }
            if (rec.size) obj["size"] = *rec.size;
            doc.push_back(std::move(obj));
        }
        out << doc.dump(2) << '\n';
        break;
    }
    }
    if (!out) throw Error("failed writing record file '" + path.string() + "'");
}

NormalizedConfusion record_confusion(const EvaluationRecord& record) {
    if (record.has_counts()) return normalize(record.counts());
    const RocIndicatorRow& row = record.roc();
    return confusion_from_roc(row.prior_pos, row.fpr, row.tpr);
}

std::optional<std::uint64_t> record_size(const EvaluationRecord& record) {
    if (record.size) return record.size;
    if (record.has_counts() && record.counts().total() > 0) return record.counts().total();
    return std::nullopt;
}

std::vector<ConsistencyViolation> check_consistency(const RocIndicatorRow& row,
                                                    double tolerance) {
    std::vector<ConsistencyViolation> violations;
    const double prior_pos = row.prior_pos;
    const double prior_neg = 1.0 - prior_pos;

    // Positive-prediction mass implied by prior/fpr/tpr; unavailable when a
    // conditional that carries mass is undefined.
    std::optional<double> positive_term;
    if (prior_pos == 0.0) positive_term = 0.0;
    else if (row.tpr.is_defined()) positive_term = prior_pos * row.tpr.value();
    std::optional<double> negative_term;
    if (prior_neg == 0.0) negative_term = 0.0;
    else if (row.fpr.is_defined()) negative_term = prior_neg * row.fpr.value();

    std::optional<double> implied_tau;
    if (positive_term && negative_term) implied_tau = *positive_term + *negative_term;

    if (row.tau_pos && implied_tau && std::abs(*implied_tau - *row.tau_pos) > tolerance)
        violations.push_back({"tau_pos", *implied_tau, *row.tau_pos});

    const std::optional<double> tau_ref = row.tau_pos ? row.tau_pos : implied_tau;
    if (row.ppv && tau_ref && *tau_ref > 0.0 && positive_term) {
        const double expected = *positive_term / *tau_ref;
        if (std::abs(expected - *row.ppv) > tolerance)
            violations.push_back({"ppv", expected, *row.ppv});
    }
    return violations;
}

LabelMapping LabelMapping::defaults() {
    LabelMapping m;
    m.positive_values = {255};
    m.negative_values = {0, 50};
    m.ignore_values = {85, 170};
    m.prediction_threshold = 128;
    return m;
}

void LabelMapping::validate() const {
    const auto overlap = [](const std::set<std::uint8_t>& a, const std::set<std::uint8_t>& b) {
        return std::any_of(a.begin(), a.end(), [&](std::uint8_t v) { return b.count(v) > 0; });
    };
    if (overlap(positive_values, negative_values) || overlap(positive_values, ignore_values) ||
        overlap(negative_values, ignore_values))
        throw std::invalid_argument("label mapping sets must be pairwise disjoint");
}

ConfusionCounts count_from_masks(const GrayImage& gt_map, const GrayImage& pred_map,
                                 const LabelMapping& mapping) {
    mapping.validate();
    if (gt_map.width != pred_map.width || gt_map.height != pred_map.height)
        throw DimensionMismatchError(
            "mask dimensions differ: ground truth " + std::to_string(gt_map.width) + "x" +
            std::to_string(gt_map.height) + ", prediction " + std::to_string(pred_map.width) +
            "x" + std::to_string(pred_map.height));

    enum Class : std::uint8_t { negative = 0, positive = 1, ignored = 2, unmapped = 3 };
    std::array<std::uint8_t, 256> classify;
    classify.fill(unmapped);
    for (std::uint8_t v : mapping.negative_values) classify[v] = negative;
    for (std::uint8_t v : mapping.positive_values) classify[v] = positive;
    for (std::uint8_t v : mapping.ignore_values) classify[v] = ignored;

    ConfusionCounts counts;
    for (int y = 0; y < gt_map.height; ++y) {
        for (int x = 0; x < gt_map.width; ++x) {
            const std::uint8_t label = gt_map.at(x, y);
            const std::uint8_t cls = classify[label];
            if (cls == ignored) continue;
            if (cls == unmapped) throw UnmappedLabelError(label, x, y);
            const bool predicted_positive = pred_map.at(x, y) >= mapping.prediction_threshold;
            if (cls == positive)
                predicted_positive ? ++counts.tp : ++counts.fn;
            else
                predicted_positive ? ++counts.fp : ++counts.tn;
        }
    }
    return counts;
}

namespace {

std::set<std::uint8_t> json_gray_set(const json& arr, const std::string& key) {
    if (!arr.is_array()) throw SchemaError("mapping." + key + " must be an array");
    std::set<std::uint8_t> out;
    for (const json& v : arr) {
        if (!v.is_number_unsigned() || v.get<std::uint64_t>() > 255)
            throw SchemaError("mapping." + key + " entries must be gray levels in [0,255]");
        out.insert(static_cast<std::uint8_t>(v.get<std::uint64_t>()));
    }
    return out;
}

} // namespace

std::vector<MaskManifestEntry> read_mask_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open manifest '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(0, std::string("invalid manifest JSON: ") + e.what());
    }
    if (!doc.is_array()) throw SchemaError("mask manifest must hold a JSON array");

    const std::filesystem::path base = path.has_parent_path()
                                           ? path.parent_path()
                                           : std::filesystem::path(".");
    static const std::set<std::string> known_keys{"algorithm", "video_id", "category",
                                                  "gt_dir",    "pred_dir", "mapping"};
    static const std::set<std::string> known_mapping_keys{
        "positive_values", "negative_values", "ignore_values", "prediction_threshold"};

    std::vector<MaskManifestEntry> entries;
    int index = 0;
    for (const json& obj : doc) {
        const int line = ++index;
        if (!obj.is_object())
            throw SchemaError("manifest entry " + std::to_string(line) + " is not an object");
        for (const auto& item : obj.items())
            if (!known_keys.count(item.key()))
                throw SchemaError("manifest entry " + std::to_string(line) +
                                  " has unknown key '" + item.key() + "'");

        const auto text = [&](const char* key, bool required) -> std::string {
            if (!obj.contains(key)) {
                if (required)
                    throw SchemaError("manifest entry " + std::to_string(line) +
                                      " is missing key '" + key + "'");
                return {};
            }
            if (!obj.at(key).is_string())
                throw SchemaError("manifest entry " + std::to_string(line) + " key '" + key +
                                  "' must be a string");
            return obj.at(key).get<std::string>();
        };

        MaskManifestEntry entry;
        entry.algorithm = obj.contains("algorithm") ? text("algorithm", true) : "unspecified";
        entry.video_id = text("video_id", true);
        entry.category = text("category", false);
        if (entry.video_id.empty())
            throw SchemaError("manifest entry " + std::to_string(line) + " has an empty video_id");
        entry.gt_dir = base / std::filesystem::path(text("gt_dir", true));
        entry.pred_dir = base / std::filesystem::path(text("pred_dir", true));

        if (obj.contains("mapping")) {
            const json& m = obj.at("mapping");
            if (!m.is_object())
                throw SchemaError("manifest entry " + std::to_string(line) +
                                  " key 'mapping' must be an object");
            for (const auto& item : m.items())
                if (!known_mapping_keys.count(item.key()))
                    throw SchemaError("manifest entry " + std::to_string(line) +
                                      " has unknown mapping key '" + item.key() + "'");
            if (m.contains("positive_values"))
                entry.mapping.positive_values = json_gray_set(m.at("positive_values"),
                                                              "positive_values");
            if (m.contains("negative_values"))
                entry.mapping.negative_values = json_gray_set(m.at("negative_values"),
                                                              "negative_values");
            if (m.contains("ignore_values"))
                entry.mapping.ignore_values = json_gray_set(m.at("ignore_values"),
                                                            "ignore_values");
            if (m.contains("prediction_threshold")) {
                const json& t = m.at("prediction_threshold");
                if (!t.is_number_unsigned() || t.get<std::uint64_t>() > 255)
                    throw SchemaError("mapping.prediction_threshold must lie in [0,255]");
                entry.mapping.prediction_threshold =
                    static_cast<std::uint8_t>(t.get<std::uint64_t>());
            }
            entry.mapping.validate();
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

} // namespace perfsum
