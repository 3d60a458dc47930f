#include "lvmr/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "lvmr/error.hpp"

namespace lvmr {

using nlohmann::json;

std::string_view to_string(OverlapMode mode)
{
    return mode == OverlapMode::iou ? "iou" : "gt_coverage";
}

std::string_view to_string(MatchComparison comparison)
{
    return comparison == MatchComparison::strict_greater ? "strict_greater" : "greater_equal";
}

std::string_view to_string(Averaging averaging)
{
    return averaging == Averaging::micro ? "micro" : "per_video";
}

OverlapMode parse_overlap_mode(std::string_view text)
{
    if (text == "iou") {
        return OverlapMode::iou;
    }
    if (text == "gt_coverage") {
        return OverlapMode::gt_coverage;
    }
    throw ContractError("unknown overlap mode '" + std::string(text) + "'");
}

MatchComparison parse_match_comparison(std::string_view text)
{
    if (text == "strict_greater" || text == "strict") {
        return MatchComparison::strict_greater;
    }
    if (text == "greater_equal") {
        return MatchComparison::greater_equal;
    }
    throw ContractError("unknown match comparison '" + std::string(text) + "'");
}

Averaging parse_averaging(std::string_view text)
{
    if (text == "micro") {
        return Averaging::micro;
    }
    if (text == "per_video") {
        return Averaging::per_video;
    }
    throw ContractError("unknown averaging '" + std::string(text) + "'");
}

double temporal_overlap(const TimeInterval& pred, const TimeInterval& gt, OverlapMode mode)
{
    const double intersection =
        std::max(0.0, std::min(pred.end_s(), gt.end_s()) - std::max(pred.start_s(), gt.start_s()));
    if (intersection == 0.0) {
        return 0.0;
    }
    if (mode == OverlapMode::gt_coverage) {
        return std::min(1.0, intersection / gt.duration());
    }
    const double union_length = pred.duration() + gt.duration() - intersection;
    return std::min(1.0, intersection / union_length);
}

bool is_match(const TimeInterval& pred, const TimeInterval& gt, double threshold, OverlapMode mode,
              MatchComparison comparison)
{
    const double overlap = temporal_overlap(pred, gt, mode);
    return comparison == MatchComparison::strict_greater ? overlap > threshold : overlap >= threshold;
}

std::vector<double> default_threshold_grid()
{
    return {0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95};
}

void validate_threshold_grid(std::span<const double> thresholds)
{
    if (thresholds.empty()) {
        throw ContractError("empty threshold grid");
    }
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        const double t = thresholds[i];
        if (!(t > 0.0 && t < 1.0)) {
            throw ContractError("threshold " + std::to_string(t) + " outside (0, 1)");
        }
        if (i > 0 && !(t > thresholds[i - 1])) {
            throw ContractError("threshold grid must be strictly increasing");
        }
    }
}

namespace {

constexpr std::size_t kNoMatch = std::numeric_limits<std::size_t>::max();

// For every ground-truth query (map order) and threshold: rank of the first
// matching prediction among the first `depth`, or kNoMatch.
struct MatchTable {
    std::vector<const std::string*> video_of_query;
    std::vector<std::vector<std::size_t>> first_match;  // [query][threshold]
};

MatchTable build_match_table(const PredictionMap& predictions, const GroundTruthMap& ground_truth,
                             std::size_t depth, std::span<const double> thresholds, const MatchOptions& options)
{
    MatchTable table;
    table.video_of_query.reserve(ground_truth.size());
    table.first_match.reserve(ground_truth.size());
    for (const auto& [key, gt] : ground_truth) {
        auto it = predictions.find(key);
        if (it == predictions.end()) {
            throw ContractError("no predictions for query " + key.video_id + "/" + key.query_id);
        }
        const auto& ranked = it->second;
        const auto limit = std::min(depth, ranked.size());
        std::vector<std::size_t> first(thresholds.size(), kNoMatch);
        for (std::size_t rank = 0; rank < limit; ++rank) {
            const double overlap = temporal_overlap(ranked[rank], gt, options.mode);
            for (std::size_t t = 0; t < thresholds.size(); ++t) {
                if (first[t] != kNoMatch) {
                    continue;
                }
                const bool hit = options.comparison == MatchComparison::strict_greater ? overlap > thresholds[t]
                                                                                        : overlap >= thresholds[t];
                if (hit) {
                    first[t] = rank;
                }
            }
        }
        table.video_of_query.push_back(&key.video_id);
        table.first_match.push_back(std::move(first));
    }
    return table;
}

double recall_cell(const MatchTable& table, std::size_t k, std::size_t threshold_index, Averaging averaging)
{
    const auto queries = table.first_match.size();
    if (queries == 0) {
        return 0.0;
    }
    if (averaging == Averaging::micro) {
        std::size_t hits = 0;
        for (const auto& first : table.first_match) {
            hits += first[threshold_index] < k ? 1 : 0;
        }
        return static_cast<double>(hits) / static_cast<double>(queries);
    }
    std::map<std::string_view, std::pair<std::size_t, std::size_t>> per_video;
    for (std::size_t q = 0; q < queries; ++q) {
        auto& [hits, total] = per_video[*table.video_of_query[q]];
        hits += table.first_match[q][threshold_index] < k ? 1 : 0;
        ++total;
    }
    double sum = 0.0;
    for (const auto& [video, counts] : per_video) {
        sum += static_cast<double>(counts.first) / static_cast<double>(counts.second);
    }
    return sum / static_cast<double>(per_video.size());
}

double mean_of(std::span<const double> cells)
{
    double sum = 0.0;
    for (double c : cells) {
        sum += c;
    }
    return sum / static_cast<double>(cells.size());
}

void require_k(std::size_t k)
{
    if (k == 0) {
        throw ContractError("k must be positive");
    }
}

}  // namespace

double recall_at_k(const PredictionMap& predictions, const GroundTruthMap& ground_truth, std::size_t k,
                   double threshold, const MatchOptions& options)
{
    require_k(k);
    const double grid[] = {threshold};
    const auto table = build_match_table(predictions, ground_truth, k, grid, options);
    return recall_cell(table, k, 0, options.averaging);
}

double average_recall_at_k(const PredictionMap& predictions, const GroundTruthMap& ground_truth, std::size_t k,
                           std::span<const double> thresholds, const MatchOptions& options)
{
    require_k(k);
    validate_threshold_grid(thresholds);
    const auto table = build_match_table(predictions, ground_truth, k, thresholds, options);
    std::vector<double> cells(thresholds.size());
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
        cells[t] = recall_cell(table, k, t, options.averaging);
    }
    return mean_of(cells);
}

namespace {

std::string id_string(const json& value, const std::string& where)
{
    if (value.is_string()) {
        return value.get<std::string>();
    }
    if (value.is_number_integer()) {
        return std::to_string(value.get<long long>());
    }
    throw FormatError(where + ": query_id must be a string or an integer");
}

const json& field(const json& object, const char* key, const std::string& where)
{
    if (!object.is_object()) {
        throw FormatError(where + ": must be an object");
    }
    auto it = object.find(key);
    if (it == object.end()) {
        throw FormatError(where + ": missing required field '" + key + "'");
    }
    return *it;
}

std::string string_field(const json& object, const char* key, const std::string& where)
{
    const auto& value = field(object, key, where);
    if (!value.is_string()) {
        throw FormatError(where + ": field '" + key + "' must be a string");
    }
    return value.get<std::string>();
}

double number_field(const json& object, const char* key, const std::string& where)
{
    const auto& value = field(object, key, where);
    if (!value.is_number()) {
        throw FormatError(where + ": field '" + key + "' must be a number");
    }
    return value.get<double>();
}

TimeInterval checked_interval(double start_s, double end_s, const std::string& where)
{
    try {
        return TimeInterval(start_s, end_s);
    } catch (const ContractError& e) {
        throw FormatError(where + ": " + e.what());
    }
}

}  // namespace

std::vector<GroundTruthEntry> parse_ground_truth(std::string_view json_text)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("malformed ground truth: ") + e.what());
    }
    const auto& videos = field(doc, "videos", "ground truth");
    if (!videos.is_array()) {
        throw FormatError("ground truth: field 'videos' must be an array");
    }
    std::vector<GroundTruthEntry> entries;
    for (std::size_t v = 0; v < videos.size(); ++v) {
        const auto where_video = "ground truth video " + std::to_string(v);
        auto video_id = string_field(videos[v], "video_id", where_video);
        const auto& annotations = field(videos[v], "annotations", where_video);
        if (!annotations.is_array()) {
            throw FormatError(where_video + ": field 'annotations' must be an array");
        }
        for (std::size_t a = 0; a < annotations.size(); ++a) {
            const auto where = where_video + " annotation " + std::to_string(a);
            auto query_id = id_string(field(annotations[a], "query_id", where), where);
            auto sentence = string_field(annotations[a], "sentence", where);
            const auto& segment = field(annotations[a], "segment", where);
            if (!segment.is_array() || segment.size() != 2 || !segment[0].is_number() || !segment[1].is_number()) {
                throw FormatError(where + ": segment must be [start, end]");
            }
            entries.push_back({video_id, std::move(query_id), std::move(sentence),
                               checked_interval(segment[0].get<double>(), segment[1].get<double>(), where)});
        }
    }
    return entries;
}

std::vector<PredictionRecord> parse_predictions(std::string_view jsonl_text)
{
    std::vector<PredictionRecord> records;
    std::size_t line_number = 0;
    std::size_t pos = 0;
    while (pos < jsonl_text.size()) {
        auto end = jsonl_text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = jsonl_text.size();
        }
        const auto line = jsonl_text.substr(pos, end - pos);
        pos = end + 1;
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
            continue;
        }
        const auto where = "predictions line " + std::to_string(line_number);
        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error& e) {
            throw FormatError(where + ": " + e.what());
        }
        PredictionRecord out;
        out.video_id = string_field(record, "video_id", where);
        out.query_id = id_string(field(record, "query_id", where), where);
        const auto& results = field(record, "results", where);
        if (!results.is_array()) {
            throw FormatError(where + ": field 'results' must be an array");
        }
        for (std::size_t r = 0; r < results.size(); ++r) {
            const auto where_result = where + " result " + std::to_string(r);
            out.intervals.push_back(checked_interval(number_field(results[r], "start", where_result),
                                                     number_field(results[r], "end", where_result), where_result));
        }
        records.push_back(std::move(out));
    }
    return records;
}

MetricReport evaluate_dataset(const std::vector<PredictionRecord>& predictions,
                              const std::vector<GroundTruthEntry>& ground_truth, const EvaluationOptions& options)
{
    if (options.ks.empty()) {
        throw ContractError("no K values to evaluate");
    }
    for (auto k : options.ks) {
        require_k(k);
    }
    validate_threshold_grid(options.thresholds);

    GroundTruthMap gt;
    for (const auto& entry : ground_truth) {
        if (!gt.emplace(QueryKey{entry.video_id, entry.query_id}, entry.interval).second) {
            throw FormatError("duplicate ground-truth query " + entry.video_id + "/" + entry.query_id);
        }
    }

    MetricReport report;
    report.ks = options.ks;
    report.thresholds = options.thresholds;
    report.options = options.match;

    PredictionMap pred;
    std::vector<std::string> unmatched;
    for (const auto& record : predictions) {
        QueryKey key{record.video_id, record.query_id};
        if (gt.count(key) == 0) {
            if (options.strict_join) {
                unmatched.push_back(key.video_id + "/" + key.query_id);
            } else {
                ++report.queries_skipped;
            }
            continue;
        }
        if (!pred.emplace(std::move(key), record.intervals).second) {
            throw FormatError("duplicate predictions for query " + record.video_id + "/" + record.query_id);
        }
    }
    for (const auto& [key, interval] : gt) {
        if (pred.count(key) != 0) {
            continue;
        }
        if (options.strict_join) {
            unmatched.push_back(key.video_id + "/" + key.query_id);
        } else {
            pred.emplace(key, std::vector<TimeInterval>{});
        }
    }
    if (!unmatched.empty()) {
        std::string message = "unmatched query ids:";
        for (const auto& id : unmatched) {
            message += ' ';
            message += id;
        }
        throw ContractError(message);
    }

    const auto depth = *std::max_element(options.ks.begin(), options.ks.end());
    const auto table = build_match_table(pred, gt, depth, options.thresholds, options.match);
    report.queries_evaluated = table.first_match.size();

    const auto rows = static_cast<Eigen::Index>(options.ks.size());
    const auto cols = static_cast<Eigen::Index>(options.thresholds.size());
    report.recall.resize(rows, cols);
    report.average_recall.resize(options.ks.size());
    for (Eigen::Index r = 0; r < rows; ++r) {
        std::vector<double> cells(static_cast<std::size_t>(cols));
        for (Eigen::Index c = 0; c < cols; ++c) {
            cells[c] = recall_cell(table, options.ks[r], static_cast<std::size_t>(c), options.match.averaging);
            report.recall(r, c) = cells[c];
        }
        report.average_recall[r] = mean_of(cells);
    }
    return report;
}

namespace {

std::string format_number(double value)
{
    char buffer[64];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, end);
}

}  // namespace

std::string report_to_json(const MetricReport& report)
{
    json results = json::array();
    for (std::size_t r = 0; r < report.ks.size(); ++r) {
        json curve = json::array();
        for (std::size_t c = 0; c < report.thresholds.size(); ++c) {
            curve.push_back({{"threshold", report.thresholds[c]},
                             {"recall", report.recall(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))}});
        }
        results.push_back(
            {{"k", report.ks[r]}, {"average_recall", report.average_recall[r]}, {"recall_by_threshold", curve}});
    }
    json doc = {{"mode", to_string(report.options.mode)},
                {"comparison", to_string(report.options.comparison)},
                {"averaging", to_string(report.options.averaging)},
                {"ks", report.ks},
                {"thresholds", report.thresholds},
                {"queries_evaluated", report.queries_evaluated},
                {"queries_skipped", report.queries_skipped},
                {"results", std::move(results)}};
    return doc.dump(2) + "\n";
}

std::string report_to_csv(const MetricReport& report)
{
    std::string out = "k,threshold,recall\n";
    for (std::size_t r = 0; r < report.ks.size(); ++r) {
        for (std::size_t c = 0; c < report.thresholds.size(); ++c) {
            out += std::to_string(report.ks[r]);
            out += ',';
            out += format_number(report.thresholds[c]);
            out += ',';
            out += format_number(report.recall(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
            out += '\n';
        }
    }
    return out;
}

}  // namespace lvmr
