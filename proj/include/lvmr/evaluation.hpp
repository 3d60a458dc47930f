#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lvmr/timeline.hpp"

namespace lvmr {

/// How a predicted interval's overlap with ground truth is normalized.
enum class OverlapMode {
    iou,          ///< intersection / union
    gt_coverage,  ///< intersection / ground-truth duration
};

enum class MatchComparison { strict_greater, greater_equal };

enum class Averaging {
    micro,      ///< hits over all queries
    per_video,  ///< mean of per-video recalls
};

std::string_view to_string(OverlapMode mode);
std::string_view to_string(MatchComparison comparison);
std::string_view to_string(Averaging averaging);
OverlapMode parse_overlap_mode(std::string_view text);
MatchComparison parse_match_comparison(std::string_view text);
Averaging parse_averaging(std::string_view text);

double temporal_overlap(const TimeInterval& pred, const TimeInterval& gt, OverlapMode mode = OverlapMode::iou);

bool is_match(const TimeInterval& pred, const TimeInterval& gt, double threshold,
              OverlapMode mode = OverlapMode::iou,
              MatchComparison comparison = MatchComparison::strict_greater);

/// Queries are identified per video; YouCook2-style ids repeat across videos.
struct QueryKey {
    std::string video_id;
    std::string query_id;

    friend auto operator<=>(const QueryKey&, const QueryKey&) = default;
};

using PredictionMap = std::map<QueryKey, std::vector<TimeInterval>>;
using GroundTruthMap = std::map<QueryKey, TimeInterval>;

struct MatchOptions {
    OverlapMode mode = OverlapMode::iou;
    MatchComparison comparison = MatchComparison::strict_greater;
    Averaging averaging = Averaging::micro;
};

/// 0.50, 0.55, ..., 0.95.
std::vector<double> default_threshold_grid();

/// Fraction of ground-truth queries with a match among their first k
/// predictions. Every ground-truth query needs an entry in `predictions`
/// (possibly empty); a missing one is a ContractError.
double recall_at_k(const PredictionMap& predictions, const GroundTruthMap& ground_truth, std::size_t k,
                   double threshold, const MatchOptions& options = {});

/// Mean of recall_at_k over `thresholds`.
double average_recall_at_k(const PredictionMap& predictions, const GroundTruthMap& ground_truth, std::size_t k,
                           std::span<const double> thresholds, const MatchOptions& options = {});

struct GroundTruthEntry {
    std::string video_id;
    std::string query_id;
    std::string query_text;
    TimeInterval interval;
};

struct PredictionRecord {
    std::string video_id;
    std::string query_id;
    std::vector<TimeInterval> intervals;  ///< ranked, best first
};

/// {"videos": [{"video_id", "annotations": [{"query_id", "sentence", "segment": [s, e]}]}]}
/// query_id may be a string or an integer.
std::vector<GroundTruthEntry> parse_ground_truth(std::string_view json_text);

/// One predictions record per non-blank line.
std::vector<PredictionRecord> parse_predictions(std::string_view jsonl_text);

struct MetricReport {
    std::vector<std::size_t> ks;
    std::vector<double> thresholds;
    Eigen::MatrixXd recall;               ///< rows follow `ks`, columns follow `thresholds`
    std::vector<double> average_recall;   ///< one per K, mean of its recall row
    std::size_t queries_evaluated = 0;
    std::size_t queries_skipped = 0;
    MatchOptions options;
};

struct EvaluationOptions {
    std::vector<std::size_t> ks{1, 5, 10};
    std::vector<double> thresholds = default_threshold_grid();
    MatchOptions match;
    /// When false, ground-truth queries without predictions score as misses and
    /// predictions without ground truth are skipped instead of failing the join.
    bool strict_join = true;
};

MetricReport evaluate_dataset(const std::vector<PredictionRecord>& predictions,
                              const std::vector<GroundTruthEntry>& ground_truth,
                              const EvaluationOptions& options = {});

std::string report_to_json(const MetricReport& report);

/// "k,threshold,recall" header plus |ks| x |thresholds| rows.
std::string report_to_csv(const MetricReport& report);

/// Throws ContractError unless the grid is non-empty, inside (0, 1) and strictly increasing.
void validate_threshold_grid(std::span<const double> thresholds);

}  // namespace lvmr
