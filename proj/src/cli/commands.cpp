#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "lvmr/cli.hpp"
#include "lvmr/error.hpp"
#include "lvmr/file_io.hpp"

namespace lvmr {
namespace {

namespace fs = std::filesystem;

/// Command-line values that override the config file when given.
struct Overrides {
    std::optional<fs::path> config;
    std::optional<std::size_t> k_visual;
    std::optional<std::size_t> k_semantic;
    std::optional<std::size_t> k_aural;
    std::optional<std::string> mode;
    std::optional<std::string> comparison;
    std::optional<std::string> averaging;
    std::vector<double> thresholds;
    std::vector<std::size_t> ks;
    std::optional<std::string> reranker;
    std::optional<std::string> reranker_url;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    bool stopwords = false;
    bool lenient = false;

    void add_retrieval_flags(CLI::App& cmd)
    {
        cmd.add_option("--k-visual", k_visual, "Top-K clips kept by the visual stream");
        cmd.add_option("--k-semantic", k_semantic, "Top-K subtitles from the text encoder");
        cmd.add_option("--k-aural", k_aural, "Top-K subtitles kept after re-ranking");
        cmd.add_option("--reranker", reranker, "identity | http")->check(CLI::IsMember({"identity", "http"}));
        cmd.add_option("--reranker-url", reranker_url, "Rerank endpoint for --reranker http");
        cmd.add_option("--seed", seed, "Seed for mock embedding providers");
        cmd.add_option("--workers", workers, "Query worker threads (0 = one per CPU)");
        cmd.add_flag("--stopwords", stopwords, "Ignore English stopwords in the lexical heuristic");
    }

    void add_evaluation_flags(CLI::App& cmd)
    {
        cmd.add_option("--mode", mode, "Overlap measure")->check(CLI::IsMember({"iou", "gt_coverage"}));
        cmd.add_option("--comparison", comparison, "strict_greater | greater_equal")
            ->check(CLI::IsMember({"strict_greater", "greater_equal"}));
        cmd.add_option("--averaging", averaging, "micro | per_video")->check(CLI::IsMember({"micro", "per_video"}));
        cmd.add_option("--thresholds", thresholds, "Comma-separated intersection thresholds")->delimiter(',');
        cmd.add_option("--ks", ks, "Comma-separated K values")->delimiter(',');
        cmd.add_flag("--lenient", lenient, "Score missing predictions as misses instead of failing the join");
    }

    RunConfig resolve() const
    {
        RunConfig cfg = config ? load_run_config(*config) : RunConfig{};
        if (k_visual) cfg.retrieval.k_visual = *k_visual;
        if (k_semantic) cfg.retrieval.k_semantic = *k_semantic;
        if (k_aural) cfg.retrieval.k_aural = *k_aural;
        if (stopwords) cfg.retrieval.tokenizer.filter_stopwords = true;
        if (mode) cfg.evaluation.match.mode = parse_overlap_mode(*mode);
        if (comparison) cfg.evaluation.match.comparison = parse_match_comparison(*comparison);
        if (averaging) cfg.evaluation.match.averaging = parse_averaging(*averaging);
        if (!thresholds.empty()) cfg.evaluation.thresholds = thresholds;
        if (!ks.empty()) cfg.evaluation.ks = ks;
        if (lenient) cfg.evaluation.strict_join = false;
        if (reranker) cfg.reranker.kind = *reranker;
        if (reranker_url) cfg.reranker.url = *reranker_url;
        if (seed) cfg.seed = *seed;
        if (workers) cfg.workers = *workers;
        cfg.validate();
        return cfg;
    }
};

std::map<std::string, std::vector<Clip>> load_manifests(const std::vector<fs::path>& paths)
{
    std::map<std::string, std::vector<Clip>> videos;
    for (const auto& path : paths) {
        auto manifest = parse_manifest(read_file(path));
        if (videos.count(manifest.video_id) != 0) {
            throw ContractError("video " + manifest.video_id + " appears in more than one manifest");
        }
        videos.emplace(manifest.video_id, std::move(manifest.clips));
    }
    return videos;
}

Transcript load_transcript(const fs::path& path)
{
    try {
        return parse_transcript(read_file(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

MetricReport evaluate_files(const std::string& predictions, const std::string& ground_truth, const RunConfig& cfg)
{
    return evaluate_dataset(parse_predictions(predictions), parse_ground_truth(ground_truth), cfg.evaluation);
}

fs::path default_curves_path(const fs::path& report)
{
    auto curves = report;
    curves.replace_extension(".csv");
    return curves;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Dual-stream moment retrieval and Recall@K evaluation for long videos", "lvmr"};
    app.require_subcommand(1);

    auto* segment = app.add_subcommand("segment", "Split a transcript into subtitle-aligned clips");
    fs::path transcript_path;
    std::optional<fs::path> segment_out;
    segment->add_option("transcript", transcript_path, "Transcript JSON")->required();
    segment->add_option("--out", segment_out, "Clip manifest output (default: standard output)");

    auto* retrieve = app.add_subcommand("retrieve", "Retrieve clips for every query");
    Overrides retrieve_flags;
    std::vector<fs::path> manifests;
    fs::path queries_path;
    fs::path predictions_out;
    retrieve->add_option("--config", retrieve_flags.config, "Run config JSON");
    retrieve->add_option("--manifest", manifests, "Clip manifest(s) from `segment`")->required();
    retrieve->add_option("--queries", queries_path, "Queries JSON")->required();
    retrieve->add_option("--out", predictions_out, "Predictions output (JSON lines)")->required();
    retrieve_flags.add_retrieval_flags(*retrieve);

    auto* evaluate = app.add_subcommand("evaluate", "Score predictions against ground truth");
    Overrides evaluate_flags;
    fs::path predictions_path;
    fs::path ground_truth_path;
    std::optional<fs::path> report_out;
    std::optional<fs::path> curves_out;
    evaluate->add_option("--config", evaluate_flags.config, "Run config JSON");
    evaluate->add_option("--predictions", predictions_path, "Predictions (JSON lines)")->required();
    evaluate->add_option("--ground-truth", ground_truth_path, "Ground-truth JSON")->required();
    evaluate->add_option("--out", report_out, "Report JSON output (default: standard output)");
    evaluate->add_option("--curves", curves_out, "Recall-vs-threshold CSV (default: report path with .csv)");
    evaluate_flags.add_evaluation_flags(*evaluate);

    auto* pipeline = app.add_subcommand("pipeline", "segment + retrieve + evaluate over ground-truth queries");
    Overrides pipeline_flags;
    std::vector<fs::path> transcripts;
    fs::path pipeline_gt;
    fs::path pipeline_out;
    pipeline->add_option("--config", pipeline_flags.config, "Run config JSON");
    pipeline->add_option("--transcript", transcripts, "Transcript JSON, one per video")->required();
    pipeline->add_option("--ground-truth", pipeline_gt, "Ground-truth JSON")->required();
    pipeline->add_option("--out", pipeline_out, "Output directory")->required();
    pipeline_flags.add_retrieval_flags(*pipeline);
    pipeline_flags.add_evaluation_flags(*pipeline);

    std::vector<const char*> argv;
    argv.push_back("lvmr");
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*segment) {
            const auto transcript = load_transcript(transcript_path);
            const auto manifest = serialize_manifest(transcript.video_id(), segment_video(transcript));
            if (segment_out) {
                write_file_atomic(*segment_out, manifest);
            } else {
                out << manifest;
            }
        } else if (*retrieve) {
            const auto cfg = retrieve_flags.resolve();
            const auto videos = load_manifests(manifests);
            const auto queries = parse_queries(read_file(queries_path));
            write_file_atomic(predictions_out, run_retrieval(videos, queries, cfg));
        } else if (*evaluate) {
            const auto cfg = evaluate_flags.resolve();
            const auto report = evaluate_files(read_file(predictions_path), read_file(ground_truth_path), cfg);
            if (report_out) {
                write_file_atomic(*report_out, report_to_json(report));
                write_file_atomic(curves_out.value_or(default_curves_path(*report_out)), report_to_csv(report));
            } else {
                out << report_to_json(report);
                if (curves_out) {
                    write_file_atomic(*curves_out, report_to_csv(report));
                }
            }
        } else if (*pipeline) {
            const auto cfg = pipeline_flags.resolve();
            fs::create_directories(pipeline_out / "manifests");

            std::map<std::string, std::vector<Clip>> videos;
            for (const auto& path : transcripts) {
                const auto transcript = load_transcript(path);
                auto clips = segment_video(transcript);
                write_file_atomic(pipeline_out / "manifests" / (transcript.video_id() + ".json"),
                                  serialize_manifest(transcript.video_id(), clips));
                if (!videos.emplace(transcript.video_id(), std::move(clips)).second) {
                    throw ContractError("video " + transcript.video_id() + " has more than one transcript");
                }
            }

            const auto gt_text = read_file(pipeline_gt);
            std::vector<QueryRequest> queries;
            for (const auto& entry : parse_ground_truth(gt_text)) {
                if (videos.count(entry.video_id) == 0) {
                    throw ContractError("no transcript for ground-truth video " + entry.video_id);
                }
                queries.push_back({entry.video_id, entry.query_id, entry.query_text});
            }

            const auto predictions = run_retrieval(videos, queries, cfg);
            write_file_atomic(pipeline_out / "predictions.jsonl", predictions);
            const auto report = evaluate_files(predictions, gt_text, cfg);
            write_file_atomic(pipeline_out / "report.json", report_to_json(report));
            write_file_atomic(pipeline_out / "curves.csv", report_to_csv(report));
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace lvmr
