// One line per acceptance criterion; exit status is nonzero if any fails.
// Usage: acceptance [unit-test-executable ...]
// The unit-test executables are run and timed for the suite-runtime check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "lvmr/aural.hpp"
#include "lvmr/cli.hpp"
#include "lvmr/embedding.hpp"
#include "lvmr/evaluation.hpp"
#include "lvmr/file_io.hpp"
#include "lvmr/fusion.hpp"
#include "lvmr/log.hpp"
#include "synthetic.hpp"

using namespace lvmr;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

const fs::path kFixtures = LVMR_FIXTURES;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Collects the first few failure messages of one criterion.
struct Check {
    std::size_t failures = 0;
    std::string first;

    void expect(bool ok, const std::string& what)
    {
        if (ok) return;
        if (failures++ == 0) first = what;
    }
    bool passed() const { return failures == 0; }
};

int g_failed = 0;

void report(const std::string& name, const Check& check, const std::string& detail)
{
    std::cout << (check.passed() ? "[PASS] " : "[FAIL] ") << name << " | " << detail;
    if (!check.passed()) {
        std::cout << " | " << check.failures << " failure(s), first: " << check.first;
    }
    std::cout << "\n" << std::flush;
    g_failed += check.passed() ? 0 : 1;
}

/// Runs `body`, turning an escaped exception into a failure.
void guarded(Check& check, const std::function<void()>& body)
{
    try {
        body();
    } catch (const std::exception& e) {
        check.expect(false, std::string("exception: ") + e.what());
    }
}

// ---------------------------------------------------------------- metrics

bool metric_oracle()
{
    Check check;
    std::size_t datasets = 0;
    const auto start = Clock::now();
    guarded(check, [&] {
        std::mt19937_64 rng(20240611);
        for (int trial = 0; trial < 120; ++trial) {
            const auto data = synthetic::random_dataset(rng);
            for (auto mode : {OverlapMode::iou, OverlapMode::gt_coverage}) {
                EvaluationOptions options;
                options.match.mode = mode;
                const auto report = evaluate_dataset(data.predictions, data.ground_truth, options);
                const auto oracle = synthetic::brute_force_recall(data, options.ks, options.thresholds, mode);
                for (std::size_t k = 0; k < options.ks.size(); ++k) {
                    for (std::size_t t = 0; t < options.thresholds.size(); ++t) {
                        const double diff = report.recall(Eigen::Index(k), Eigen::Index(t)) - oracle.recall[k][t];
                        check.expect(diff == 0.0, "dataset " + std::to_string(trial) + " recall differs by " +
                                                      std::to_string(diff));
                    }
                    check.expect(report.average_recall[k] == oracle.average[k],
                                 "dataset " + std::to_string(trial) + " average differs");
                }
            }
            ++datasets;
        }
    });
    const double elapsed = seconds_since(start);
    check.expect(elapsed < 30.0, "runtime " + std::to_string(elapsed) + " s");
    std::ostringstream detail;
    detail << datasets << " datasets x {iou, gt_coverage}, exact equality, " << elapsed << " s";
    report("metric oracle equivalence", check, detail.str());
    return check.passed();
}

bool monotonicity()
{
    Check check;
    std::size_t datasets = 0;
    guarded(check, [&] {
        std::mt19937_64 rng(77);
        for (int trial = 0; trial < 120; ++trial) {
            const auto data = synthetic::random_dataset(rng);
            EvaluationOptions options;
            options.ks = {1, 2, 3, 5, 10, 15, 20};
            options.match.mode = trial % 2 == 0 ? OverlapMode::iou : OverlapMode::gt_coverage;
            const auto report = evaluate_dataset(data.predictions, data.ground_truth, options);
            check.expect(report.recall.cols() == 10, "grid does not have 10 thresholds");
            for (Eigen::Index k = 0; k < report.recall.rows(); ++k) {
                double sum = 0.0;
                for (Eigen::Index t = 0; t < report.recall.cols(); ++t) {
                    if (t > 0) {
                        check.expect(report.recall(k, t) <= report.recall(k, t - 1), "increases with threshold");
                    }
                    if (k > 0) {
                        check.expect(report.recall(k, t) >= report.recall(k - 1, t), "decreases with K");
                    }
                    sum += report.recall(k, t);
                }
                const double mean = sum / double(report.recall.cols());
                check.expect(report.average_recall[std::size_t(k)] == mean, "average is not the mean of its cells");
            }
            ++datasets;
        }
    });
    report("monotonicity and averaging", check, std::to_string(datasets) + " datasets, 7 K values, 10 thresholds");
    return check.passed();
}

// -------------------------------------------------------------- similarity

long double naive_cosine(const std::vector<long double>& a, const std::vector<long double>& b)
{
    long double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

bool similarity()
{
    Check check;
    double worst = 0.0;
    guarded(check, [&] {
        std::mt19937_64 rng(4242);
        std::uniform_int_distribution<int> dims(2, 1024);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> log_scale(-3.0, 3.0);
        for (int pair = 0; pair < 10000; ++pair) {
            const int dim = dims(rng);
            Eigen::VectorXd a(dim);
            Eigen::VectorXd b(dim);
            for (int i = 0; i < dim; ++i) {
                a(i) = normal(rng);
                b(i) = pair % 5 == 0 ? a(i) + 0.01 * normal(rng) : normal(rng);  // some near-parallel pairs
            }
            if (pair % 7 == 0) b = -b;
            std::vector<long double> la(a.data(), a.data() + dim);
            std::vector<long double> lb(b.data(), b.data() + dim);
            const double oracle = static_cast<double>(naive_cosine(la, lb));
            const double got = cosine_similarity(a, b);
            const double c = std::pow(10.0, log_scale(rng));
            const Eigen::VectorXd scaled = c * a;
            const double errors[] = {std::abs(got - oracle), std::abs(cosine_similarity(scaled, b) - got),
                                     std::abs(cosine_similarity(b, a) - got)};
            for (double e : errors) {
                worst = std::max(worst, e);
                check.expect(e <= 1e-9, "pair " + std::to_string(pair) + " error " + std::to_string(e));
            }

            // Single-precision embeddings take the same path.
            const Eigen::VectorXf fa = a.cast<float>();
            const Eigen::VectorXf fb = b.cast<float>();
            std::vector<long double> lfa(fa.data(), fa.data() + dim);
            std::vector<long double> lfb(fb.data(), fb.data() + dim);
            const double ferr = std::abs(cosine_similarity(fa, fb) - double(naive_cosine(lfa, lfb)));
            worst = std::max(worst, ferr);
            check.expect(ferr <= 1e-9, "float pair " + std::to_string(pair));
        }
    });
    std::ostringstream detail;
    detail << "10000 pairs, dims 2-1024, oracle/scale/symmetry max error " << worst;
    report("similarity correctness", check, detail.str());
    return check.passed();
}

// ------------------------------------------------------------------ fusion

bool fusion_invariants()
{
    Check check;
    std::size_t empties = 0;
    guarded(check, [&] {
        std::mt19937_64 rng(31337);
        auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
        std::uniform_real_distribution<double> score(-1.0, 1.0);
        for (int trial = 0; trial < 2000; ++trial) {
            const int pool = uniform(1, 60);
            IntervalMap intervals;
            std::vector<std::string> ids;
            for (int i = 0; i < pool; ++i) {
                ids.push_back("v:" + std::to_string(i));
                intervals.emplace(ids.back(), TimeInterval(i, i + 1));
            }
            auto draw = [&](int n) {
                std::vector<std::string> picked = ids;
                std::shuffle(picked.begin(), picked.end(), rng);
                picked.resize(std::size_t(std::min(n, pool)));
                std::vector<ScoredItem> list;
                for (auto& id : picked) {
                    // coarse scores make ties common
                    list.push_back({id, trial % 3 == 0 ? std::round(score(rng) * 4) / 4 : score(rng)});
                }
                sort_ranked(list, intervals);
                return list;
            };
            auto visual = draw(uniform(0, 15));
            auto aural = draw(uniform(0, 15));
            const auto result = fuse(visual, aural, intervals);

            std::map<std::string, double> v;
            std::map<std::string, double> a;
            for (auto& item : visual) v[item.clip_id] = item.score;
            for (auto& item : aural) a[item.clip_id] = item.score;
            std::set<std::string> expected;
            for (auto& [id, s] : v) {
                if (a.count(id)) expected.insert(id);
            }
            std::set<std::string> got;
            for (const auto& e : result.entries) {
                got.insert(e.clip_id);
                check.expect(e.visual_score == v[e.clip_id] && e.aural_score == a[e.clip_id], "stream score mismatch");
                check.expect(e.fused_score == (v[e.clip_id] + a[e.clip_id]) / 2.0, "fused score is not the mean");
                check.expect(e.interval == intervals.at(e.clip_id), "interval mismatch");
            }
            check.expect(got == expected, "membership differs from set intersection");
            check.expect(got.size() == result.entries.size(), "duplicate fused entries");
            for (std::size_t i = 1; i < result.entries.size(); ++i) {
                const auto& p = result.entries[i - 1];
                const auto& q = result.entries[i];
                check.expect(ranks_before(p.fused_score, p.interval, p.clip_id, q.fused_score, q.interval, q.clip_id),
                             "fused list out of order");
            }
            const bool empty = expected.empty();
            empties += empty ? 1 : 0;
            check.expect((result.status == RetrievalStatus::empty_intersection) == empty, "wrong status");
        }
    });
    report("fusion invariants", check, "2000 random list pairs, " + std::to_string(empties) + " empty intersections");
    return check.passed();
}

// ------------------------------------------------------------- end to end

std::string golden_run(const fs::path& out_dir)
{
    const auto golden = kFixtures / "golden-5clips";
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli({"pipeline", "--config", (golden / "config.json").string(), "--transcript",
                              (golden / "transcript.json").string(), "--ground-truth",
                              (golden / "ground_truth.json").string(), "--out", out_dir.string()},
                             out, err);
    return code == 0 ? std::string() : "pipeline exited " + std::to_string(code) + ": " + err.str();
}

bool golden_pipeline(const fs::path& scratch)
{
    Check check;
    guarded(check, [&] {
        const auto expected = kFixtures / "golden-5clips" / "expected";
        const auto first = scratch / "golden1";
        const auto second = scratch / "golden2";
        for (const auto& dir : {first, second}) {
            const auto error = golden_run(dir);
            check.expect(error.empty(), error);
        }
        for (const char* name : {"predictions.jsonl", "report.json", "curves.csv"}) {
            const auto a = read_file(first / name);
            check.expect(a == read_file(second / name), std::string(name) + " differs between runs");
            check.expect(a == read_file(expected / name), std::string(name) + " differs from frozen copy");
        }
    });
    report("end-to-end golden run", check, "5-clip fixture, seeded mock providers, identity reranker, 2 runs");
    return check.passed();
}

bool perfect_and_null()
{
    Check check;
    std::vector<double> averages;
    guarded(check, [&] {
        for (const auto& [name, target] : {std::pair{"perfect", 1.0}, std::pair{"disjoint", 0.0}}) {
            const auto dir = kFixtures / name;
            const auto report = evaluate_dataset(parse_predictions(read_file(dir / "predictions.jsonl")),
                                                 parse_ground_truth(read_file(dir / "ground_truth.json")), {});
            check.expect(report.ks == std::vector<std::size_t>{1, 5, 10}, "unexpected K list");
            for (double avg : report.average_recall) {
                averages.push_back(avg);
                check.expect(avg == target, std::string(name) + " average " + std::to_string(avg));
            }
        }
    });
    std::ostringstream detail;
    detail << "Avg R@{1,5,10}:";
    for (double a : averages) detail << " " << a;
    report("perfect/null fixtures", check, detail.str());
    return check.passed();
}

// -------------------------------------------------------------- robustness

class ScriptedReranker final : public Reranker {
  public:
    explicit ScriptedReranker(std::vector<std::string> answer) : m_answer(std::move(answer)) {}
    std::vector<std::string> rerank(std::string_view, const std::vector<RerankCandidate>&) override
    {
        return m_answer;
    }

  private:
    std::vector<std::string> m_answer;
};

bool reranker_robustness()
{
    Check check;
    std::size_t cases = 0;
    auto previous = set_warning_sink([](std::string_view) {});
    guarded(check, [&] {
        std::mt19937_64 rng(5150);
        auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
        const std::vector<std::string> prose = {"The",    "most",    "relevant", "clip", "is",  "probably",
                                                "number", "cook:3,", "because",  "it",   "shows", "oil."};
        for (int trial = 0; trial < 3000; ++trial) {
            std::vector<Candidate> entries;
            const int n = uniform(0, 40);
            for (int i = 0; i < n; ++i) {
                entries.push_back({"cook:" + std::to_string(i), "text " + std::to_string(i),
                                   std::uniform_real_distribution<double>(-1, 1)(rng),
                                   i % 2 ? CandidateOrigin::semantic : CandidateOrigin::lexical});
            }
            std::shuffle(entries.begin(), entries.end(), rng);
            const CandidateSet candidates(entries);

            std::vector<std::string> answer;
            switch (trial % 5) {
                case 0:  // empty
                    break;
                case 1:  // unknown ids mixed in
                    for (int i = 0; i < uniform(0, 60); ++i) answer.push_back("cook:" + std::to_string(uniform(-5, 80)));
                    break;
                case 2:  // heavy duplication
                    for (int i = 0; i < uniform(0, 200); ++i) answer.push_back("cook:" + std::to_string(uniform(0, 3)));
                    break;
                case 3:  // prose-length answer split into words
                    for (int i = 0; i < 5000; ++i) answer.push_back(prose[std::size_t(uniform(0, int(prose.size()) - 1))]);
                    break;
                default:  // valid permutation
                    for (const auto& e : entries) answer.push_back(e.clip_id);
                    std::shuffle(answer.begin(), answer.end(), rng);
            }
            const std::size_t k_final = std::size_t(uniform(1, 15));
            ScriptedReranker reranker(answer);
            const auto out = rerank_candidates(candidates, "query", reranker, k_final);

            // Independent repair: first valid occurrences, then omitted in candidate order.
            std::unordered_map<std::string, double> similarity;
            for (const auto& e : entries) similarity[e.clip_id] = e.text_similarity;
            std::vector<std::string> expected;
            std::set<std::string> used;
            for (const auto& id : answer) {
                if (similarity.count(id) && used.insert(id).second) expected.push_back(id);
            }
            for (const auto& e : entries) {
                if (used.insert(e.clip_id).second) expected.push_back(e.clip_id);
            }
            if (expected.size() > k_final) expected.resize(k_final);

            check.expect(out.size() == std::min<std::size_t>(k_final, entries.size()), "wrong output length");
            check.expect(out.size() == expected.size(), "length differs from repaired answer");
            for (std::size_t i = 0; i < out.size() && i < expected.size(); ++i) {
                check.expect(out[i].clip_id == expected[i], "order differs at " + std::to_string(i));
                check.expect(out[i].score == similarity[out[i].clip_id], "score is not the text similarity");
            }
            ++cases;
        }
    });
    set_warning_sink(std::move(previous));
    report("reranker robustness", check,
           std::to_string(cases) + " candidate sets: empty, unknown, duplicate, 5000-token prose, permuted answers");
    return check.passed();
}

// ----------------------------------------------------------------- runtime

bool suite_runtime(const std::vector<std::string>& unit_tests, Clock::time_point start)
{
    Check check;
    for (const auto& exe : unit_tests) {
        const std::string command = "\"" + exe + "\" > /dev/null 2>&1";
        check.expect(std::system(command.c_str()) == 0, exe + " failed");
    }
    const double elapsed = seconds_since(start);
    check.expect(elapsed < 60.0, "took " + std::to_string(elapsed) + " s");
    std::ostringstream detail;
    detail << "acceptance checks + " << unit_tests.size() << " unit suites in " << elapsed << " s, offline";
    report("full primary suite under one minute", check, detail.str());
    return check.passed();
}

}  // namespace

int main(int argc, char** argv)
{
    const auto start = Clock::now();
    const fs::path scratch = fs::temp_directory_path() / ("lvmr_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(scratch);
    fs::create_directories(scratch);

    bool properties = true;
    properties &= metric_oracle();
    properties &= monotonicity();
    properties &= similarity();
    properties &= fusion_invariants();
    properties &= golden_pipeline(scratch);
    properties &= perfect_and_null();
    properties &= reranker_robustness();
    suite_runtime(std::vector<std::string>(argv + 1, argv + argc), start);

    // Benchmark numbers need GPU encoders and the full cooking-video corpus;
    // they are shown for context and acceptance rests on the properties above.
    Check table;
    table.expect(properties, "a property criterion failed");
    report("reference benchmark numbers (context only)", table,
           "VideoCLIP-XL Avg R@1/5/10 = 28.56/44.13/44.41 %, not reproduced at desk scale");

    fs::remove_all(scratch);
    std::cout << (g_failed == 0 ? "all criteria passed" : std::to_string(g_failed) + " criteria failed") << "\n";
    return g_failed == 0 ? 0 : 1;
}
