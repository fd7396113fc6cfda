#include "dknn/bench.hpp"

#include <algorithm>
#include <json.hpp>
#include <ostream>

#include "dknn/knn.hpp"
#include "dknn/selection.hpp"

namespace dknn {
namespace {

using nlohmann::json;

double median(std::vector<std::uint64_t> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    if (n % 2 == 1) return static_cast<double>(v[n / 2]);
    return (static_cast<double>(v[n / 2 - 1]) + static_cast<double>(v[n / 2])) / 2.0;
}

double mean(const std::vector<std::uint64_t>& v) {
    if (v.empty()) return 0.0;
    double sum = 0.0;
    for (std::uint64_t x : v) sum += static_cast<double>(x);
    return sum / static_cast<double>(v.size());
}

ProtocolResult run_algo(const std::string& algo,
                        const std::vector<std::vector<Point>>& machines,
                        const Point& q, std::uint64_t l, Metric metric,
                        std::uint64_t seed, std::uint64_t trial) {
    if (algo == "knn") {
        KnnConfig cfg;
        cfg.l = l;
        cfg.metric = metric;
        cfg.seed = seed;
        return run_knn(machines, q, cfg, trial, /*keep_log=*/false);
    }
    if (algo == "baseline")
        return run_baseline(machines, q, l, metric, seed, trial,
                            /*keep_log=*/false);
    if (algo == "selection")
        return run_selection_protocol(machines, q, l, metric, seed, trial,
                                      /*keep_log=*/false);
    throw std::invalid_argument("unknown algorithm: " + algo);
}

}  // namespace

void BenchSpec::validate() const {
    if (ks.empty() || ls.empty() || ns.empty() || algos.empty())
        throw std::invalid_argument("bench: empty sweep list");
    for (int k : ks)
        if (k < 2) throw std::invalid_argument("bench: k must be >= 2");
    for (std::uint64_t n : ns)
        if (n == 0) throw std::invalid_argument("bench: n must be positive");
    for (std::uint64_t l : ls)
        if (l == 0) throw std::invalid_argument("bench: l must be positive");
    if (trials < 1) throw std::invalid_argument("bench: trials must be >= 1");
    if (d < 1 || d > kMaxDim)
        throw std::invalid_argument("bench: dimension out of range");
    for (const std::string& a : algos)
        if (a != "knn" && a != "baseline" && a != "selection")
            throw std::invalid_argument("bench: unknown algorithm " + a);
}

void write_trials_csv(std::ostream& out, const std::vector<TrialReport>& rows) {
    out << kTrialCsvHeader << '\n';
    for (const TrialReport& row : rows) out << row.csv_row() << '\n';
}

BenchResult run_bench(const BenchSpec& spec) {
    spec.validate();
    BenchResult result;
    bool any_incorrect = false;
    std::string first_failure;

    json summary;
    summary["cells"] = json::array();

    for (int k : spec.ks) {
        for (std::uint64_t n : spec.ns) {
            const Dataset ds =
                generate_dataset(n, spec.d, k, spec.seed, spec.dist);
            const bool verify = n <= 1'000'000;
            for (std::uint64_t l : spec.ls) {
                if (l > n) continue;
                for (const std::string& algo : spec.algos) {
                    std::vector<std::uint64_t> rounds, messages;
                    for (int t = 0; t < spec.trials; ++t) {
                        const auto trial = static_cast<std::uint64_t>(t);
                        // Per-cell stream so cells are independent of sweep
                        // order.
                        Rng cell_rng(spec.seed,
                                     (static_cast<std::uint64_t>(k) << 40) ^
                                         (n << 20) ^ l,
                                     trial);
                        const std::uint64_t run_seed = cell_rng.next();
                        auto machines = partition(
                            ds, k, run_seed, PartitionPolicy::UniformRandom);
                        const Point q = random_query(spec.d, run_seed, trial);
                        ProtocolResult res = run_algo(algo, machines, q, l,
                                                      spec.metric, run_seed,
                                                      trial);
                        TrialReport rep;
                        rep.k = k;
                        rep.l = l;
                        rep.n = n;
                        rep.algo = algo;
                        rep.trial = trial;
                        rep.rounds = res.metrics.rounds;
                        rep.messages = res.metrics.messages;
                        rep.survivors = res.survivors;
                        rep.fallback = res.fallback;
                        rep.correct = true;
                        if (verify) {
                            rep.correct =
                                res.ids == oracle_knn(ds, q, l, spec.metric);
                            if (!rep.correct && !any_incorrect) {
                                any_incorrect = true;
                                first_failure = "cell k=" + std::to_string(k) +
                                                " l=" + std::to_string(l) +
                                                " n=" + std::to_string(n) +
                                                " algo=" + algo + " trial=" +
                                                std::to_string(t);
                            }
                        }
                        rounds.push_back(rep.rounds);
                        messages.push_back(rep.messages);
                        result.trials.push_back(std::move(rep));
                    }
                    json cell;
                    cell["k"] = k;
                    cell["l"] = l;
                    cell["n"] = n;
                    cell["algo"] = algo;
                    cell["median_rounds"] = median(rounds);
                    cell["mean_rounds"] = mean(rounds);
                    cell["max_rounds"] =
                        *std::max_element(rounds.begin(), rounds.end());
                    cell["median_messages"] = median(messages);
                    cell["mean_messages"] = mean(messages);
                    cell["max_messages"] =
                        *std::max_element(messages.begin(), messages.end());
                    summary["cells"].push_back(std::move(cell));
                }
            }
        }
    }

    std::stable_sort(result.trials.begin(), result.trials.end(),
                     [](const TrialReport& a, const TrialReport& b) {
                         return std::tie(a.k, a.l, a.n, a.algo, a.trial) <
                                std::tie(b.k, b.l, b.n, b.algo, b.trial);
                     });

    // Round-count ratio of the baseline over the fast algorithm, the
    // counter analogue of a wall-clock speedup table.
    json ratios = json::array();
    for (const json& cell : summary["cells"]) {
        if (cell["algo"] != "knn") continue;
        for (const json& other : summary["cells"]) {
            if (other["algo"] == "baseline" && other["k"] == cell["k"] &&
                other["l"] == cell["l"] && other["n"] == cell["n"]) {
                json row;
                row["k"] = cell["k"];
                row["l"] = cell["l"];
                row["n"] = cell["n"];
                const double knn_rounds = cell["median_rounds"];
                row["baseline_over_knn_rounds"] =
                    knn_rounds > 0.0
                        ? other["median_rounds"].get<double>() / knn_rounds
                        : 0.0;
                ratios.push_back(std::move(row));
            }
        }
    }
    summary["round_ratio"] = std::move(ratios);
    result.summary_json = summary.dump(2);

    if (any_incorrect) {
        result.failed = true;
        result.failure = "bench: output differed from oracle at " + first_failure;
    }
    return result;
}

}  // namespace dknn
