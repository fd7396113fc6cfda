#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "dknn/bench.hpp"
#include "dknn/io.hpp"
#include "dknn/knn.hpp"
#include "dknn/selection.hpp"
#include "dknn/verify.hpp"

namespace {

using nlohmann::json;

dknn::Point parse_query(const std::string& spec, std::size_t dim) {
    dknn::Point q;
    q.id = ~std::uint64_t{0};
    std::stringstream ss(spec);
    std::string field;
    while (std::getline(ss, field, ','))
        q.coords.push_back(std::stoll(field));
    if (q.coords.size() != dim)
        throw std::invalid_argument("query point has " +
                                    std::to_string(q.coords.size()) +
                                    " coordinates, dataset has dimension " +
                                    std::to_string(dim));
    return q;
}

std::string json_out_path(const std::string& csv_path) {
    const auto dot = csv_path.rfind('.');
    if (dot == std::string::npos) return csv_path + ".json";
    return csv_path.substr(0, dot) + ".json";
}

json result_json(const dknn::ProtocolResult& res) {
    json j;
    j["neighbor_ids"] = res.ids;
    j["rounds"] = res.metrics.rounds;
    j["messages"] = res.metrics.messages;
    j["phases"] = json::object();
    for (const auto& [p, r] : res.metrics.phase_rounds)
        j["phases"][dknn::phase_name(p)] = r;
    j["survivors"] = res.survivors;
    j["fallback"] = res.fallback;
    return j;
}

int run(int argc, char** argv) {
    CLI::App app{"k-machine model simulator for distributed selection and l-NN"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a dataset CSV");
    std::uint64_t gen_n = 1000, gen_seed = 1, gen_labels = 0;
    std::size_t gen_d = 1;
    int gen_k = 2;
    std::string gen_dist = "uniform", gen_out;
    gen->add_option("--n", gen_n, "number of points");
    gen->add_option("--d", gen_d, "dimension (<= 16)");
    gen->add_option("--k", gen_k, "machine count used for id assignment");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--dist", gen_dist, "uniform | clustered | geometric");
    gen->add_option("--labels", gen_labels, "class count (0 = unlabeled)");
    gen->add_option("--out", gen_out, "output path")->required();

    // shared run flags
    struct RunFlags {
        std::string dataset, query, metric = "l2", algo = "knn";
        std::uint64_t l = 1, seed = 1;
        int k = 2;
        bool verify = false;
    };

    auto add_run_flags = [](CLI::App* cmd, RunFlags& f, bool with_algo) {
        cmd->add_option("--dataset", f.dataset, "dataset CSV path")->required();
        cmd->add_option("--q", f.query, "query point, comma-separated coords")
            ->required();
        cmd->add_option("--l", f.l, "neighbor count");
        cmd->add_option("--k", f.k, "machine count");
        cmd->add_option("--seed", f.seed, "run seed");
        cmd->add_option("--metric", f.metric, "l1 | l2 | linf");
        cmd->add_flag("--verify", f.verify, "check the output against the oracle");
        if (with_algo)
            cmd->add_option("--algo", f.algo, "knn | baseline");
    };

    auto* query = app.add_subcommand("query", "run one l-NN query");
    RunFlags qf;
    add_run_flags(query, qf, true);
    std::string label_mode = "classify";
    query->add_option("--label-mode", label_mode, "classify | regress");

    auto* select = app.add_subcommand(
        "select", "run distributed selection over all distance keys");
    RunFlags sf;
    add_run_flags(select, sf, false);

    // bench
    auto* bench = app.add_subcommand("bench", "run a benchmark sweep");
    dknn::BenchSpec spec;
    std::string bench_metric = "l2", bench_dist = "uniform", bench_out;
    bench->add_option("--k", spec.ks, "machine counts");
    bench->add_option("--l", spec.ls, "neighbor counts");
    bench->add_option("--n", spec.ns, "dataset sizes");
    bench->add_option("--d", spec.d, "dimension");
    bench->add_option("--trials", spec.trials, "trials per cell");
    bench->add_option("--seed", spec.seed, "sweep seed");
    bench->add_option("--metric", bench_metric, "l1 | l2 | linf");
    bench->add_option("--dist", bench_dist, "uniform | clustered | geometric");
    bench->add_option("--algo", spec.algos, "knn | baseline | selection");
    bench->add_option("--out", bench_out, "results CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage/validation errors exit 2
    }

    if (gen->parsed()) {
        dknn::Dataset ds = dknn::generate_dataset(
            gen_n, gen_d, gen_k, gen_seed,
            dknn::distribution_from_string(gen_dist), gen_labels);
        dknn::write_dataset_file(gen_out, ds);
        return 0;
    }

    if (query->parsed() || select->parsed()) {
        const RunFlags& f = query->parsed() ? qf : sf;
        const dknn::Dataset ds = dknn::read_dataset_file(f.dataset);
        const dknn::Point q = parse_query(f.query, ds.dim);
        const dknn::Metric metric = dknn::metric_from_string(f.metric);
        if (f.l > ds.size())
            throw std::invalid_argument("l exceeds dataset size");
        auto machines =
            dknn::partition(ds, f.k, f.seed, dknn::PartitionPolicy::UniformRandom);

        dknn::ProtocolResult res;
        if (select->parsed()) {
            res = dknn::run_selection_protocol(machines, q, f.l, metric, f.seed);
        } else if (f.algo == "baseline") {
            res = dknn::run_baseline(machines, q, f.l, metric, f.seed);
        } else if (f.algo == "knn") {
            dknn::KnnConfig cfg;
            cfg.l = f.l;
            cfg.metric = metric;
            cfg.seed = f.seed;
            res = dknn::run_knn(machines, q, cfg);
        } else {
            throw std::invalid_argument("unknown algorithm: " + f.algo);
        }

        json j = result_json(res);
        if (query->parsed()) {
            std::vector<std::int64_t> labels;
            bool all_labeled = !res.ids.empty();
            for (const dknn::Point& p : ds.points) {
                if (std::binary_search(res.ids.begin(), res.ids.end(), p.id)) {
                    if (p.label)
                        labels.push_back(*p.label);
                    else
                        all_labeled = false;
                }
            }
            if (all_labeled)
                j["label"] = dknn::assign_label(
                    labels, label_mode == "regress" ? dknn::LabelMode::Regress
                                                    : dknn::LabelMode::Classify);
        }
        if (f.verify)
            j["correct"] = res.ids == dknn::oracle_knn(ds, q, f.l, metric);
        std::cout << j.dump(2) << '\n';
        return 0;
    }

    // bench
    spec.metric = dknn::metric_from_string(bench_metric);
    spec.dist = dknn::distribution_from_string(bench_dist);
    spec.out_csv = bench_out;
    spec.out_json = json_out_path(bench_out);
    dknn::BenchResult result = dknn::run_bench(spec);
    {
        std::ofstream csv(spec.out_csv, std::ios::binary);
        if (!csv) throw std::runtime_error("cannot open " + spec.out_csv);
        dknn::write_trials_csv(csv, result.trials);
    }
    {
        std::ofstream js(spec.out_json, std::ios::binary);
        if (!js) throw std::runtime_error("cannot open " + spec.out_json);
        js << result.summary_json << '\n';
    }
    if (result.failed) throw dknn::BenchFailure(result.failure);
    std::cout << "wrote " << spec.out_csv << " and " << spec.out_json << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const dknn::BenchFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const dknn::ProtocolViolation& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
