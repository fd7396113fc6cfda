#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dknn/core.hpp"
#include "dknn/io.hpp"
#include "dknn/verify.hpp"

namespace dknn {

/// Sweep description for the benchmark driver. Every cell
/// (k, l, n, algo) is run `trials` times with seeds derived from `seed`.
struct BenchSpec {
    std::vector<int> ks{16};
    std::vector<std::uint64_t> ls{1024};
    std::vector<std::uint64_t> ns{1 << 16};
    std::size_t d = 1;
    int trials = 30;
    std::uint64_t seed = 1;
    Metric metric = Metric::L2Squared;
    Distribution dist = Distribution::Uniform;
    std::vector<std::string> algos{"knn", "baseline"};
    std::string out_csv;
    std::string out_json;

    void validate() const;  // throws std::invalid_argument
};

class BenchFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BenchResult {
    std::vector<TrialReport> trials;
    std::string summary_json;
    bool failed = false;
    std::string failure;
};

/// Runs the sweep. Rows come out sorted by (k, l, n, algo, trial), so output
/// is byte-identical for a fixed spec. Oracle verification is on whenever
/// n <= 10^6; an incorrect trial sets `failed` (rows are still reported so
/// the offending trial is visible in the CSV).
BenchResult run_bench(const BenchSpec& spec);

void write_trials_csv(std::ostream& out, const std::vector<TrialReport>& rows);

}  // namespace dknn
