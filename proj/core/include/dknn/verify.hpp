#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dknn/core.hpp"
#include "dknn/selection.hpp"

namespace dknn {

/// Chi-square goodness-of-fit p-value of observed cell counts against the
/// uniform law. Requires >= 5 expected counts per cell.
double chi_square_uniform(const std::vector<std::uint64_t>& observed);

/// One protocol run scored against the brute-force oracle.
struct TrialReport {
    int k = 0;
    std::uint64_t l = 0;
    std::uint64_t n = 0;
    std::string algo;
    std::uint64_t trial = 0;
    std::uint64_t rounds = 0;
    std::uint64_t messages = 0;
    std::uint64_t survivors = 0;
    bool fallback = false;
    bool correct = false;

    std::string csv_row() const;
};

inline constexpr const char* kTrialCsvHeader =
    "k,l,n,algo,trial,rounds,messages,survivors,fallback,correct";

/// A hand-built instance with an explicit machine assignment, so degenerate
/// layouts (everything on one machine, empty machines) are exercised exactly.
struct AdversarialInstance {
    std::string name;
    Dataset ds;
    std::vector<std::vector<Point>> machines;
    Point q;
    std::uint64_t l = 0;
    Metric metric = Metric::L2Squared;
};

std::vector<AdversarialInstance> adversarial_instances();

}  // namespace dknn
