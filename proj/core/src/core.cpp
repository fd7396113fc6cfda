#include "dknn/core.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <stdexcept>

#include "dknn/rng.hpp"

namespace dknn {

Metric metric_from_string(const std::string& s) {
    if (s == "l1") return Metric::L1;
    if (s == "l2" || s == "l2sq") return Metric::L2Squared;
    if (s == "linf") return Metric::LInf;
    throw std::invalid_argument("unknown metric: " + s);
}

std::string metric_name(Metric m) {
    switch (m) {
        case Metric::L1: return "l1";
        case Metric::L2Squared: return "l2";
        case Metric::LInf: return "linf";
    }
    std::abort();
}

std::uint64_t distance(const Point& p, const Point& q, Metric m) {
    if (p.coords.size() != q.coords.size())
        throw std::invalid_argument("distance: dimension mismatch");
    unsigned __int128 acc = 0;
    for (std::size_t i = 0; i < p.coords.size(); ++i) {
        const std::int64_t diff = p.coords[i] - q.coords[i];
        const std::uint64_t mag =
            diff < 0 ? static_cast<std::uint64_t>(-(diff + 1)) + 1
                     : static_cast<std::uint64_t>(diff);
        switch (m) {
            case Metric::L1:
                acc += mag;
                break;
            case Metric::L2Squared:
                acc += static_cast<unsigned __int128>(mag) * mag;
                break;
            case Metric::LInf:
                acc = std::max<unsigned __int128>(acc, mag);
                break;
        }
    }
    if (acc > ~std::uint64_t{0})
        throw std::overflow_error("distance: value exceeds 64 bits");
    return static_cast<std::uint64_t>(acc);
}

DistKey dist_key(const Point& p, const Point& q, Metric m) {
    return DistKey{distance(p, q, m), p.id};
}

std::vector<std::vector<Point>> partition(const Dataset& ds, int k,
                                          std::uint64_t seed,
                                          PartitionPolicy policy) {
    if (k < 2) throw std::invalid_argument("partition: k must be >= 2");
    std::vector<std::vector<Point>> out(static_cast<std::size_t>(k));
    Rng rng(seed, 0xda7a, 0);
    for (std::size_t i = 0; i < ds.points.size(); ++i) {
        const std::size_t machine =
            policy == PartitionPolicy::RoundRobin
                ? i % static_cast<std::size_t>(k)
                : static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(k)));
        out[machine].push_back(ds.points[i]);
    }
    return out;
}

std::vector<std::uint64_t> oracle_select(std::vector<DistKey> keys,
                                         std::uint64_t l) {
    if (l > keys.size())
        throw std::invalid_argument("oracle: l exceeds point count");
    std::sort(keys.begin(), keys.end());
    std::vector<std::uint64_t> ids;
    ids.reserve(l);
    for (std::uint64_t i = 0; i < l; ++i) ids.push_back(keys[i].id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<std::uint64_t> oracle_knn(const Dataset& ds, const Point& q,
                                      std::uint64_t l, Metric m) {
    if (l > ds.points.size())
        throw std::invalid_argument("oracle_knn: l exceeds dataset size");
    std::vector<DistKey> keys;
    keys.reserve(ds.points.size());
    for (const Point& p : ds.points) keys.push_back(dist_key(p, q, m));
    return oracle_select(std::move(keys), l);
}

std::int64_t assign_label(std::span<const std::int64_t> neighbor_labels,
                          LabelMode mode) {
    if (neighbor_labels.empty())
        throw std::invalid_argument("assign_label: empty label sequence");
    if (mode == LabelMode::Classify) {
        std::map<std::int64_t, std::size_t> counts;
        for (std::int64_t lab : neighbor_labels) ++counts[lab];
        // map iteration is ascending, so ties resolve to the smaller label
        std::int64_t best = counts.begin()->first;
        std::size_t best_count = 0;
        for (const auto& [lab, c] : counts) {
            if (c > best_count) {
                best = lab;
                best_count = c;
            }
        }
        return best;
    }
    __int128 sum = 0;
    for (std::int64_t lab : neighbor_labels) sum += lab;
    const auto n = static_cast<__int128>(neighbor_labels.size());
    __int128 quot = sum / n;
    if (sum % n != 0 && sum < 0) --quot;  // floor, not truncation
    return static_cast<std::int64_t>(quot);
}

}  // namespace dknn
