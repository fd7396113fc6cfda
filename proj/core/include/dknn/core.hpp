#pragma once

#include <cstdint>
#include <compare>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dknn {

/// A single data item: unique 64-bit id, integer coordinates, optional label.
struct Point {
    std::uint64_t id = 0;
    std::vector<std::int64_t> coords;
    std::optional<std::int64_t> label;
};

enum class Metric { L1, L2Squared, LInf };

Metric metric_from_string(const std::string& s);
std::string metric_name(Metric m);

/// The only thing machines ever say about a data point: (distance, id).
/// Lexicographic order on (dist, id) is a strict total order even when
/// distances collide.
struct DistKey {
    std::uint64_t dist = 0;
    std::uint64_t id = 0;
    auto operator<=>(const DistKey&) const = default;
};

/// Strictly greater than every real key; used to pad truncated sets.
inline constexpr DistKey kSentinelKey{~std::uint64_t{0}, ~std::uint64_t{0}};

inline bool is_sentinel(const DistKey& k) { return k == kSentinelKey; }

struct Dataset {
    std::vector<Point> points;
    std::size_t dim = 0;

    std::size_t size() const { return points.size(); }
};

// Hard caps keeping squared L2 inside 64 bits and ids inside the
// (machine << 32 | index) scheme.
inline constexpr std::int64_t kMaxCoordMagnitude = std::int64_t{1} << 30;
inline constexpr std::size_t kMaxDim = 16;
inline constexpr std::uint64_t kMaxPoints = std::uint64_t{1} << 40;

/// Metric value between two points. L2 is reported squared; the order is the
/// same and everything stays in integers. Throws std::invalid_argument on a
/// dimension mismatch and std::overflow_error if the value does not fit in
/// 64 bits.
std::uint64_t distance(const Point& p, const Point& q, Metric m);

/// DistKey of p relative to query q.
DistKey dist_key(const Point& p, const Point& q, Metric m);

enum class PartitionPolicy { RoundRobin, UniformRandom };

/// Splits the dataset across k machines. Deterministic in (policy, seed).
std::vector<std::vector<Point>> partition(const Dataset& ds, int k,
                                          std::uint64_t seed,
                                          PartitionPolicy policy);

/// Brute-force l-NN by full sort of DistKeys. This is the ground truth every
/// protocol run is scored against. Returns ids sorted ascending.
std::vector<std::uint64_t> oracle_knn(const Dataset& ds, const Point& q,
                                      std::uint64_t l, Metric m);

/// l smallest of a flat key multiset, same tie-breaking. Ids sorted ascending.
std::vector<std::uint64_t> oracle_select(std::vector<DistKey> keys,
                                         std::uint64_t l);

enum class LabelMode { Classify, Regress };

/// Classify: majority label, ties to the smaller value.
/// Regress: integer mean, rounded toward negative infinity.
std::int64_t assign_label(std::span<const std::int64_t> neighbor_labels,
                          LabelMode mode);

}  // namespace dknn
