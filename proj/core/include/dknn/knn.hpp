#pragma once

#include <cstdint>
#include <vector>

#include "dknn/core.hpp"
#include "dknn/rng.hpp"
#include "dknn/selection.hpp"
#include "dknn/sim.hpp"

namespace dknn {

struct KnnConfig {
    std::uint64_t l = 1;
    std::uint32_t sample_factor = 12;
    std::uint32_t rank_factor = 21;
    Metric metric = Metric::L2Squared;
    std::uint64_t seed = 0;
};

/// ceil(log2(x)); 0 for x <= 1.
std::uint32_t ceil_log2(std::uint64_t x);

/// A machine's l smallest local keys w.r.t. q, padded with sentinels to
/// exactly l entries. Purely local: 0 rounds, 0 messages. Result is sorted.
std::vector<DistKey> local_truncate(const std::vector<Point>& local,
                                    const Point& q, std::uint64_t l, Metric m);

/// Sampling phase of the fast l-NN algorithm: every machine draws
/// m = sample_factor * ceil_log2(l) keys uniformly with replacement from its
/// padded set and streams them to the leader (m rounds), the leader sorts all
/// k*m samples and broadcasts the one at 1-based rank
/// min(rank_factor * ceil_log2(l), k*m). Returns the pruning key r.
DistKey sample_phase(Engine& e, int leader,
                     const std::vector<std::vector<DistKey>>& padded,
                     const KnnConfig& cfg, std::vector<Rng>& rngs);

/// Local pruning: keep real (non-sentinel) keys <= r.
std::vector<DistKey> prune(const std::vector<DistKey>& keys, const DistKey& r);

/// Full Algorithm-2 pipeline: election, truncation, sampling, pruning, then
/// selection over the survivors. If pruning left fewer than l keys (a low
/// probability event) the selection reruns over the un-pruned truncated sets.
/// For l < 4 sampling is skipped and selection runs on the truncated sets
/// directly.
ProtocolResult run_knn(const std::vector<std::vector<Point>>& machines,
                       const Point& q, const KnnConfig& cfg,
                       std::uint64_t trial = 0, bool keep_log = true);

/// Comparison baseline: each machine streams its local l-NN keys to the
/// leader, which selects the global l smallest locally. Costs up to l rounds
/// on each link.
ProtocolResult run_baseline(const std::vector<std::vector<Point>>& machines,
                            const Point& q, std::uint64_t l, Metric m,
                            std::uint64_t seed, std::uint64_t trial = 0,
                            bool keep_log = true);

}  // namespace dknn
