#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dknn/core.hpp"
#include "dknn/rng.hpp"
#include "dknn/sim.hpp"

namespace dknn {

/// Per-machine view used by the selection loop. Keys are kept sorted so
/// in-range counting and indexed picking are cheap local work.
struct SelectionOutcome {
    std::vector<std::vector<DistKey>> outputs;  // per machine, keys <= final hi
    std::uint64_t total = 0;                    // keys seen at initialization
    bool insufficient = false;                  // total < l (only if allowed)
};

/// Leader-driven uniform pivot draw over all keys in (lo, hi]: the leader
/// picks machine i with probability n_i/s, machine i replies with a key
/// uniform among its in-range ones. Always 2 rounds; 2 messages unless the
/// leader picks itself. `in_range[i]` must hold machine i's current count and
/// s their sum. Keys per machine must be sorted.
DistKey pick_pivot(Engine& e, int leader,
                   const std::vector<std::vector<DistKey>>& sorted_keys,
                   const std::optional<DistKey>& lo, const DistKey& hi,
                   const std::vector<std::uint64_t>& in_range, std::uint64_t s,
                   std::vector<Rng>& rngs);

/// Randomized distributed selection of the l smallest keys. The leader
/// gathers (count, min, max) from every machine, then repeatedly halves the
/// half-open range (lo, hi] around uniformly drawn pivots until exactly the
/// sought count remains, and broadcasts Finished(hi). Each machine outputs
/// its keys <= hi.
///
/// If allow_short and the total key count is below l, returns early with
/// insufficient = true (callers with a fallback path use this); otherwise a
/// short total throws std::invalid_argument.
SelectionOutcome run_selection(Engine& e, int leader,
                               std::vector<std::vector<DistKey>> keys,
                               std::uint64_t l, std::vector<Rng>& rngs,
                               bool allow_short = false);

/// Standalone selection protocol over a partitioned dataset: keys are the
/// distances of every local point to q (no truncation). Returns the union of
/// machine outputs as sorted ids plus exact metrics.
struct ProtocolResult {
    std::vector<std::uint64_t> ids;
    RunMetrics metrics;
    std::uint64_t survivors = 0;
    bool fallback = false;
    std::vector<Message> log;
};

ProtocolResult run_selection_protocol(
    const std::vector<std::vector<Point>>& machines, const Point& q,
    std::uint64_t l, Metric m, std::uint64_t seed, std::uint64_t trial = 0,
    bool keep_log = true);

}  // namespace dknn
