#include "dknn/selection.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

namespace dknn {
namespace {

std::size_t rank_of(const std::vector<DistKey>& sorted,
                    const std::optional<DistKey>& bound) {
    if (!bound) return 0;
    return static_cast<std::size_t>(
        std::upper_bound(sorted.begin(), sorted.end(), *bound) - sorted.begin());
}

std::uint64_t count_in(const std::vector<DistKey>& sorted,
                       const std::optional<DistKey>& lo, const DistKey& hi) {
    return rank_of(sorted, hi) - rank_of(sorted, lo);
}

}  // namespace

DistKey pick_pivot(Engine& e, int leader,
                   const std::vector<std::vector<DistKey>>& sorted_keys,
                   const std::optional<DistKey>& lo, const DistKey& hi,
                   const std::vector<std::uint64_t>& in_range, std::uint64_t s,
                   std::vector<Rng>& rngs) {
    if (s == 0) throw std::logic_error("pick_pivot: empty range");
    // Weighted machine draw with probability n_i / s.
    std::uint64_t x = rngs[static_cast<std::size_t>(leader)].below(s);
    int chosen = 0;
    for (std::size_t i = 0; i < in_range.size(); ++i) {
        if (x < in_range[i]) {
            chosen = static_cast<int>(i);
            break;
        }
        x -= in_range[i];
    }

    e.begin_round();
    if (chosen != leader)
        e.send({MsgKind::PickPivot, RangeQuery{lo, hi}, leader, chosen});
    e.end_round();

    const auto& keys = sorted_keys[static_cast<std::size_t>(chosen)];
    const std::uint64_t n_i = in_range[static_cast<std::size_t>(chosen)];
    const std::size_t base = rank_of(keys, lo);
    const std::uint64_t j = rngs[static_cast<std::size_t>(chosen)].below(n_i);
    const DistKey pivot = keys[base + j];

    e.begin_round();
    if (chosen != leader)
        e.send({MsgKind::PivotReply, pivot, chosen, leader});
    e.end_round();
    return pivot;
}

SelectionOutcome run_selection(Engine& e, int leader,
                               std::vector<std::vector<DistKey>> keys,
                               std::uint64_t l, std::vector<Rng>& rngs,
                               bool allow_short) {
    const auto k = static_cast<std::size_t>(e.size());
    SelectionOutcome out;
    out.outputs.resize(k);
    for (auto& v : keys) std::sort(v.begin(), v.end());

    e.set_phase(Phase::Select);
    // Initialization: query broadcast, then count / local-min / local-max
    // gathers (one item per machine per round).
    broadcast(e, leader, MsgKind::GetCount, std::monostate{});
    std::vector<std::uint64_t> in_range(k);
    for (std::size_t i = 0; i < k; ++i) in_range[i] = keys[i].size();
    gather_one(e, leader, MsgKind::CountReply, [&](int i) -> std::optional<Payload> {
        return Payload{in_range[static_cast<std::size_t>(i)]};
    });
    gather_one(e, leader, MsgKind::CountReply, [&](int i) -> std::optional<Payload> {
        const auto& v = keys[static_cast<std::size_t>(i)];
        if (v.empty()) return std::nullopt;
        return Payload{v.front()};
    });
    gather_one(e, leader, MsgKind::CountReply, [&](int i) -> std::optional<Payload> {
        const auto& v = keys[static_cast<std::size_t>(i)];
        if (v.empty()) return std::nullopt;
        return Payload{v.back()};
    });

    out.total = std::accumulate(in_range.begin(), in_range.end(), std::uint64_t{0});
    if (out.total < l) {
        if (allow_short) {
            out.insufficient = true;
            return out;
        }
        throw std::invalid_argument("selection: l exceeds total key count");
    }
    if (l == 0) return out;

    std::optional<DistKey> lo;  // exclusive lower bound, starts unbounded
    DistKey hi{};
    for (const auto& v : keys)
        if (!v.empty()) hi = std::max(hi, v.back());

    std::uint64_t remaining = l;
    std::uint64_t s = out.total;

    while (s > remaining) {
        const DistKey pivot =
            pick_pivot(e, leader, keys, lo, hi, in_range, s, rngs);
        broadcast(e, leader, MsgKind::GetCount, RangeQuery{lo, pivot});
        std::vector<std::uint64_t> below(k);
        for (std::size_t i = 0; i < k; ++i)
            below[i] = count_in(keys[i], lo, pivot);
        gather_one(e, leader, MsgKind::CountReply,
                   [&](int i) -> std::optional<Payload> {
                       return Payload{below[static_cast<std::size_t>(i)]};
                   });
        const std::uint64_t s_new =
            std::accumulate(below.begin(), below.end(), std::uint64_t{0});
        if (s_new < remaining) {
            // Everything at or below the pivot is part of the answer.
            remaining -= s_new;
            s -= s_new;
            lo = pivot;
            for (std::size_t i = 0; i < k; ++i) in_range[i] -= below[i];
        } else {
            hi = pivot;
            s = s_new;
            in_range = below;
        }
    }

    e.set_phase(Phase::Finish);
    broadcast(e, leader, MsgKind::Finished, hi);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t cut = rank_of(keys[i], hi);
        out.outputs[i].assign(keys[i].begin(),
                              keys[i].begin() + static_cast<std::ptrdiff_t>(cut));
    }
    return out;
}

ProtocolResult run_selection_protocol(
    const std::vector<std::vector<Point>>& machines, const Point& q,
    std::uint64_t l, Metric m, std::uint64_t seed, std::uint64_t trial,
    bool keep_log) {
    const int k = static_cast<int>(machines.size());
    std::uint64_t total = 0;
    for (const auto& part : machines) total += part.size();
    if (l > total)
        throw std::invalid_argument("selection: l exceeds point count");

    Engine e(k, 1'000'000, keep_log);
    std::vector<Rng> rngs;
    rngs.reserve(machines.size());
    for (std::size_t i = 0; i < machines.size(); ++i)
        rngs.emplace_back(seed, i, trial);

    ProtocolResult res;
    if (l == 0) {
        res.metrics = e.metrics();
        return res;
    }

    const int leader = elect_leader(e);
    std::vector<std::vector<DistKey>> keys(machines.size());
    for (std::size_t i = 0; i < machines.size(); ++i) {
        keys[i].reserve(machines[i].size());
        for (const Point& p : machines[i]) keys[i].push_back(dist_key(p, q, m));
    }
    SelectionOutcome out = run_selection(e, leader, std::move(keys), l, rngs);
    for (const auto& part : out.outputs)
        for (const DistKey& key : part) res.ids.push_back(key.id);
    std::sort(res.ids.begin(), res.ids.end());
    res.survivors = out.total;
    res.metrics = e.metrics();
    res.log = e.log();
    return res;
}

}  // namespace dknn
