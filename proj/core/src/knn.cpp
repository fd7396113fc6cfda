#include "dknn/knn.hpp"

#include <algorithm>
#include <bit>

namespace dknn {

std::uint32_t ceil_log2(std::uint64_t x) {
    if (x <= 1) return 0;
    return static_cast<std::uint32_t>(std::bit_width(x - 1));
}

std::vector<DistKey> local_truncate(const std::vector<Point>& local,
                                    const Point& q, std::uint64_t l, Metric m) {
    std::vector<DistKey> keys;
    keys.reserve(local.size());
    for (const Point& p : local) keys.push_back(dist_key(p, q, m));
    if (keys.size() > l) {
        std::nth_element(keys.begin(),
                         keys.begin() + static_cast<std::ptrdiff_t>(l),
                         keys.end());
        keys.resize(l);
    }
    std::sort(keys.begin(), keys.end());
    keys.resize(l, kSentinelKey);
    return keys;
}

DistKey sample_phase(Engine& e, int leader,
                     const std::vector<std::vector<DistKey>>& padded,
                     const KnnConfig& cfg, std::vector<Rng>& rngs) {
    const auto k = static_cast<std::size_t>(e.size());
    const std::uint32_t log_l = ceil_log2(cfg.l);
    const std::uint64_t m = std::uint64_t{cfg.sample_factor} * log_l;

    e.set_phase(Phase::Sample);
    std::vector<std::vector<Payload>> samples(k);
    for (std::size_t i = 0; i < k; ++i) {
        samples[i].reserve(m);
        for (std::uint64_t j = 0; j < m; ++j)
            samples[i].emplace_back(padded[i][rngs[i].below(cfg.l)]);
    }
    std::vector<Message> delivered =
        stream_to(e, leader, MsgKind::SampleItem, samples);

    std::vector<DistKey> all;
    all.reserve(k * m);
    for (const Message& msg : delivered)
        all.push_back(std::get<DistKey>(msg.payload));
    for (const Payload& p : samples[static_cast<std::size_t>(leader)])
        all.push_back(std::get<DistKey>(p));  // leader's own samples are local
    std::sort(all.begin(), all.end());

    const std::uint64_t rank =
        std::min<std::uint64_t>(std::uint64_t{cfg.rank_factor} * log_l, all.size());
    const DistKey r = all[rank - 1];  // 1-based rank
    broadcast(e, leader, MsgKind::Broadcast, r);
    return r;
}

std::vector<DistKey> prune(const std::vector<DistKey>& keys, const DistKey& r) {
    std::vector<DistKey> kept;
    for (const DistKey& key : keys)
        if (!is_sentinel(key) && key <= r) kept.push_back(key);
    return kept;
}

namespace {

ProtocolResult finish_result(Engine& e, const SelectionOutcome& out) {
    ProtocolResult res;
    for (const auto& part : out.outputs)
        for (const DistKey& key : part) res.ids.push_back(key.id);
    std::sort(res.ids.begin(), res.ids.end());
    res.metrics = e.metrics();
    res.log = e.log();
    return res;
}

std::uint64_t total_points(const std::vector<std::vector<Point>>& machines) {
    std::uint64_t n = 0;
    for (const auto& part : machines) n += part.size();
    return n;
}

}  // namespace

ProtocolResult run_knn(const std::vector<std::vector<Point>>& machines,
                       const Point& q, const KnnConfig& cfg,
                       std::uint64_t trial, bool keep_log) {
    const int k = static_cast<int>(machines.size());
    if (cfg.l > total_points(machines))
        throw std::invalid_argument("knn: l exceeds point count");

    Engine e(k, 1'000'000, keep_log);
    std::vector<Rng> rngs;
    for (std::size_t i = 0; i < machines.size(); ++i)
        rngs.emplace_back(cfg.seed, i, trial);

    if (cfg.l == 0) {
        ProtocolResult res;
        res.metrics = e.metrics();
        return res;
    }

    const int leader = elect_leader(e);

    e.set_phase(Phase::Truncate);
    std::vector<std::vector<DistKey>> padded(machines.size());
    for (std::size_t i = 0; i < machines.size(); ++i)
        padded[i] = local_truncate(machines[i], q, cfg.l, cfg.metric);

    std::vector<std::vector<DistKey>> truncated(machines.size());
    for (std::size_t i = 0; i < machines.size(); ++i) {
        for (const DistKey& key : padded[i])
            if (!is_sentinel(key)) truncated[i].push_back(key);
    }

    // At tiny l the sampling machinery cannot engage; selection on the
    // truncated sets is already O(log) and unconditionally correct.
    if (cfg.l < 4) {
        SelectionOutcome out =
            run_selection(e, leader, std::move(truncated), cfg.l, rngs);
        ProtocolResult res = finish_result(e, out);
        res.survivors = out.total;
        return res;
    }

    const DistKey r = sample_phase(e, leader, padded, cfg, rngs);

    e.set_phase(Phase::Prune);
    std::vector<std::vector<DistKey>> survivors(machines.size());
    for (std::size_t i = 0; i < machines.size(); ++i)
        survivors[i] = prune(padded[i], r);

    SelectionOutcome out = run_selection(e, leader, std::move(survivors),
                                         cfg.l, rngs, /*allow_short=*/true);
    std::uint64_t survivor_count = out.total;
    bool fallback = false;
    if (out.insufficient) {
        // Pruning removed too much; rerun over the un-pruned truncated sets.
        fallback = true;
        out = run_selection(e, leader, std::move(truncated), cfg.l, rngs);
    }
    ProtocolResult res = finish_result(e, out);
    res.survivors = survivor_count;
    res.fallback = fallback;
    return res;
}

ProtocolResult run_baseline(const std::vector<std::vector<Point>>& machines,
                            const Point& q, std::uint64_t l, Metric m,
                            std::uint64_t seed, std::uint64_t trial,
                            bool keep_log) {
    (void)seed;
    (void)trial;
    const int k = static_cast<int>(machines.size());
    if (l > total_points(machines))
        throw std::invalid_argument("baseline: l exceeds point count");

    Engine e(k, 1'000'000, keep_log);
    ProtocolResult res;
    if (l == 0) {
        res.metrics = e.metrics();
        return res;
    }

    const int leader = elect_leader(e);

    e.set_phase(Phase::Truncate);
    std::vector<std::vector<Payload>> local_knn(machines.size());
    std::vector<DistKey> at_leader;
    for (std::size_t i = 0; i < machines.size(); ++i) {
        std::vector<DistKey> keys = local_truncate(machines[i], q, l, m);
        for (const DistKey& key : keys) {
            if (is_sentinel(key)) break;
            if (static_cast<int>(i) == leader)
                at_leader.push_back(key);
            else
                local_knn[i].emplace_back(key);
        }
    }

    e.set_phase(Phase::Select);
    std::vector<Message> delivered =
        stream_to(e, leader, MsgKind::DataItem, local_knn);
    for (const Message& msg : delivered)
        at_leader.push_back(std::get<DistKey>(msg.payload));

    std::sort(at_leader.begin(), at_leader.end());
    at_leader.resize(l);
    for (const DistKey& key : at_leader) res.ids.push_back(key.id);
    std::sort(res.ids.begin(), res.ids.end());
    res.metrics = e.metrics();
    res.log = e.log();
    return res;
}

}  // namespace dknn
