#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "dknn/core.hpp"

namespace dknn {

enum class MsgKind {
    GetCount,
    CountReply,
    PickPivot,
    PivotReply,
    Broadcast,
    Finished,
    SampleItem,
    DataItem,
    LeaderId,
};

std::string msg_kind_name(MsgKind k);

enum class Phase { Election, Truncate, Sample, Prune, Select, Finish };

std::string phase_name(Phase p);

/// Half-open search range (lo, hi]; lo == nullopt means unbounded below.
struct RangeQuery {
    std::optional<DistKey> lo;
    DistKey hi;
};

/// One logical B-bit item. By construction a payload can never carry point
/// coordinates; only keys, counts/ids, or range bounds cross a link.
using Payload = std::variant<std::monostate, DistKey, std::uint64_t, RangeQuery>;

struct Message {
    MsgKind kind = MsgKind::Broadcast;
    Payload payload;
    int src = 0;
    int dst = 0;
};

struct RunMetrics {
    std::uint64_t rounds = 0;
    std::uint64_t messages = 0;
    std::map<MsgKind, std::uint64_t> messages_by_kind;
    std::map<Phase, std::uint64_t> phase_rounds;

    void merge(const RunMetrics& other);
};

std::string run_metrics_to_json(const RunMetrics& m);

class ProtocolViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Synchronous round engine over a clique of k machines. One payload item per
/// ordered link per round; exact round and message counters; optional full
/// message log.
class Engine {
public:
    explicit Engine(int k, std::uint64_t max_rounds = 1'000'000,
                    bool keep_log = true);

    int size() const { return k_; }

    void set_phase(Phase p) { phase_ = p; }
    Phase phase() const { return phase_; }

    void begin_round();
    /// Queue a message for delivery at the end of the current round. Throws
    /// ProtocolViolation if the (src, dst) link was already used this round.
    void send(Message m);
    void end_round();

    /// Messages delivered to machine i in the last completed round.
    const std::vector<Message>& inbox(int i) const { return inboxes_.at(i); }

    const std::vector<Message>& log() const { return log_; }
    const RunMetrics& metrics() const { return metrics_; }
    RunMetrics& metrics() { return metrics_; }

private:
    int k_;
    std::uint64_t max_rounds_;
    bool keep_log_;
    Phase phase_ = Phase::Election;
    bool in_round_ = false;
    std::vector<Message> outgoing_;
    std::vector<bool> link_used_;
    std::vector<std::vector<Message>> inboxes_;
    std::vector<Message> log_;
    RunMetrics metrics_;
};

/// Min-index election: every machine reports its index to machine 0 in one
/// round; machine 0 is leader by convention. Returns the leader index.
int elect_leader(Engine& e);

/// One-round broadcast from src to all other machines.
void broadcast(Engine& e, int src, MsgKind kind, Payload payload);

/// One-round gather: every machine other than dst may contribute one item
/// (nullopt = stay silent). Returns the messages delivered to dst.
std::vector<Message> gather_one(
    Engine& e, int dst, MsgKind kind,
    const std::function<std::optional<Payload>(int)>& item_for);

/// Streams per-machine item sequences to dst at one item per link per round.
/// items[dst] is ignored (local data is free). Returns delivered messages in
/// deterministic order (round-major, then by source index).
std::vector<Message> stream_to(Engine& e, int dst, MsgKind kind,
                               std::span<const std::vector<Payload>> items);

}  // namespace dknn
