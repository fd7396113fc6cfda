#include "dknn/sim.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace dknn {

std::string msg_kind_name(MsgKind k) {
    switch (k) {
        case MsgKind::GetCount: return "GetCount";
        case MsgKind::CountReply: return "CountReply";
        case MsgKind::PickPivot: return "PickPivot";
        case MsgKind::PivotReply: return "PivotReply";
        case MsgKind::Broadcast: return "Broadcast";
        case MsgKind::Finished: return "Finished";
        case MsgKind::SampleItem: return "SampleItem";
        case MsgKind::DataItem: return "DataItem";
        case MsgKind::LeaderId: return "LeaderId";
    }
    std::abort();
}

std::string phase_name(Phase p) {
    switch (p) {
        case Phase::Election: return "election";
        case Phase::Truncate: return "truncate";
        case Phase::Sample: return "sample";
        case Phase::Prune: return "prune";
        case Phase::Select: return "select";
        case Phase::Finish: return "finish";
    }
    std::abort();
}

void RunMetrics::merge(const RunMetrics& other) {
    rounds += other.rounds;
    messages += other.messages;
    for (const auto& [k, v] : other.messages_by_kind) messages_by_kind[k] += v;
    for (const auto& [p, v] : other.phase_rounds) phase_rounds[p] += v;
}

std::string run_metrics_to_json(const RunMetrics& m) {
    std::ostringstream os;
    os << "{\"rounds\":" << m.rounds << ",\"messages\":" << m.messages
       << ",\"messages_by_kind\":{";
    bool first = true;
    for (const auto& [k, v] : m.messages_by_kind) {
        if (!first) os << ',';
        first = false;
        os << '"' << msg_kind_name(k) << "\":" << v;
    }
    os << "},\"phase_rounds\":{";
    first = true;
    for (const auto& [p, v] : m.phase_rounds) {
        if (!first) os << ',';
        first = false;
        os << '"' << phase_name(p) << "\":" << v;
    }
    os << "}}";
    return os.str();
}

Engine::Engine(int k, std::uint64_t max_rounds, bool keep_log)
    : k_(k), max_rounds_(max_rounds), keep_log_(keep_log),
      link_used_(static_cast<std::size_t>(k) * static_cast<std::size_t>(k), false),
      inboxes_(static_cast<std::size_t>(k)) {
    if (k < 2) throw std::invalid_argument("engine: k must be >= 2");
}

void Engine::begin_round() {
    if (in_round_) throw ProtocolViolation("begin_round inside an open round");
    in_round_ = true;
    outgoing_.clear();
    std::fill(link_used_.begin(), link_used_.end(), false);
}

void Engine::send(Message m) {
    if (!in_round_) throw ProtocolViolation("send outside a round");
    if (m.src < 0 || m.src >= k_ || m.dst < 0 || m.dst >= k_ || m.src == m.dst)
        throw ProtocolViolation("send: bad src/dst");
    const std::size_t link = static_cast<std::size_t>(m.src) *
                                 static_cast<std::size_t>(k_) +
                             static_cast<std::size_t>(m.dst);
    if (link_used_[link])
        throw ProtocolViolation("link capacity exceeded: two messages on link " +
                                std::to_string(m.src) + "->" +
                                std::to_string(m.dst) + " in one round");
    link_used_[link] = true;
    outgoing_.push_back(std::move(m));
}

void Engine::end_round() {
    if (!in_round_) throw ProtocolViolation("end_round without begin_round");
    in_round_ = false;
    for (auto& box : inboxes_) box.clear();
    for (Message& m : outgoing_) {
        metrics_.messages++;
        metrics_.messages_by_kind[m.kind]++;
        if (keep_log_) log_.push_back(m);
        inboxes_[static_cast<std::size_t>(m.dst)].push_back(std::move(m));
    }
    outgoing_.clear();
    metrics_.rounds++;
    metrics_.phase_rounds[phase_]++;
    if (metrics_.rounds > max_rounds_)
        throw ProtocolViolation("round guard exceeded (" +
                                std::to_string(max_rounds_) + " rounds)");
}

int elect_leader(Engine& e) {
    e.set_phase(Phase::Election);
    e.begin_round();
    for (int i = 1; i < e.size(); ++i)
        e.send({MsgKind::LeaderId, std::uint64_t(i), i, 0});
    e.end_round();
    return 0;
}

void broadcast(Engine& e, int src, MsgKind kind, Payload payload) {
    e.begin_round();
    for (int i = 0; i < e.size(); ++i)
        if (i != src) e.send({kind, payload, src, i});
    e.end_round();
}

std::vector<Message> gather_one(
    Engine& e, int dst, MsgKind kind,
    const std::function<std::optional<Payload>(int)>& item_for) {
    e.begin_round();
    for (int i = 0; i < e.size(); ++i) {
        if (i == dst) continue;
        if (auto p = item_for(i)) e.send({kind, std::move(*p), i, dst});
    }
    e.end_round();
    return e.inbox(dst);
}

std::vector<Message> stream_to(Engine& e, int dst, MsgKind kind,
                               std::span<const std::vector<Payload>> items) {
    std::size_t rounds = 0;
    for (int i = 0; i < e.size(); ++i)
        if (i != dst) rounds = std::max(rounds, items[static_cast<std::size_t>(i)].size());
    std::vector<Message> delivered;
    for (std::size_t r = 0; r < rounds; ++r) {
        e.begin_round();
        for (int i = 0; i < e.size(); ++i) {
            if (i == dst) continue;
            const auto& seq = items[static_cast<std::size_t>(i)];
            if (r < seq.size()) e.send({kind, seq[r], i, dst});
        }
        e.end_round();
        for (const Message& m : e.inbox(dst)) delivered.push_back(m);
    }
    return delivered;
}

}  // namespace dknn
