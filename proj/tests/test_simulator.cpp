#include <doctest.h>

#include "dknn/sim.hpp"

using namespace dknn;

TEST_CASE("idle engine has zero counters") {
    Engine e(4);
    CHECK(e.metrics().rounds == 0);
    CHECK(e.metrics().messages == 0);
}

TEST_CASE("broadcast costs 1 round and k-1 messages") {
    Engine e(5);
    broadcast(e, 0, MsgKind::Broadcast, DistKey{1, 2});
    CHECK(e.metrics().rounds == 1);
    CHECK(e.metrics().messages == 4);
    for (int i = 1; i < 5; ++i) {
        REQUIRE(e.inbox(i).size() == 1);
        CHECK(e.inbox(i)[0].kind == MsgKind::Broadcast);
        CHECK(std::get<DistKey>(e.inbox(i)[0].payload) == DistKey{1, 2});
    }
}

TEST_CASE("election") {
    Engine e(5);
    CHECK(elect_leader(e) == 0);
    CHECK(e.metrics().rounds == 1);
    CHECK(e.metrics().messages == 4);
    CHECK(e.metrics().phase_rounds.at(Phase::Election) == 1);

    Engine e2(2);
    elect_leader(e2);
    CHECK(e2.metrics().messages == 1);
}

TEST_CASE("streaming m items takes m rounds") {
    Engine e(3);
    std::vector<std::vector<Payload>> items(3);
    for (std::uint64_t j = 0; j < 7; ++j) items[1].emplace_back(DistKey{j, j});
    for (std::uint64_t j = 0; j < 3; ++j) items[2].emplace_back(DistKey{j, j});
    auto delivered = stream_to(e, 0, MsgKind::DataItem, items);
    CHECK(e.metrics().rounds == 7);
    CHECK(e.metrics().messages == 10);
    CHECK(delivered.size() == 10);
}

TEST_CASE("broadcast then gather") {
    Engine e(4);
    broadcast(e, 0, MsgKind::GetCount, std::monostate{});
    auto replies = gather_one(e, 0, MsgKind::CountReply,
                              [](int i) -> std::optional<Payload> {
                                  return Payload{std::uint64_t(i * 10)};
                              });
    CHECK(e.metrics().rounds == 2);
    CHECK(e.metrics().messages == 6);
    CHECK(replies.size() == 3);
}

TEST_CASE("double send on one link is a protocol violation") {
    Engine e(3);
    e.begin_round();
    e.send({MsgKind::DataItem, DistKey{1, 1}, 1, 0});
    CHECK_THROWS_AS(e.send({MsgKind::DataItem, DistKey{2, 2}, 1, 0}),
                    ProtocolViolation);
}

TEST_CASE("self-send and out-of-range machines are violations") {
    Engine e(3);
    e.begin_round();
    CHECK_THROWS_AS(e.send({MsgKind::DataItem, DistKey{}, 1, 1}),
                    ProtocolViolation);
    CHECK_THROWS_AS(e.send({MsgKind::DataItem, DistKey{}, 0, 3}),
                    ProtocolViolation);
}

TEST_CASE("round guard aborts runaway protocols") {
    Engine e(2, /*max_rounds=*/10);
    CHECK_THROWS_AS(
        [&] {
            for (int i = 0; i < 100; ++i) {
                e.begin_round();
                e.end_round();
            }
        }(),
        ProtocolViolation);
}

TEST_CASE("conservation: per-kind counts sum to the total") {
    Engine e(4);
    elect_leader(e);
    broadcast(e, 0, MsgKind::GetCount, std::monostate{});
    gather_one(e, 0, MsgKind::CountReply, [](int) -> std::optional<Payload> {
        return Payload{std::uint64_t{1}};
    });
    std::uint64_t sum = 0;
    for (const auto& [k, v] : e.metrics().messages_by_kind) sum += v;
    CHECK(sum == e.metrics().messages);
    CHECK(e.log().size() == e.metrics().messages);
}

TEST_CASE("metrics serialize to flat JSON") {
    Engine e(3);
    elect_leader(e);
    const std::string js = run_metrics_to_json(e.metrics());
    CHECK(js.find("\"rounds\":1") != std::string::npos);
    CHECK(js.find("\"LeaderId\":2") != std::string::npos);
    CHECK(js.find("\"election\":1") != std::string::npos);
}
