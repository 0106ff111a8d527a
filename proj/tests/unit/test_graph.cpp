#include "chainlet/errors.hpp"
#include "chainlet/graph.hpp"
#include "chainlet/rng.hpp"
#include "chainlet/verify.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace chainlet;
using testutil::kDay;
using testutil::kT0;
using testutil::snap;
using testutil::tx;

TEST_CASE("window_day follows the UTC-6 boundary") {
    CHECK(window_day(kT0) == kDay);
    CHECK(window_day(kT0 - 1) == kDay - std::chrono::days{1});
    CHECK(window_day(kT0 + 86399) == kDay);
    CHECK(window_day(kT0 + 86400) == kDay + std::chrono::days{1});
    CHECK(window_day(kT0 - 21600, 0) == kDay);  // plain UTC midnight
    CHECK(window_day(-1, 0) == Day{std::chrono::days{-1}});
}

TEST_CASE("day format round trip and rejects") {
    CHECK(format_day(kDay) == "2020-01-01");
    CHECK(parse_day("2020-01-01") == kDay);
    CHECK(parse_day("2016-02-29") == Day{std::chrono::year{2016} / 2 / 29});
    CHECK_THROWS_AS(parse_day("2019-02-29"), DataError);
    CHECK_THROWS_AS(parse_day("2020-1-01"), DataError);
    CHECK_THROWS_AS(parse_day("2020/01/01"), DataError);
}

TEST_CASE("validate rejects malformed records") {
    auto ok = tx("a", 0, {"x"}, {{"y", 5}});
    CHECK_NOTHROW(validate(ok));

    auto r = ok;
    r.tx_id.clear();
    CHECK_THROWS_AS(validate(r), DataError);
    r = ok;
    r.outputs.clear();
    CHECK_THROWS_WITH_AS(validate(r), doctest::Contains("outputs"), DataError);
    r = ok;
    r.inputs = {""};
    CHECK_THROWS_AS(validate(r), DataError);
    r = ok;
    r.input_values = std::vector<Amount>{1, 2};
    CHECK_THROWS_WITH_AS(validate(r), doctest::Contains("input_values"), DataError);
    r = ok;
    r.input_values = std::vector<Amount>{4};
    CHECK_THROWS_WITH_AS(validate(r), doctest::Contains("below output total"), DataError);
    r.input_values = std::vector<Amount>{5};
    CHECK_NOTHROW(validate(r));
    r = ok;
    r.outputs = {{"p", ~Amount{0}}, {"q", 1}};
    CHECK_THROWS_WITH_AS(validate(r), doctest::Contains("overflows"), DataError);

    auto coinbase = tx("cb", 0, {}, {{"m", 50}});
    CHECK(coinbase.is_coinbase());
    CHECK_NOTHROW(validate(coinbase));
}

TEST_CASE("snapshot orders by timestamp then tx id and keeps the day only") {
    const auto s = snap({
        tx("b", 10, {"x"}, {{"y", 1}}),
        tx("a", 10, {"y"}, {{"z", 1}}),
        tx("c", 5, {"w"}, {{"x", 1}}),
        tx("late", 86400, {"z"}, {{"q", 1}}),
        tx("early", -1, {"z"}, {{"q", 1}}),
    });
    REQUIRE(s.transaction_count() == 3);
    CHECK(s.record(0).tx_id == "c");
    CHECK(s.record(1).tx_id == "a");
    CHECK(s.record(2).tx_id == "b");
    // "a" spends y before "b" creates it in snapshot order, so no edge b -> a.
    CHECK(s.successors(2).empty());
    REQUIRE(s.successors(0).size() == 1);
    CHECK(s.record(s.successors(0)[0]).tx_id == "b");
    CHECK(s.predecessors(2).size() == 1);
}

TEST_CASE("duplicate tx ids are rejected") {
    CHECK_THROWS_WITH_AS(snap({tx("a", 0, {"x"}, {{"y", 1}}), tx("a", 1, {"y"}, {{"z", 1}})}),
                         doctest::Contains("duplicate tx_id"), DataError);
    std::vector<TransactionRecord> across_days{tx("a", 0, {"x"}, {{"y", 1}}), tx("a", 86400, {"y"}, {{"z", 1}})};
    CHECK_THROWS_AS(bucket_by_day(across_days), DataError);
}

TEST_CASE("repeated addresses within a transaction collapse to one node") {
    const auto s = snap({tx("a", 0, {"x", "x"}, {{"y", 1}, {"y", 2}, {"z", 3}})});
    CHECK(s.inputs_of(0).size() == 1);
    CHECK(s.outputs_of(0).size() == 2);
    CHECK(s.address_count() == 3);
}

TEST_CASE("successor needs a shared address and a later position") {
    const auto s = snap({
        tx("t1", 0, {"a"}, {{"b", 1}}),
        tx("t2", 1, {"b"}, {{"c", 1}}),
        tx("t3", 2, {"q"}, {{"r", 1}}),
    });
    CHECK(s.successors(0).size() == 1);
    CHECK(s.successors(1).empty());
    CHECK(s.successors(2).empty());
}

TEST_CASE("degree profile counts distinct transactions") {
    const auto s = snap({
        tx("t1", 0, {"a"}, {{"b", 1}, {"b", 2}}),
        tx("t2", 1, {"b"}, {{"c", 1}}),
        tx("t3", 2, {"x"}, {{"b", 1}}),
    });
    CHECK(address_degree_profile(s, "b") == DegreeProfile{2, 1});
    CHECK(address_degree_profile(s, "a") == DegreeProfile{0, 1});
    CHECK(address_degree_profile(s, "nobody") == DegreeProfile{0, 0});
}

TEST_CASE("snapshot is invariant under record reordering") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto records = random_small_stream(seed, kDay);
        const auto reference = snap(records).serialize();
        Rng rng(seed + 1000);
        rng.shuffle(records);
        CHECK(snap(records).serialize() == reference);
    }
}

TEST_CASE("snapshot graph is bipartite and acyclic over transactions") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto s = snap(random_small_stream(seed, kDay));
        for (TxIndex t = 0; t < s.transaction_count(); ++t) {
            for (TxIndex next : s.successors(t)) CHECK(next > t);
            for (TxIndex prev : s.predecessors(t)) CHECK(prev < t);
            for (AddressIndex a : s.inputs_of(t)) CHECK(a < s.address_count());
            for (AddressIndex a : s.outputs_of(t)) CHECK(a < s.address_count());
        }
        // CSR transposes agree.
        for (AddressIndex a = 0; a < s.address_count(); ++a) {
            for (TxIndex t : s.receiving_txs(a)) {
                const auto outs = s.outputs_of(t);
                CHECK(std::find(outs.begin(), outs.end(), a) != outs.end());
            }
        }
    }
}

TEST_CASE("snapshot of an empty day") {
    const auto s = snap({});
    CHECK(s.transaction_count() == 0);
    CHECK(s.address_count() == 0);
    CHECK(s.serialize() == "snapshot 2020-01-01 offset -360 txs 0 addresses 0\n");
}
