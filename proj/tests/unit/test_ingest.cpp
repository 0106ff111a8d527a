#include "chainlet/errors.hpp"
#include "chainlet/ingest.hpp"
#include "chainlet/verify.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <sstream>

using namespace chainlet;

TEST_CASE("parse_record reads every field") {
    const auto r = parse_record(
        R"({"tx_id":"t","timestamp":1577858400,"inputs":["a","b"],"outputs":[{"addr":"c","value":7}],"input_values":[3,5]})");
    CHECK(r.tx_id == "t");
    CHECK(r.timestamp == 1577858400);
    CHECK(r.inputs == std::vector<std::string>{"a", "b"});
    REQUIRE(r.outputs.size() == 1);
    CHECK(r.outputs[0] == TxOutput{"c", 7});
    CHECK(r.total_input() == Amount{8});
}

TEST_CASE("parse_record names the bad field") {
    const auto fails_with = [](const char* line, const char* fragment) {
        CHECK_THROWS_WITH_AS(parse_record(line), doctest::Contains(fragment), DataError);
    };
    fails_with("{", "malformed JSON");
    fails_with("[]", "JSON object");
    fails_with(R"({"timestamp":1,"inputs":[],"outputs":[{"addr":"a","value":1}]})", "tx_id");
    fails_with(R"({"tx_id":"t","timestamp":"1","inputs":[],"outputs":[{"addr":"a","value":1}]})", "timestamp");
    fails_with(R"({"tx_id":"t","timestamp":1.5,"inputs":[],"outputs":[{"addr":"a","value":1}]})", "timestamp");
    fails_with(R"({"tx_id":"t","timestamp":1,"inputs":[3],"outputs":[{"addr":"a","value":1}]})", "inputs[0]");
    fails_with(R"({"tx_id":"t","timestamp":1,"inputs":[],"outputs":[{"addr":"a","value":-1}]})",
               "outputs[0].value");
    fails_with(R"({"tx_id":"t","timestamp":1,"inputs":[],"outputs":[{"addr":"a"}]})", "'value'");
    fails_with(R"({"tx_id":"t","timestamp":1,"inputs":[],"outputs":[]})", "at least one output");
    fails_with(R"({"tx_id":"t","timestamp":1,"inputs":["x"],"outputs":[{"addr":"a","value":9}],"input_values":[2]})",
               "below output total");
    fails_with(R"({"tx_id":"t","timestamp":18446744073709551615,"inputs":[],"outputs":[{"addr":"a","value":1}]})",
               "timestamp");
}

TEST_CASE("read_records adds line context and skips blank lines") {
    std::istringstream in(
        "{\"tx_id\":\"a\",\"timestamp\":1,\"inputs\":[],\"outputs\":[{\"addr\":\"x\",\"value\":1}]}\n"
        "\n"
        "{\"tx_id\":\"b\",\"timestamp\":2,\"inputs\":[],\"outputs\":[{\"addr\":\"x\"}]}\n");
    try {
        read_records(in, "stream.jsonl");
        FAIL("expected a data error");
    } catch (const DataError& e) {
        CHECK(e.source() == "stream.jsonl");
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("stream.jsonl:3:") == 0);
    }
}

TEST_CASE("min amount filter drops small transactions") {
    std::istringstream in(
        "{\"tx_id\":\"a\",\"timestamp\":1,\"inputs\":[],\"outputs\":[{\"addr\":\"x\",\"value\":10},{\"addr\":\"y\",\"value\":5}]}\n"
        "{\"tx_id\":\"b\",\"timestamp\":2,\"inputs\":[],\"outputs\":[{\"addr\":\"x\",\"value\":14}]}\n");
    IngestOptions opts;
    opts.min_amount = 15;
    const auto result = read_records(in, "s", opts);
    CHECK(result.lines == 2);
    CHECK(result.filtered == 1);
    REQUIRE(result.records.size() == 1);
    CHECK(result.records[0].tx_id == "a");
}

TEST_CASE("json lines round trip") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto records = random_small_stream(seed, testutil::kDay);
        records[0].input_values = std::vector<Amount>(records[0].inputs.size(), 5000);
        std::ostringstream out;
        write_records(out, records);
        std::istringstream in(out.str());
        CHECK(read_records(in, "rt").records == records);
    }
}

TEST_CASE("key order in written lines is fixed") {
    TransactionRecord r = testutil::tx("t", 0, {"a"}, {{"b", 3}});
    r.input_values = std::vector<Amount>{3};
    CHECK(to_json_line(r) ==
          R"({"tx_id":"t","timestamp":1577858400,"inputs":["a"],"outputs":[{"addr":"b","value":3}],"input_values":[3]})");
}

TEST_CASE("missing file is a data error") {
    CHECK_THROWS_AS(read_records_file("/nonexistent/stream.jsonl"), DataError);
}
