#include "chainlet/errors.hpp"
#include "chainlet/features.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <json.hpp>

#include <set>
#include <sstream>

using namespace chainlet;
using testutil::kDay;
using testutil::snap;
using testutil::tx;

namespace {

std::vector<OrbitVector> white_rows(std::size_t n, int days = 1) {
    std::vector<OrbitVector> out;
    for (int d = 0; d < days; ++d) {
        for (std::size_t i = 0; i < n; ++i) {
            OrbitVector v;
            v.address = "w" + std::to_string(1000 + i);
            v.day = kDay + std::chrono::days{d};
            v.counts[3] = 1;
            out.push_back(v);
        }
    }
    return out;
}

std::string csv_of(const ExportResult& r) {
    std::ostringstream out;
    write_feature_csv(out, r.rows);
    return out.str();
}

}  // namespace

TEST_CASE("income sums output values per address") {
    const auto s = snap({
        tx("t1", 0, {"x"}, {{"A", 30}, {"B", 7}}),
        tx("t2", 1, {"y"}, {{"A", 20}}),
    });
    const auto income = compute_income(s);
    CHECK(income.at("A") == 50);
    CHECK(income.at("B") == 7);
    CHECK(income.count("x") == 0);

    const auto one = compute_income(snap({tx("t", 0, {"x"}, {{"A", 50}})}));
    CHECK(one.at("A") == 50);
}

TEST_CASE("stream income is keyed by day") {
    const std::vector<TransactionRecord> records{
        tx("t1", 0, {"x"}, {{"A", 30}}),
        tx("t2", 86400, {"y"}, {{"A", 20}}),
    };
    const auto income = compute_income_stream(records);
    CHECK(income.at({kDay, "A"}) == 30);
    CHECK(income.at({kDay + std::chrono::days{1}, "A"}) == 20);
}

TEST_CASE("rate 1.0 keeps every row in (day, address) order") {
    auto rows = white_rows(10, 2);
    std::reverse(rows.begin(), rows.end());
    const auto r = build_dataset(rows, {}, {}, {});
    REQUIRE(r.rows.size() == 20);
    for (std::size_t i = 1; i < r.rows.size(); ++i) {
        CHECK(std::tie(r.rows[i - 1].orbits.day, r.rows[i - 1].orbits.address) <
              std::tie(r.rows[i].orbits.day, r.rows[i].orbits.address));
    }
    CHECK(r.kept_counts[0] == 20);
}

TEST_CASE("rate 0.5 on 100 white rows keeps exactly 50, reproducibly") {
    const auto rows = white_rows(100);
    ExportOptions opts;
    opts.seed = 7;
    opts.rates[AddressClass::kWhite] = 0.5;
    const auto a = build_dataset(rows, {}, {}, opts);
    CHECK(a.rows.size() == 50);
    CHECK(a.input_counts[0] == 100);
    CHECK(a.kept_counts[0] == 50);
    std::set<std::string> unique;
    for (const auto& r : a.rows) unique.insert(r.orbits.address);
    CHECK(unique.size() == 50);

    CHECK(csv_of(a) == csv_of(build_dataset(rows, {}, {}, opts)));
    opts.seed = 8;
    CHECK(csv_of(a) != csv_of(build_dataset(rows, {}, {}, opts)));
}

TEST_CASE("sampling stratifies per day and leaves other classes alone") {
    auto rows = white_rows(40, 3);
    OrbitVector rs;
    rs.address = "r";
    rs.day = kDay;
    rs.counts[9] = 1;
    rows.push_back(rs);
    ExportOptions opts;
    opts.rates[AddressClass::kWhite] = 0.25;
    const auto r = build_dataset(rows, {}, {{"r", "RS"}}, opts);
    std::map<Day, std::size_t> per_day;
    for (const auto& row : r.rows) {
        if (row.label == AddressClass::kWhite) ++per_day[row.orbits.day];
    }
    CHECK(per_day.size() == 3);
    for (const auto& [day, n] : per_day) CHECK(n == 10);
    CHECK(r.kept_counts[2] == 1);
}

TEST_CASE("export joins income and labels") {
    const std::vector<TransactionRecord> records{
        tx("t1", 0, {"x"}, {{"A", 30}}),
        tx("t2", 1, {"A"}, {{"B", 25}}),
    };
    const auto vectors = extract_stream(records);
    const auto income = compute_income_stream(records);
    const auto r = build_dataset(vectors, income, {{"A", "RS"}, {"ghost", "DM"}}, {});
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[0].orbits.address == "A");
    CHECK(r.rows[0].income == 30);
    CHECK(r.rows[0].label == AddressClass::kRansomware);
    CHECK(r.rows[1].label == AddressClass::kWhite);
    CHECK(r.unknown_label_addresses == std::vector<std::string>{"ghost"});

    const auto csv = csv_of(r);
    const auto header_end = csv.find('\n');
    CHECK(csv.substr(0, 15) == "address,day,o0,");
    CHECK(csv.substr(header_end - 17, 17) == ",o47,income,label");
    CHECK(csv.find("\nA,2020-01-01,") != std::string::npos);
    CHECK(r.rows[0].orbits == vectors[0]);
    CHECK(csv.find(",30,RS\n") != std::string::npos);
}

TEST_CASE("unlabeled rows can be left empty") {
    ExportOptions opts;
    opts.unlabeled.reset();
    opts.rates[AddressClass::kWhite] = 0.1;
    const auto r = build_dataset(white_rows(5), {}, {}, opts);
    CHECK(r.rows.size() == 5);
    CHECK(r.unlabeled_rows == 5);
    CHECK(csv_of(r).find(",0,\n") != std::string::npos);
}

TEST_CASE("bad inputs") {
    ExportOptions opts;
    opts.rates[AddressClass::kWhite] = 0.0;
    CHECK_THROWS_AS(build_dataset(white_rows(3), {}, {}, opts), std::invalid_argument);
    opts.rates[AddressClass::kWhite] = 1.5;
    CHECK_THROWS_AS(build_dataset(white_rows(3), {}, {}, opts), std::invalid_argument);
    CHECK_THROWS_AS(build_dataset(white_rows(3), {}, {{"w1000", "purple"}}, {}), DataError);
    auto dup = white_rows(3);
    dup.push_back(dup[0]);
    CHECK_THROWS_AS(build_dataset(dup, {}, {}, {}), DataError);
}

TEST_CASE("manifest carries seed, rates, counts, warnings and the role partition") {
    ExportOptions opts;
    opts.seed = 99;
    opts.rates[AddressClass::kWhite] = 0.5;
    const auto r = build_dataset(white_rows(10), {}, {{"ghost", "RS"}}, opts);
    std::ostringstream out;
    write_manifest(out, r, opts);
    const auto m = nlohmann::json::parse(out.str());
    CHECK(m["seed"] == 99);
    CHECK(m["rates"]["White"] == 0.5);
    CHECK(m["rates"]["RS"] == 1.0);
    CHECK(m["input_rows"]["White"] == 10);
    CHECK(m["output_rows"]["White"] == 5);
    CHECK(m["warnings"].size() == 1);
    const auto& active = m["role_partition"]["active"];
    const auto& passive = m["role_partition"]["passive"];
    CHECK(active.size() + passive.size() == 48);
    std::set<std::string> all;
    for (const auto& c : active) all.insert(c.get<std::string>());
    for (const auto& c : passive) all.insert(c.get<std::string>());
    CHECK(all.size() == 48);
    CHECK(all.count("o5"));
    CHECK(std::find(active.begin(), active.end(), "o9") != active.end());
    CHECK(std::find(passive.begin(), passive.end(), "o10") != passive.end());

    std::ostringstream again;
    write_manifest(again, build_dataset(white_rows(10), {}, {{"ghost", "RS"}}, opts), opts);
    CHECK(again.str() == out.str());
}
