#include "chainlet/errors.hpp"
#include "chainlet/orbits.hpp"
#include "chainlet/verify.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <set>
#include <sstream>

using namespace chainlet;
using testutil::kDay;
using testutil::snap;
using testutil::tx;

namespace {

std::map<std::string, std::map<int, std::uint32_t>> orbits_by_address(const DailySnapshot& s, unsigned workers = 1) {
    std::map<std::string, std::map<int, std::uint32_t>> out;
    for (const auto& v : extract_orbits(s, workers)) {
        for (OrbitId o = 0; o < kOrbitCount; ++o) {
            if (v.counts[o]) out[v.address][o] = v.counts[o];
        }
    }
    return out;
}

using Roles = std::map<int, std::uint32_t>;

}  // namespace

TEST_CASE("1-1-2: spender gets 5, both t2 outputs get 6") {
    const auto o = orbits_by_address(snap({
        tx("t1", 0, {"in"}, {{"u", 10}}),
        tx("t2", 1, {"u"}, {{"v", 4}, {"w", 5}}),
    }));
    CHECK(o.at("u") == Roles{{5, 1}});
    // t2 has no successor, so its outputs are also dormant (orbit 1).
    CHECK(o.at("v") == Roles{{1, 1}, {6, 1}});
    CHECK(o.at("w") == Roles{{1, 1}, {6, 1}});
    CHECK(o.count("in") == 0);
}

TEST_CASE("1-1-2 roles inside the 2-chainlet") {
    const auto s = snap({
        tx("t1", 0, {"in"}, {{"u", 10}}),
        tx("t2", 1, {"u"}, {{"v", 4}, {"w", 5}}),
    });
    const auto occs = enumerate_2chainlets(s);
    REQUIRE(occs.size() == 1);
    std::map<std::string, int> roles;
    for (const auto& a : assign_orbits(occs[0])) roles[s.address(a.address)] = a.orbit;
    CHECK(roles == std::map<std::string, int>{{"u", 5}, {"v", 6}, {"w", 6}});
}

TEST_CASE("1-1-3 yields 7 and 8") {
    const auto s = snap({
        tx("t1", 0, {"in"}, {{"u", 10}}),
        tx("t2", 1, {"u"}, {{"p", 1}, {"q", 1}, {"r", 1}}),
    });
    const auto assigned = assign_orbits(enumerate_2chainlets(s).at(0));
    std::map<std::string, int> roles;
    for (const auto& a : assigned) roles[s.address(a.address)] = a.orbit;
    CHECK(roles == std::map<std::string, int>{{"u", 7}, {"p", 8}, {"q", 8}, {"r", 8}});
}

TEST_CASE("dormant transactions with 1, 2, 3 and more outputs") {
    const auto o = orbits_by_address(snap({
        tx("d1", 0, {"x"}, {{"a", 1}}),
        tx("d2", 1, {"y"}, {{"b", 1}, {"c", 1}}),
        tx("d3", 2, {"z"}, {{"d", 1}, {"e", 1}, {"f", 1}}),
        tx("d5", 3, {"w"}, {{"g", 1}, {"h", 1}, {"i", 1}, {"j", 1}, {"k", 1}}),
    }));
    CHECK(o.at("a") == Roles{{0, 1}});
    CHECK(o.at("b") == Roles{{1, 1}});
    CHECK(o.at("c") == Roles{{1, 1}});
    for (const char* addr : {"d", "e", "f", "g", "h", "i", "j", "k"}) CHECK(o.at(addr) == Roles{{2, 1}});
}

TEST_CASE("spending one output makes no output of t1 dormant") {
    const auto o = orbits_by_address(snap({
        tx("t1", 0, {"x"}, {{"a", 1}, {"b", 1}}),
        tx("t2", 1, {"a"}, {{"c", 1}}),
    }));
    CHECK(o.at("a") == Roles{{9, 1}});
    CHECK(o.at("b") == Roles{{10, 1}});
    CHECK(o.at("c") == Roles{{0, 1}, {11, 1}});  // t2 itself is dormant
}

TEST_CASE("an address holding two roles in one chainlet counts both") {
    // u is spent by t2 and also paid again by t2.
    const auto o = orbits_by_address(snap({
        tx("t1", 0, {"x"}, {{"u", 5}}),
        tx("t2", 1, {"u"}, {{"u", 4}}),
    }));
    CHECK(o.at("u") == Roles{{0, 1}, {3, 1}, {4, 1}});
}

TEST_CASE("orbit table covers 0..47 exactly once") {
    std::multiset<int> seen;
    for (std::uint8_t m = 1; m <= 3; ++m) seen.insert(dormant_orbit(m));
    for (std::uint8_t m = 1; m <= 3; ++m) {
        for (std::uint8_t s = 1; s <= m; ++s) {
            for (std::uint8_t n = 1; n <= 3; ++n) {
                const auto f = orbit_family(ClassDescriptor{m, s, n});
                REQUIRE(f.has_value());
                seen.insert(f->spender);
                seen.insert(f->output);
                CHECK(f->sibling.has_value() == (s < m));
                if (f->sibling) seen.insert(*f->sibling);
            }
        }
    }
    CHECK(seen.size() == 48);
    for (int o = 0; o < 48; ++o) CHECK(seen.count(o) == 1);
    CHECK_FALSE(orbit_family(ClassDescriptor{2, 3, 1}).has_value());
    CHECK_FALSE(orbit_family(ClassDescriptor{1, 0, 1}).has_value());
    CHECK_THROWS_AS(dormant_orbit(0), InvariantViolation);
}

TEST_CASE("spot values of the orbit table") {
    CHECK(orbit_family({1, 1, 1}) == OrbitFamily{3, std::nullopt, 4});
    CHECK(orbit_family({2, 1, 2}) == OrbitFamily{12, 13, 14});
    CHECK(orbit_family({2, 2, 3}) == OrbitFamily{22, std::nullopt, 23});
    CHECK(orbit_family({3, 1, 3}) == OrbitFamily{30, 31, 32});
    CHECK(orbit_family({3, 2, 3}) == OrbitFamily{39, 40, 41});
    CHECK(orbit_family({3, 3, 3}) == OrbitFamily{46, std::nullopt, 47});
}

TEST_CASE("assignment invariants on random days") {
    const auto spender = role_partition().active;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto s = snap(random_small_stream(seed, kDay));
        std::size_t spender_pairs = 0;
        std::uint64_t spender_counts = 0;
        for (const auto& occ : enumerate_2chainlets(s)) {
            const auto assigned = assign_orbits(occ);
            CHECK(assigned.size() == occ.out1.size() + occ.out2.size());
            for (const auto& a : assigned) {
                const bool in_out1 = std::find(occ.out1.begin(), occ.out1.end(), a.address) != occ.out1.end();
                const bool in_shared = std::find(occ.shared.begin(), occ.shared.end(), a.address) != occ.shared.end();
                const bool in_out2 = std::find(occ.out2.begin(), occ.out2.end(), a.address) != occ.out2.end();
                if (spender.contains(a.orbit)) {
                    CHECK(in_shared);
                } else if (in_out2 && !in_out1) {
                    CHECK(orbit_family(occ.descriptor())->output == a.orbit);
                } else if (!in_shared && in_out1 && !in_out2) {
                    CHECK(orbit_family(occ.descriptor())->sibling == a.orbit);
                }
            }
            spender_pairs += occ.shared.size();
        }
        for (const auto& v : extract_orbits(s)) {
            for (OrbitId o : spender.to_vector()) spender_counts += v.counts[o];
        }
        CHECK(spender_counts == spender_pairs);
    }
}

TEST_CASE("extraction does not depend on the worker count") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto s = snap(random_small_stream(seed, kDay));
        const auto one = extract_orbits(s, 1);
        for (unsigned w : {2U, 3U, 8U, 64U}) CHECK(extract_orbits(s, w) == one);
    }
}

TEST_CASE("accumulate agrees with extract") {
    const auto s = snap(random_small_stream(9, kDay));
    std::vector<OrbitAssignment> all;
    for (const auto& occ : enumerate_2chainlets(s)) assign_orbits(occ, all);
    for (const auto& occ : enumerate_dormant_1chainlets(s)) assign_orbits(occ, all);
    const auto map = accumulate(s, all);
    const auto vectors = extract_orbits(s);
    REQUIRE(map.size() == vectors.size());
    for (const auto& v : vectors) CHECK(map.at(v.address) == v);
}

TEST_CASE("role partition and mixing flags") {
    const auto p = role_partition();
    CHECK(p.active.contains(5));
    CHECK_FALSE(p.active.contains(6));
    for (OrbitId o : {0, 1, 2}) CHECK(p.passive.contains(o));
    CHECK((p.active | p.passive) == OrbitSet::all());
    CHECK((p.active & p.passive).empty());
    CHECK(p.active.size() == 18);

    const auto alt = role_partition(ActiveReading::kAllFirstOutputs);
    CHECK(alt.active.size() == 27);
    CHECK(alt.active.contains(10));
    CHECK(alt.passive.contains(11));

    const auto flags = mixing_orbit_flags();
    CHECK(flags == OrbitSet{30, 31, 32, 39, 40, 41, 46, 47});
    CHECK(flags.size() == 8);
    CHECK_FALSE(flags.contains(9));
}

TEST_CASE("orbit CSV round trip and header checks") {
    std::vector<TransactionRecord> records = random_small_stream(5, kDay);
    auto more = random_small_stream(6, kDay + std::chrono::days{1});
    for (auto& r : more) r.tx_id += "b";
    records.insert(records.end(), more.begin(), more.end());
    const auto vectors = extract_stream(records);
    std::ostringstream out;
    write_orbit_csv(out, vectors);
    std::istringstream in(out.str());
    CHECK(read_orbit_csv(in, "o.csv") == vectors);

    std::istringstream bad_header("address,day,o0\n");
    CHECK_THROWS_AS(read_orbit_csv(bad_header, "o.csv"), DataError);
    std::string header = out.str().substr(0, out.str().find('\n') + 1);
    std::istringstream bad_row(header + "a,2020-01-01,1\n");
    CHECK_THROWS_WITH_AS(read_orbit_csv(bad_row, "o.csv"), doctest::Contains("o.csv:2"), DataError);
}

TEST_CASE("extract_stream sorts by day then address") {
    std::vector<TransactionRecord> records{
        tx("late", 86400 + 5, {"q"}, {{"a", 1}}),
        tx("early", 5, {"q"}, {{"z", 1}}),
        tx("early2", 6, {"q"}, {{"b", 1}}),
    };
    const auto v = extract_stream(records);
    REQUIRE(v.size() == 3);
    CHECK(v[0].address == "b");
    CHECK(v[1].address == "z");
    CHECK(v[2].address == "a");
    CHECK(v[2].day == kDay + std::chrono::days{1});
}

TEST_CASE("OrbitSet basics") {
    OrbitSet s{1, 47};
    CHECK(s.size() == 2);
    CHECK(s.contains(47));
    CHECK_FALSE(s.contains(48));
    CHECK(s.to_vector() == std::vector<OrbitId>{1, 47});
    CHECK(s.complement().size() == 46);
    CHECK(OrbitSet::from_mask(~std::uint64_t{0}).size() == 48);
}
