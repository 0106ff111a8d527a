#include "chainlet/orbits.hpp"

#include "chainlet/csv.hpp"
#include "chainlet/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <thread>
#include <tuple>

namespace chainlet {

namespace {

struct FamilyRow {
    std::uint8_t m, s, n;
    OrbitId spender;
    int sibling;  // -1: no sibling orbit
    OrbitId output;
};

// clang-format off
constexpr std::array<FamilyRow, 18> kFamilies = {{
    {1, 1, 1,  3, -1,  4}, {1, 1, 2,  5, -1,  6}, {1, 1, 3,  7, -1,  8},
    {2, 1, 1,  9, 10, 11}, {2, 1, 2, 12, 13, 14}, {2, 1, 3, 15, 16, 17},
    {2, 2, 1, 18, -1, 19}, {2, 2, 2, 20, -1, 21}, {2, 2, 3, 22, -1, 23},
    {3, 1, 1, 24, 25, 26}, {3, 1, 2, 27, 28, 29}, {3, 1, 3, 30, 31, 32},
    {3, 2, 1, 33, 34, 35}, {3, 2, 2, 36, 37, 38}, {3, 2, 3, 39, 40, 41},
    {3, 3, 1, 42, -1, 43}, {3, 3, 2, 44, -1, 45}, {3, 3, 3, 46, -1, 47},
}};
// clang-format on

constexpr OrbitSet kSpenderOrbits{3, 5, 7, 9, 12, 15, 18, 20, 22, 24, 27, 30, 33, 36, 39, 42, 44, 46};
constexpr OrbitSet kSiblingOrbits{10, 13, 16, 25, 28, 31, 34, 37, 40};

constexpr std::uint64_t pack(AddressIndex a, OrbitId o) { return (std::uint64_t{a} << 6) | o; }

void collect_range(const DailySnapshot& snapshot, TxIndex begin, TxIndex end, std::vector<std::uint64_t>& keys) {
    std::vector<OrbitAssignment> buf;
    const auto flush = [&] {
        for (const auto& a : buf) keys.push_back(pack(a.address, a.orbit));
        buf.clear();
    };
    for (TxIndex t1 = begin; t1 < end; ++t1) {
        if (snapshot.successors(t1).empty()) {
            ChainletOccurrence occ;
            occ.t1 = t1;
            occ.out1 = snapshot.outputs_of(t1);
            assign_orbits(occ, buf);
            flush();
        } else {
            for_each_2chainlet(snapshot, t1, t1 + 1, [&](const ChainletOccurrence& occ) {
                assign_orbits(occ, buf);
                flush();
            });
        }
    }
}

std::vector<OrbitVector> vectors_from_keys(const DailySnapshot& snapshot, std::vector<std::uint64_t>& keys) {
    std::sort(keys.begin(), keys.end());
    std::vector<OrbitVector> result;
    std::size_t i = 0;
    while (i < keys.size()) {
        const auto address = static_cast<AddressIndex>(keys[i] >> 6);
        OrbitVector v;
        v.address = snapshot.address(address);
        v.day = snapshot.window_date();
        while (i < keys.size() && (keys[i] >> 6) == address) {
            ++v.counts[keys[i] & 63U];
            ++i;
        }
        result.push_back(std::move(v));
    }
    std::sort(result.begin(), result.end(),
              [](const OrbitVector& a, const OrbitVector& b) { return a.address < b.address; });
    return result;
}

}  // namespace

std::vector<OrbitId> OrbitSet::to_vector() const {
    std::vector<OrbitId> out;
    for (OrbitId o = 0; o < kOrbitCount; ++o) {
        if (contains(o)) out.push_back(o);
    }
    return out;
}

std::optional<OrbitFamily> orbit_family(ClassDescriptor d) {
    for (const auto& row : kFamilies) {
        if (row.m == d.m && row.s == d.s && row.n == d.n) {
            OrbitFamily f{row.spender, std::nullopt, row.output};
            if (row.sibling >= 0) f.sibling = static_cast<OrbitId>(row.sibling);
            return f;
        }
    }
    return std::nullopt;
}

OrbitId dormant_orbit(std::uint8_t m) {
    if (m < 1 || m > 3) throw InvariantViolation("dormant orbit requested for M=" + std::to_string(m));
    return static_cast<OrbitId>(m - 1);
}

void assign_orbits(const ChainletOccurrence& occ, std::vector<OrbitAssignment>& out) {
    const auto d = occ.descriptor();
    if (occ.dormant()) {
        const OrbitId o = dormant_orbit(d.m);
        for (AddressIndex a : occ.out1) out.push_back({a, o});
        return;
    }
    const auto family = orbit_family(d);
    if (!family) {
        throw InvariantViolation("no orbit family for class " + std::to_string(d.m) + "-" +
                                 std::to_string(d.s) + "-" + std::to_string(d.n));
    }
    // out1 and shared are both ascending; walk them together.
    auto sp = occ.shared.begin();
    for (AddressIndex a : occ.out1) {
        while (sp != occ.shared.end() && *sp < a) ++sp;
        if (sp != occ.shared.end() && *sp == a) {
            out.push_back({a, family->spender});
        } else if (family->sibling) {
            out.push_back({a, *family->sibling});
        } else {
            throw InvariantViolation("unspent t1 output in a class without a sibling orbit");
        }
    }
    for (AddressIndex a : occ.out2) out.push_back({a, family->output});
}

std::vector<OrbitAssignment> assign_orbits(const ChainletOccurrence& occ) {
    std::vector<OrbitAssignment> out;
    assign_orbits(occ, out);
    return out;
}

OrbitSet OrbitVector::nonzero() const {
    OrbitSet s;
    for (OrbitId o = 0; o < kOrbitCount; ++o) {
        if (counts[o] != 0) s.insert(o);
    }
    return s;
}

std::uint64_t OrbitVector::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

OrbitMap accumulate(const DailySnapshot& snapshot, std::span<const OrbitAssignment> assignments) {
    OrbitMap map;
    for (const auto& a : assignments) {
        const auto& address = snapshot.address(a.address);
        auto it = map.find(address);
        if (it == map.end()) {
            it = map.emplace(address, OrbitVector{address, snapshot.window_date(), {}}).first;
        }
        ++it->second.counts[a.orbit];
    }
    return map;
}

std::vector<OrbitVector> extract_orbits(const DailySnapshot& snapshot, unsigned workers) {
    const auto tx_count = static_cast<TxIndex>(snapshot.transaction_count());
    workers = std::max(1U, std::min<unsigned>(workers, std::max<TxIndex>(tx_count, 1)));
    std::vector<std::vector<std::uint64_t>> parts(workers);
    if (workers == 1) {
        collect_range(snapshot, 0, tx_count, parts[0]);
    } else {
        std::vector<std::jthread> threads;
        threads.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            const auto begin = static_cast<TxIndex>(std::uint64_t{tx_count} * w / workers);
            const auto end = static_cast<TxIndex>(std::uint64_t{tx_count} * (w + 1) / workers);
            threads.emplace_back([&snapshot, &parts, w, begin, end] { collect_range(snapshot, begin, end, parts[w]); });
        }
    }
    std::vector<std::uint64_t> keys;
    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    keys.reserve(total);
    for (auto& p : parts) {
        keys.insert(keys.end(), p.begin(), p.end());
        std::vector<std::uint64_t>().swap(p);
    }
    return vectors_from_keys(snapshot, keys);
}

std::vector<OrbitVector> extract_stream(std::vector<TransactionRecord> records, int window_offset_minutes,
                                        unsigned workers) {
    std::vector<OrbitVector> all;
    for (auto& [day, day_records] : bucket_by_day(std::move(records), window_offset_minutes)) {
        const auto snapshot = build_snapshot(std::move(day_records), day, window_offset_minutes);
        auto vectors = extract_orbits(snapshot, workers);
        all.insert(all.end(), std::make_move_iterator(vectors.begin()), std::make_move_iterator(vectors.end()));
    }
    return all;
}

RolePartition role_partition(ActiveReading reading) {
    RolePartition p;
    p.active = kSpenderOrbits;
    if (reading == ActiveReading::kAllFirstOutputs) p.active = p.active | kSiblingOrbits;
    p.passive = p.active.complement();
    return p;
}

OrbitSet mixing_orbit_flags() { return OrbitSet{30, 31, 32, 39, 40, 41, 46, 47}; }

void write_orbit_csv(std::ostream& out, std::span<const OrbitVector> vectors) {
    std::vector<std::size_t> order(vectors.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::tie(vectors[a].day, vectors[a].address) < std::tie(vectors[b].day, vectors[b].address);
    });

    std::string buf = "address,day";
    for (std::size_t o = 0; o < kOrbitCount; ++o) buf += ",o" + std::to_string(o);
    buf += '\n';
    char num[16];
    for (std::size_t idx : order) {
        const auto& v = vectors[idx];
        buf += csv::escape(v.address);
        buf += ',';
        buf += format_day(v.day);
        for (auto c : v.counts) {
            buf += ',';
            const auto res = std::to_chars(num, num + sizeof(num), c);
            buf.append(num, res.ptr);
        }
        buf += '\n';
        if (buf.size() > (1U << 20)) {
            out << buf;
            buf.clear();
        }
    }
    out << buf;
}

std::vector<OrbitVector> read_orbit_csv(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw DataError(source, 1, "empty orbit CSV");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    {
        const auto header = csv::split(line);
        bool ok = header.size() == kOrbitCount + 2 && header[0] == "address" && header[1] == "day";
        for (std::size_t o = 0; ok && o < kOrbitCount; ++o) ok = header[o + 2] == "o" + std::to_string(o);
        if (!ok) throw DataError(source, 1, "expected header address,day,o0..o47");
    }
    std::vector<OrbitVector> result;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        try {
            const auto fields = csv::split(line);
            if (fields.size() != kOrbitCount + 2) {
                throw DataError("expected " + std::to_string(kOrbitCount + 2) + " fields, got " +
                                std::to_string(fields.size()));
            }
            OrbitVector v;
            v.address = fields[0];
            if (v.address.empty()) throw DataError("address: empty");
            v.day = parse_day(fields[1]);
            for (std::size_t o = 0; o < kOrbitCount; ++o) {
                const auto c = csv::parse_uint(fields[o + 2], "o" + std::to_string(o));
                if (c > UINT32_MAX) throw DataError("o" + std::to_string(o) + ": count out of range");
                v.counts[o] = static_cast<std::uint32_t>(c);
            }
            result.push_back(std::move(v));
        } catch (const DataError& e) {
            throw DataError(source, line_no, e.what());
        }
    }
    return result;
}

std::vector<OrbitVector> read_orbit_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open orbit CSV: " + path);
    return read_orbit_csv(in, path);
}

}  // namespace chainlet
