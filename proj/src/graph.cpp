#include "chainlet/graph.hpp"

#include "chainlet/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <limits>
#include <tuple>
#include <unordered_set>
#include <utility>

namespace chainlet {

namespace {

constexpr std::int64_t kSecondsPerDay = 86400;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

// Counting-sort build of a CSR from (row, value) pairs. Values keep their
// insertion order within a row.
detail::Csr make_csr(std::size_t rows,
                     const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs) {
    detail::Csr csr;
    csr.offsets.assign(rows + 1, 0);
    for (const auto& [row, value] : pairs) ++csr.offsets[row + 1];
    for (std::size_t i = 0; i < rows; ++i) csr.offsets[i + 1] += csr.offsets[i];
    csr.values.resize(pairs.size());
    std::vector<std::uint32_t> cursor(csr.offsets.begin(), csr.offsets.end() - 1);
    for (const auto& [row, value] : pairs) csr.values[cursor[row]++] = value;
    return csr;
}

}  // namespace

Amount TransactionRecord::total_output() const {
    Amount total = 0;
    for (const auto& out : outputs) total += out.value;
    return total;
}

std::optional<Amount> TransactionRecord::total_input() const {
    if (!input_values) return std::nullopt;
    Amount total = 0;
    for (Amount v : *input_values) total += v;
    return total;
}

void validate(const TransactionRecord& record) {
    if (record.tx_id.empty()) throw DataError("tx_id: must be non-empty");
    const std::string where = "tx " + record.tx_id + ": ";
    for (const auto& in : record.inputs) {
        if (in.empty()) throw DataError(where + "inputs: empty address");
    }
    if (record.outputs.empty()) throw DataError(where + "outputs: at least one output required");
    Amount out_total = 0;
    for (const auto& out : record.outputs) {
        if (out.address.empty()) throw DataError(where + "outputs: empty address");
        if (out.value > std::numeric_limits<Amount>::max() - out_total) {
            throw DataError(where + "outputs: total value overflows");
        }
        out_total += out.value;
    }
    if (record.input_values) {
        const auto& values = *record.input_values;
        if (values.size() != record.inputs.size()) {
            throw DataError(where + "input_values: expected " + std::to_string(record.inputs.size()) +
                            " entries, got " + std::to_string(values.size()));
        }
        Amount in_total = 0;
        for (Amount v : values) {
            if (v > std::numeric_limits<Amount>::max() - in_total) {
                throw DataError(where + "input_values: total value overflows");
            }
            in_total += v;
        }
        if (!record.inputs.empty() && in_total < out_total) {
            throw DataError(where + "input total " + std::to_string(in_total) +
                            " is below output total " + std::to_string(out_total));
        }
    }
}

Day window_day(std::int64_t timestamp, int offset_minutes) {
    const std::int64_t shifted = timestamp + static_cast<std::int64_t>(offset_minutes) * 60;
    return Day{std::chrono::days{floor_div(shifted, kSecondsPerDay)}};
}

std::string format_day(Day day) {
    const std::chrono::year_month_day ymd{day};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

Day parse_day(std::string_view text) {
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    const auto bad = [&] { return DataError("invalid day '" + std::string(text) + "', expected YYYY-MM-DD"); };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw bad();
    const char* p = text.data();
    if (std::from_chars(p, p + 4, y).ptr != p + 4) throw bad();
    if (std::from_chars(p + 5, p + 7, m).ptr != p + 7) throw bad();
    if (std::from_chars(p + 8, p + 10, d).ptr != p + 10) throw bad();
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!ymd.ok()) throw bad();
    return Day{ymd};
}

std::optional<AddressIndex> DailySnapshot::find_address(std::string_view address) const {
    const auto it = address_lookup_.find(address);
    if (it == address_lookup_.end()) return std::nullopt;
    return it->second;
}

DailySnapshot build_snapshot(std::vector<TransactionRecord> records, Day window_date,
                             int window_offset_minutes) {
    DailySnapshot snap;
    snap.window_date_ = window_date;
    snap.window_offset_minutes_ = window_offset_minutes;

    std::erase_if(records, [&](const TransactionRecord& r) {
        return window_day(r.timestamp, window_offset_minutes) != window_date;
    });
    for (const auto& r : records) validate(r);
    std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
        return std::tie(a.timestamp, a.tx_id) < std::tie(b.timestamp, b.tx_id);
    });
    {
        std::unordered_set<std::string_view> seen;
        seen.reserve(records.size());
        for (const auto& r : records) {
            if (!seen.insert(r.tx_id).second) throw DataError("duplicate tx_id: " + r.tx_id);
        }
    }
    snap.records_ = std::move(records);
    const auto tx_count = snap.records_.size();

    // Keys view into records_, whose strings stay put from here on.
    auto& lookup = snap.address_lookup_;
    lookup.reserve(tx_count * 3);
    const auto intern = [&](const std::string& address) -> AddressIndex {
        const auto [it, inserted] =
            lookup.try_emplace(std::string_view(address), static_cast<AddressIndex>(snap.addresses_.size()));
        if (inserted) snap.addresses_.push_back(address);
        return it->second;
    };

    std::vector<std::pair<std::uint32_t, std::uint32_t>> in_pairs;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out_pairs;
    std::vector<AddressIndex> scratch;
    for (TxIndex tx = 0; tx < tx_count; ++tx) {
        const auto& r = snap.records_[tx];
        scratch.clear();
        for (const auto& in : r.inputs) scratch.push_back(intern(in));
        std::sort(scratch.begin(), scratch.end());
        scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
        for (AddressIndex a : scratch) in_pairs.emplace_back(tx, a);

        scratch.clear();
        for (const auto& out : r.outputs) scratch.push_back(intern(out.address));
        std::sort(scratch.begin(), scratch.end());
        scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
        for (AddressIndex a : scratch) out_pairs.emplace_back(tx, a);
    }
    const auto addr_count = snap.addresses_.size();
    snap.tx_inputs_ = make_csr(tx_count, in_pairs);
    snap.tx_outputs_ = make_csr(tx_count, out_pairs);

    // Transposes. Pairs are in ascending tx order, so each address row is
    // ascending too.
    for (auto& p : in_pairs) std::swap(p.first, p.second);
    for (auto& p : out_pairs) std::swap(p.first, p.second);
    snap.addr_spends_ = make_csr(addr_count, in_pairs);
    snap.addr_receives_ = make_csr(addr_count, out_pairs);

    std::vector<std::pair<std::uint32_t, std::uint32_t>> succ_pairs;
    std::vector<TxIndex> next;
    for (TxIndex t1 = 0; t1 < tx_count; ++t1) {
        next.clear();
        for (AddressIndex a : snap.outputs_of(t1)) {
            const auto spenders = snap.spending_txs(a);
            for (auto it = std::upper_bound(spenders.begin(), spenders.end(), t1); it != spenders.end(); ++it) {
                next.push_back(*it);
            }
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        for (TxIndex t2 : next) succ_pairs.emplace_back(t1, t2);
    }
    snap.successors_ = make_csr(tx_count, succ_pairs);
    for (auto& p : succ_pairs) std::swap(p.first, p.second);
    snap.predecessors_ = make_csr(tx_count, succ_pairs);
    return snap;
}

std::string DailySnapshot::serialize() const {
    std::string out;
    out += "snapshot " + format_day(window_date_) + " offset " + std::to_string(window_offset_minutes_) +
           " txs " + std::to_string(records_.size()) + " addresses " + std::to_string(addresses_.size()) + "\n";
    const auto append_addrs = [&](std::span<const AddressIndex> row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += addresses_[row[i]];
        }
    };
    for (TxIndex tx = 0; tx < records_.size(); ++tx) {
        const auto& r = records_[tx];
        out += r.tx_id;
        out += ' ';
        out += std::to_string(r.timestamp);
        out += " in=";
        append_addrs(inputs_of(tx));
        out += " out=";
        for (std::size_t i = 0; i < r.outputs.size(); ++i) {
            if (i) out += ',';
            out += r.outputs[i].address + ":" + std::to_string(r.outputs[i].value);
        }
        out += " succ=";
        const auto succ = successors(tx);
        for (std::size_t i = 0; i < succ.size(); ++i) {
            if (i) out += ',';
            out += records_[succ[i]].tx_id;
        }
        out += '\n';
    }
    return out;
}

DegreeProfile address_degree_profile(const DailySnapshot& snapshot, std::string_view address) {
    const auto idx = snapshot.find_address(address);
    if (!idx) return {};
    return {snapshot.receiving_txs(*idx).size(), snapshot.spending_txs(*idx).size()};
}

std::map<Day, std::vector<TransactionRecord>> bucket_by_day(std::vector<TransactionRecord> records,
                                                            int window_offset_minutes) {
    std::unordered_set<std::string> seen;
    seen.reserve(records.size());
    std::map<Day, std::vector<TransactionRecord>> days;
    for (auto& r : records) {
        if (!seen.insert(r.tx_id).second) throw DataError("duplicate tx_id: " + r.tx_id);
        const Day d = window_day(r.timestamp, window_offset_minutes);
        days[d].push_back(std::move(r));
    }
    return days;
}

}  // namespace chainlet
