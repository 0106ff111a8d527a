#include "chainlet/features.hpp"

#include "chainlet/csv.hpp"
#include "chainlet/errors.hpp"
#include "chainlet/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>
#include <stdexcept>
#include <tuple>

namespace chainlet {

namespace {

void add_income(Amount& acc, Amount value, const std::string& address) {
    if (value > std::numeric_limits<Amount>::max() - acc) throw DataError("income overflow for " + address);
    acc += value;
}

std::size_t idx(AddressClass c) { return static_cast<std::size_t>(c); }

}  // namespace

std::map<AddressId, Amount> compute_income(const DailySnapshot& snapshot) {
    std::map<AddressId, Amount> income;
    for (const auto& r : snapshot.records()) {
        for (const auto& o : r.outputs) add_income(income[o.address], o.value, o.address);
    }
    return income;
}

IncomeTable compute_income_stream(std::span<const TransactionRecord> records, int window_offset_minutes) {
    IncomeTable income;
    for (const auto& r : records) {
        const Day day = window_day(r.timestamp, window_offset_minutes);
        for (const auto& o : r.outputs) add_income(income[{day, o.address}], o.value, o.address);
    }
    return income;
}

ExportResult build_dataset(std::span<const OrbitVector> vectors, const IncomeTable& income,
                           const std::map<std::string, std::string>& labels, const ExportOptions& options) {
    for (const auto& [cls, rate] : options.rates) {
        if (!(rate > 0.0 && rate <= 1.0)) {
            throw std::invalid_argument("sampling rate for " + std::string(class_name(cls)) + " must lie in (0, 1]");
        }
    }
    std::map<std::string, AddressClass> parsed;
    for (const auto& [address, label] : labels) parsed.emplace(address, parse_class(label));

    ExportResult result;
    std::vector<FeatureRow> rows;
    rows.reserve(vectors.size());
    std::set<std::string_view> seen;
    for (const auto& v : vectors) {
        seen.insert(v.address);
        FeatureRow row{v, 0, std::nullopt};
        if (const auto it = income.find({v.day, v.address}); it != income.end()) row.income = it->second;
        if (const auto it = parsed.find(v.address); it != parsed.end()) {
            row.label = it->second;
        } else {
            row.label = options.unlabeled;
        }
        rows.push_back(std::move(row));
    }
    for (const auto& [address, cls] : parsed) {
        if (!seen.contains(address)) result.unknown_label_addresses.push_back(address);
    }
    std::sort(rows.begin(), rows.end(), [](const FeatureRow& a, const FeatureRow& b) {
        return std::tie(a.orbits.day, a.orbits.address) < std::tie(b.orbits.day, b.orbits.address);
    });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].orbits.day == rows[i - 1].orbits.day && rows[i].orbits.address == rows[i - 1].orbits.address) {
            throw DataError("duplicate orbit vector for " + rows[i].orbits.address + " on " +
                            format_day(rows[i].orbits.day));
        }
    }

    // Strata are visited in (day, class) order so every draw is tied to a
    // fixed position in the generator's sequence.
    std::map<std::pair<Day, std::size_t>, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].label) {
            ++result.unlabeled_rows;
            continue;
        }
        ++result.input_counts[idx(*rows[i].label)];
        strata[{rows[i].orbits.day, idx(*rows[i].label)}].push_back(i);
    }
    std::vector<bool> keep(rows.size(), true);
    Rng rng(options.seed);
    for (auto& [key, members] : strata) {
        const auto rate_it = options.rates.find(static_cast<AddressClass>(key.second));
        if (rate_it == options.rates.end() || rate_it->second >= 1.0) continue;
        const auto n = members.size();
        const auto k = static_cast<std::size_t>(std::llround(rate_it->second * static_cast<double>(n)));
        // Partial Fisher-Yates: the first k slots become the sample.
        for (std::size_t i = 0; i < k; ++i) std::swap(members[i], members[i + rng.below(n - i)]);
        for (std::size_t i = k; i < n; ++i) keep[members[i]] = false;
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!keep[i]) continue;
        if (rows[i].label) ++result.kept_counts[idx(*rows[i].label)];
        result.rows.push_back(std::move(rows[i]));
    }
    return result;
}

void write_feature_csv(std::ostream& out, std::span<const FeatureRow> rows) {
    out << "address,day";
    for (std::size_t o = 0; o < kOrbitCount; ++o) out << ",o" << o;
    out << ",income,label\n";
    for (const auto& row : rows) {
        out << csv::escape(row.orbits.address) << ',' << format_day(row.orbits.day);
        for (auto c : row.orbits.counts) out << ',' << c;
        out << ',' << row.income << ',';
        if (row.label) out << class_name(*row.label);
        out << '\n';
    }
}

void write_manifest(std::ostream& out, const ExportResult& result, const ExportOptions& options,
                    ActiveReading reading) {
    using nlohmann::ordered_json;
    const auto orbit_columns = [](OrbitSet set) {
        auto cols = ordered_json::array();
        for (OrbitId o : set.to_vector()) cols.push_back("o" + std::to_string(o));
        return cols;
    };
    const auto per_class = [](const std::array<std::size_t, kClassCount>& counts) {
        ordered_json j = ordered_json::object();
        for (std::size_t c = 0; c < kClassCount; ++c) j[std::string(class_name(static_cast<AddressClass>(c)))] = counts[c];
        return j;
    };

    ordered_json m;
    std::string columns = "address,day";
    for (std::size_t o = 0; o < kOrbitCount; ++o) columns += ",o" + std::to_string(o);
    m["columns"] = columns + ",income,label";
    m["seed"] = options.seed;
    ordered_json rates = ordered_json::object();
    for (std::size_t c = 0; c < kClassCount; ++c) {
        const auto cls = static_cast<AddressClass>(c);
        const auto it = options.rates.find(cls);
        rates[std::string(class_name(cls))] = it == options.rates.end() ? 1.0 : it->second;
    }
    m["rates"] = rates;
    m["sampling"] = "stratified by day, without replacement, round(rate * n) rows per (day, class)";
    m["unlabeled_as"] = options.unlabeled ? ordered_json(std::string(class_name(*options.unlabeled))) : ordered_json();
    m["input_rows"] = per_class(result.input_counts);
    m["output_rows"] = per_class(result.kept_counts);
    m["unlabeled_rows"] = result.unlabeled_rows;
    m["total_rows"] = result.rows.size();
    const auto roles = role_partition(reading);
    m["role_partition"] = {
        {"reading", reading == ActiveReading::kSpenderOnly ? "spender_only" : "all_first_outputs"},
        {"active", orbit_columns(roles.active)},
        {"passive", orbit_columns(roles.passive)},
    };
    m["mixing_flags"] = orbit_columns(mixing_orbit_flags());
    ordered_json warnings = ordered_json::array();
    for (const auto& a : result.unknown_label_addresses) warnings.push_back("label for unknown address " + a);
    m["warnings"] = warnings;
    out << m.dump(2) << '\n';
}

}  // namespace chainlet
