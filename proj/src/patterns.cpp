#include "chainlet/patterns.hpp"

#include "chainlet/csv.hpp"
#include "chainlet/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace chainlet {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::size_t idx(AddressClass c) { return static_cast<std::size_t>(c); }

OrbitPattern pattern_of(const OrbitVector& v, GroupBy group_by) {
    OrbitPattern p{v.nonzero(), std::nullopt};
    if (group_by == GroupBy::kExactCounts) p.counts = v.counts;
    return p;
}

using Histogram = std::map<OrbitPattern, std::array<std::size_t, kClassCount>>;

double metric(const PatternStats& s, const SortKey& key) {
    switch (key.metric) {
        case SortKey::Metric::kTotal: return static_cast<double>(s.total);
        case SortKey::Metric::kClassCount: return static_cast<double>(s.counts[idx(key.cls)]);
        case SortKey::Metric::kClassPct: return s.class_pct[idx(key.cls)];
        case SortKey::Metric::kWithinClassPct: return s.within_class_pct[idx(key.cls)];
        case SortKey::Metric::kNonWhitePct: return s.non_white_pct;
    }
    return 0;
}

}  // namespace

AddressClass parse_class(std::string_view text) {
    const auto t = lower(text);
    if (t == "white" || t == "w") return AddressClass::kWhite;
    if (t == "dm" || t == "darknet") return AddressClass::kDarknet;
    if (t == "rs" || t == "ransomware") return AddressClass::kRansomware;
    throw DataError("unknown label '" + std::string(text) + "', expected White, DM or RS");
}

std::string_view class_name(AddressClass c) {
    switch (c) {
        case AddressClass::kWhite: return "White";
        case AddressClass::kDarknet: return "DM";
        case AddressClass::kRansomware: return "RS";
    }
    return "?";
}

std::vector<LabeledVector> join_labels(std::span<const OrbitVector> vectors,
                                       const std::map<std::string, std::string>& labels,
                                       std::optional<AddressClass> unlabeled) {
    std::map<std::string, AddressClass> parsed;
    for (const auto& [address, label] : labels) parsed.emplace(address, parse_class(label));
    std::vector<LabeledVector> out;
    out.reserve(vectors.size());
    for (const auto& v : vectors) {
        const auto it = parsed.find(v.address);
        if (it != parsed.end()) {
            out.push_back({v, it->second});
        } else if (unlabeled) {
            out.push_back({v, *unlabeled});
        }
    }
    return out;
}

std::vector<LabeledVector> aggregate(std::span<const LabeledVector> vectors, Aggregation mode) {
    std::vector<LabeledVector> out;
    if (mode == Aggregation::kPerDay) {
        out.assign(vectors.begin(), vectors.end());
    } else {
        std::map<std::string, LabeledVector> by_address;
        for (const auto& lv : vectors) {
            auto [it, inserted] = by_address.try_emplace(lv.vector.address, lv);
            if (inserted) continue;
            auto& acc = it->second;
            if (acc.label != lv.label) {
                throw DataError("address " + lv.vector.address + " carries different labels on different days");
            }
            acc.vector.day = std::min(acc.vector.day, lv.vector.day);
            for (std::size_t o = 0; o < kOrbitCount; ++o) acc.vector.counts[o] += lv.vector.counts[o];
        }
        for (auto& [address, lv] : by_address) out.push_back(std::move(lv));
    }
    std::sort(out.begin(), out.end(), [](const LabeledVector& a, const LabeledVector& b) {
        return std::tie(a.vector.day, a.vector.address) < std::tie(b.vector.day, b.vector.address);
    });
    return out;
}

std::string OrbitPattern::describe() const {
    std::string out = "{";
    bool first = true;
    for (OrbitId o : mask.to_vector()) {
        if (!first) out += ',';
        first = false;
        out += std::to_string(o);
        if (counts) out += ":" + std::to_string((*counts)[o]);
    }
    return out + "}";
}

std::strong_ordering OrbitPattern::operator<=>(const OrbitPattern& other) const {
    if (auto c = mask.mask() <=> other.mask.mask(); c != 0) return c;
    return counts <=> other.counts;
}

std::vector<PatternStats> pattern_table(std::span<const LabeledVector> vectors, GroupBy group_by, SortKey key,
                                        unsigned workers) {
    workers = std::max(1U, std::min<unsigned>(workers, std::max<std::size_t>(vectors.size(), 1)));
    std::vector<Histogram> partial(workers);
    const auto build = [&](unsigned w) {
        const auto begin = vectors.size() * w / workers;
        const auto end = vectors.size() * (w + 1) / workers;
        for (auto i = begin; i < end; ++i) ++partial[w][pattern_of(vectors[i].vector, group_by)][idx(vectors[i].label)];
    };
    if (workers == 1) {
        build(0);
    } else {
        std::vector<std::jthread> threads;
        for (unsigned w = 0; w < workers; ++w) threads.emplace_back(build, w);
    }
    Histogram merged;
    for (const auto& h : partial) {
        for (const auto& [pattern, counts] : h) {
            auto& acc = merged[pattern];
            for (std::size_t c = 0; c < kClassCount; ++c) acc[c] += counts[c];
        }
    }

    std::array<std::size_t, kClassCount> class_totals{};
    for (const auto& lv : vectors) ++class_totals[idx(lv.label)];

    std::vector<PatternStats> stats;
    stats.reserve(merged.size());
    for (const auto& [pattern, counts] : merged) {
        PatternStats s;
        s.pattern = pattern;
        s.counts = counts;
        for (auto c : counts) s.total += c;
        for (std::size_t c = 0; c < kClassCount; ++c) {
            s.class_pct[c] = 100.0 * static_cast<double>(counts[c]) / static_cast<double>(s.total);
            s.within_class_pct[c] =
                class_totals[c] ? 100.0 * static_cast<double>(counts[c]) / static_cast<double>(class_totals[c]) : 0.0;
        }
        s.non_white_pct = 100.0 * static_cast<double>(s.total - counts[idx(AddressClass::kWhite)]) /
                          static_cast<double>(s.total);
        stats.push_back(std::move(s));
    }
    // merged is ordered by pattern already; stable sort keeps that as the tie-break.
    std::stable_sort(stats.begin(), stats.end(),
                     [&](const PatternStats& a, const PatternStats& b) { return metric(a, key) > metric(b, key); });
    return stats;
}

PatternQuery parse_query(std::string_view text) {
    PatternQuery q;
    std::size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos >= text.size()) break;
        auto end = pos;
        while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
        const auto token = text.substr(pos, end - pos);
        pos = end;
        if (token.size() < 2 || (token[0] != '+' && token[0] != '-')) {
            throw std::invalid_argument("bad query token '" + std::string(token) + "', expected +N or -N");
        }
        unsigned orbit = 0;
        const auto* first = token.data() + 1;
        const auto* last = token.data() + token.size();
        const auto [ptr, ec] = std::from_chars(first, last, orbit);
        if (ec != std::errc{} || ptr != last || orbit >= kOrbitCount) {
            throw std::invalid_argument("bad orbit in query token '" + std::string(token) + "'");
        }
        (token[0] == '+' ? q.must_nonzero : q.must_zero).insert(static_cast<OrbitId>(orbit));
    }
    if (!(q.must_nonzero & q.must_zero).empty()) {
        throw std::invalid_argument("query lists an orbit as both nonzero and zero");
    }
    return q;
}

QueryResult query_pattern(std::span<const LabeledVector> vectors, const PatternQuery& query) {
    if (!(query.must_nonzero & query.must_zero).empty()) {
        throw std::invalid_argument("must_nonzero and must_zero overlap");
    }
    QueryResult result;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        const auto mask = vectors[i].vector.nonzero();
        if ((mask & query.must_nonzero) == query.must_nonzero && (mask & query.must_zero).empty()) {
            result.matches.push_back(i);
            ++result.histogram[idx(vectors[i].label)];
        }
    }
    return result;
}

std::array<std::optional<double>, kClassCount> distinct_nonzero_stats(std::span<const LabeledVector> vectors) {
    std::array<std::size_t, kClassCount> n{};
    std::array<std::size_t, kClassCount> sum{};
    for (const auto& lv : vectors) {
        ++n[idx(lv.label)];
        sum[idx(lv.label)] += lv.vector.nonzero().size();
    }
    std::array<std::optional<double>, kClassCount> out;
    for (std::size_t c = 0; c < kClassCount; ++c) {
        if (n[c]) out[c] = static_cast<double>(sum[c]) / static_cast<double>(n[c]);
    }
    return out;
}

void write_pattern_report(std::ostream& out, std::span<const PatternStats> stats) {
    out << "pattern\tW\tDM\tRS\ttotal\tW%\tDM%\tRS%\tnon_white%\tW_share%\tDM_share%\tRS_share%\n";
    char buf[32];
    const auto pct = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.1f", v);
        return std::string(buf);
    };
    for (const auto& s : stats) {
        out << s.pattern.describe() << '\t' << s.counts[0] << '\t' << s.counts[1] << '\t' << s.counts[2] << '\t'
            << s.total;
        for (double v : s.class_pct) out << '\t' << pct(v);
        out << '\t' << pct(s.non_white_pct);
        for (double v : s.within_class_pct) out << '\t' << pct(v);
        out << '\n';
    }
}

void write_pattern_csv(std::ostream& out, std::span<const PatternStats> stats) {
    out << "pattern,white,dm,rs,total,white_pct,dm_pct,rs_pct,non_white_pct,white_share_pct,dm_share_pct,"
           "rs_share_pct\n";
    char buf[40];
    const auto full = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (const auto& s : stats) {
        out << csv::escape(s.pattern.describe()) << ',' << s.counts[0] << ',' << s.counts[1] << ',' << s.counts[2]
            << ',' << s.total;
        for (double v : s.class_pct) out << ',' << full(v);
        out << ',' << full(s.non_white_pct);
        for (double v : s.within_class_pct) out << ',' << full(v);
        out << '\n';
    }
}

}  // namespace chainlet
