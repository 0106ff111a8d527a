#pragma once

// Class-conditional orbit pattern mining over labeled orbit vectors.

#include "chainlet/orbits.hpp"

#include <array>
#include <compare>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chainlet {

enum class AddressClass : std::uint8_t { kWhite = 0, kDarknet = 1, kRansomware = 2 };
inline constexpr std::size_t kClassCount = 3;

/// Accepts White/W, DM/darknet, RS/ransomware (case-insensitive).
/// Throws DataError otherwise.
AddressClass parse_class(std::string_view text);
std::string_view class_name(AddressClass c);  // "White", "DM", "RS"

struct LabeledVector {
    OrbitVector vector;
    AddressClass label = AddressClass::kWhite;
};

/// Attaches labels by address. Addresses missing from `labels` get
/// `unlabeled` when set and are dropped otherwise. Throws DataError on an
/// unknown label value.
std::vector<LabeledVector> join_labels(std::span<const OrbitVector> vectors,
                                       const std::map<std::string, std::string>& labels,
                                       std::optional<AddressClass> unlabeled = AddressClass::kWhite);

enum class Aggregation {
    kPerDay,      // one vector per (address, day)
    kPerAddress,  // counts summed over days, then binarized
};

/// kPerAddress sums each address's days into one vector dated at its first
/// day. Output sorted by (day, address).
std::vector<LabeledVector> aggregate(std::span<const LabeledVector> vectors, Aggregation mode);

enum class GroupBy { kMask, kExactCounts };

struct OrbitPattern {
    OrbitSet mask;
    std::optional<std::array<std::uint32_t, kOrbitCount>> counts;

    /// "{9,12}" for masks, "{9:1,13:1,14:1}" for exact counts.
    std::string describe() const;
    std::strong_ordering operator<=>(const OrbitPattern& other) const;
    bool operator==(const OrbitPattern&) const = default;
};

struct PatternStats {
    OrbitPattern pattern;
    std::array<std::size_t, kClassCount> counts{};
    std::size_t total = 0;
    /// Share of this pattern's vectors in each class, in percent.
    std::array<double, kClassCount> class_pct{};
    double non_white_pct = 0;
    /// Share of each class's vectors that show this pattern, in percent.
    std::array<double, kClassCount> within_class_pct{};
};

struct SortKey {
    enum class Metric { kTotal, kClassCount, kClassPct, kWithinClassPct, kNonWhitePct };
    Metric metric = Metric::kTotal;
    AddressClass cls = AddressClass::kWhite;
};

/// Groups vectors by pattern and sorts by `key` descending; ties break by
/// pattern ascending. Partial histograms are built on `workers` threads.
std::vector<PatternStats> pattern_table(std::span<const LabeledVector> vectors, GroupBy group_by,
                                        SortKey key = {}, unsigned workers = 1);

struct PatternQuery {
    OrbitSet must_nonzero;
    OrbitSet must_zero;
};

/// Parses "+9 +12 -30". Throws std::invalid_argument on a bad token or an
/// orbit listed as both nonzero and zero.
PatternQuery parse_query(std::string_view text);

struct QueryResult {
    std::vector<std::size_t> matches;  // indexes into the input, ascending
    std::array<std::size_t, kClassCount> histogram{};
};

/// Throws std::invalid_argument when the two sets overlap.
QueryResult query_pattern(std::span<const LabeledVector> vectors, const PatternQuery& query);

/// Mean number of distinct nonzero orbits per class; empty for a class with
/// no vectors.
std::array<std::optional<double>, kClassCount> distinct_nonzero_stats(std::span<const LabeledVector> vectors);

/// Tab-separated report, percentages with one decimal.
void write_pattern_report(std::ostream& out, std::span<const PatternStats> stats);
/// CSV with full-precision percentages.
void write_pattern_csv(std::ostream& out, std::span<const PatternStats> stats);

}  // namespace chainlet
