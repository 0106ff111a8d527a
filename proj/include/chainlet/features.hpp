#pragma once

// ML-ready dataset: orbit vectors joined with income and labels, with
// per-class undersampling.

#include "chainlet/graph.hpp"
#include "chainlet/orbits.hpp"
#include "chainlet/patterns.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace chainlet {

/// Per address, the sum of output values credited to it in the snapshot.
/// Addresses never paid are absent.
std::map<AddressId, Amount> compute_income(const DailySnapshot& snapshot);

/// Income keyed by (day, address) over a whole record stream.
using IncomeTable = std::map<std::pair<Day, AddressId>, Amount>;
IncomeTable compute_income_stream(std::span<const TransactionRecord> records,
                                  int window_offset_minutes = kDefaultWindowOffsetMinutes);

struct FeatureRow {
    OrbitVector orbits;
    Amount income = 0;
    std::optional<AddressClass> label;
};

struct ExportOptions {
    std::uint64_t seed = 0;
    /// Keep rate per class in (0, 1]. Classes not listed keep every row.
    std::map<AddressClass, double> rates;
    /// Label given to rows whose address has no label. Unset leaves the label
    /// column empty; such rows are never sampled away.
    std::optional<AddressClass> unlabeled = AddressClass::kWhite;
};

struct ExportResult {
    std::vector<FeatureRow> rows;  // sorted by (day, address)
    std::array<std::size_t, kClassCount> input_counts{};
    std::array<std::size_t, kClassCount> kept_counts{};
    std::size_t unlabeled_rows = 0;
    /// Labeled addresses that never occur in the vectors, ascending.
    std::vector<std::string> unknown_label_addresses;
};

/// Joins and undersamples. Within each (day, class) stratum exactly
/// round(rate * n) rows are kept, drawn without replacement. The result is a
/// pure function of the inputs and the seed. Throws std::invalid_argument
/// for a rate outside (0, 1] and DataError for an unknown label value.
ExportResult build_dataset(std::span<const OrbitVector> vectors, const IncomeTable& income,
                           const std::map<std::string, std::string>& labels, const ExportOptions& options);

/// CSV `address,day,o0,...,o47,income,label`.
void write_feature_csv(std::ostream& out, std::span<const FeatureRow> rows);

/// Manifest JSON: seed, rates, row counts per class, warnings, and the
/// active/passive orbit partition consumed by downstream ablations.
void write_manifest(std::ostream& out, const ExportResult& result, const ExportOptions& options,
                    ActiveReading reading = ActiveReading::kSpenderOnly);

}  // namespace chainlet
