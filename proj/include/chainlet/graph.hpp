#pragma once

// Heterogeneous UTXO graph: address nodes, transaction nodes, and the
// directed edges between them, cut into immutable daily snapshots.

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace chainlet {

using AddressId = std::string;
using Amount = std::uint64_t;
using TxIndex = std::uint32_t;
using AddressIndex = std::uint32_t;
using Day = std::chrono::sys_days;

inline constexpr int kDefaultWindowOffsetMinutes = -360;  // UTC-6

struct TxOutput {
    AddressId address;
    Amount value = 0;

    bool operator==(const TxOutput&) const = default;
};

/// One UTXO transaction as it arrives from the chain export.
/// `inputs` keeps the exported order and may repeat an address when several
/// of its outputs are spent together; graph neighborhoods de-duplicate.
struct TransactionRecord {
    std::string tx_id;
    std::int64_t timestamp = 0;
    std::vector<AddressId> inputs;
    std::vector<TxOutput> outputs;
    std::optional<std::vector<Amount>> input_values;

    Amount total_output() const;
    std::optional<Amount> total_input() const;
    bool is_coinbase() const { return inputs.empty(); }

    bool operator==(const TransactionRecord&) const = default;
};

/// Throws DataError describing the first violated field constraint.
void validate(const TransactionRecord& record);

/// Calendar day of `timestamp` after shifting it by `offset_minutes`.
Day window_day(std::int64_t timestamp, int offset_minutes = kDefaultWindowOffsetMinutes);
std::string format_day(Day day);
/// Parses YYYY-MM-DD. Throws DataError.
Day parse_day(std::string_view text);

namespace detail {

/// Compressed adjacency rows.
struct Csr {
    std::vector<std::uint32_t> offsets{0};
    std::vector<std::uint32_t> values;

    std::span<const std::uint32_t> row(std::size_t i) const {
        return {values.data() + offsets[i], values.data() + offsets[i + 1]};
    }
    std::size_t rows() const { return offsets.size() - 1; }
};

}  // namespace detail

/// Immutable bipartite multigraph of one 24-hour window.
///
/// Transactions are ordered by (timestamp, tx_id); a TxIndex is a position in
/// that order. Address indexes are assigned by first appearance in the same
/// order (inputs before outputs), so two builds from the same records agree.
class DailySnapshot {
public:
    DailySnapshot() = default;
    DailySnapshot(DailySnapshot&&) noexcept = default;
    DailySnapshot& operator=(DailySnapshot&&) noexcept = default;
    // The address lookup holds views into records_.
    DailySnapshot(const DailySnapshot&) = delete;
    DailySnapshot& operator=(const DailySnapshot&) = delete;

    Day window_date() const { return window_date_; }
    int window_offset_minutes() const { return window_offset_minutes_; }

    std::size_t transaction_count() const { return records_.size(); }
    std::size_t address_count() const { return addresses_.size(); }

    std::span<const TransactionRecord> records() const { return records_; }
    const TransactionRecord& record(TxIndex tx) const { return records_[tx]; }
    const AddressId& address(AddressIndex a) const { return addresses_[a]; }
    std::optional<AddressIndex> find_address(std::string_view address) const;

    /// Distinct input addresses of `tx`, ascending index.
    std::span<const AddressIndex> inputs_of(TxIndex tx) const { return tx_inputs_.row(tx); }
    /// Distinct output addresses of `tx`, ascending index.
    std::span<const AddressIndex> outputs_of(TxIndex tx) const { return tx_outputs_.row(tx); }

    /// Transactions crediting `a` (address in-neighbors), ascending.
    std::span<const TxIndex> receiving_txs(AddressIndex a) const { return addr_receives_.row(a); }
    /// Transactions spending from `a` (address out-neighbors), ascending.
    std::span<const TxIndex> spending_txs(AddressIndex a) const { return addr_spends_.row(a); }

    /// Later in-window transactions spending at least one output address of `tx`.
    std::span<const TxIndex> successors(TxIndex tx) const { return successors_.row(tx); }
    /// Earlier in-window transactions with an output address spent by `tx`.
    std::span<const TxIndex> predecessors(TxIndex tx) const { return predecessors_.row(tx); }

    /// Canonical text form; equal for snapshots built from the same records
    /// in any order.
    std::string serialize() const;

private:
    friend DailySnapshot build_snapshot(std::vector<TransactionRecord>, Day, int);

    Day window_date_{};
    int window_offset_minutes_ = kDefaultWindowOffsetMinutes;
    std::vector<TransactionRecord> records_;
    std::vector<AddressId> addresses_;
    std::unordered_map<std::string_view, AddressIndex> address_lookup_;
    detail::Csr tx_inputs_;
    detail::Csr tx_outputs_;
    detail::Csr addr_receives_;
    detail::Csr addr_spends_;
    detail::Csr successors_;
    detail::Csr predecessors_;
};

/// Builds the snapshot of `window_date` from the records whose shifted
/// timestamp falls on that day; other records are dropped. Throws DataError
/// on an invalid record or a duplicate tx_id.
DailySnapshot build_snapshot(std::vector<TransactionRecord> records, Day window_date,
                             int window_offset_minutes = kDefaultWindowOffsetMinutes);

struct DegreeProfile {
    std::size_t in_tx_count = 0;   // distinct txs paying the address
    std::size_t out_tx_count = 0;  // distinct txs spending from it

    bool operator==(const DegreeProfile&) const = default;
};

/// Unknown addresses report {0, 0}.
DegreeProfile address_degree_profile(const DailySnapshot& snapshot, std::string_view address);

/// Splits a record stream into per-day groups. Rejects tx_ids repeated
/// anywhere in the stream.
std::map<Day, std::vector<TransactionRecord>> bucket_by_day(
    std::vector<TransactionRecord> records, int window_offset_minutes = kDefaultWindowOffsetMinutes);

}  // namespace chainlet
