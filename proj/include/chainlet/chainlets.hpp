#pragma once

// 1- and 2-chainlet enumeration over a daily snapshot.
//
// A 2-chainlet is an ordered pair (t1, t2) where t2 spends at least one
// output address of t1 and comes later in snapshot order. A transaction with
// no such t2 forms a dormant 1-chainlet.

#include "chainlet/graph.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace chainlet {

/// Cardinalities at or above 3 fold into 3.
constexpr std::uint8_t clamp3(std::size_t n) { return n >= 3 ? 3 : static_cast<std::uint8_t>(n); }

/// Chainlet class in X-M-N form (t1 input count X is not tracked).
struct ClassDescriptor {
    std::uint8_t m = 0;       // clamp3(|out1|)
    std::uint8_t s = 0;       // spent count, see ChainletOccurrence::descriptor()
    std::uint8_t n = 0;       // clamp3(|out2|), 0 for dormant 1-chainlets

    bool operator==(const ClassDescriptor&) const = default;
};

/// One 2-chainlet (or a dormant 1-chainlet when `t2` is empty).
///
/// `out1` and `out2` view into the snapshot and are valid while it lives.
struct ChainletOccurrence {
    TxIndex t1 = 0;
    std::optional<TxIndex> t2;
    std::span<const AddressIndex> out1;
    std::vector<AddressIndex> shared;  // out1 ∩ inputs(t2), ascending
    std::span<const AddressIndex> out2;

    bool dormant() const { return !t2.has_value(); }

    /// M and N clamp to 3. S is clamp3(|shared|), except that when some t1
    /// output is left unspent and clamping would make S equal M, S drops to
    /// M - 1 so that the unspent outputs keep a sibling role.
    ClassDescriptor descriptor() const;
};

/// Visits 2-chainlets with t1 in [t1_begin, t1_end), in (t1, t2) order.
void for_each_2chainlet(const DailySnapshot& snapshot, TxIndex t1_begin, TxIndex t1_end,
                        const std::function<void(const ChainletOccurrence&)>& visit);

/// Every ordered (t1, t2) pair with a non-empty shared set, exactly once.
std::vector<ChainletOccurrence> enumerate_2chainlets(const DailySnapshot& snapshot);

/// One occurrence per transaction without an in-window successor.
std::vector<ChainletOccurrence> enumerate_dormant_1chainlets(const DailySnapshot& snapshot);

/// JSON-lines debug dump of occurrences (tx ids and address strings).
std::string dump_occurrences(const DailySnapshot& snapshot, std::span<const ChainletOccurrence> occurrences);

}  // namespace chainlet
