#pragma once

// Orbits 0..47: positional roles of addresses in dormant 1-chainlets and
// 2-chainlets, and per-(address, day) orbit count vectors.
//
//   0..2    dormant t1 outputs, |out1| = 1, 2, 3
//   3..8    X-1-N   (spender, output) for N = 1, 2, 3
//   9..17   X-2-N, one output spent   (spender, sibling, output)
//   18..23  X-2-N, both spent         (spender, output)
//   24..32  X-3-N, one spent          (spender, sibling, output)
//   33..41  X-3-N, two spent          (spender, sibling, output)
//   42..47  X-3-N, all spent          (spender, output)

#include "chainlet/chainlets.hpp"
#include "chainlet/graph.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chainlet {

inline constexpr std::size_t kOrbitCount = 48;
using OrbitId = std::uint8_t;

/// Subset of the 48 orbits as a bit mask.
class OrbitSet {
public:
    constexpr OrbitSet() = default;
    constexpr OrbitSet(std::initializer_list<OrbitId> orbits) {
        for (OrbitId o : orbits) insert(o);
    }
    static constexpr OrbitSet from_mask(std::uint64_t mask) {
        OrbitSet s;
        s.bits_ = mask & kAll;
        return s;
    }
    static constexpr OrbitSet all() { return from_mask(kAll); }

    constexpr void insert(OrbitId o) { bits_ |= std::uint64_t{1} << o; }
    constexpr bool contains(OrbitId o) const { return o < kOrbitCount && (bits_ >> o) & 1U; }
    constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr std::uint64_t mask() const { return bits_; }
    std::vector<OrbitId> to_vector() const;

    constexpr OrbitSet operator|(OrbitSet o) const { return from_mask(bits_ | o.bits_); }
    constexpr OrbitSet operator&(OrbitSet o) const { return from_mask(bits_ & o.bits_); }
    constexpr OrbitSet complement() const { return from_mask(~bits_); }
    constexpr bool operator==(const OrbitSet&) const = default;

private:
    static constexpr std::uint64_t kAll = (std::uint64_t{1} << kOrbitCount) - 1;
    std::uint64_t bits_ = 0;
};

/// Orbits of one 2-chainlet class. `sibling` is empty when every t1 output
/// is spent by t2.
struct OrbitFamily {
    OrbitId spender = 0;
    std::optional<OrbitId> sibling;
    OrbitId output = 0;

    bool operator==(const OrbitFamily&) const = default;
};

/// Family for a 2-chainlet descriptor; empty for an invalid descriptor.
std::optional<OrbitFamily> orbit_family(ClassDescriptor d);
/// Orbit of every output of a dormant t1 with clamp3(|out1|) = m.
OrbitId dormant_orbit(std::uint8_t m);

struct OrbitAssignment {
    AddressIndex address = 0;
    OrbitId orbit = 0;

    bool operator==(const OrbitAssignment&) const = default;
};

/// Appends one assignment per (address, role) of `occ`. Throws
/// InvariantViolation when the occurrence has unspent t1 outputs but its
/// class has no sibling orbit.
void assign_orbits(const ChainletOccurrence& occ, std::vector<OrbitAssignment>& out);
std::vector<OrbitAssignment> assign_orbits(const ChainletOccurrence& occ);

struct OrbitVector {
    AddressId address;
    Day day{};
    std::array<std::uint32_t, kOrbitCount> counts{};

    OrbitSet nonzero() const;
    std::uint64_t total() const;
    bool operator==(const OrbitVector&) const = default;
};

using OrbitMap = std::map<AddressId, OrbitVector>;

/// Sums assignments from one snapshot. Addresses without assignments are
/// absent.
OrbitMap accumulate(const DailySnapshot& snapshot, std::span<const OrbitAssignment> assignments);

/// All orbit vectors of a snapshot, sorted by address. The t1 range is split
/// across `workers` threads; the result does not depend on the worker count.
std::vector<OrbitVector> extract_orbits(const DailySnapshot& snapshot, unsigned workers = 1);

/// Buckets a record stream into days and extracts every day. Sorted by
/// (day, address).
std::vector<OrbitVector> extract_stream(std::vector<TransactionRecord> records,
                                        int window_offset_minutes = kDefaultWindowOffsetMinutes,
                                        unsigned workers = 1);

/// Which orbits count as active.
enum class ActiveReading {
    kSpenderOnly,    // addresses that fund t2
    kAllFirstOutputs // every t1 output of a 2-chainlet, siblings included
};

struct RolePartition {
    OrbitSet active;
    OrbitSet passive;
};

RolePartition role_partition(ActiveReading reading = ActiveReading::kSpenderOnly);

/// Orbits seen in chainlets that may come from coin-mixing transactions.
OrbitSet mixing_orbit_flags();

/// CSV `address,day,o0,...,o47`, rows sorted by (day, address).
void write_orbit_csv(std::ostream& out, std::span<const OrbitVector> vectors);
std::vector<OrbitVector> read_orbit_csv(std::istream& in, const std::string& source);
std::vector<OrbitVector> read_orbit_csv_file(const std::string& path);

}  // namespace chainlet
