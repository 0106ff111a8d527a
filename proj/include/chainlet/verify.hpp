#pragma once

// Seeded random cases for cross-checking the extractor against the
// brute-force oracle and for the orbit/stabilizer identities.

#include "chainlet/graph.hpp"
#include "chainlet/iso_oracle.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace chainlet {

struct SmallStreamLimits {
    std::size_t max_transactions = 50;
    std::size_t max_nodes = SmallGraph::kMaxNodes;  // transactions + distinct addresses
    std::size_t max_degree = 5;
};

/// One day of random transactions within `limits`. Includes coinbase
/// transactions, repeated addresses within a transaction, address reuse
/// and timestamp ties. All records fall on `day` under the default offset.
std::vector<TransactionRecord> random_small_stream(std::uint64_t seed, Day day, const SmallStreamLimits& limits = {});

struct TheoremCase {
    std::string shape;  // "M-S-N", or "dormant-M"
    SmallGraph pattern;
    SmallGraph host;
};

/// Planted copies of a 2-chainlet pattern plus random noise. Shapes cycle
/// with the seed so that automorphism group sizes 1, 2, 4 and 6 all occur.
TheoremCase random_theorem_case(std::uint64_t seed);

struct VerificationReport {
    std::size_t oracle_total = 0;
    std::size_t oracle_passed = 0;
    std::size_t theorem_total = 0;
    std::size_t theorem_passed = 0;
    std::set<std::size_t> automorphism_sizes;
    std::vector<std::string> failures;  // one line per failing seed
    double seconds = 0;

    bool passed() const { return oracle_passed == oracle_total && theorem_passed == theorem_total; }
};

/// Runs seeds [first_seed, first_seed + count) through both checks.
VerificationReport run_verification(std::uint64_t first_seed, std::size_t count, unsigned workers = 1);

}  // namespace chainlet
