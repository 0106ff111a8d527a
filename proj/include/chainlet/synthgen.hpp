#pragma once

// Seeded synthetic UTXO streams with planted behavioral cohorts:
//   rs_forwarders  receive a payment and forward it to fresh addresses later
//                  the same day (orbit 9 or 12 on the receipt day)
//   dm_holders     receive a payment that stays dormant that day
//                  (orbit 0, 1 or 2)

#include "chainlet/graph.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace chainlet {

struct GenConfig {
    std::uint64_t seed = 1;
    std::size_t days = 1;
    Day start_day = Day{std::chrono::days{18262}};  // 2020-01-01
    int window_offset_minutes = kDefaultWindowOffsetMinutes;
    std::size_t background_tx_per_day = 1000;
    /// Weight of 1, 2, 3, ... inputs / outputs per background transaction.
    /// The defaults put about 57% of transactions at one input and one output.
    std::vector<double> input_degree_weights{0.75, 0.15, 0.06, 0.04};
    std::vector<double> output_degree_weights{0.765, 0.2, 0.035};
    /// Chance a background input comes from an output created earlier that day.
    double same_day_spend = 0.4;
    /// Chance a background output pays an already used address.
    double address_reuse = 0.02;
    std::size_t rs_forwarders = 0;
    std::size_t dm_holders = 0;
    Amount min_payment = 100'000;
    Amount max_payment = 500'000'000;
    Amount max_fee = 2'000;
};

struct GenOutput {
    std::vector<TransactionRecord> records;    // in timestamp order
    std::map<std::string, std::string> labels;  // every address: White, DM or RS
};

/// Throws std::invalid_argument for an unusable config, e.g. planted cohorts
/// with no background transactions to pay them.
GenOutput generate(const GenConfig& config);

/// CSV `address,label`, sorted by address.
void write_labels(std::ostream& out, const std::map<std::string, std::string>& labels);

}  // namespace chainlet
