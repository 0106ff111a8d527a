#pragma once

#include "chainlet/graph.hpp"

#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace testutil {

// 2020-01-01 under the default UTC-6 window starts at 06:00 UTC.
inline const chainlet::Day kDay{std::chrono::days{18262}};
inline constexpr std::int64_t kT0 = 1577858400;

inline chainlet::TransactionRecord tx(std::string id, std::int64_t offset, std::vector<std::string> inputs,
                                      std::initializer_list<std::pair<const char*, chainlet::Amount>> outputs) {
    chainlet::TransactionRecord r;
    r.tx_id = std::move(id);
    r.timestamp = kT0 + offset;
    r.inputs = std::move(inputs);
    for (const auto& [addr, value] : outputs) r.outputs.push_back({addr, value});
    return r;
}

inline chainlet::DailySnapshot snap(std::vector<chainlet::TransactionRecord> records) {
    return chainlet::build_snapshot(std::move(records), kDay, chainlet::kDefaultWindowOffsetMinutes);
}

}  // namespace testutil
