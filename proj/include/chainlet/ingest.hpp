#pragma once

// JSON-lines transaction stream:
//   {"tx_id": str, "timestamp": int, "inputs": [str],
//    "outputs": [{"addr": str, "value": int}], "input_values": [int]?}

#include "chainlet/graph.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chainlet {

struct IngestOptions {
    /// Drop transactions whose total output value is below this (base units).
    std::optional<Amount> min_amount;
};

/// Parses and validates one line. Throws DataError naming the field.
TransactionRecord parse_record(std::string_view line);

/// Single-line JSON encoding, keys in fixed order.
std::string to_json_line(const TransactionRecord& record);

struct IngestResult {
    std::vector<TransactionRecord> records;
    std::size_t lines = 0;
    std::size_t filtered = 0;  // dropped by min_amount
};

/// Reads a whole stream. Blank lines are skipped; errors carry
/// `source:line` context.
IngestResult read_records(std::istream& in, const std::string& source, const IngestOptions& options = {});
IngestResult read_records_file(const std::string& path, const IngestOptions& options = {});

void write_records(std::ostream& out, const std::vector<TransactionRecord>& records);

}  // namespace chainlet
