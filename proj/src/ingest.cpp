#include "chainlet/ingest.hpp"

#include "chainlet/errors.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>

namespace chainlet {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw DataError(std::string("missing field '") + key + "'");
    return *it;
}

Amount to_amount(const json& v, const std::string& field) {
    if (v.is_number_unsigned()) return v.get<Amount>();
    if (v.is_number_integer()) throw DataError(field + ": negative amount");
    throw DataError(field + ": expected integer");
}

std::string to_address(const json& v, const std::string& field) {
    if (!v.is_string()) throw DataError(field + ": expected string");
    auto s = v.get<std::string>();
    if (s.empty()) throw DataError(field + ": empty address");
    return s;
}

}  // namespace

TransactionRecord parse_record(std::string_view line) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) throw DataError("record must be a JSON object");

    TransactionRecord r;
    const auto& id = require(obj, "tx_id");
    if (!id.is_string()) throw DataError("tx_id: expected string");
    r.tx_id = id.get<std::string>();
    if (r.tx_id.empty()) throw DataError("tx_id: must be non-empty");

    const auto& ts = require(obj, "timestamp");
    if (!ts.is_number_integer()) throw DataError("timestamp: expected integer");
    if (ts.is_number_unsigned() && ts.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
        throw DataError("timestamp: out of range");
    }
    r.timestamp = ts.get<std::int64_t>();

    const auto& inputs = require(obj, "inputs");
    if (!inputs.is_array()) throw DataError("inputs: expected array");
    r.inputs.reserve(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        r.inputs.push_back(to_address(inputs[i], "inputs[" + std::to_string(i) + "]"));
    }

    const auto& outputs = require(obj, "outputs");
    if (!outputs.is_array()) throw DataError("outputs: expected array");
    r.outputs.reserve(outputs.size());
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        const std::string field = "outputs[" + std::to_string(i) + "]";
        const auto& o = outputs[i];
        if (!o.is_object()) throw DataError(field + ": expected object");
        const auto addr = o.find("addr");
        if (addr == o.end()) throw DataError(field + ": missing field 'addr'");
        const auto value = o.find("value");
        if (value == o.end()) throw DataError(field + ": missing field 'value'");
        r.outputs.push_back({to_address(*addr, field + ".addr"), to_amount(*value, field + ".value")});
    }

    if (const auto iv = obj.find("input_values"); iv != obj.end() && !iv->is_null()) {
        if (!iv->is_array()) throw DataError("input_values: expected array");
        std::vector<Amount> values;
        values.reserve(iv->size());
        for (std::size_t i = 0; i < iv->size(); ++i) {
            values.push_back(to_amount((*iv)[i], "input_values[" + std::to_string(i) + "]"));
        }
        r.input_values = std::move(values);
    }
    validate(r);
    return r;
}

std::string to_json_line(const TransactionRecord& record) {
    // ordered_json keeps the documented key order.
    nlohmann::ordered_json obj;
    obj["tx_id"] = record.tx_id;
    obj["timestamp"] = record.timestamp;
    obj["inputs"] = record.inputs;
    auto outs = nlohmann::ordered_json::array();
    for (const auto& o : record.outputs) {
        nlohmann::ordered_json out;
        out["addr"] = o.address;
        out["value"] = o.value;
        outs.push_back(std::move(out));
    }
    obj["outputs"] = std::move(outs);
    if (record.input_values) obj["input_values"] = *record.input_values;
    return obj.dump();
}

IngestResult read_records(std::istream& in, const std::string& source, const IngestOptions& options) {
    IngestResult result;
    std::string line;
    while (std::getline(in, line)) {
        ++result.lines;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        TransactionRecord r;
        try {
            r = parse_record(line);
        } catch (const DataError& e) {
            throw DataError(source, result.lines, e.what());
        }
        if (options.min_amount && r.total_output() < *options.min_amount) {
            ++result.filtered;
            continue;
        }
        result.records.push_back(std::move(r));
    }
    return result;
}

IngestResult read_records_file(const std::string& path, const IngestOptions& options) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open input file: " + path);
    return read_records(in, path, options);
}

void write_records(std::ostream& out, const std::vector<TransactionRecord>& records) {
    for (const auto& r : records) out << to_json_line(r) << '\n';
}

}  // namespace chainlet
