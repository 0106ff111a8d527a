#include "chainlet/chainlets.hpp"

#include <json.hpp>

#include <algorithm>
#include <iterator>

namespace chainlet {

ClassDescriptor ChainletOccurrence::descriptor() const {
    ClassDescriptor d;
    d.m = clamp3(out1.size());
    if (dormant()) return d;
    d.n = clamp3(out2.size());
    d.s = clamp3(shared.size());
    if (shared.size() < out1.size() && d.s >= d.m) d.s = static_cast<std::uint8_t>(d.m - 1);
    return d;
}

void for_each_2chainlet(const DailySnapshot& snapshot, TxIndex t1_begin, TxIndex t1_end,
                        const std::function<void(const ChainletOccurrence&)>& visit) {
    ChainletOccurrence occ;
    for (TxIndex t1 = t1_begin; t1 < t1_end; ++t1) {
        occ.t1 = t1;
        occ.out1 = snapshot.outputs_of(t1);
        for (TxIndex t2 : snapshot.successors(t1)) {
            occ.t2 = t2;
            occ.out2 = snapshot.outputs_of(t2);
            occ.shared.clear();
            const auto in2 = snapshot.inputs_of(t2);
            std::set_intersection(occ.out1.begin(), occ.out1.end(), in2.begin(), in2.end(),
                                  std::back_inserter(occ.shared));
            visit(occ);
        }
    }
}

std::vector<ChainletOccurrence> enumerate_2chainlets(const DailySnapshot& snapshot) {
    std::vector<ChainletOccurrence> result;
    for_each_2chainlet(snapshot, 0, static_cast<TxIndex>(snapshot.transaction_count()),
                       [&](const ChainletOccurrence& occ) { result.push_back(occ); });
    return result;
}

std::vector<ChainletOccurrence> enumerate_dormant_1chainlets(const DailySnapshot& snapshot) {
    std::vector<ChainletOccurrence> result;
    for (TxIndex t1 = 0; t1 < snapshot.transaction_count(); ++t1) {
        if (!snapshot.successors(t1).empty()) continue;
        ChainletOccurrence occ;
        occ.t1 = t1;
        occ.out1 = snapshot.outputs_of(t1);
        result.push_back(std::move(occ));
    }
    return result;
}

std::string dump_occurrences(const DailySnapshot& snapshot, std::span<const ChainletOccurrence> occurrences) {
    std::string out;
    const auto names = [&](auto addrs) {
        auto arr = nlohmann::ordered_json::array();
        for (AddressIndex a : addrs) arr.push_back(snapshot.address(a));
        return arr;
    };
    for (const auto& occ : occurrences) {
        const auto d = occ.descriptor();
        nlohmann::ordered_json j;
        j["t1"] = snapshot.record(occ.t1).tx_id;
        j["t2"] = occ.t2 ? nlohmann::ordered_json(snapshot.record(*occ.t2).tx_id) : nlohmann::ordered_json();
        j["out1"] = names(occ.out1);
        j["shared"] = names(occ.shared);
        j["out2"] = names(occ.out2);
        j["class"] = {d.m, d.s, d.n};
        out += j.dump();
        out += '\n';
    }
    return out;
}

}  // namespace chainlet
