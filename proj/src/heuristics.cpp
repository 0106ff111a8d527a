#include "chainlet/heuristics.hpp"

#include "chainlet/csv.hpp"
#include "chainlet/errors.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>

namespace chainlet {

std::uint32_t AddressCluster::index_of(std::string_view address) {
    const auto [it, inserted] = index_.try_emplace(std::string(address), static_cast<std::uint32_t>(names_.size()));
    if (inserted) {
        const auto id = it->second;
        names_.emplace_back(address);
        parent_.push_back(id);
        size_.push_back(1);
        min_name_.push_back(id);
        ++clusters_;
    }
    return it->second;
}

std::uint32_t AddressCluster::root(std::uint32_t x) const {
    while (parent_[x] != x) x = parent_[x];
    return x;
}

std::uint32_t AddressCluster::find(std::uint32_t x) {
    const std::uint32_t root = this->root(x);
    while (parent_[x] != root) {
        const auto next = parent_[x];
        parent_[x] = root;
        x = next;
    }
    return root;
}

void AddressCluster::seal() {
    for (std::uint32_t i = 0; i < parent_.size(); ++i) find(i);
}

void AddressCluster::add(std::string_view address) { index_of(address); }

bool AddressCluster::unite(std::string_view a, std::string_view b) {
    auto ra = find(index_of(a));
    auto rb = find(index_of(b));
    if (ra == rb) return false;
    if (size_[ra] < size_[rb]) std::swap(ra, rb);
    parent_[rb] = ra;
    size_[ra] += size_[rb];
    if (names_[min_name_[rb]] < names_[min_name_[ra]]) min_name_[ra] = min_name_[rb];
    --clusters_;
    ++merges_;
    return true;
}

std::optional<std::string> AddressCluster::cluster_of(std::string_view address) const {
    const auto it = index_.find(std::string(address));
    if (it == index_.end()) return std::nullopt;
    return names_[min_name_[root(it->second)]];
}

bool AddressCluster::same_cluster(std::string_view a, std::string_view b) const {
    const auto ca = cluster_of(a);
    return ca && ca == cluster_of(b);
}

std::map<std::string, std::vector<std::string>> AddressCluster::clusters() const {
    std::map<std::string, std::vector<std::string>> out;
    for (std::uint32_t i = 0; i < names_.size(); ++i) out[names_[min_name_[root(i)]]].push_back(names_[i]);
    for (auto& [id, members] : out) std::sort(members.begin(), members.end());
    return out;
}

void AddressCluster::write_csv(std::ostream& out) const {
    std::vector<std::uint32_t> order(names_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return names_[a] < names_[b]; });
    out << "address,cluster_id\n";
    for (auto i : order) out << csv::escape(names_[i]) << ',' << csv::escape(names_[min_name_[root(i)]]) << '\n';
}

AddressCluster cluster(std::span<const TransactionRecord> records) {
    AddressCluster c;
    for (const auto& r : records) {
        for (const auto& in : r.inputs) c.add(in);
        for (const auto& out : r.outputs) c.add(out.address);
        for (std::size_t i = 1; i < r.inputs.size(); ++i) c.unite(r.inputs[0], r.inputs[i]);
    }
    c.seal();
    return c;
}

LabelExpansion expand_labels(const AddressCluster& clusters, const std::map<std::string, std::string>& labeled) {
    // cluster id -> labels present
    std::map<std::string, std::set<std::string>> cluster_labels;
    std::map<std::string, std::vector<std::string>> cluster_labeled_members;
    LabelExpansion result;
    for (const auto& [address, label] : labeled) {
        const auto id = clusters.cluster_of(address);
        if (!id) {
            result.labels[address] = label;
            continue;
        }
        cluster_labels[*id].insert(label);
        cluster_labeled_members[*id].push_back(address);
    }
    const auto members = clusters.clusters();
    for (const auto& [id, labels] : cluster_labels) {
        if (labels.size() == 1) {
            for (const auto& address : members.at(id)) result.labels[address] = *labels.begin();
            continue;
        }
        LabelConflict conflict{id, {labels.begin(), labels.end()}, cluster_labeled_members[id]};
        std::sort(conflict.addresses.begin(), conflict.addresses.end());
        for (const auto& address : conflict.addresses) result.labels[address] = labeled.at(address);
        result.conflicts.push_back(std::move(conflict));
    }
    return result;
}

std::map<std::string, std::string> read_label_csv(std::istream& in, const std::string& source) {
    std::map<std::string, std::string> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        try {
            fields = csv::split(line);
        } catch (const DataError& e) {
            throw DataError(source, line_no, e.what());
        }
        if (line_no == 1) {
            if (fields.size() != 2 || fields[0] != "address" || fields[1] != "label") {
                throw DataError(source, line_no, "expected header address,label");
            }
            continue;
        }
        if (fields.size() != 2) throw DataError(source, line_no, "expected 2 fields");
        if (fields[0].empty()) throw DataError(source, line_no, "address: empty");
        const auto [it, inserted] = labels.emplace(fields[0], fields[1]);
        if (!inserted && it->second != fields[1]) {
            throw DataError(source, line_no, "address " + fields[0] + " labeled twice with different labels");
        }
    }
    return labels;
}

std::map<std::string, std::string> read_label_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open label CSV: " + path);
    return read_label_csv(in, path);
}

}  // namespace chainlet
