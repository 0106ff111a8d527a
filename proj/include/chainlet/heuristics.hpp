#pragma once

// Address clustering with the co-spending heuristic: all inputs of one
// transaction belong to one owner. Transition (shared inputs across
// transactions) follows from union-find transitivity. The change-address
// heuristic is not applied; its results are not definitive.

#include "chainlet/graph.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace chainlet {

/// Union-find partition over addresses. The cluster id is the smallest
/// address string in the cluster, so it does not depend on union order.
class AddressCluster {
public:
    /// Registers a singleton if unseen.
    void add(std::string_view address);
    /// Returns true when two different clusters were merged.
    bool unite(std::string_view a, std::string_view b);

    /// Flattens every path. Const queries never write, so a sealed cluster
    /// can be read from several threads.
    void seal();

    /// Empty for unknown addresses.
    std::optional<std::string> cluster_of(std::string_view address) const;
    bool same_cluster(std::string_view a, std::string_view b) const;

    std::size_t address_count() const { return names_.size(); }
    std::size_t cluster_count() const { return clusters_; }
    std::size_t merge_count() const { return merges_; }

    /// cluster id -> members, members ascending.
    std::map<std::string, std::vector<std::string>> clusters() const;

    /// CSV `address,cluster_id` sorted by address.
    void write_csv(std::ostream& out) const;

private:
    std::uint32_t index_of(std::string_view address);
    std::uint32_t find(std::uint32_t x);        // compresses the path
    std::uint32_t root(std::uint32_t x) const;  // read-only walk

    std::vector<std::string> names_;
    std::unordered_map<std::string, std::uint32_t> index_;
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> size_;
    std::vector<std::uint32_t> min_name_;  // root -> index of smallest name
    std::size_t clusters_ = 0;
    std::size_t merges_ = 0;
};

/// Co-spending over a whole record stream (not day-scoped). Every input and
/// output address is registered; inputs of each transaction are united.
AddressCluster cluster(std::span<const TransactionRecord> records);

struct LabelConflict {
    std::string cluster_id;
    std::vector<std::string> labels;     // distinct, ascending
    std::vector<std::string> addresses;  // labeled members, ascending
};

struct LabelExpansion {
    std::map<std::string, std::string> labels;  // address -> label
    std::vector<LabelConflict> conflicts;
};

/// Spreads each cluster's label to all its members. Clusters whose members
/// carry different labels are reported as conflicts and left as given.
/// Labeled addresses unknown to the cluster keep their label.
LabelExpansion expand_labels(const AddressCluster& clusters, const std::map<std::string, std::string>& labeled);

/// CSV `address,label` (header required). Throws DataError with line context.
std::map<std::string, std::string> read_label_csv(std::istream& in, const std::string& source);
std::map<std::string, std::string> read_label_csv_file(const std::string& path);

}  // namespace chainlet
