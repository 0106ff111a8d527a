#pragma once

// Brute-force reference for orbit extraction and for the orbit/stabilizer
// counting identities of chainlet classes. Exhaustive backtracking over
// graphs of at most 64 nodes; meant to be obviously correct, not fast.

#include "chainlet/graph.hpp"
#include "chainlet/orbits.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace chainlet {

enum class NodeKind : std::uint8_t { kAddress, kTransaction };

/// Typed directed graph with adjacency bit masks.
///
/// Edges join an address and a transaction (either direction). Transaction
/// nodes carry a rank giving their temporal order. Address nodes carry a
/// group tag used by positional matching.
class SmallGraph {
public:
    using NodeId = std::uint8_t;
    static constexpr std::size_t kMaxNodes = 64;

    NodeId add_address(std::string label, int group = 0);
    NodeId add_transaction(std::string label, std::int64_t rank);
    /// Throws InvariantViolation for same-kind endpoints.
    void add_edge(NodeId from, NodeId to);

    std::size_t size() const { return kinds_.size(); }
    NodeKind kind(NodeId u) const { return kinds_[u]; }
    const std::string& label(NodeId u) const { return labels_[u]; }
    std::int64_t rank(NodeId u) const { return ranks_[u]; }
    int group(NodeId u) const { return groups_[u]; }
    bool has_edge(NodeId from, NodeId to) const { return (out_[from] >> to) & 1U; }
    std::uint64_t out_mask(NodeId u) const { return out_[u]; }
    std::uint64_t in_mask(NodeId u) const { return in_[u]; }
    std::uint64_t kind_mask(NodeKind k) const;
    std::size_t edge_count() const;

    /// Copy with node u renamed to perm[u].
    SmallGraph relabeled(std::span<const NodeId> perm) const;

    /// Throws SizeLimitError when the snapshot needs more than kMaxNodes.
    static SmallGraph from_snapshot(const DailySnapshot& snapshot);

private:
    NodeId add_node(NodeKind kind, std::string label, std::int64_t rank, int group);

    std::vector<NodeKind> kinds_;
    std::vector<std::string> labels_;
    std::vector<std::int64_t> ranks_;
    std::vector<int> groups_;
    std::vector<std::uint64_t> out_;
    std::vector<std::uint64_t> in_;
};

/// Pattern-node -> host-node map, indexed by pattern node.
using Embedding = std::vector<SmallGraph::NodeId>;

enum class EmbeddingMode {
    kInjective,   // ordinary subgraph monomorphism
    kPositional,  // address nodes of different groups may share an image
};

struct MatchOptions {
    EmbeddingMode mode = EmbeddingMode::kInjective;
    /// Called after each pattern node is placed; false abandons the branch.
    /// Entries of nodes not yet placed are kUnmapped.
    std::function<bool(const Embedding& partial, SmallGraph::NodeId placed)> feasible;
};

inline constexpr SmallGraph::NodeId kUnmapped = 0xFF;

/// All embeddings of `pattern` into `host` that preserve node kinds, edges
/// and transaction rank order. Transaction nodes are placed first.
std::vector<Embedding> find_occurrences(const SmallGraph& pattern, const SmallGraph& host,
                                        const MatchOptions& options = {});

/// Canonical 2-chainlet with `spent` of its `first_outputs` spent by t2.
/// Node layout: 0 = t1, 1 = t2, then t1 outputs (spenders first, group 1),
/// then t2 outputs (group 2).
SmallGraph chainlet_pattern(int first_outputs, int spent, int second_outputs);
/// Lone transaction with `outputs` output addresses. 0 = t1.
SmallGraph dormant_pattern(int outputs);

struct ChainletClassReport {
    std::size_t class_size = 0;          // |E(C)|: distinct occurrences in the host
    std::size_t automorphism_count = 0;  // |Λ(C)|
    std::size_t isomorphism_count = 0;   // |I(C)|, pairs of occurrences incl. self
    std::vector<std::size_t> orbit_sizes;       // |O_u| per pattern node
    std::vector<std::size_t> stabilizer_sizes;  // |S(u)| per pattern node
    bool isomorphism_identity = false;   // |I| = |E|^2 |Λ|
    bool orbit_identity = false;         // |O_u| |S(u)| = |E| |Λ| for every u

    bool passed() const { return isomorphism_identity && orbit_identity; }
};

/// Counts every quantity by enumeration. Isomorphisms between occurrences
/// are found by a separate permutation search, not by reusing embeddings.
/// An orbit element is a (target occurrence, node) pair.
ChainletClassReport verify_theorem1(const SmallGraph& pattern, const SmallGraph& host);

using OracleCounts = std::map<std::pair<AddressId, OrbitId>, std::uint32_t>;

/// Orbit counts of every address in `host`, read off embeddings of the 18
/// canonical 2-chainlet patterns and the 3 dormant patterns.
OracleCounts oracle_orbit_counts(const SmallGraph& host);

/// Same shape from extractor output, for comparison.
OracleCounts to_oracle_counts(std::span<const OrbitVector> vectors);

}  // namespace chainlet
