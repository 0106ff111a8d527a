#include "chainlet/iso_oracle.hpp"

#include "chainlet/errors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <set>
#include <tuple>

namespace chainlet {

using NodeId = SmallGraph::NodeId;

// ---------------------------------------------------------------------------
// SmallGraph

SmallGraph::NodeId SmallGraph::add_node(NodeKind kind, std::string label, std::int64_t rank, int group) {
    if (kinds_.size() >= kMaxNodes) {
        throw SizeLimitError("small graph is limited to " + std::to_string(kMaxNodes) + " nodes");
    }
    kinds_.push_back(kind);
    labels_.push_back(std::move(label));
    ranks_.push_back(rank);
    groups_.push_back(group);
    out_.push_back(0);
    in_.push_back(0);
    return static_cast<NodeId>(kinds_.size() - 1);
}

SmallGraph::NodeId SmallGraph::add_address(std::string label, int group) {
    return add_node(NodeKind::kAddress, std::move(label), 0, group);
}

SmallGraph::NodeId SmallGraph::add_transaction(std::string label, std::int64_t rank) {
    return add_node(NodeKind::kTransaction, std::move(label), rank, 0);
}

void SmallGraph::add_edge(NodeId from, NodeId to) {
    if (from >= size() || to >= size()) throw InvariantViolation("edge endpoint out of range");
    if (kinds_[from] == kinds_[to]) throw InvariantViolation("edges must join an address and a transaction");
    out_[from] |= std::uint64_t{1} << to;
    in_[to] |= std::uint64_t{1} << from;
}

std::uint64_t SmallGraph::kind_mask(NodeKind k) const {
    std::uint64_t m = 0;
    for (std::size_t u = 0; u < size(); ++u) {
        if (kinds_[u] == k) m |= std::uint64_t{1} << u;
    }
    return m;
}

std::size_t SmallGraph::edge_count() const {
    std::size_t n = 0;
    for (auto m : out_) n += static_cast<std::size_t>(std::popcount(m));
    return n;
}

SmallGraph SmallGraph::relabeled(std::span<const NodeId> perm) const {
    if (perm.size() != size()) throw InvariantViolation("permutation size mismatch");
    std::vector<NodeId> inverse(size());
    for (NodeId u = 0; u < size(); ++u) inverse[perm[u]] = u;
    SmallGraph g;
    for (NodeId v = 0; v < size(); ++v) {
        const NodeId u = inverse[v];
        g.add_node(kinds_[u], labels_[u], ranks_[u], groups_[u]);
    }
    for (NodeId u = 0; u < size(); ++u) {
        for (NodeId w = 0; w < size(); ++w) {
            if (has_edge(u, w)) g.add_edge(perm[u], perm[w]);
        }
    }
    return g;
}

SmallGraph SmallGraph::from_snapshot(const DailySnapshot& snapshot) {
    const auto nodes = snapshot.transaction_count() + snapshot.address_count();
    if (nodes > kMaxNodes) {
        throw SizeLimitError("snapshot has " + std::to_string(nodes) + " nodes; oracle limit is " +
                             std::to_string(kMaxNodes));
    }
    SmallGraph g;
    for (TxIndex t = 0; t < snapshot.transaction_count(); ++t) {
        g.add_transaction(snapshot.record(t).tx_id, t);
    }
    const auto tx_count = static_cast<NodeId>(snapshot.transaction_count());
    for (AddressIndex a = 0; a < snapshot.address_count(); ++a) g.add_address(snapshot.address(a));
    for (TxIndex t = 0; t < snapshot.transaction_count(); ++t) {
        for (AddressIndex a : snapshot.inputs_of(t)) g.add_edge(static_cast<NodeId>(tx_count + a), static_cast<NodeId>(t));
        for (AddressIndex a : snapshot.outputs_of(t)) g.add_edge(static_cast<NodeId>(t), static_cast<NodeId>(tx_count + a));
    }
    return g;
}

// ---------------------------------------------------------------------------
// Embedding search

namespace {

class Matcher {
public:
    Matcher(const SmallGraph& pattern, const SmallGraph& host, const MatchOptions& options)
        : pattern_(pattern), host_(host), options_(options), emb_(pattern.size(), kUnmapped) {
        for (NodeId u = 0; u < pattern.size(); ++u) {
            if (pattern.kind(u) == NodeKind::kTransaction) order_.push_back(u);
        }
        for (NodeId u = 0; u < pattern.size(); ++u) {
            if (pattern.kind(u) == NodeKind::kAddress) order_.push_back(u);
        }
    }

    std::vector<Embedding> run() {
        // Positional embeddings may fold address nodes together, so only the
        // injective mode can reject on node count.
        if (options_.mode == EmbeddingMode::kPositional || pattern_.size() <= host_.size()) place(0);
        return std::move(results_);
    }

private:
    bool may_share(NodeId u, NodeId v) const {
        return options_.mode == EmbeddingMode::kPositional && pattern_.kind(u) == NodeKind::kAddress &&
               pattern_.kind(v) == NodeKind::kAddress && pattern_.group(u) != pattern_.group(v);
    }

    void place(std::size_t k) {
        if (k == order_.size()) {
            results_.push_back(emb_);
            return;
        }
        const NodeId u = order_[k];
        std::uint64_t cand = host_.kind_mask(pattern_.kind(u));
        for (std::size_t i = 0; i < k; ++i) {
            const NodeId v = order_[i];
            const NodeId hv = emb_[v];
            if (pattern_.has_edge(u, v)) cand &= host_.in_mask(hv);
            if (pattern_.has_edge(v, u)) cand &= host_.out_mask(hv);
            if (!may_share(u, v)) cand &= ~(std::uint64_t{1} << hv);
        }
        const int need_out = std::popcount(pattern_.out_mask(u));
        const int need_in = std::popcount(pattern_.in_mask(u));
        while (cand) {
            const auto h = static_cast<NodeId>(std::countr_zero(cand));
            cand &= cand - 1;
            if (std::popcount(host_.out_mask(h)) < need_out || std::popcount(host_.in_mask(h)) < need_in) continue;
            if (!rank_order_ok(u, h, k)) continue;
            emb_[u] = h;
            if (!options_.feasible || options_.feasible(emb_, u)) place(k + 1);
            emb_[u] = kUnmapped;
        }
    }

    bool rank_order_ok(NodeId u, NodeId h, std::size_t k) const {
        if (pattern_.kind(u) != NodeKind::kTransaction) return true;
        for (std::size_t i = 0; i < k; ++i) {
            const NodeId v = order_[i];
            if (pattern_.kind(v) != NodeKind::kTransaction) continue;
            const auto pr = pattern_.rank(u) <=> pattern_.rank(v);
            const auto hr = host_.rank(h) <=> host_.rank(emb_[v]);
            if (pr != hr) return false;
        }
        return true;
    }

    const SmallGraph& pattern_;
    const SmallGraph& host_;
    const MatchOptions& options_;
    Embedding emb_;
    std::vector<NodeId> order_;
    std::vector<Embedding> results_;
};

}  // namespace

std::vector<Embedding> find_occurrences(const SmallGraph& pattern, const SmallGraph& host, const MatchOptions& options) {
    if (host.size() > SmallGraph::kMaxNodes || pattern.size() > SmallGraph::kMaxNodes) {
        throw SizeLimitError("graph exceeds oracle node limit");
    }
    return Matcher(pattern, host, options).run();
}

SmallGraph chainlet_pattern(int first_outputs, int spent, int second_outputs) {
    if (first_outputs < 1 || spent < 1 || spent > first_outputs || second_outputs < 1) {
        throw InvariantViolation("invalid chainlet pattern shape");
    }
    SmallGraph g;
    const NodeId t1 = g.add_transaction("t1", 0);
    const NodeId t2 = g.add_transaction("t2", 1);
    for (int i = 0; i < first_outputs; ++i) {
        const NodeId a = g.add_address("o" + std::to_string(i), 1);
        g.add_edge(t1, a);
        if (i < spent) g.add_edge(a, t2);
    }
    for (int j = 0; j < second_outputs; ++j) {
        const NodeId a = g.add_address("p" + std::to_string(j), 2);
        g.add_edge(t2, a);
    }
    return g;
}

SmallGraph dormant_pattern(int outputs) {
    if (outputs < 1) throw InvariantViolation("invalid dormant pattern shape");
    SmallGraph g;
    const NodeId t1 = g.add_transaction("t1", 0);
    for (int i = 0; i < outputs; ++i) g.add_edge(t1, g.add_address("o" + std::to_string(i), 1));
    return g;
}

// ---------------------------------------------------------------------------
// Theorem check

namespace {

struct Occurrence {
    std::vector<NodeId> nodes;                     // ascending
    std::vector<std::pair<NodeId, NodeId>> edges;  // ascending

    auto operator<=>(const Occurrence&) const = default;
};

Occurrence image_of(const SmallGraph& pattern, const Embedding& emb) {
    Occurrence occ;
    occ.nodes.assign(emb.begin(), emb.end());
    std::sort(occ.nodes.begin(), occ.nodes.end());
    for (NodeId u = 0; u < pattern.size(); ++u) {
        for (NodeId v = 0; v < pattern.size(); ++v) {
            if (pattern.has_edge(u, v)) occ.edges.emplace_back(emb[u], emb[v]);
        }
    }
    std::sort(occ.edges.begin(), occ.edges.end());
    return occ;
}

// Plain permutation search for bijections a.nodes -> b.nodes that preserve
// kind, transaction order, and map the edge set of `a` onto that of `b`.
class IsomorphismCounter {
public:
    IsomorphismCounter(const SmallGraph& host, const Occurrence& a, const Occurrence& b)
        : host_(host), a_(a), b_(b), image_(a.nodes.size()), used_(b.nodes.size(), false) {}

    template <typename Visit>
    void run(Visit&& visit) {
        if (a_.nodes.size() != b_.nodes.size() || a_.edges.size() != b_.edges.size()) return;
        extend(0, visit);
    }

private:
    bool in_a(NodeId x, NodeId y) const {
        return std::binary_search(a_.edges.begin(), a_.edges.end(), std::make_pair(x, y));
    }
    bool in_b(NodeId x, NodeId y) const {
        return std::binary_search(b_.edges.begin(), b_.edges.end(), std::make_pair(x, y));
    }

    template <typename Visit>
    void extend(std::size_t i, Visit& visit) {
        if (i == a_.nodes.size()) {
            visit(image_);
            return;
        }
        const NodeId x = a_.nodes[i];
        for (std::size_t j = 0; j < b_.nodes.size(); ++j) {
            if (used_[j]) continue;
            const NodeId y = b_.nodes[j];
            if (host_.kind(x) != host_.kind(y)) continue;
            bool ok = true;
            for (std::size_t k = 0; k < i && ok; ++k) {
                const NodeId xk = a_.nodes[k];
                const NodeId yk = image_[k];
                ok = in_a(x, xk) == in_b(y, yk) && in_a(xk, x) == in_b(yk, y);
                if (ok && host_.kind(x) == NodeKind::kTransaction && host_.kind(xk) == NodeKind::kTransaction) {
                    ok = (host_.rank(x) <=> host_.rank(xk)) == (host_.rank(y) <=> host_.rank(yk));
                }
            }
            if (!ok) continue;
            used_[j] = true;
            image_[i] = y;
            extend(i + 1, visit);
            used_[j] = false;
        }
    }

    const SmallGraph& host_;
    const Occurrence& a_;
    const Occurrence& b_;
    std::vector<NodeId> image_;  // image_[i] is the image of a.nodes[i]
    std::vector<bool> used_;
};

}  // namespace

ChainletClassReport verify_theorem1(const SmallGraph& pattern, const SmallGraph& host) {
    ChainletClassReport report;

    const auto automorphisms = find_occurrences(pattern, pattern);
    report.automorphism_count = automorphisms.size();
    report.stabilizer_sizes.assign(pattern.size(), 0);
    for (const auto& phi : automorphisms) {
        for (NodeId u = 0; u < pattern.size(); ++u) {
            if (pattern.kind(u) == NodeKind::kTransaction && phi[u] != u) {
                throw InvariantViolation("automorphism moves a transaction node");
            }
            if (phi[u] == u) ++report.stabilizer_sizes[u];
        }
    }

    // Distinct occurrences, each with the first embedding that produced it.
    std::map<Occurrence, Embedding> occurrences;
    for (const auto& emb : find_occurrences(pattern, host)) occurrences.try_emplace(image_of(pattern, emb), emb);
    report.class_size = occurrences.size();

    std::vector<const Occurrence*> occ_list;
    for (const auto& [occ, emb] : occurrences) occ_list.push_back(&occ);

    report.orbit_sizes.assign(pattern.size(), 0);
    if (!occ_list.empty()) {
        const Occurrence& first = *occ_list.front();
        const Embedding& first_emb = occurrences.begin()->second;
        // Position of each pattern node's image within first.nodes.
        std::vector<std::size_t> slot(pattern.size());
        for (NodeId u = 0; u < pattern.size(); ++u) {
            slot[u] = static_cast<std::size_t>(
                std::lower_bound(first.nodes.begin(), first.nodes.end(), first_emb[u]) - first.nodes.begin());
        }
        std::vector<std::set<std::pair<std::size_t, NodeId>>> orbits(pattern.size());

        for (std::size_t i = 0; i < occ_list.size(); ++i) {
            for (std::size_t j = 0; j < occ_list.size(); ++j) {
                IsomorphismCounter counter(host, *occ_list[i], *occ_list[j]);
                counter.run([&](const std::vector<NodeId>& image) {
                    ++report.isomorphism_count;
                    if (i != 0) return;
                    for (NodeId u = 0; u < pattern.size(); ++u) orbits[u].emplace(j, image[slot[u]]);
                });
            }
        }
        for (NodeId u = 0; u < pattern.size(); ++u) report.orbit_sizes[u] = orbits[u].size();
    }

    const auto m = report.class_size;
    const auto aut = report.automorphism_count;
    report.isomorphism_identity = report.isomorphism_count == m * m * aut;
    report.orbit_identity = true;
    for (NodeId u = 0; u < pattern.size(); ++u) {
        if (report.orbit_sizes[u] * report.stabilizer_sizes[u] != m * aut) report.orbit_identity = false;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Orbit counts by pattern matching

namespace {

std::uint64_t bit(NodeId u) { return std::uint64_t{1} << u; }

// Spend state of a host transaction pair, classified into the X-M-N grid.
struct HostClass {
    int m, s, n;
};

HostClass classify_pair(const SmallGraph& host, NodeId t1, NodeId t2) {
    const int out1 = std::popcount(host.out_mask(t1));
    const int shared = std::popcount(host.out_mask(t1) & host.in_mask(t2));
    const int out2 = std::popcount(host.out_mask(t2));
    HostClass c{std::min(out1, 3), std::min(shared, 3), std::min(out2, 3)};
    if (shared < out1 && c.s == c.m) c.s = c.m - 1;
    return c;
}

bool has_later_spender(const SmallGraph& host, NodeId t1) {
    std::uint64_t outs = host.out_mask(t1);
    while (outs) {
        const auto a = static_cast<NodeId>(std::countr_zero(outs));
        outs &= outs - 1;
        std::uint64_t spenders = host.out_mask(a);
        while (spenders) {
            const auto t = static_cast<NodeId>(std::countr_zero(spenders));
            spenders &= spenders - 1;
            if (host.rank(t) > host.rank(t1)) return true;
        }
    }
    return false;
}

}  // namespace

OracleCounts oracle_orbit_counts(const SmallGraph& host) {
    // (t1, t2 or -1, address node, orbit): one incidence per role.
    std::set<std::tuple<NodeId, int, NodeId, OrbitId>> incidences;
    OrbitId next = 0;

    for (int m = 1; m <= 3; ++m) {
        const OrbitId orbit = next++;
        const auto pattern = dormant_pattern(m);
        MatchOptions opts;
        opts.mode = EmbeddingMode::kPositional;
        opts.feasible = [&](const Embedding& emb, NodeId placed) {
            if (placed != 0) return true;
            const NodeId t1 = emb[0];
            return std::min(std::popcount(host.out_mask(t1)), 3) == m && !has_later_spender(host, t1);
        };
        for (const auto& emb : find_occurrences(pattern, host, opts)) {
            for (NodeId u = 1; u < pattern.size(); ++u) incidences.emplace(emb[0], -1, emb[u], orbit);
        }
    }

    for (int m = 1; m <= 3; ++m) {
        for (int s = 1; s <= m; ++s) {
            for (int n = 1; n <= 3; ++n) {
                const OrbitId spender = next++;
                const int sibling = s < m ? next++ : -1;
                const OrbitId output = next++;

                const auto pattern = chainlet_pattern(m, s, n);
                // Node layout from chainlet_pattern: 0 t1, 1 t2, 2.. outputs.
                const NodeId first_sibling = static_cast<NodeId>(2 + s);
                const NodeId first_output = static_cast<NodeId>(2 + m);
                MatchOptions opts;
                opts.mode = EmbeddingMode::kPositional;
                opts.feasible = [&](const Embedding& emb, NodeId placed) {
                    if (placed == 1) {
                        const auto c = classify_pair(host, emb[0], emb[1]);
                        return c.m == m && c.s == s && c.n == n;
                    }
                    if (placed >= first_sibling && placed < first_output) {
                        return (host.in_mask(emb[1]) & bit(emb[placed])) == 0;
                    }
                    return true;
                };
                for (const auto& emb : find_occurrences(pattern, host, opts)) {
                    const int t2 = emb[1];
                    for (NodeId u = 2; u < first_sibling; ++u) incidences.emplace(emb[0], t2, emb[u], spender);
                    for (NodeId u = first_sibling; u < first_output; ++u) {
                        incidences.emplace(emb[0], t2, emb[u], static_cast<OrbitId>(sibling));
                    }
                    for (NodeId u = first_output; u < pattern.size(); ++u) incidences.emplace(emb[0], t2, emb[u], output);
                }
            }
        }
    }
    if (next != kOrbitCount) throw InvariantViolation("pattern catalog does not cover 48 orbits");

    OracleCounts counts;
    for (const auto& [t1, t2, address, orbit] : incidences) ++counts[{host.label(address), orbit}];
    return counts;
}

OracleCounts to_oracle_counts(std::span<const OrbitVector> vectors) {
    OracleCounts counts;
    for (const auto& v : vectors) {
        for (OrbitId o = 0; o < kOrbitCount; ++o) {
            if (v.counts[o] != 0) counts[{v.address, o}] += v.counts[o];
        }
    }
    return counts;
}

}  // namespace chainlet
