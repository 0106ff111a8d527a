#include "chainlet/verify.hpp"

#include "chainlet/orbits.hpp"
#include "chainlet/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>

namespace chainlet {

namespace {

std::string name(const char* prefix, std::size_t i) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%s%02zu", prefix, i);
    return buf;
}

struct Shape {
    int m, s, n;  // s == 0 and n == 0 mark a dormant pattern
};

// Automorphism group sizes: 1, 1, 2, 2, 6, 6, 4, 4, 2, 2, 6.
constexpr Shape kShapes[] = {
    {1, 1, 1}, {2, 1, 1}, {1, 1, 2}, {2, 2, 1}, {1, 1, 3}, {3, 3, 1},
    {2, 2, 2}, {3, 1, 2}, {3, 2, 1}, {2, 0, 0}, {3, 0, 0},
};

struct PlanNode {
    NodeKind kind;
    std::string label;
    double key = 0;  // temporal position of transactions
};

}  // namespace

std::vector<TransactionRecord> random_small_stream(std::uint64_t seed, Day day, const SmallStreamLimits& limits) {
    Rng rng(seed);
    const auto txs = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(limits.max_transactions)));
    const auto room = limits.max_nodes > txs ? limits.max_nodes - txs : 1;
    const auto pool = static_cast<std::size_t>(
        rng.between(1, static_cast<std::int64_t>(std::min(room, 2 * txs + 2))));

    const std::int64_t start =
        static_cast<std::int64_t>(day.time_since_epoch().count()) * 86400 - kDefaultWindowOffsetMinutes * 60LL;
    // Few distinct timestamps so that ties broken by tx id are common.
    std::vector<std::int64_t> times(txs);
    for (auto& t : times) t = start + rng.between(0, static_cast<std::int64_t>(txs / 2 + 1));
    std::sort(times.begin(), times.end());
    std::vector<std::size_t> ids(txs);
    std::iota(ids.begin(), ids.end(), 0);
    rng.shuffle(ids);

    const std::vector<double> degree_weights{4, 3, 2, 1, 1};
    const std::span<const double> weights(degree_weights.data(), std::min(limits.max_degree, degree_weights.size()));
    std::vector<std::size_t> paid;  // addresses that received an output so far
    std::vector<TransactionRecord> records;
    for (std::size_t i = 0; i < txs; ++i) {
        TransactionRecord r;
        r.tx_id = name("x", ids[i]);
        r.timestamp = times[i];
        if (!rng.chance(0.12)) {
            const auto in_degree = rng.weighted(weights) + 1;
            for (std::size_t k = 0; k < in_degree; ++k) {
                const auto a = !paid.empty() && rng.chance(0.75) ? paid[rng.below(paid.size())] : rng.below(pool);
                r.inputs.push_back(name("a", a));
            }
        }
        const auto out_degree = rng.weighted(weights) + 1;
        for (std::size_t k = 0; k < out_degree; ++k) {
            const auto a = rng.below(pool);
            paid.push_back(a);
            r.outputs.push_back({name("a", a), static_cast<Amount>(rng.between(1, 1000))});
        }
        records.push_back(std::move(r));
    }
    return records;
}

TheoremCase random_theorem_case(std::uint64_t seed) {
    Rng rng(seed);
    const Shape shape = kShapes[seed % std::size(kShapes)];
    TheoremCase tc;
    const bool dormant = shape.s == 0;
    tc.pattern = dormant ? dormant_pattern(shape.m) : chainlet_pattern(shape.m, shape.s, shape.n);
    tc.shape = dormant ? "dormant-" + std::to_string(shape.m)
                       : std::to_string(shape.m) + "-" + std::to_string(shape.s) + "-" + std::to_string(shape.n);

    const std::size_t p = tc.pattern.size();
    const auto noise_txs = static_cast<std::size_t>(rng.between(0, 4));
    const auto noise_addrs = static_cast<std::size_t>(rng.between(0, 6));
    const auto max_copies = std::min<std::size_t>(4, (SmallGraph::kMaxNodes - noise_txs - noise_addrs) / p);
    const auto copies = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(max_copies)));

    std::vector<PlanNode> plan;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t c = 0; c < copies; ++c) {
        const std::size_t base = plan.size();
        double t1_key = 0;
        for (SmallGraph::NodeId u = 0; u < p; ++u) {
            PlanNode node{tc.pattern.kind(u), "c" + std::to_string(c) + "_" + tc.pattern.label(u), 0};
            if (node.kind == NodeKind::kTransaction) {
                // Pattern ranks: t1 = 0, t2 = 1.
                node.key = tc.pattern.rank(u) == 0 ? (t1_key = rng.unit() * 0.5) : t1_key + (1 - t1_key) * rng.unit();
            }
            plan.push_back(std::move(node));
        }
        for (SmallGraph::NodeId u = 0; u < p; ++u) {
            for (SmallGraph::NodeId v = 0; v < p; ++v) {
                if (tc.pattern.has_edge(u, v)) edges.emplace_back(base + u, base + v);
            }
        }
    }
    for (std::size_t i = 0; i < noise_txs; ++i) plan.push_back({NodeKind::kTransaction, name("nt", i), rng.unit()});
    for (std::size_t i = 0; i < noise_addrs; ++i) plan.push_back({NodeKind::kAddress, name("na", i), 0});

    std::vector<std::size_t> tx_nodes, addr_nodes;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        (plan[i].kind == NodeKind::kTransaction ? tx_nodes : addr_nodes).push_back(i);
    }
    const auto noise_edges = rng.between(0, 10);
    for (std::int64_t e = 0; e < noise_edges; ++e) {
        const auto a = addr_nodes[rng.below(addr_nodes.size())];
        const auto t = tx_nodes[rng.below(tx_nodes.size())];
        if (rng.chance(0.5)) {
            edges.emplace_back(a, t);
        } else {
            edges.emplace_back(t, a);
        }
    }

    // Ranks follow the keys; node ids are shuffled.
    std::vector<std::size_t> by_key = tx_nodes;
    std::stable_sort(by_key.begin(), by_key.end(),
                     [&](std::size_t a, std::size_t b) { return plan[a].key < plan[b].key; });
    std::vector<std::int64_t> rank(plan.size(), 0);
    for (std::size_t r = 0; r < by_key.size(); ++r) rank[by_key[r]] = static_cast<std::int64_t>(r);
    std::vector<std::size_t> order(plan.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::vector<SmallGraph::NodeId> id(plan.size());
    for (std::size_t i : order) {
        id[i] = plan[i].kind == NodeKind::kTransaction ? tc.host.add_transaction(plan[i].label, rank[i])
                                                       : tc.host.add_address(plan[i].label);
    }
    for (const auto& [u, v] : edges) tc.host.add_edge(id[u], id[v]);
    return tc;
}

VerificationReport run_verification(std::uint64_t first_seed, std::size_t count, unsigned workers) {
    const auto started = std::chrono::steady_clock::now();
    VerificationReport report;
    const Day day{std::chrono::days{18262}};
    for (std::uint64_t seed = first_seed; seed < first_seed + count; ++seed) {
        const auto snapshot = build_snapshot(random_small_stream(seed, day), day, kDefaultWindowOffsetMinutes);
        const auto extracted = to_oracle_counts(extract_orbits(snapshot, workers));
        const auto oracle = oracle_orbit_counts(SmallGraph::from_snapshot(snapshot));
        ++report.oracle_total;
        if (extracted == oracle) {
            ++report.oracle_passed;
        } else {
            report.failures.push_back("oracle seed " + std::to_string(seed) + ": extractor has " +
                                      std::to_string(extracted.size()) + " (address, orbit) entries, oracle " +
                                      std::to_string(oracle.size()));
        }

        const auto tc = random_theorem_case(seed);
        const auto r = verify_theorem1(tc.pattern, tc.host);
        ++report.theorem_total;
        report.automorphism_sizes.insert(r.automorphism_count);
        if (r.passed()) {
            ++report.theorem_passed;
        } else {
            report.failures.push_back("theorem seed " + std::to_string(seed) + " shape " + tc.shape + ": |E|=" +
                                      std::to_string(r.class_size) + " |Λ|=" + std::to_string(r.automorphism_count) +
                                      " |I|=" + std::to_string(r.isomorphism_count));
        }
    }
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

}  // namespace chainlet
