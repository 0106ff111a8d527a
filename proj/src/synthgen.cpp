#include "chainlet/synthgen.hpp"

#include "chainlet/csv.hpp"
#include "chainlet/rng.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string_view>

namespace chainlet {

namespace {

struct Utxo {
    std::string address;
    Amount value = 0;
};

enum class ActionKind : std::uint8_t { kBackground, kRsPay, kRsForward, kDmPay };

struct Action {
    double when = 0;  // fraction of the day in [0, 1)
    ActionKind kind = ActionKind::kBackground;
    std::size_t cohort = 0;  // index of the planted address
};

void check_weights(const std::vector<double>& w, const char* name) {
    if (w.empty()) throw std::invalid_argument(std::string(name) + ": at least one weight required");
    double total = 0;
    for (double x : w) {
        if (!(x >= 0)) throw std::invalid_argument(std::string(name) + ": weights must be non-negative");
        total += x;
    }
    if (total <= 0) throw std::invalid_argument(std::string(name) + ": weights sum to zero");
}

class Generator {
public:
    explicit Generator(const GenConfig& config) : cfg_(config), rng_(config.seed) {}

    GenOutput run() {
        rs_addresses_.resize(cfg_.rs_forwarders);
        rs_received_.resize(cfg_.rs_forwarders);
        for (auto& a : rs_addresses_) a = fresh_address("RS");
        dm_addresses_.resize(cfg_.dm_holders);
        for (auto& a : dm_addresses_) a = fresh_address("DM");
        for (std::size_t d = 0; d < cfg_.days; ++d) run_day(d);
        return std::move(out_);
    }

private:
    std::string fresh_address(const char* label) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "addr%08zx", address_counter_++);
        out_.labels.emplace(buf, label);
        // Planted addresses stay out of reuse so their signatures stay clean.
        if (std::string_view(label) == "White") used_addresses_.emplace_back(buf);
        return buf;
    }

    std::string output_address() {
        if (!used_addresses_.empty() && rng_.chance(cfg_.address_reuse)) {
            return used_addresses_[rng_.below(used_addresses_.size())];
        }
        return fresh_address("White");
    }

    Amount draw_payment() {
        return static_cast<Amount>(rng_.between(static_cast<std::int64_t>(cfg_.min_payment),
                                                static_cast<std::int64_t>(cfg_.max_payment)));
    }

    Amount draw_fee(Amount available) {
        const auto fee = static_cast<Amount>(rng_.between(0, static_cast<std::int64_t>(cfg_.max_fee)));
        return std::min(fee, available);
    }

    Utxo take(std::vector<Utxo>& pool) {
        const auto i = rng_.below(pool.size());
        std::swap(pool[i], pool.back());
        Utxo u = std::move(pool.back());
        pool.pop_back();
        return u;
    }

    // Draws up to `count` inputs from today's and older pools.
    std::vector<Utxo> take_inputs(std::size_t count) {
        std::vector<Utxo> inputs;
        for (std::size_t i = 0; i < count; ++i) {
            const bool today = !today_pool_.empty() && (old_pool_.empty() || rng_.chance(cfg_.same_day_spend));
            if (today) {
                inputs.push_back(take(today_pool_));
            } else if (!old_pool_.empty()) {
                inputs.push_back(take(old_pool_));
            } else {
                break;
            }
        }
        return inputs;
    }

    // Splits `total` over `n` parts, each part at least 0.
    std::vector<Amount> split(Amount total, std::size_t n) {
        std::vector<Amount> cuts;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            cuts.push_back(static_cast<Amount>(rng_.between(0, static_cast<std::int64_t>(total))));
        }
        std::sort(cuts.begin(), cuts.end());
        std::vector<Amount> parts;
        Amount prev = 0;
        for (Amount c : cuts) {
            parts.push_back(c - prev);
            prev = c;
        }
        parts.push_back(total - prev);
        return parts;
    }

    TransactionRecord start_tx(std::int64_t timestamp, const std::vector<Utxo>& inputs) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "tx%010zu", tx_counter_++);
        TransactionRecord r;
        r.tx_id = buf;
        r.timestamp = timestamp;
        std::vector<Amount> values;
        for (const auto& u : inputs) {
            r.inputs.push_back(u.address);
            values.push_back(u.value);
        }
        r.input_values = std::move(values);
        return r;
    }

    static Amount total(const std::vector<Utxo>& inputs) {
        Amount t = 0;
        for (const auto& u : inputs) t += u.value;
        return t;
    }

    void background(std::int64_t ts) {
        const auto in_degree = rng_.weighted(cfg_.input_degree_weights) + 1;
        const auto out_degree = rng_.weighted(cfg_.output_degree_weights) + 1;
        const auto inputs = take_inputs(in_degree);
        auto r = start_tx(ts, inputs);
        Amount available = inputs.empty() ? draw_payment() : total(inputs);
        if (!inputs.empty()) available -= draw_fee(available);
        const auto parts = split(available, out_degree);
        for (Amount v : parts) {
            auto addr = output_address();
            r.outputs.push_back({addr, v});
            today_pool_.push_back({std::move(addr), v});
        }
        out_.records.push_back(std::move(r));
    }

    // Payment from background funds to `payee`; change is held until the
    // next day so the payment's only same-day spender is the payee's own.
    void pay(std::int64_t ts, const std::string& payee, Amount& received, std::size_t extra_outputs) {
        const auto inputs = take_inputs(1);
        auto r = start_tx(ts, inputs);
        Amount available = inputs.empty() ? draw_payment() : total(inputs);
        if (!inputs.empty()) available -= draw_fee(available);
        const auto parts = split(available, extra_outputs + 1);
        received = parts[0];
        r.outputs.push_back({payee, parts[0]});
        for (std::size_t i = 1; i < parts.size(); ++i) {
            auto addr = fresh_address("White");
            r.outputs.push_back({addr, parts[i]});
            next_day_pool_.push_back({std::move(addr), parts[i]});
        }
        out_.records.push_back(std::move(r));
    }

    void forward(std::int64_t ts, std::size_t i) {
        const std::vector<Utxo> inputs{{rs_addresses_[i], rs_received_[i]}};
        auto r = start_tx(ts, inputs);
        const Amount available = rs_received_[i] - draw_fee(rs_received_[i]);
        const std::size_t outs = rng_.chance(0.5) ? 1 : 2;
        for (Amount v : split(available, outs)) {
            auto addr = fresh_address("White");
            r.outputs.push_back({addr, v});
            today_pool_.push_back({std::move(addr), v});
        }
        out_.records.push_back(std::move(r));
    }

    void run_day(std::size_t d) {
        std::vector<Action> actions;
        actions.reserve(cfg_.background_tx_per_day + 2 * cfg_.rs_forwarders + cfg_.dm_holders);
        for (std::size_t i = 0; i < cfg_.background_tx_per_day; ++i) {
            actions.push_back({rng_.unit(), ActionKind::kBackground, 0});
        }
        for (std::size_t i = d; i < cfg_.rs_forwarders; i += cfg_.days) {
            const double paid = rng_.unit() * 0.9;
            actions.push_back({paid, ActionKind::kRsPay, i});
            actions.push_back({paid + (1.0 - paid) * rng_.unit(), ActionKind::kRsForward, i});
        }
        for (std::size_t i = d; i < cfg_.dm_holders; i += cfg_.days) {
            actions.push_back({rng_.unit(), ActionKind::kDmPay, i});
        }
        // Stable: a forward drawn at the same instant as its payment stays after it.
        std::stable_sort(actions.begin(), actions.end(), [](const Action& a, const Action& b) { return a.when < b.when; });

        const Day day = cfg_.start_day + std::chrono::days{d};
        const std::int64_t window_start =
            static_cast<std::int64_t>(day.time_since_epoch().count()) * 86400 - cfg_.window_offset_minutes * 60LL;
        for (const auto& a : actions) {
            const auto ts = window_start + std::min<std::int64_t>(static_cast<std::int64_t>(a.when * 86400), 86399);
            switch (a.kind) {
                case ActionKind::kBackground: background(ts); break;
                case ActionKind::kRsPay: pay(ts, rs_addresses_[a.cohort], rs_received_[a.cohort], 1); break;
                case ActionKind::kRsForward: forward(ts, a.cohort); break;
                case ActionKind::kDmPay: {
                    Amount received = 0;
                    pay(ts, dm_addresses_[a.cohort], received, rng_.below(3));
                    next_day_pool_.push_back({dm_addresses_[a.cohort], received});
                    break;
                }
            }
        }
        for (auto* pool : {&today_pool_, &next_day_pool_}) {
            old_pool_.insert(old_pool_.end(), std::make_move_iterator(pool->begin()), std::make_move_iterator(pool->end()));
            pool->clear();
        }
    }

    const GenConfig& cfg_;
    Rng rng_;
    GenOutput out_;
    std::size_t address_counter_ = 0;
    std::size_t tx_counter_ = 0;
    std::vector<std::string> used_addresses_;
    std::vector<Utxo> old_pool_;
    std::vector<Utxo> today_pool_;
    std::vector<Utxo> next_day_pool_;
    std::vector<std::string> rs_addresses_;
    std::vector<Amount> rs_received_;
    std::vector<std::string> dm_addresses_;
};

}  // namespace

GenOutput generate(const GenConfig& config) {
    if (config.days == 0) throw std::invalid_argument("days must be at least 1");
    if ((config.rs_forwarders > 0 || config.dm_holders > 0) && config.background_tx_per_day == 0) {
        throw std::invalid_argument("planted cohorts need background transactions to fund their payments");
    }
    check_weights(config.input_degree_weights, "input_degree_weights");
    check_weights(config.output_degree_weights, "output_degree_weights");
    if (config.min_payment > config.max_payment) throw std::invalid_argument("min_payment exceeds max_payment");
    if (config.max_payment > (Amount{1} << 53)) throw std::invalid_argument("max_payment too large");
    if (!(config.same_day_spend >= 0 && config.same_day_spend <= 1) ||
        !(config.address_reuse >= 0 && config.address_reuse <= 1)) {
        throw std::invalid_argument("probabilities must lie in [0, 1]");
    }
    return Generator(config).run();
}

void write_labels(std::ostream& out, const std::map<std::string, std::string>& labels) {
    out << "address,label\n";
    for (const auto& [address, label] : labels) out << csv::escape(address) << ',' << csv::escape(label) << '\n';
}

}  // namespace chainlet
