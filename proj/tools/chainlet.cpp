// chainlet: command-line front end for orbit extraction and its checks.
//
// Exit status: 0 success, 1 data error, 2 usage error.
// CHAINLET_LOG=quiet|info|debug controls stderr logging (default info).

#include "chainlet/chainlets.hpp"
#include "chainlet/errors.hpp"
#include "chainlet/features.hpp"
#include "chainlet/heuristics.hpp"
#include "chainlet/ingest.hpp"
#include "chainlet/orbits.hpp"
#include "chainlet/patterns.hpp"
#include "chainlet/synthgen.hpp"
#include "chainlet/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

using namespace chainlet;

namespace {

enum class LogLevel { kQuiet, kInfo, kDebug };

LogLevel log_level() {
    const char* env = std::getenv("CHAINLET_LOG");
    if (!env) return LogLevel::kInfo;
    const std::string v = env;
    if (v == "quiet" || v == "0" || v == "off") return LogLevel::kQuiet;
    if (v == "debug" || v == "2") return LogLevel::kDebug;
    return LogLevel::kInfo;
}

void log(LogLevel level, const std::string& msg) {
    static const LogLevel configured = log_level();
    if (configured >= level && configured != LogLevel::kQuiet) std::cerr << "[chainlet] " << msg << '\n';
}

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Writes to a file, or stdout for "-". Output is buffered and written in
// one piece so a failed run leaves no partial file.
void emit(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out << content;
    if (!out.flush()) throw DataError("write to " + path + " failed");
}

struct Common {
    std::string input;
    std::string out = "-";
    int window_offset = kDefaultWindowOffsetMinutes;
    std::optional<Amount> min_amount;
    unsigned workers = 1;
};

void add_stream_flags(CLI::App* cmd, Common& c) {
    cmd->add_option("--input", c.input, "JSON-lines transaction stream")->required();
    cmd->add_option("--window-offset-min", c.window_offset, "daily window offset from UTC in minutes")
        ->capture_default_str();
    cmd->add_option("--min-amount", c.min_amount, "drop transactions whose total output is below this");
}

IngestResult load(const Common& c) {
    IngestOptions opts;
    opts.min_amount = c.min_amount;
    auto result = read_records_file(c.input, opts);
    log(LogLevel::kInfo, "read " + std::to_string(result.records.size()) + " transactions from " + c.input +
                             (result.filtered ? " (" + std::to_string(result.filtered) + " below min amount)" : ""));
    return result;
}

std::map<std::string, std::string> load_labels(const std::string& path) {
    auto labels = read_label_csv_file(path);
    log(LogLevel::kInfo, "read " + std::to_string(labels.size()) + " labels from " + path);
    return labels;
}

int run_ingest(const Common& c, const std::string& normalized_out) {
    auto loaded = load(c);
    if (!normalized_out.empty()) {
        std::ostringstream os;
        write_records(os, loaded.records);
        emit(normalized_out, os.str());
    }
    std::ostringstream os;
    os << "clamp_limit\t3\n";
    os << "window_offset_min\t" << c.window_offset << '\n';
    os << "lines\t" << loaded.lines << "\nfiltered\t" << loaded.filtered << '\n';
    os << "day\ttransactions\taddresses\tcoinbase\t2chainlets\tdormant\n";
    for (auto& [day, records] : bucket_by_day(std::move(loaded.records), c.window_offset)) {
        const auto snapshot = build_snapshot(std::move(records), day, c.window_offset);
        std::size_t coinbase = 0;
        std::size_t pairs = 0;
        for (const auto& r : snapshot.records()) coinbase += r.is_coinbase();
        for (TxIndex t = 0; t < snapshot.transaction_count(); ++t) pairs += snapshot.successors(t).size();
        const auto dormant = enumerate_dormant_1chainlets(snapshot).size();
        os << format_day(day) << '\t' << snapshot.transaction_count() << '\t' << snapshot.address_count() << '\t'
           << coinbase << '\t' << pairs << '\t' << dormant << '\n';
    }
    std::cout << os.str();
    return 0;
}

int run_extract(const Common& c) {
    auto loaded = load(c);
    const auto started = std::chrono::steady_clock::now();
    const auto vectors = extract_stream(std::move(loaded.records), c.window_offset, c.workers);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    char buf[128];
    std::snprintf(buf, sizeof(buf), "extracted %zu orbit vectors in %.3f s with %u worker(s)", vectors.size(), secs,
                  c.workers);
    log(LogLevel::kInfo, buf);
    std::ostringstream os;
    write_orbit_csv(os, vectors);
    emit(c.out, os.str());
    return 0;
}

struct PatternFlags {
    std::string labels;
    std::string aggregate = "day";
    std::string group_by = "mask";
    std::string sort = "total";
    std::size_t top = 0;
    std::string query;
    std::string csv_out;
};

SortKey parse_sort(const std::string& text) {
    SortKey key;
    const auto colon = text.find(':');
    const auto metric = text.substr(0, colon);
    if (colon != std::string::npos) key.cls = parse_class(text.substr(colon + 1));
    if (metric == "total") {
        key.metric = SortKey::Metric::kTotal;
    } else if (metric == "count") {
        key.metric = SortKey::Metric::kClassCount;
    } else if (metric == "pct") {
        key.metric = SortKey::Metric::kClassPct;
    } else if (metric == "share") {
        key.metric = SortKey::Metric::kWithinClassPct;
    } else if (metric == "nonwhite") {
        key.metric = SortKey::Metric::kNonWhitePct;
    } else {
        throw UsageError("--sort must be total, count:CLASS, pct:CLASS, share:CLASS or nonwhite");
    }
    if (colon == std::string::npos &&
        (metric == "count" || metric == "pct" || metric == "share")) {
        throw UsageError("--sort " + metric + " needs a class, e.g. " + metric + ":RS");
    }
    return key;
}

int run_patterns(const Common& c, const PatternFlags& f) {
    if (f.aggregate != "day" && f.aggregate != "address") throw UsageError("--aggregate must be day or address");
    if (f.group_by != "mask" && f.group_by != "counts") throw UsageError("--group-by must be mask or counts");
    SortKey key;
    std::optional<PatternQuery> query;
    try {
        key = parse_sort(f.sort);
        if (!f.query.empty()) query = parse_query(f.query);
    } catch (const DataError& e) {
        throw UsageError(e.what());
    }

    const auto vectors = read_orbit_csv_file(c.input);
    const auto labels = f.labels.empty() ? std::map<std::string, std::string>{} : load_labels(f.labels);
    const auto joined = aggregate(join_labels(vectors, labels),
                                  f.aggregate == "day" ? Aggregation::kPerDay : Aggregation::kPerAddress);
    std::ostringstream os;
    if (query) {
        const auto result = query_pattern(joined, *query);
        os << "matches\t" << result.matches.size() << '\n';
        for (std::size_t cls = 0; cls < kClassCount; ++cls) {
            os << class_name(static_cast<AddressClass>(cls)) << '\t' << result.histogram[cls] << '\n';
        }
    } else {
        auto stats = pattern_table(joined, f.group_by == "mask" ? GroupBy::kMask : GroupBy::kExactCounts, key,
                                   c.workers);
        if (!f.csv_out.empty()) {
            std::ostringstream full;
            write_pattern_csv(full, stats);
            emit(f.csv_out, full.str());
        }
        if (f.top && stats.size() > f.top) stats.resize(f.top);
        write_pattern_report(os, stats);
        const auto distinct = distinct_nonzero_stats(joined);
        for (std::size_t cls = 0; cls < kClassCount; ++cls) {
            if (!distinct[cls]) continue;
            char buf[96];
            std::snprintf(buf, sizeof(buf), "# mean distinct nonzero orbits %s: %.3f\n",
                          std::string(class_name(static_cast<AddressClass>(cls))).c_str(), *distinct[cls]);
            os << buf;
        }
    }
    emit(c.out, os.str());
    return 0;
}

int run_cluster(const Common& c, const std::string& labels_path, const std::string& labels_out) {
    const auto loaded = load(c);
    const auto clusters = cluster(loaded.records);
    log(LogLevel::kInfo, std::to_string(clusters.address_count()) + " addresses in " +
                             std::to_string(clusters.cluster_count()) + " clusters");
    std::ostringstream os;
    clusters.write_csv(os);
    emit(c.out, os.str());
    if (!labels_path.empty()) {
        const auto expansion = expand_labels(clusters, load_labels(labels_path));
        for (const auto& conflict : expansion.conflicts) {
            std::string labels;
            for (const auto& l : conflict.labels) labels += (labels.empty() ? "" : ",") + l;
            log(LogLevel::kInfo, "label conflict in cluster " + conflict.cluster_id + ": " + labels);
        }
        if (!labels_out.empty()) {
            std::ostringstream lo;
            write_labels(lo, expansion.labels);
            emit(labels_out, lo.str());
        }
    }
    return 0;
}

int run_gen(const GenConfig& config, const std::string& out, const std::string& labels_out) {
    const auto generated = generate(config);
    log(LogLevel::kInfo, "generated " + std::to_string(generated.records.size()) + " transactions, " +
                             std::to_string(generated.labels.size()) + " addresses");
    std::ostringstream os;
    write_records(os, generated.records);
    emit(out, os.str());
    if (!labels_out.empty()) {
        std::ostringstream lo;
        write_labels(lo, generated.labels);
        emit(labels_out, lo.str());
    }
    return 0;
}

int run_verify(std::uint64_t first_seed, std::size_t seeds, unsigned workers) {
    const auto report = run_verification(first_seed, seeds, workers);
    for (const auto& f : report.failures) std::cout << "FAIL " << f << '\n';
    std::cout << "oracle: " << report.oracle_passed << '/' << report.oracle_total << " pass\n";
    std::cout << "theorem1: " << report.theorem_passed << '/' << report.theorem_total << " pass\n";
    std::cout << "automorphism group sizes:";
    for (auto s : report.automorphism_sizes) std::cout << ' ' << s;
    std::cout << '\n';
    char buf[64];
    std::snprintf(buf, sizeof(buf), "verified %zu seeds in %.2f s", seeds, report.seconds);
    log(LogLevel::kInfo, buf);
    return report.passed() ? 0 : 1;
}

struct ExportFlags {
    std::string labels;
    std::string manifest;
    std::vector<std::string> rates;
    std::uint64_t seed = 0;
    bool all_first_outputs = false;
    bool keep_unlabeled = false;
};

int run_export(const Common& c, const ExportFlags& f) {
    if (c.out == "-") throw UsageError("export needs --out (the manifest is written next to it)");
    ExportOptions opts;
    opts.seed = f.seed;
    for (const auto& r : f.rates) {
        const auto eq = r.find('=');
        if (eq == std::string::npos) throw UsageError("--rate expects CLASS=RATE, got " + r);
        double rate = 0;
        try {
            std::size_t used = 0;
            rate = std::stod(r.substr(eq + 1), &used);
            if (used != r.size() - eq - 1) throw std::invalid_argument(r);
            opts.rates[parse_class(r.substr(0, eq))] = rate;
        } catch (const std::exception&) {
            throw UsageError("bad --rate " + r);
        }
    }
    if (f.keep_unlabeled) opts.unlabeled.reset();

    auto loaded = load(c);
    const auto income = compute_income_stream(loaded.records, c.window_offset);
    const auto vectors = extract_stream(std::move(loaded.records), c.window_offset, c.workers);
    const auto labels = f.labels.empty() ? std::map<std::string, std::string>{} : load_labels(f.labels);
    const auto result = build_dataset(vectors, income, labels, opts);
    for (const auto& a : result.unknown_label_addresses) log(LogLevel::kDebug, "label for unknown address " + a);
    if (!result.unknown_label_addresses.empty()) {
        log(LogLevel::kInfo, std::to_string(result.unknown_label_addresses.size()) +
                                 " labeled addresses never occur in the orbit vectors");
    }

    std::ostringstream csv_out;
    write_feature_csv(csv_out, result.rows);
    emit(c.out, csv_out.str());
    std::string manifest = f.manifest;
    if (manifest.empty()) manifest = std::filesystem::path(c.out).replace_extension(".manifest.json").string();
    std::ostringstream mo;
    write_manifest(mo, result, opts, f.all_first_outputs ? ActiveReading::kAllFirstOutputs : ActiveReading::kSpenderOnly);
    emit(manifest, mo.str());
    log(LogLevel::kInfo, "wrote " + std::to_string(result.rows.size()) + " rows to " + c.out + ", manifest " + manifest);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chainlet orbit extraction for UTXO transaction graphs"};
    app.require_subcommand(1);

    Common c;
    const auto workers_opt = [&](CLI::App* cmd) {
        cmd->add_option("--workers", c.workers, "worker threads")->check(CLI::Range(1U, 256U))->capture_default_str();
    };

    std::string normalized_out;
    auto* ingest = app.add_subcommand("ingest", "validate a stream and print per-day snapshot stats");
    add_stream_flags(ingest, c);
    ingest->add_option("--out", normalized_out, "also write the validated stream as JSON lines");

    auto* extract = app.add_subcommand("extract", "orbit vectors per (address, day) as CSV");
    add_stream_flags(extract, c);
    extract->add_option("--out", c.out, "output CSV, - for stdout")->capture_default_str();
    workers_opt(extract);

    PatternFlags pf;
    auto* patterns = app.add_subcommand("patterns", "orbit pattern table or query over an orbit CSV");
    patterns->add_option("--input", c.input, "orbit CSV from extract")->required();
    patterns->add_option("--labels", pf.labels, "CSV address,label; unlabeled addresses count as White");
    patterns->add_option("--out", c.out, "report path, - for stdout")->capture_default_str();
    patterns->add_option("--aggregate", pf.aggregate, "day or address")->capture_default_str();
    patterns->add_option("--group-by", pf.group_by, "mask or counts")->capture_default_str();
    patterns->add_option("--sort", pf.sort, "total, count:CLASS, pct:CLASS, share:CLASS, nonwhite")
        ->capture_default_str();
    patterns->add_option("--top", pf.top, "rows to print, 0 for all");
    patterns->add_option("--query", pf.query, "e.g. \"+9 +12 -30\"");
    patterns->add_option("--csv", pf.csv_out, "full table as CSV");
    workers_opt(patterns);

    std::string cluster_labels, cluster_labels_out;
    auto* clustercmd = app.add_subcommand("cluster", "co-spending address clusters");
    add_stream_flags(clustercmd, c);
    clustercmd->add_option("--out", c.out, "address,cluster_id CSV")->capture_default_str();
    clustercmd->add_option("--labels", cluster_labels, "labels to spread over clusters");
    clustercmd->add_option("--labels-out", cluster_labels_out, "expanded labels CSV");

    GenConfig gen_config;
    std::string gen_labels_out;
    std::string gen_start;
    auto* gen = app.add_subcommand("gen", "synthetic stream with planted cohorts");
    gen->add_option("--seed", gen_config.seed)->capture_default_str();
    gen->add_option("--days", gen_config.days)->capture_default_str();
    gen->add_option("--background", gen_config.background_tx_per_day, "background transactions per day")
        ->capture_default_str();
    gen->add_option("--rs", gen_config.rs_forwarders, "same-day forwarders (labeled RS)")->capture_default_str();
    gen->add_option("--dm", gen_config.dm_holders, "holders (labeled DM)")->capture_default_str();
    gen->add_option("--start", gen_start, "first day, YYYY-MM-DD");
    gen->add_option("--window-offset-min", gen_config.window_offset_minutes)->capture_default_str();
    gen->add_option("--out", c.out, "JSON-lines stream")->capture_default_str();
    gen->add_option("--labels", gen_labels_out, "labels CSV to write");

    std::uint64_t first_seed = 0;
    std::size_t seeds = 500;
    auto* verify = app.add_subcommand("verify", "extractor vs brute-force oracle, and the orbit counting identities");
    verify->add_option("--seeds", seeds, "number of random cases")->check(CLI::PositiveNumber)->capture_default_str();
    verify->add_option("--seed", first_seed, "first seed")->capture_default_str();
    workers_opt(verify);

    ExportFlags ef;
    auto* exportcmd = app.add_subcommand("export", "feature CSV with income and labels, plus manifest");
    add_stream_flags(exportcmd, c);
    exportcmd->add_option("--out", c.out, "feature CSV")->required();
    exportcmd->add_option("--manifest", ef.manifest, "manifest path (default: next to --out)");
    exportcmd->add_option("--labels", ef.labels, "CSV address,label");
    exportcmd->add_option("--rate", ef.rates, "CLASS=RATE keep rate, repeatable, e.g. White=0.1");
    exportcmd->add_option("--seed", ef.seed, "sampling seed")->capture_default_str();
    exportcmd->add_flag("--all-first-outputs", ef.all_first_outputs, "count siblings as active in the manifest");
    exportcmd->add_flag("--keep-unlabeled", ef.keep_unlabeled, "leave unlabeled rows unlabeled instead of White");
    workers_opt(exportcmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*ingest) return run_ingest(c, normalized_out);
        if (*extract) return run_extract(c);
        if (*patterns) return run_patterns(c, pf);
        if (*clustercmd) return run_cluster(c, cluster_labels, cluster_labels_out);
        if (*gen) {
            if (!gen_start.empty()) gen_config.start_day = parse_day(gen_start);
            return run_gen(gen_config, c.out, gen_labels_out);
        }
        if (*verify) return run_verify(first_seed, seeds, c.workers);
        if (*exportcmd) return run_export(c, ef);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const SizeLimitError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const InvariantViolation& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
