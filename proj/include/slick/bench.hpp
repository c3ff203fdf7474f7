#pragma once

// Benchmark and experiment driver. Each run sweeps the cartesian product of
// the list-valued flags, repeats every point --reps times with derived
// seeds, and emits one CSV row per (structure, point, repetition). All
// correctness metrics come from final-state audits and instrumentation
// counters and are deterministic under a fixed --seed; only the *Nanos
// timing columns vary between runs.
//
// Exit codes: 0 success, 1 usage error, 2 divergence detected under --audit.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "slick/baselines.hpp"
#include "slick/build.hpp"
#include "slick/core.hpp"
#include "slick/table.hpp"
#include "slick/testkit.hpp"

namespace slick::bench {

inline constexpr const char* kCsvHeader =
    "structure,workload,nRequested,n,m,load,B,Bhat,ohat,that,shat,rep,seed,"
    "emptyCells,bumpedCount,bumpedFraction,maxOffset,blusterCount,maxBlusterLen,"
    "meanProbesFindSuccess,meanProbesFindFail,meanSlideBlocks,"
    "buildNanosPerElement,insertNanos,findNanos,eraseNanos";

struct RowMetrics {
    std::string structure;
    std::string workload;
    std::size_t nRequested = 0;
    std::size_t n = 0; // live elements at snapshot time
    std::size_t m = 0;
    double load = 0;
    std::size_t B = 0, Bhat = 0, ohat = 0, that = 0, shat = 0;
    std::size_t rep = 0;
    std::uint64_t seed = 0;
    std::size_t emptyCells = 0;
    std::size_t bumpedCount = 0;
    double bumpedFraction = 0;
    std::size_t maxOffset = 0;
    std::size_t blusterCount = 0;
    std::size_t maxBlusterLen = 0;
    double meanProbesFindSuccess = 0;
    double meanProbesFindFail = 0;
    double meanSlideBlocks = 0;
    double buildNanosPerElement = 0;
    double insertNanos = 0;
    double findNanos = 0;
    double eraseNanos = 0;
};

inline std::string formatRow(const RowMetrics& r) {
    char buf[768];
    std::snprintf(buf, sizeof buf,
                  "%s,%s,%zu,%zu,%zu,%.6f,%zu,%zu,%zu,%zu,%zu,%zu,%llu,"
                  "%zu,%zu,%.6f,%zu,%zu,%zu,%.4f,%.4f,%.4f,%.1f,%.1f,%.1f,%.1f",
                  r.structure.c_str(), r.workload.c_str(), r.nRequested, r.n, r.m, r.load,
                  r.B, r.Bhat, r.ohat, r.that, r.shat, r.rep,
                  static_cast<unsigned long long>(r.seed), r.emptyCells, r.bumpedCount,
                  r.bumpedFraction, r.maxOffset, r.blusterCount, r.maxBlusterLen,
                  r.meanProbesFindSuccess, r.meanProbesFindFail, r.meanSlideBlocks,
                  r.buildNanosPerElement, r.insertNanos, r.findNanos, r.eraseNanos);
    return buf;
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double nanosSince(Clock::time_point t0, std::size_t count) {
    if (count == 0) return 0;
    const auto dt = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0);
    return static_cast<double>(dt.count()) / static_cast<double>(count);
}

inline std::size_t roundToMultiple(double x, std::size_t b) {
    const auto raw = static_cast<std::size_t>(x + 0.5);
    std::size_t m = ((raw + b / 2) / b) * b;
    return m < b ? b : m;
}

struct PointParams {
    std::string structure;
    std::string workload;
    std::size_t n = 0;
    double load = 0.95;
    std::size_t B = 8, Bhat = 16, ohat = 8, that = 8, shat = 16;
    std::size_t rep = 0;
    std::uint64_t seed = 0;
    bool audit = false;
};

inline std::vector<Operation> buildOps(const PointParams& p, std::size_t m) {
    std::vector<Operation> ops;
    if (p.workload == "mixed") {
        // Prefill with n distinct keys inside the draw universe, then run n
        // ops whose 40/40/20 mix holds the live set at its starting size.
        const std::uint64_t universe = static_cast<std::uint64_t>(1.5 * p.n) + 1;
        ops.reserve(2 * p.n);
        for (std::size_t i = 0; i < p.n; ++i)
            ops.push_back({OpKind::Insert, i, echoValue(i)});
        WorkloadSpec spec;
        spec.opCount = p.n;
        spec.mix = {2, 2, 1};
        spec.keyUniverse = universe;
        spec.rngSeed = p.seed;
        for (auto& op : generateWorkload(spec)) ops.push_back(op);
    } else if (p.workload == "churn") {
        WorkloadSpec spec;
        spec.opCount = p.n;
        spec.mix = {1, 0, 1};
        spec.churn = true;
        spec.prefill = p.n;
        spec.rngSeed = p.seed;
        ops = generateWorkload(spec);
    } else { // build, insert: n distinct keys
        ops.reserve(p.n);
        for (std::size_t i = 0; i < p.n; ++i) {
            const std::uint64_t k = mix64(p.seed ^ (i + 1));
            ops.push_back({OpKind::Insert, k, echoValue(k)});
        }
    }
    (void)m;
    return ops;
}

// Shared post-phase measurement: probe counters from a deterministic lookup
// batch, then insert/erase timing on scratch keys (after the metrics
// snapshot, so the row is unaffected).
template <class Table>
void measureAndFill(Table& table, const PointParams& p, const std::vector<Operation>& ops,
                    RowMetrics& row) {
    const std::size_t batch = std::min<std::size_t>(p.n ? p.n : 1, 100000);
    std::vector<std::uint64_t> present;
    present.reserve(batch);
    for (std::size_t i = 0; i < ops.size() && present.size() < batch; ++i)
        if (ops[i].kind == OpKind::Insert) present.push_back(ops[i].key);

    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < present.size(); ++i) table.find(present[i]);
    for (std::size_t i = 0; i < batch; ++i) table.find(mix64(p.seed ^ 0xabcdef12345ull ^ i));
    row.findNanos = nanosSince(t0, present.size() + batch);
}

template <class Table>
void timedMutationBatch(Table& table, const PointParams& p, std::size_t batch,
                        RowMetrics& row) {
    if (batch == 0) return;
    std::vector<std::uint64_t> keys(batch);
    for (std::size_t i = 0; i < batch; ++i) keys[i] = mix64(p.seed ^ 0x517cc1b727220a95ull ^ i);
    const auto t0 = Clock::now();
    for (auto k : keys) table.insert({k, echoValue(k)});
    row.insertNanos = nanosSince(t0, batch);
    const auto t1 = Clock::now();
    for (auto k : keys) table.erase(k);
    row.eraseNanos = nanosSince(t1, batch);
}

inline int runSlickPoint(const PointParams& p, RowMetrics& row, std::ostream& err) {
    SlickConfig cfg = makeConfig(1, p.B);
    cfg.numSlots = roundToMultiple(static_cast<double>(p.n) / p.load, p.B);
    cfg.maxBlockSize = p.Bhat;
    cfg.maxOffset = p.ohat;
    cfg.thresholdRange = p.that;
    cfg.maxSlideBlocks = p.shat;
    cfg.luckooMode = p.structure == "slick-luckoo";
    cfg.hashSeed = mix64(p.seed ^ 0x1);
    cfg.thresholdSeed = mix64(p.seed ^ 0x2);
    requireValidConfig(cfg);

    const auto ops = buildOps(p, cfg.numSlots);
    int rc = 0;
    SlickTable<std::uint64_t, std::uint64_t> table(cfg);

    if (p.workload == "build") {
        std::vector<Element<std::uint64_t, std::uint64_t>> elems;
        elems.reserve(ops.size());
        for (const auto& op : ops) elems.push_back({op.key, op.value});
        const auto t0 = Clock::now();
        auto built = greedyBuild(std::move(elems), cfg, SeededHasher<std::uint64_t>(cfg));
        row.buildNanosPerElement = nanosSince(t0, ops.size());
        table = std::move(built.table);
        if (p.audit) {
            for (const auto& op : ops) {
                const auto* e = table.find(op.key);
                if (!e || e->value != op.value) {
                    err << "audit: built key " << op.key << " not findable\n";
                    rc = 2;
                    break;
                }
            }
            for (const auto& v : table.audit()) {
                err << "audit: " << v << "\n";
                rc = 2;
            }
        }
    } else {
        std::size_t prefillCount = 0;
        if (p.workload == "mixed" || p.workload == "churn") prefillCount = p.n;
        if (p.audit) {
            DifferentialOptions opt;
            auto rep = differentialRun(table, ops, opt);
            for (const auto& v : rep.issues) err << "audit: " << v << "\n";
            if (!rep.empty()) rc = 2;
        } else {
            for (std::size_t i = 0; i < prefillCount; ++i)
                table.insert({ops[i].key, ops[i].value});
            table.resetCounters();
            const auto t0 = Clock::now();
            for (std::size_t i = prefillCount; i < ops.size(); ++i) {
                const auto& op = ops[i];
                switch (op.kind) {
                case OpKind::Insert: table.insert({op.key, op.value}); break;
                case OpKind::Find: table.find(op.key); break;
                case OpKind::Erase: table.erase(op.key); break;
                }
            }
            row.insertNanos = nanosSince(t0, ops.size() - prefillCount);
        }
    }

    measureAndFill(table, p, ops, row);
    const auto snap = table.stats();
    const auto& c = table.counters();
    row.n = snap.liveCount;
    row.m = snap.numSlots;
    row.load = snap.load;
    row.emptyCells = snap.emptyCells;
    row.bumpedCount = snap.bumpedCount;
    row.bumpedFraction = snap.liveCount
                             ? static_cast<double>(snap.bumpedCount) / snap.liveCount
                             : 0.0;
    row.maxOffset = snap.maxOffset;
    row.blusterCount = snap.blusterCount;
    row.maxBlusterLen = snap.maxBlusterLen;
    row.meanProbesFindSuccess =
        c.findHits ? static_cast<double>(c.findProbesOnHits) / c.findHits : 0.0;
    row.meanProbesFindFail =
        c.findMisses ? static_cast<double>(c.findProbesOnMisses) / c.findMisses : 0.0;
    row.meanSlideBlocks =
        c.inserts ? static_cast<double>(c.slideBlocksExamined) / c.inserts : 0.0;
    // conservation: bumped - empty = live - m, always
    if (static_cast<std::int64_t>(snap.bumpedCount) -
            static_cast<std::int64_t>(snap.emptyCells) !=
        static_cast<std::int64_t>(snap.liveCount) - static_cast<std::int64_t>(snap.numSlots)) {
        err << "internal error: conservation identity violated in row\n";
        return 2;
    }
    timedMutationBatch(table, p, std::min<std::size_t>(p.n, 100000), row);
    return rc;
}

inline int runProbingPoint(const PointParams& p, RowMetrics& row, std::ostream& err) {
    const std::size_t m = roundToMultiple(static_cast<double>(p.n) / p.load, p.B);
    const ProbeKind kind =
        p.structure == "lp" ? ProbeKind::LinearProbing : ProbeKind::RobinHood;
    ProbingTable<std::uint64_t, std::uint64_t> table(m, kind, mix64(p.seed ^ 0x3));
    const auto ops = buildOps(p, m);
    int rc = 0;

    std::size_t prefillCount = 0;
    if (p.workload == "mixed" || p.workload == "churn") prefillCount = p.n;
    if (p.audit) {
        DifferentialOptions opt;
        auto rep = differentialRun(table, ops, opt);
        for (const auto& v : rep.issues) err << "audit: " << v << "\n";
        if (!rep.empty()) rc = 2;
    } else {
        for (std::size_t i = 0; i < prefillCount; ++i) table.insert({ops[i].key, ops[i].value});
        table.resetCounters();
        const auto t0 = Clock::now();
        for (std::size_t i = prefillCount; i < ops.size(); ++i) {
            const auto& op = ops[i];
            switch (op.kind) {
            case OpKind::Insert: table.insert({op.key, op.value}); break;
            case OpKind::Find: table.find(op.key); break;
            case OpKind::Erase: table.erase(op.key); break;
            }
        }
        const double ns = nanosSince(t0, ops.size() - prefillCount);
        if (p.workload == "build" || p.workload == "insert")
            row.buildNanosPerElement = ns; // bulk construction here is the insert loop
        row.insertNanos = ns;
    }

    measureAndFill(table, p, ops, row);
    const auto& c = table.counters();
    row.n = table.size();
    row.m = m;
    row.load = static_cast<double>(table.size()) / m;
    row.emptyCells = m - table.size();
    row.meanProbesFindSuccess =
        c.findHits ? static_cast<double>(c.findProbesOnHits) / c.findHits : 0.0;
    row.meanProbesFindFail =
        c.findMisses ? static_cast<double>(c.findProbesOnMisses) / c.findMisses : 0.0;
    timedMutationBatch(table, p,
                       std::min({p.n, (m - table.size()) / 2, std::size_t{100000}}), row);
    (void)err;
    return rc;
}

} // namespace detail

// args excludes the program name. Returns the process exit code.
inline int runBenchCli(const std::vector<std::string>& args, std::ostream& out,
                       std::ostream& err) {
    CLI::App app{"sliding-block hash table benchmark driver"};
    std::vector<std::string> structures{"slick"};
    std::string workload = "build";
    std::vector<std::size_t> ns{100000};
    std::vector<double> loads{0.95};
    std::vector<std::size_t> Bs{8}, Bhats{0}, ohats{0}, thats{0}, shats{0};
    std::size_t reps = 1;
    std::uint64_t seed = 1;
    std::string csvPath;
    bool audit = false;

    app.add_option("--structure", structures,
                   "structures to run: slick, slick-luckoo, lp, rh")
        ->delimiter(',');
    app.add_option("--workload", workload, "build, insert, mixed, or churn")
        ->check(CLI::IsMember({"build", "insert", "mixed", "churn"}));
    app.add_option("--n", ns, "element count (list sweeps)")->delimiter(',');
    app.add_option("--load", loads, "target load n/m; m is derived (list sweeps)")
        ->delimiter(',');
    app.add_option("--B", Bs, "block capacity (list sweeps)")->delimiter(',');
    app.add_option("--Bhat", Bhats, "max block size, 0 = 2*B (list sweeps)")->delimiter(',');
    app.add_option("--ohat", ohats, "max offset, 0 = B (list sweeps)")->delimiter(',');
    app.add_option("--that", thats, "threshold range, 0 = B (list sweeps)")->delimiter(',');
    app.add_option("--shat", shats, "max blocks per slide, 0 = Bhat (list sweeps)")
        ->delimiter(',');
    app.add_option("--reps", reps, "repetitions per parameter point");
    app.add_option("--seed", seed, "base RNG seed; per-rep seeds are derived");
    app.add_option("--csv", csvPath, "write CSV here instead of standard output");
    app.add_flag("--audit", audit, "mirror runs against a reference model; exit 2 on divergence");

    std::vector<const char*> argv;
    argv.push_back("slick-bench");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 1;
    }

    for (const auto& s : structures)
        if (s != "slick" && s != "slick-luckoo" && s != "lp" && s != "rh") {
            err << "usage error: unknown structure '" << s << "'\n";
            return 1;
        }

    std::ofstream file;
    if (!csvPath.empty()) {
        file.open(csvPath);
        if (!file) {
            err << "usage error: cannot open " << csvPath << "\n";
            return 1;
        }
    }
    std::ostream& csv = csvPath.empty() ? out : file;
    csv << kCsvHeader << "\n";

    int rc = 0;
    std::size_t pointIndex = 0;
    for (const auto& structure : structures)
        for (std::size_t n : ns)
            for (double load : loads)
                for (std::size_t B : Bs)
                    for (std::size_t BhatRaw : Bhats)
                        for (std::size_t ohatRaw : ohats)
                            for (std::size_t thatRaw : thats)
                                for (std::size_t shatRaw : shats) {
                                    detail::PointParams p;
                                    p.structure = structure;
                                    p.workload = workload;
                                    p.n = n;
                                    p.load = load;
                                    p.B = B;
                                    p.Bhat = BhatRaw ? BhatRaw : 2 * B;
                                    p.ohat = ohatRaw ? ohatRaw : B;
                                    p.that = thatRaw ? thatRaw : B;
                                    p.shat = shatRaw ? shatRaw : p.Bhat;
                                    p.audit = audit;
                                    if (load <= 0) {
                                        err << "usage error: --load must be positive\n";
                                        return 1;
                                    }
                                    if ((structure == "lp" || structure == "rh") &&
                                        load >= 1.0) {
                                        err << "usage error: " << structure
                                            << " requires --load < 1\n";
                                        return 1;
                                    }
                                    if (structure == "slick-luckoo" &&
                                        (p.ohat != B || p.Bhat != 2 * B)) {
                                        err << "usage error: slick-luckoo requires ohat=B "
                                               "and Bhat=2B\n";
                                        return 1;
                                    }
                                    for (std::size_t rep = 0; rep < reps; ++rep) {
                                        p.rep = rep;
                                        p.seed = mix64(mix64(seed + pointIndex) + rep);
                                        RowMetrics row;
                                        row.structure = structure;
                                        row.workload = workload;
                                        row.nRequested = n;
                                        row.B = p.B;
                                        row.Bhat = p.Bhat;
                                        row.ohat = p.ohat;
                                        row.that = p.that;
                                        row.shat = p.shat;
                                        row.rep = rep;
                                        row.seed = p.seed;
                                        int r = 0;
                                        try {
                                            r = structure == "lp" || structure == "rh"
                                                    ? detail::runProbingPoint(p, row, err)
                                                    : detail::runSlickPoint(p, row, err);
                                        } catch (const std::invalid_argument& e) {
                                            err << "usage error: " << e.what() << "\n";
                                            return 1;
                                        }
                                        rc = std::max(rc, r);
                                        csv << formatRow(row) << "\n";
                                    }
                                    ++pointIndex;
                                }
    return rc;
}

} // namespace slick::bench
