#pragma once

// Ground-truth machinery: a reference map model, a deterministic workload
// generator, a differential runner that drives a table and the model with
// the same operations and reports every divergence, and an exhaustive
// minimum-bump oracle for checking the placement DP on tiny instances.
//
// Test keys are 64-bit integers; values echo mix64(key) so a wrong slot is
// caught even when the key happens to match.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "slick/core.hpp"
#include "slick/hashing.hpp"
#include "slick/table.hpp"

namespace slick {

enum class OpKind { Insert, Find, Erase };

struct Operation {
    OpKind kind = OpKind::Find;
    std::uint64_t key = 0;
    std::uint64_t value = 0;
};

struct OpMix {
    double insertWeight = 1.0;
    double findWeight = 1.0;
    double eraseWeight = 1.0;
};

enum class KeyDistribution { UniformRandom, Zipf, Sequential };

struct WorkloadSpec {
    std::size_t opCount = 0;
    OpMix mix;
    KeyDistribution distribution = KeyDistribution::UniformRandom;
    double zipfSkew = 1.1;
    std::uint64_t keyUniverse = 0; // 0 = full 64-bit range (uniform only)
    std::uint64_t rngSeed = 1;
    bool churn = false;        // erases target the oldest live key
    std::size_t prefill = 0;   // leading insert-only ops before the mixed phase
};

inline std::uint64_t echoValue(std::uint64_t key) { return mix64(key); }

// Bias-free bounded draw (Lemire); the raw engine is std::mt19937_64, whose
// output sequence is fixed by the standard.
inline std::uint64_t boundedDraw(std::mt19937_64& rng, std::uint64_t bound) {
    assert(bound >= 1);
    unsigned __int128 m = static_cast<unsigned __int128>(rng()) * bound;
    std::uint64_t lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (lo < threshold) {
            m = static_cast<unsigned __int128>(rng()) * bound;
            lo = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

// Zipf(s) over ranks 1..n via an inverse-CDF table.
class ZipfSampler {
public:
    ZipfSampler(std::uint64_t n, double skew) : cdf_(n) {
        assert(n >= 1);
        double sum = 0;
        for (std::uint64_t r = 1; r <= n; ++r) {
            sum += 1.0 / std::pow(static_cast<double>(r), skew);
            cdf_[r - 1] = sum;
        }
        for (auto& c : cdf_) c /= sum;
        cdf_.back() = 1.0;
    }

    std::uint64_t rankFor(double u) const {
        const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        return static_cast<std::uint64_t>(it - cdf_.begin()) + 1;
    }

    double probabilityOfRank(std::uint64_t r) const {
        return cdf_[r - 1] - (r >= 2 ? cdf_[r - 2] : 0.0);
    }

private:
    std::vector<double> cdf_;
};

inline std::vector<Operation> generateWorkload(const WorkloadSpec& spec) {
    if (spec.mix.insertWeight < 0 || spec.mix.findWeight < 0 || spec.mix.eraseWeight < 0 ||
        spec.mix.insertWeight + spec.mix.findWeight + spec.mix.eraseWeight <= 0)
        throw std::invalid_argument("workload op weights must be non-negative, not all zero");
    std::mt19937_64 rng(spec.rngSeed);
    const double total = spec.mix.insertWeight + spec.mix.findWeight + spec.mix.eraseWeight;
    const double pIns = spec.mix.insertWeight / total;
    const double pFind = spec.mix.findWeight / total;

    std::unique_ptr<ZipfSampler> zipf;
    if (spec.distribution == KeyDistribution::Zipf)
        zipf = std::make_unique<ZipfSampler>(spec.keyUniverse ? spec.keyUniverse : 100000,
                                             spec.zipfSkew);
    std::uint64_t seq = 0;
    std::uint64_t churnCounter = 0;
    std::deque<std::uint64_t> liveFifo; // maintained only when churn is on

    auto drawKey = [&] {
        switch (spec.distribution) {
        case KeyDistribution::Sequential:
            return seq < 1 ? std::uint64_t{0} : boundedDraw(rng, seq);
        case KeyDistribution::Zipf: {
            const double u =
                static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
            return zipf->rankFor(u);
        }
        case KeyDistribution::UniformRandom:
        default:
            return spec.keyUniverse ? boundedDraw(rng, spec.keyUniverse) : rng();
        }
    };

    std::vector<Operation> ops;
    ops.reserve(spec.prefill + spec.opCount);
    auto emitInsert = [&] {
        std::uint64_t k;
        if (spec.churn)
            k = mix64(spec.rngSeed ^ 0x8f1bbcdcbfa53e0bull ^ ++churnCounter); // always fresh
        else if (spec.distribution == KeyDistribution::Sequential)
            k = seq++;
        else
            k = drawKey();
        if (spec.churn) liveFifo.push_back(k);
        ops.push_back({OpKind::Insert, k, echoValue(k)});
    };

    for (std::size_t i = 0; i < spec.prefill; ++i) emitInsert();
    for (std::size_t i = 0; i < spec.opCount; ++i) {
        const double u = static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
        if (u < pIns) {
            emitInsert();
        } else if (u < pIns + pFind) {
            std::uint64_t k;
            if (spec.churn && !liveFifo.empty())
                k = liveFifo[boundedDraw(rng, liveFifo.size())];
            else
                k = spec.distribution == KeyDistribution::Sequential && seq > 0
                        ? boundedDraw(rng, seq)
                        : drawKey();
            ops.push_back({OpKind::Find, k, 0});
        } else {
            std::uint64_t k;
            if (spec.churn && !liveFifo.empty()) {
                k = liveFifo.front(); // delete-oldest holds the live set steady
                liveFifo.pop_front();
            } else {
                k = spec.distribution == KeyDistribution::Sequential && seq > 0
                        ? boundedDraw(rng, seq)
                        : drawKey();
            }
            ops.push_back({OpKind::Erase, k, 0});
        }
    }
    return ops;
}

// Exact set-semantics mirror of what the table should contain.
class ReferenceModel {
public:
    bool insert(std::uint64_t k, std::uint64_t v) { return map_.emplace(k, v).second; }
    bool erase(std::uint64_t k) { return map_.erase(k) > 0; }
    const std::uint64_t* find(std::uint64_t k) const {
        auto it = map_.find(k);
        return it == map_.end() ? nullptr : &it->second;
    }
    std::size_t size() const { return map_.size(); }
    const std::unordered_map<std::uint64_t, std::uint64_t>& entries() const { return map_; }

private:
    std::unordered_map<std::uint64_t, std::uint64_t> map_;
};

struct DivergenceReport {
    std::vector<std::string> issues;
    bool empty() const { return issues.empty(); }
};

struct DifferentialOptions {
    std::size_t auditEvery = 1u << 16; // 0 = only at the end
    std::size_t cleanEvery = 0;        // call backyardClean periodically (tables that have it)
    std::size_t maxIssues = 32;
};

namespace testdetail {

template <class Table>
concept HasAudit = requires(const Table& t) { t.audit(); };
template <class Table>
concept HasClean = requires(Table& t) { t.backyardClean(); };

inline bool didAdd(InsertOutcome o) { return o != InsertOutcome::AlreadyPresent; }
inline bool didAdd(ProbeInsertOutcome o) { return o == ProbeInsertOutcome::Inserted; }
inline bool wasFull(InsertOutcome) { return false; }
inline bool wasFull(ProbeInsertOutcome o) { return o == ProbeInsertOutcome::TableFull; }
inline bool didRemove(DeleteOutcome o) { return o == DeleteOutcome::Removed; }
inline bool didRemove(bool o) { return o; }

} // namespace testdetail

// Applies every operation to the table under test and to the reference
// model, comparing each outcome, and runs a full audit (every model key
// findable with the right value, matching sizes, and the table's own
// invariant scan when it has one) at the configured interval.
template <class Table>
DivergenceReport differentialRun(Table& table, const std::vector<Operation>& ops,
                                 const DifferentialOptions& opt = {}) {
    DivergenceReport rep;
    ReferenceModel model;
    auto issue = [&](std::size_t at, const std::string& what) {
        if (rep.issues.size() < opt.maxIssues)
            rep.issues.push_back("op " + std::to_string(at) + ": " + what);
    };

    auto fullAudit = [&](std::size_t at) {
        if (table.size() != model.size())
            issue(at, "size mismatch: table " + std::to_string(table.size()) + ", model " +
                          std::to_string(model.size()));
        for (const auto& kv : model.entries()) {
            const auto* e = table.find(kv.first);
            if (!e) {
                issue(at, "model key " + std::to_string(kv.first) + " not findable");
                if (rep.issues.size() >= opt.maxIssues) return;
            } else if (e->value != kv.second) {
                issue(at, "wrong value for key " + std::to_string(kv.first));
            }
        }
        if constexpr (testdetail::HasAudit<Table>) {
            for (const auto& v : table.audit()) issue(at, "invariant: " + v);
        }
    };

    for (std::size_t i = 0; i < ops.size(); ++i) {
        const Operation& op = ops[i];
        switch (op.kind) {
        case OpKind::Insert: {
            const auto out = table.insert({op.key, op.value});
            if (testdetail::wasFull(out)) break; // capacity limit, not a divergence
            const bool modelAdded = model.insert(op.key, op.value);
            if (testdetail::didAdd(out) != modelAdded)
                issue(i, "insert outcome mismatch for key " + std::to_string(op.key));
            break;
        }
        case OpKind::Find: {
            const auto* e = table.find(op.key);
            const auto* v = model.find(op.key);
            if ((e != nullptr) != (v != nullptr))
                issue(i, std::string("find presence mismatch for key ") +
                             std::to_string(op.key));
            else if (e && (e->value != *v || e->value != echoValue(op.key)))
                issue(i, "find value mismatch for key " + std::to_string(op.key));
            break;
        }
        case OpKind::Erase: {
            const auto out = table.erase(op.key);
            const bool modelRemoved = model.erase(op.key);
            if (testdetail::didRemove(out) != modelRemoved)
                issue(i, "erase outcome mismatch for key " + std::to_string(op.key));
            break;
        }
        }
        if constexpr (testdetail::HasClean<Table>) {
            if (opt.cleanEvery && (i + 1) % opt.cleanEvery == 0) table.backyardClean();
        }
        if (opt.auditEvery && (i + 1) % opt.auditEvery == 0) fullAudit(i);
        if (rep.issues.size() >= opt.maxIssues) return rep;
    }
    fullAudit(ops.size());
    return rep;
}

class LimitExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OracleLimits {
    std::size_t maxBlocks = 4;
    std::size_t maxElements = 12;
    std::size_t maxThresholdRange = 3;
};

// Enumerates every threshold vector and every feasible offset assignment and
// returns the minimum number of bumped elements over all valid placements.
// Independent of the builders: it only uses the structural feasibility rules.
template <class Key, class Value, class Hasher>
std::size_t exhaustiveMinBumps(const std::vector<Element<Key, Value>>& elements,
                               const SlickConfig& cfg, const Hasher& hasher,
                               const OracleLimits& limits = {}) {
    requireValidConfig(cfg);
    const std::size_t blocks = cfg.numBlocks();
    if (blocks > limits.maxBlocks || elements.size() > limits.maxElements ||
        cfg.thresholdRange > limits.maxThresholdRange)
        throw LimitExceeded("instance too large for exhaustive enumeration");

    // deltaCounts[i][d]: elements of block i with threshold hash d.
    std::vector<std::vector<std::size_t>> deltaCounts(
        blocks, std::vector<std::size_t>(cfg.thresholdRange, 0));
    for (const auto& e : elements) ++deltaCounts[hasher.blockOf(e.key)][hasher.thresholdOf(e.key)];

    // survivors[i][t]: block-i elements kept under threshold t.
    std::vector<std::vector<std::size_t>> survivors(
        blocks, std::vector<std::size_t>(cfg.thresholdRange + 1, 0));
    for (std::size_t i = 0; i < blocks; ++i)
        for (std::size_t t = 0; t <= cfg.thresholdRange; ++t)
            for (std::size_t d = t; d < cfg.thresholdRange; ++d)
                survivors[i][t] += deltaCounts[i][d];

    const std::int64_t B = static_cast<std::int64_t>(cfg.blockCapacity);
    std::size_t best = std::numeric_limits<std::size_t>::max();

    // Offsets chain left to right; o[blocks] is the sentinel 0.
    std::vector<std::size_t> sizes(blocks);
    auto offsetsFeasible = [&](auto&& self, std::size_t i, std::int64_t oIn) -> bool {
        if (i == blocks) return oIn == 0;
        const std::int64_t s = static_cast<std::int64_t>(sizes[i]);
        if (s > static_cast<std::int64_t>(cfg.maxBlockSize)) return false;
        if (cfg.luckooMode && oIn + s > 2 * B) return false;
        if (oIn + B * static_cast<std::int64_t>(i) + s > static_cast<std::int64_t>(cfg.numSlots))
            return false;
        const std::int64_t oMin = std::max<std::int64_t>(0, oIn + s - B);
        const std::int64_t oMax =
            i + 1 == blocks ? 0 : static_cast<std::int64_t>(cfg.maxOffset);
        for (std::int64_t oNext = oMin; oNext <= oMax; ++oNext)
            if (self(self, i + 1, oNext)) return true;
        return false;
    };

    std::vector<std::size_t> t(blocks, 0);
    for (;;) {
        std::size_t kept = 0;
        for (std::size_t i = 0; i < blocks; ++i) {
            sizes[i] = survivors[i][t[i]];
            kept += sizes[i];
        }
        const std::size_t bumps = elements.size() - kept;
        if (bumps < best) {
            for (std::int64_t o0 = 0; o0 <= static_cast<std::int64_t>(cfg.maxOffset); ++o0)
                if (offsetsFeasible(offsetsFeasible, 0, o0)) {
                    best = bumps;
                    break;
                }
        }
        // odometer over threshold vectors in (0..thresholdRange)^blocks
        std::size_t i = 0;
        while (i < blocks && t[i] == cfg.thresholdRange) t[i++] = 0;
        if (i == blocks) break;
        ++t[i];
    }
    assert(best != std::numeric_limits<std::size_t>::max());
    return best;
}

} // namespace slick
