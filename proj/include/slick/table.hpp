#pragma once

// The dynamic sliding-block hash table.
//
// Elements whose main hash is i live contiguously in block i's cell range;
// block i may slide right by up to maxOffset cells. When an insertion finds
// no usable free cell, it raises the block's threshold just enough to bump
// the cheapest element(s) to the backyard; an element e belongs to the
// backyard exactly when thresholdOf(key(e)) < threshold of its home block,
// which is also how find and erase route their lookups. That makes every
// lookup touch at most maxBlockSize table cells plus one backyard probe.
//
// Concurrency: single writer. find is safe concurrently with other finds
// except that the plain instrumentation counters may drop increments.

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "slick/backyard.hpp"
#include "slick/core.hpp"
#include "slick/hashing.hpp"

namespace slick {

enum class InsertOutcome { PlacedInBlock, Bumped, AlreadyPresent };
enum class DeleteOutcome { Removed, NotPresent };

struct CleanReport {
    std::size_t reinserted = 0;  // moved from the backyard back into the table
    std::size_t stillBumped = 0; // returned to the backyard under a fresh threshold
};

struct MetricsSnapshot {
    std::size_t emptyCells = 0;
    std::size_t bumpedCount = 0;
    double load = 0.0; // liveCount / numSlots
    std::size_t maxOffset = 0;
    std::size_t blusterCount = 0;
    std::size_t maxBlusterLen = 0;
    std::size_t liveCount = 0;
    std::size_t numSlots = 0;
};

struct OpCounters {
    std::uint64_t finds = 0;
    std::uint64_t findHits = 0;
    std::uint64_t findMisses = 0;
    std::uint64_t findProbesOnHits = 0;   // table slots read
    std::uint64_t findProbesOnMisses = 0;
    std::uint64_t findMaxProbes = 0;
    std::uint64_t inserts = 0;
    std::uint64_t insertSlotsTouched = 0; // slot reads + writes during insert
    std::uint64_t bumpedByInsert = 0;
    std::uint64_t slideAttempts = 0;
    std::uint64_t slideSuccesses = 0;
    std::uint64_t slideBlocksExamined = 0;
    std::uint64_t leftSlideSuccesses = 0;
    std::uint64_t erases = 0;
};

template <class Key, class Value, class Hasher = SeededHasher<Key>>
class SlickTable {
public:
    using Elem = Element<Key, Value>;
    using State = TableState<Key, Value>;

    explicit SlickTable(const SlickConfig& cfg)
        : SlickTable(cfg, Hasher(cfg)) {}

    SlickTable(const SlickConfig& cfg, Hasher hasher)
        : state_(makeTableState<Key, Value>(cfg)), hasher_(std::move(hasher)) {
        assert(hasher_.numBlocks() == cfg.numBlocks());
    }

    // Assembles a table from prebuilt parts (bulk construction, tests).
    SlickTable(State state, Hasher hasher, Backyard<Key, Value> backyard)
        : state_(std::move(state)), hasher_(std::move(hasher)), backyard_(std::move(backyard)) {
        requireValidConfig(state_.config);
    }

    const SlickConfig& config() const { return state_.config; }
    const Hasher& hasher() const { return hasher_; }
    std::size_t size() const { return state_.liveCount; }
    std::size_t capacity() const { return state_.config.numSlots; }

    // Open for tests and tools (fault injection, direct layout checks);
    // mutating through this bypasses every invariant.
    State& state() { return state_; }
    const State& state() const { return state_; }
    Backyard<Key, Value>& backyard() { return backyard_; }
    const Backyard<Key, Value>& backyard() const { return backyard_; }

    const OpCounters& counters() const { return counters_; }
    void resetCounters() { counters_ = OpCounters{}; }

    const Elem* find(const Key& k) const {
        ++counters_.finds;
        const std::size_t i = hasher_.blockOf(k);
        if (hasher_.thresholdOf(k) < state_.meta[i].threshold) {
            const Elem* e = backyard_.find(k); // bumped if present at all
            e ? ++counters_.findHits : ++counters_.findMisses;
            return e;
        }
        std::size_t probes = 0;
        const std::int64_t j = findSlotInBlock(i, k, probes);
        assert(probes <= state_.config.maxBlockSize);
        counters_.findMaxProbes = std::max(counters_.findMaxProbes,
                                           static_cast<std::uint64_t>(probes));
        if (j >= 0) {
            ++counters_.findHits;
            counters_.findProbesOnHits += probes;
            return &state_.slots[static_cast<std::size_t>(j)];
        }
        ++counters_.findMisses;
        counters_.findProbesOnMisses += probes;
        return nullptr;
    }

    InsertOutcome insert(const Elem& e) {
        ++counters_.inserts;
        const Key& k = e.key;
        const std::size_t i = hasher_.blockOf(k);
        const std::uint32_t delta = hasher_.thresholdOf(k);
        if (delta < state_.meta[i].threshold) {
            if (!backyard_.insert(e)) return InsertOutcome::AlreadyPresent;
            ++state_.liveCount;
            return InsertOutcome::Bumped;
        }
        std::size_t probes = 0;
        if (findSlotInBlock(i, k, probes) >= 0) {
            counters_.insertSlotsTouched += probes;
            return InsertOutcome::AlreadyPresent;
        }
        counters_.insertSlotsTouched += probes;

        if (!canGrowBlock(i) || !openGapAfter(i)) {
            // Raise the threshold just enough to bump at least one element
            // of block i (possibly e itself), then place e if it survived.
            const std::uint32_t tPrime = minThresholdWith(i, delta) + 1;
            assert(tPrime <= state_.config.thresholdRange);
            assert(tPrime > state_.meta[i].threshold);
            state_.meta[i].threshold = tPrime;
            bumpBelow(i, tPrime);
            if (delta < tPrime) {
                const bool added = backyard_.insert(e);
                assert(added);
                (void)added;
                ++state_.liveCount;
                return InsertOutcome::Bumped;
            }
        }
        assert(state_.meta[i].gap > 0);
        appendToBlock(i, e);
        ++state_.liveCount;
        return InsertOutcome::PlacedInBlock;
    }

    DeleteOutcome erase(const Key& k) {
        ++counters_.erases;
        const std::size_t i = hasher_.blockOf(k);
        if (hasher_.thresholdOf(k) < state_.meta[i].threshold) {
            if (!backyard_.erase(k)) return DeleteOutcome::NotPresent;
            --state_.liveCount;
            return DeleteOutcome::Removed;
        }
        std::size_t probes = 0;
        const std::int64_t j = findSlotInBlock(i, k, probes);
        if (j < 0) return DeleteOutcome::NotPresent;
        // Overwrite with the block's last element and extend the gap.
        state_.slots[static_cast<std::size_t>(j)] =
            state_.slots[static_cast<std::size_t>(blockEnd(state_, i))];
        ++state_.meta[i].gap;
        --state_.liveCount;
        hadTableErase_ = true;
        return DeleteOutcome::Removed;
    }

    // Looks right of block i0 for the nearest gap and migrates one free cell
    // back to i0 by sliding each intervening block one cell right. Fails if
    // a block that would have to move is already at maxOffset (or cannot
    // grow its span in luckoo mode), if the table end intervenes, or if more
    // than maxSlideBlocks blocks would have to be examined.
    bool slideGapFromRight(std::size_t i0) {
        assert(i0 < state_.config.numBlocks());
        assert(state_.meta[i0].gap == 0);
        ++counters_.slideAttempts;
        const std::size_t blocks = state_.config.numBlocks();
        std::size_t steps = 0;
        std::size_t j = i0;
        while (state_.meta[j].gap == 0) {
            if (j + 1 >= blocks) return finishSlide(steps, false);
            if (steps == state_.config.maxSlideBlocks) return finishSlide(steps, false);
            ++steps;
            if (!canSlideRight(j + 1)) return finishSlide(steps, false);
            ++j;
        }
        // Blocks i0+1..j each move one cell right, consuming the first free
        // cell of j's gap; the vacated cell becomes i0's gap.
        std::int64_t dest = blockEnd(state_, j) + 1;
        for (std::size_t b = j; b > i0; --b) {
            const std::int64_t src = blockStart(state_, b);
            state_.slots[static_cast<std::size_t>(dest)] =
                state_.slots[static_cast<std::size_t>(src)];
            ++state_.meta[b].offset;
            dest = src;
            counters_.insertSlotsTouched += 2;
        }
        --state_.meta[j].gap;
        ++state_.meta[i0].gap;
        return finishSlide(steps, true);
    }

    // Mirror image: looks left for a gap and slides blocks j+1..i0 one cell
    // left, which requires every one of them (including i0) to have a
    // positive offset.
    bool slideGapFromLeft(std::size_t i0) {
        assert(i0 < state_.config.numBlocks());
        assert(state_.meta[i0].gap == 0);
        ++counters_.slideAttempts;
        std::size_t steps = 0;
        std::size_t j = i0;
        for (;;) {
            if (steps == state_.config.maxSlideBlocks) return finishSlide(steps, false);
            ++steps;
            if (state_.meta[j].offset == 0) return finishSlide(steps, false);
            if (j == 0) return finishSlide(steps, false); // no gap storage left of block 0
            if (state_.meta[j - 1].gap > 0) break;
            --j;
        }
        const std::size_t donor = j - 1;
        for (std::size_t b = j; b <= i0; ++b) {
            const std::int64_t src = blockEnd(state_, b);
            const std::int64_t dst = blockStart(state_, b) - 1;
            state_.slots[static_cast<std::size_t>(dst)] =
                state_.slots[static_cast<std::size_t>(src)];
            --state_.meta[b].offset;
            counters_.insertSlotsTouched += 2;
        }
        --state_.meta[donor].gap;
        ++state_.meta[i0].gap;
        ++counters_.leftSlideSuccesses;
        return finishSlide(steps, true);
    }

    // Drains the backyard and reinserts its elements block by block in
    // descending threshold-hash order, resetting thresholds to 0 wherever
    // everything fits. Elements already resident in the table are never
    // bumped by this. Equal-delta runs are placed all-or-nothing, since a
    // threshold cannot separate them.
    CleanReport backyardClean() {
        std::vector<Elem> drained = backyard_.drain();
        const std::size_t blocks = state_.config.numBlocks();
        for (std::size_t b = 0; b < blocks; ++b) state_.meta[b].threshold = 0;
        CleanReport rep;
        if (drained.empty()) return rep;

        // Deterministic processing order regardless of map iteration order.
        std::sort(drained.begin(), drained.end(), [&](const Elem& a, const Elem& b) {
            const std::size_t ba = hasher_.blockOf(a.key), bb = hasher_.blockOf(b.key);
            if (ba != bb) return ba < bb;
            const std::uint32_t da = hasher_.thresholdOf(a.key), db = hasher_.thresholdOf(b.key);
            if (da != db) return da > db;
            return a.key < b.key;
        });

        std::size_t lo = 0;
        while (lo < drained.size()) {
            const std::size_t home = hasher_.blockOf(drained[lo].key);
            std::size_t hi = lo;
            while (hi < drained.size() && hasher_.blockOf(drained[hi].key) == home) ++hi;

            std::size_t idx = lo;
            while (idx < hi) {
                const std::uint32_t d = hasher_.thresholdOf(drained[idx].key);
                std::size_t runEnd = idx;
                while (runEnd < hi && hasher_.thresholdOf(drained[runEnd].key) == d) ++runEnd;

                std::size_t placed = idx;
                while (placed < runEnd && tryPlaceForClean(home, drained[placed])) ++placed;
                if (placed == runEnd) {
                    rep.reinserted += runEnd - idx;
                    idx = runEnd;
                    continue;
                }
                // The run does not fit as a whole: take back what we placed,
                // raise the threshold past this run, and return the run plus
                // every remaining (lower-delta) element to the backyard.
                for (std::size_t p = idx; p < placed; ++p) unplaceFromBlock(home, drained[p].key);
                state_.meta[home].threshold = d + 1;
                for (std::size_t p = idx; p < hi; ++p) {
                    const bool added = backyard_.insert(drained[p]);
                    assert(added);
                    (void)added;
                }
                rep.stillBumped += hi - idx;
                break;
            }
            lo = hi;
        }
        return rep;
    }

    MetricsSnapshot stats() const {
        MetricsSnapshot s;
        const SlickConfig& cfg = state_.config;
        s.numSlots = cfg.numSlots;
        s.liveCount = state_.liveCount;
        s.bumpedCount = backyard_.size();
        s.emptyCells = emptySlots(state_);
        s.load = cfg.numSlots ? static_cast<double>(state_.liveCount) / cfg.numSlots : 0.0;
        const std::size_t blocks = cfg.numBlocks();
        for (std::size_t i = 0; i < blocks; ++i)
            s.maxOffset = std::max<std::size_t>(s.maxOffset, state_.meta[i].offset);
        // Bluster: within a maximal gapless run, the span from the first
        // offset-0 block to the last offset-maxOffset block; no gap can be
        // slid through it.
        std::size_t i = 0;
        while (i < blocks) {
            if (state_.meta[i].gap != 0) {
                ++i;
                continue;
            }
            std::size_t r = i;
            while (r + 1 < blocks && state_.meta[r + 1].gap == 0) ++r;
            std::size_t firstZero = blocks, lastMax = blocks;
            for (std::size_t b = i; b <= r; ++b) {
                if (firstZero == blocks && state_.meta[b].offset == 0) firstZero = b;
                if (state_.meta[b].offset == cfg.maxOffset) lastMax = b;
            }
            if (firstZero != blocks && lastMax != blocks && firstZero <= lastMax) {
                ++s.blusterCount;
                s.maxBlusterLen = std::max(s.maxBlusterLen, lastMax - firstZero + 1);
            }
            i = r + 1;
        }
        return s;
    }

    std::vector<std::string> validate() const { return validateState(state_); }

    // Full-scan membership audit on top of validate(): every resident element
    // sits in its home block with threshold hash >= the block threshold, every
    // backyard element is genuinely bumped, keys are unique across both, and
    // the live count adds up.
    std::vector<std::string> audit() const {
        std::vector<std::string> out = validate();
        if (!out.empty()) return out;
        const std::size_t blocks = state_.config.numBlocks();
        std::unordered_set<Key> seen;
        seen.reserve(state_.liveCount);
        std::size_t resident = 0;
        for (std::size_t i = 0; i < blocks; ++i) {
            const std::int64_t start = blockStart(state_, i);
            const std::int64_t end = blockEnd(state_, i);
            for (std::int64_t j = start; j <= end; ++j) {
                const Elem& e = state_.slots[static_cast<std::size_t>(j)];
                ++resident;
                if (hasher_.blockOf(e.key) != i)
                    out.push_back("slot " + std::to_string(j) + ": element not in its home block");
                if (hasher_.thresholdOf(e.key) < state_.meta[i].threshold)
                    out.push_back("slot " + std::to_string(j) +
                                  ": resident element is below the block threshold");
                if (!seen.insert(e.key).second)
                    out.push_back("slot " + std::to_string(j) + ": duplicate key");
            }
        }
        for (const auto& kv : backyard_.entries()) {
            const std::size_t home = hasher_.blockOf(kv.first);
            if (hasher_.thresholdOf(kv.first) >= state_.meta[home].threshold)
                out.push_back("backyard: element is not below its home-block threshold");
            if (!seen.insert(kv.first).second)
                out.push_back("backyard: key also present in the table");
        }
        if (resident + backyard_.size() != state_.liveCount)
            out.push_back("live count " + std::to_string(state_.liveCount) +
                          " != resident " + std::to_string(resident) + " + bumped " +
                          std::to_string(backyard_.size()));
        return out;
    }

    template <class Fn>
    void forEachElement(Fn&& fn) const {
        const std::size_t blocks = state_.config.numBlocks();
        for (std::size_t i = 0; i < blocks; ++i) {
            const std::int64_t end = blockEnd(state_, i);
            for (std::int64_t j = blockStart(state_, i); j <= end; ++j)
                fn(state_.slots[static_cast<std::size_t>(j)], /*bumped=*/false);
        }
        for (const auto& kv : backyard_.entries()) fn(kv.second, /*bumped=*/true);
    }

private:
    std::int64_t findSlotInBlock(std::size_t i, const Key& k, std::size_t& probes) const {
        const std::int64_t end = blockEnd(state_, i);
        for (std::int64_t j = blockStart(state_, i); j <= end; ++j) {
            ++probes;
            if (state_.slots[static_cast<std::size_t>(j)].key == k) return j;
        }
        return -1;
    }

    bool canGrowBlock(std::size_t i) const {
        const std::size_t size = blockSize(state_, i);
        if (size >= state_.config.maxBlockSize) return false;
        if (state_.config.luckooMode &&
            state_.meta[i].offset + size + 1 > 2 * state_.config.blockCapacity)
            return false;
        return true;
    }

    bool canSlideRight(std::size_t b) const {
        if (state_.meta[b].offset >= state_.config.maxOffset) return false;
        if (state_.config.luckooMode &&
            state_.meta[b].offset + 1 + blockSize(state_, b) > 2 * state_.config.blockCapacity)
            return false;
        return true;
    }

    // Existing gap, then slide left, then slide right. Left slides cannot
    // succeed before the first table-resident erase, so they are skipped
    // until then.
    bool openGapAfter(std::size_t i) {
        if (state_.meta[i].gap > 0) return true;
        if (hadTableErase_ && slideGapFromLeft(i)) return true;
        return slideGapFromRight(i);
    }

    std::uint32_t minThresholdWith(std::size_t i, std::uint32_t deltaOfNew) const {
        std::uint32_t m = deltaOfNew;
        const std::int64_t end = blockEnd(state_, i);
        for (std::int64_t j = blockStart(state_, i); j <= end; ++j)
            m = std::min(m, hasher_.thresholdOf(state_.slots[static_cast<std::size_t>(j)].key));
        counters_.insertSlotsTouched += static_cast<std::uint64_t>(end - blockStart(state_, i) + 1);
        return m;
    }

    // Moves every element of block i with threshold hash < t to the backyard.
    // The block end shrinks as the gap grows; the element swapped into slot j
    // is re-examined before j advances.
    void bumpBelow(std::size_t i, std::uint32_t t) {
        std::int64_t j = blockStart(state_, i);
        while (j <= blockEnd(state_, i)) {
            const Elem& e = state_.slots[static_cast<std::size_t>(j)];
            ++counters_.insertSlotsTouched;
            if (hasher_.thresholdOf(e.key) < t) {
                const bool added = backyard_.insert(e);
                assert(added);
                (void)added;
                state_.slots[static_cast<std::size_t>(j)] =
                    state_.slots[static_cast<std::size_t>(blockEnd(state_, i))];
                ++state_.meta[i].gap;
                ++counters_.bumpedByInsert;
                ++counters_.insertSlotsTouched;
            } else {
                ++j;
            }
        }
    }

    void appendToBlock(std::size_t i, const Elem& e) {
        assert(state_.meta[i].gap > 0);
        --state_.meta[i].gap;
        state_.slots[static_cast<std::size_t>(blockEnd(state_, i))] = e;
        ++counters_.insertSlotsTouched;
    }

    bool tryPlaceForClean(std::size_t i, const Elem& e) {
        if (!canGrowBlock(i)) return false;
        if (!(state_.meta[i].gap > 0 || (hadTableErase_ && slideGapFromLeft(i)) ||
              slideGapFromRight(i)))
            return false;
        appendToBlock(i, e);
        return true;
    }

    void unplaceFromBlock(std::size_t i, const Key& k) {
        std::size_t probes = 0;
        const std::int64_t j = findSlotInBlock(i, k, probes);
        assert(j >= 0);
        state_.slots[static_cast<std::size_t>(j)] =
            state_.slots[static_cast<std::size_t>(blockEnd(state_, i))];
        ++state_.meta[i].gap;
    }

    bool finishSlide(std::size_t steps, bool ok) {
        counters_.slideBlocksExamined += steps;
        if (ok) ++counters_.slideSuccesses;
        return ok;
    }

    State state_;
    Hasher hasher_;
    Backyard<Key, Value> backyard_;
    bool hadTableErase_ = false;
    mutable OpCounters counters_;
};

} // namespace slick
