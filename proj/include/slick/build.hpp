#pragma once

// Offline construction. greedyBuild sorts the input by (block, threshold
// hash) with two stable counting passes and then lays blocks out left to
// right in one sweep, bumping the cheapest elements of a block whenever the
// size bound, the table end, or the offset bound would be violated.
// optimalBuild replaces the greedy per-block choice with a dynamic program
// over (block, incoming offset) that minimizes the total number of bumps;
// equal threshold hashes are cut as a unit because a threshold cannot
// separate them.

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <utility>
#include <vector>

#include "slick/backyard.hpp"
#include "slick/core.hpp"
#include "slick/hashing.hpp"
#include "slick/table.hpp"

namespace slick {

struct BuildStats {
    std::uint64_t workTicks = 0; // element visits across sort + layout
    std::size_t bumped = 0;
};

template <class Key, class Value, class Hasher>
struct BuildResult {
    SlickTable<Key, Value, Hasher> table;
    BuildStats stats;
};

namespace detail {

template <class Key, class Value>
struct Tagged {
    Element<Key, Value> elem;
    std::uint32_t block = 0;
    std::uint32_t delta = 0;
};

// Stable LSD sort: counting pass by threshold hash, then by block.
// Deterministic and linear in n + numBlocks + thresholdRange.
template <class Key, class Value, class Hasher>
std::vector<Tagged<Key, Value>> sortTagged(std::vector<Element<Key, Value>> elements,
                                           const SlickConfig& cfg, const Hasher& hasher,
                                           std::uint64_t& ticks) {
    const std::size_t n = elements.size();
    std::vector<Tagged<Key, Value>> a(n), b(n);
    std::vector<std::size_t> deltaCount(cfg.thresholdRange + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        a[i].elem = std::move(elements[i]);
        a[i].block = static_cast<std::uint32_t>(hasher.blockOf(a[i].elem.key));
        a[i].delta = hasher.thresholdOf(a[i].elem.key);
        ++deltaCount[a[i].delta + 1];
        ++ticks;
    }
    for (std::size_t d = 1; d < deltaCount.size(); ++d) deltaCount[d] += deltaCount[d - 1];
    std::vector<std::size_t> blockCount(cfg.numBlocks() + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        b[deltaCount[a[i].delta]++] = std::move(a[i]);
        ++ticks;
    }
    for (std::size_t i = 0; i < n; ++i) ++blockCount[b[i].block + 1];
    for (std::size_t d = 1; d < blockCount.size(); ++d) blockCount[d] += blockCount[d - 1];
    for (std::size_t i = 0; i < n; ++i) {
        a[blockCount[b[i].block]++] = std::move(b[i]);
        ++ticks;
    }
    return a;
}

template <class Key, class Value, class Hasher>
BuildResult<Key, Value, Hasher> assemble(TableState<Key, Value> st, Hasher hasher,
                                         Backyard<Key, Value> by, BuildStats stats) {
    return BuildResult<Key, Value, Hasher>{
        SlickTable<Key, Value, Hasher>(std::move(st), std::move(hasher), std::move(by)), stats};
}

} // namespace detail

// Lexicographic (blockOf, thresholdOf) order, stable within ties.
template <class Key, class Value, class Hasher>
std::vector<Element<Key, Value>> sortByBlockThreshold(std::vector<Element<Key, Value>> elements,
                                                      const SlickConfig& cfg,
                                                      const Hasher& hasher) {
    std::uint64_t ticks = 0;
    auto tagged = detail::sortTagged(std::move(elements), cfg, hasher, ticks);
    std::vector<Element<Key, Value>> out;
    out.reserve(tagged.size());
    for (auto& t : tagged) out.push_back(std::move(t.elem));
    return out;
}

template <class Key, class Value, class Hasher = SeededHasher<Key>>
BuildResult<Key, Value, Hasher> greedyBuild(std::vector<Element<Key, Value>> elements,
                                            const SlickConfig& cfg, Hasher hasher) {
    requireValidConfig(cfg);
    BuildStats stats;
    const std::size_t n = elements.size();
    auto sorted = detail::sortTagged(std::move(elements), cfg, hasher, stats.workTicks);

    TableState<Key, Value> st = makeTableState<Key, Value>(cfg);
    Backyard<Key, Value> by;
    const std::int64_t B = static_cast<std::int64_t>(cfg.blockCapacity);
    const std::size_t blocks = cfg.numBlocks();
    std::int64_t o = 0;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < blocks; ++i) {
        ++stats.workTicks;
        std::size_t lo = pos;
        while (pos < n && sorted[pos].block == i) ++pos;
        const std::size_t hi = pos;

        std::uint32_t t = 0;
        const std::int64_t len = static_cast<std::int64_t>(hi - lo);
        const std::int64_t excess =
            std::max({len - static_cast<std::int64_t>(cfg.maxBlockSize),
                      o + B * static_cast<std::int64_t>(i) + len -
                          static_cast<std::int64_t>(cfg.numSlots),
                      o + len - B - static_cast<std::int64_t>(cfg.maxOffset)});
        // The previous block's table-end constraint caps the carried offset
        // at numSlots - i*B, so excess never exceeds the group length.
        assert(excess <= len);
        if (excess > 0) {
            for (std::int64_t j = 0; j < excess; ++j) {
                by.insert(sorted[lo].elem);
                ++lo;
                ++stats.workTicks;
            }
            t = sorted[lo - 1].delta + 1;
        }
        while (lo < hi && sorted[lo].delta < t) {
            by.insert(sorted[lo].elem);
            ++lo;
            ++stats.workTicks;
        }

        const std::int64_t s = static_cast<std::int64_t>(hi - lo);
        st.meta[i].offset = static_cast<std::uint32_t>(o);
        st.meta[i].gap = static_cast<std::uint32_t>(std::max<std::int64_t>(0, B - o - s));
        st.meta[i].threshold = t;
        for (std::int64_t j = 0; j < s; ++j) {
            st.slots[static_cast<std::size_t>(B * static_cast<std::int64_t>(i) + o + j)] =
                std::move(sorted[lo + static_cast<std::size_t>(j)].elem);
            ++stats.workTicks;
        }
        o = std::max<std::int64_t>(0, o + s - B);
    }
    st.liveCount = n;
    stats.bumped = by.size();
    assert(validateState(st).empty());
    return detail::assemble(std::move(st), std::move(hasher), std::move(by), stats);
}

// Minimum-bump placement via dynamic programming over the incoming offset of
// each block. Transitions cut a prefix of each block's delta-sorted elements
// at a delta-group boundary; the bump count can only beat greedyBuild, never
// trail it, since the greedy choice is one of the enumerated cuts.
template <class Key, class Value, class Hasher = SeededHasher<Key>>
BuildResult<Key, Value, Hasher> optimalBuild(std::vector<Element<Key, Value>> elements,
                                             const SlickConfig& cfg, Hasher hasher) {
    requireValidConfig(cfg);
    BuildStats stats;
    const std::size_t n = elements.size();
    auto sorted = detail::sortTagged(std::move(elements), cfg, hasher, stats.workTicks);

    const std::size_t blocks = cfg.numBlocks();
    const std::size_t offsets = cfg.maxOffset + 1;
    const std::int64_t B = static_cast<std::int64_t>(cfg.blockCapacity);
    constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();

    std::vector<std::size_t> groupLo(blocks + 1, 0);
    {
        std::size_t pos = 0;
        for (std::size_t i = 0; i < blocks; ++i) {
            groupLo[i] = pos;
            while (pos < n && sorted[pos].block == i) ++pos;
        }
        groupLo[blocks] = pos;
    }

    struct Choice {
        std::uint32_t offsetIn = 0;
        std::uint32_t cut = 0;
    };
    std::vector<std::size_t> dp(offsets, kInf), next(offsets);
    std::vector<Choice> choice(blocks * offsets);
    dp[0] = 0;

    std::vector<std::size_t> cuts; // feasible prefix lengths for one block
    for (std::size_t i = 0; i < blocks; ++i) {
        const std::size_t lo = groupLo[i], hi = groupLo[i + 1];
        const std::size_t len = hi - lo;
        cuts.clear();
        cuts.push_back(0);
        for (std::size_t c = 1; c <= len; ++c)
            if (c == len || sorted[lo + c].delta != sorted[lo + c - 1].delta) cuts.push_back(c);

        std::fill(next.begin(), next.end(), kInf);
        for (std::size_t oIn = 0; oIn < offsets; ++oIn) {
            if (dp[oIn] == kInf) continue;
            for (std::size_t c : cuts) {
                const std::int64_t s = static_cast<std::int64_t>(len - c);
                if (s > static_cast<std::int64_t>(cfg.maxBlockSize)) continue;
                if (static_cast<std::int64_t>(oIn) + B * static_cast<std::int64_t>(i) + s >
                    static_cast<std::int64_t>(cfg.numSlots))
                    continue;
                const std::int64_t oOut =
                    std::max<std::int64_t>(0, static_cast<std::int64_t>(oIn) + s - B);
                if (oOut > static_cast<std::int64_t>(cfg.maxOffset)) continue;
                const std::size_t cost = dp[oIn] + c;
                if (cost < next[static_cast<std::size_t>(oOut)]) {
                    next[static_cast<std::size_t>(oOut)] = cost;
                    choice[i * offsets + static_cast<std::size_t>(oOut)] = {
                        static_cast<std::uint32_t>(oIn), static_cast<std::uint32_t>(c)};
                }
            }
        }
        dp.swap(next);
    }
    // Bumping a whole block is always feasible, so the end state is reachable;
    // the last block's table-end constraint forces its outgoing offset to 0.
    assert(dp[0] != kInf);

    std::vector<Choice> plan(blocks);
    std::size_t oOut = 0;
    for (std::size_t i = blocks; i-- > 0;) {
        plan[i] = choice[i * offsets + oOut];
        oOut = plan[i].offsetIn;
    }

    TableState<Key, Value> st = makeTableState<Key, Value>(cfg);
    Backyard<Key, Value> by;
    for (std::size_t i = 0; i < blocks; ++i) {
        const std::size_t lo = groupLo[i], hi = groupLo[i + 1];
        const std::size_t c = plan[i].cut;
        const std::int64_t o = plan[i].offsetIn;
        const std::int64_t s = static_cast<std::int64_t>(hi - lo - c);
        for (std::size_t j = lo; j < lo + c; ++j) {
            by.insert(sorted[j].elem);
            ++stats.workTicks;
        }
        st.meta[i].offset = static_cast<std::uint32_t>(o);
        st.meta[i].gap = static_cast<std::uint32_t>(std::max<std::int64_t>(0, B - o - s));
        st.meta[i].threshold = c == 0 ? 0 : sorted[lo + c - 1].delta + 1;
        for (std::int64_t j = 0; j < s; ++j) {
            st.slots[static_cast<std::size_t>(B * static_cast<std::int64_t>(i) + o + j)] =
                std::move(sorted[lo + c + static_cast<std::size_t>(j)].elem);
            ++stats.workTicks;
        }
    }
    st.liveCount = n;
    stats.bumped = by.size();
    assert(validateState(st).empty());
    return detail::assemble(std::move(st), std::move(hasher), std::move(by), stats);
}

} // namespace slick
