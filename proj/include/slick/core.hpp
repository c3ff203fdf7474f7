#pragma once

// Core types for the sliding-block hash table: tuning configuration,
// per-block metadata, the flat table state, and the block geometry
// arithmetic everything else is built on.
//
// Layout model: slot i*B.. of array T nominally belongs to block i, but a
// block may slide right by its offset o_i (bounded by maxOffset). Block i
// occupies the contiguous cells [blockStart(i), blockEnd(i)]; after it come
// gap_i unused cells, then block i+1 starts. A sentinel metadata entry at
// index m/B (always {0,0,0}) closes the last block against the table end.
// Cells covered by no block hold unspecified garbage and are never read;
// there is no reserved "empty element" value.

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace slick {

// Sentinel for "no limit on blocks examined per slide attempt".
inline constexpr std::size_t kUnlimitedSlide = std::numeric_limits<std::size_t>::max();

struct SlickConfig {
    std::size_t numSlots = 0;        // m, must be a positive multiple of blockCapacity
    std::size_t blockCapacity = 8;   // B, nominal elements per block
    std::size_t maxBlockSize = 16;   // elements a block may actually hold
    std::size_t maxOffset = 8;       // how far a block may slide right of i*B
    std::size_t thresholdRange = 8;  // threshold hash values are 0..thresholdRange-1
    std::size_t maxSlideBlocks = 16; // blocks examined per slide direction
    bool luckooMode = false;         // bind elements to cells [B*h, B*h+2B-1]
    std::uint64_t hashSeed = 0x9e3779b97f4a7c15ull;
    std::uint64_t thresholdSeed = 0xd1b54a32d192ed03ull;

    std::size_t numBlocks() const { return numSlots / blockCapacity; }
    // A gap can span a whole vacated block plus the next block's offset.
    std::size_t maxGap() const { return blockCapacity + maxOffset; }
};

// Capacity is rounded up to a multiple of B. Derived parameters follow the
// recommended choices: maxBlockSize = 2B, maxOffset = thresholdRange = B,
// maxSlideBlocks = maxBlockSize.
inline SlickConfig makeConfig(std::size_t capacity, std::size_t blockCapacity = 8) {
    assert(blockCapacity >= 1);
    SlickConfig cfg;
    cfg.blockCapacity = blockCapacity;
    cfg.numSlots = ((capacity + blockCapacity - 1) / blockCapacity) * blockCapacity;
    if (cfg.numSlots == 0) cfg.numSlots = blockCapacity;
    cfg.maxBlockSize = 2 * blockCapacity;
    cfg.maxOffset = blockCapacity;
    cfg.thresholdRange = blockCapacity;
    cfg.maxSlideBlocks = cfg.maxBlockSize;
    return cfg;
}

inline SlickConfig makeLuckooConfig(std::size_t capacity, std::size_t blockCapacity = 8) {
    SlickConfig cfg = makeConfig(capacity, blockCapacity);
    cfg.luckooMode = true; // requires maxOffset = B and maxBlockSize = 2B, already set
    return cfg;
}

inline std::vector<std::string> validateConfig(const SlickConfig& cfg) {
    std::vector<std::string> v;
    if (cfg.blockCapacity < 1) v.push_back("blockCapacity must be >= 1");
    if (cfg.numSlots == 0) v.push_back("numSlots must be positive");
    if (cfg.blockCapacity >= 1 && cfg.numSlots % cfg.blockCapacity != 0)
        v.push_back("numSlots must be a multiple of blockCapacity");
    if (cfg.maxBlockSize < cfg.blockCapacity)
        v.push_back("maxBlockSize must be >= blockCapacity");
    if (cfg.thresholdRange < 1) v.push_back("thresholdRange must be >= 1");
    if (cfg.luckooMode) {
        if (cfg.maxOffset != cfg.blockCapacity)
            v.push_back("luckooMode requires maxOffset == blockCapacity");
        if (cfg.maxBlockSize != 2 * cfg.blockCapacity)
            v.push_back("luckooMode requires maxBlockSize == 2 * blockCapacity");
    }
    return v;
}

inline void requireValidConfig(const SlickConfig& cfg) {
    auto v = validateConfig(cfg);
    if (!v.empty()) throw std::invalid_argument("invalid SlickConfig: " + v.front());
}

// Offset x gap x threshold triple; one per block plus the sentinel.
struct BlockMeta {
    std::uint32_t offset = 0;
    std::uint32_t gap = 0;
    std::uint32_t threshold = 0;

    friend bool operator==(const BlockMeta& a, const BlockMeta& b) {
        return a.offset == b.offset && a.gap == b.gap && a.threshold == b.threshold;
    }
};

template <class Key, class Value>
struct Element {
    Key key{};
    Value value{};

    friend bool operator==(const Element& a, const Element& b) {
        return a.key == b.key && a.value == b.value;
    }
};

template <class Key, class Value>
struct TableState {
    SlickConfig config;
    std::vector<Element<Key, Value>> slots; // numSlots entries, garbage outside blocks
    std::vector<BlockMeta> meta;            // numBlocks + 1 entries, last is the sentinel
    std::size_t liveCount = 0;              // elements in table plus backyard
};

template <class Key, class Value>
TableState<Key, Value> makeTableState(const SlickConfig& cfg) {
    requireValidConfig(cfg);
    TableState<Key, Value> st;
    st.config = cfg;
    st.slots.resize(cfg.numSlots);
    st.meta.assign(cfg.numBlocks() + 1, BlockMeta{});
    for (std::size_t i = 0; i < cfg.numBlocks(); ++i)
        st.meta[i].gap = static_cast<std::uint32_t>(cfg.blockCapacity);
    // meta[numBlocks] stays {0,0,0}: the sentinel
    return st;
}

template <class Key, class Value>
std::int64_t blockStart(const TableState<Key, Value>& st, std::size_t i) {
    assert(i < st.config.numBlocks());
    return static_cast<std::int64_t>(st.config.blockCapacity * i + st.meta[i].offset);
}

// May be blockStart(i) - 1 when the block is empty.
template <class Key, class Value>
std::int64_t blockEnd(const TableState<Key, Value>& st, std::size_t i) {
    assert(i < st.config.numBlocks());
    const std::int64_t b = static_cast<std::int64_t>(st.config.blockCapacity);
    return b * static_cast<std::int64_t>(i) + b + st.meta[i + 1].offset -
           static_cast<std::int64_t>(st.meta[i].gap) - 1;
}

// Signed size; negative only in corrupt states (validateState reports those).
template <class Key, class Value>
std::int64_t blockSizeSigned(const TableState<Key, Value>& st, std::size_t i) {
    const std::int64_t b = static_cast<std::int64_t>(st.config.blockCapacity);
    return b + st.meta[i + 1].offset - static_cast<std::int64_t>(st.meta[i].offset) -
           static_cast<std::int64_t>(st.meta[i].gap);
}

template <class Key, class Value>
std::size_t blockSize(const TableState<Key, Value>& st, std::size_t i) {
    const std::int64_t s = blockSizeSigned(st, i);
    assert(s >= 0);
    return static_cast<std::size_t>(s);
}

template <class Key, class Value>
std::size_t occupiedSlots(const TableState<Key, Value>& st) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < st.config.numBlocks(); ++i) n += blockSize(st, i);
    return n;
}

template <class Key, class Value>
std::size_t emptySlots(const TableState<Key, Value>& st) {
    return st.config.numSlots - occupiedSlots(st);
}

// Executable form of the structural invariants. Returns one human-readable
// descriptor per violation; an empty result means the state is well formed.
// Membership-level invariants (which keys belong where) live in
// SlickTable::audit, since they need the hash functions.
template <class Key, class Value>
std::vector<std::string> validateState(const TableState<Key, Value>& st) {
    std::vector<std::string> out;
    const SlickConfig& cfg = st.config;
    auto bad = [&](std::size_t i, const std::string& what) {
        out.push_back("block " + std::to_string(i) + ": " + what);
    };

    for (const auto& msg : validateConfig(cfg)) out.push_back("config: " + msg);
    if (!out.empty()) return out;

    const std::size_t blocks = cfg.numBlocks();
    if (st.slots.size() != cfg.numSlots)
        out.push_back("slot array has " + std::to_string(st.slots.size()) +
                      " entries, expected " + std::to_string(cfg.numSlots));
    if (st.meta.size() != blocks + 1) {
        out.push_back("metadata array has " + std::to_string(st.meta.size()) +
                      " entries, expected " + std::to_string(blocks + 1));
        return out;
    }
    if (!(st.meta[blocks] == BlockMeta{}))
        out.push_back("sentinel metadata is not (0,0,0)");

    std::size_t occupied = 0;
    for (std::size_t i = 0; i < blocks; ++i) {
        const BlockMeta& m = st.meta[i];
        if (m.offset > cfg.maxOffset)
            bad(i, "offset " + std::to_string(m.offset) + " exceeds bound " +
                       std::to_string(cfg.maxOffset));
        if (m.threshold > cfg.thresholdRange)
            bad(i, "threshold " + std::to_string(m.threshold) + " exceeds bound " +
                       std::to_string(cfg.thresholdRange));
        if (m.gap > cfg.maxGap())
            bad(i, "gap " + std::to_string(m.gap) + " exceeds bound " +
                       std::to_string(cfg.maxGap()));
        const std::int64_t size = blockSizeSigned(st, i);
        if (size < 0)
            bad(i, "negative size " + std::to_string(size));
        else if (static_cast<std::size_t>(size) > cfg.maxBlockSize)
            bad(i, "size " + std::to_string(size) + " exceeds bound " +
                       std::to_string(cfg.maxBlockSize));
        if (cfg.luckooMode && size >= 0 &&
            m.offset + static_cast<std::size_t>(size) > 2 * cfg.blockCapacity)
            bad(i, "offset + size exceeds 2B in luckoo mode");
        // Tiling: blocks and gaps partition the table exactly.
        const std::int64_t nextStart =
            i + 1 < blocks ? blockStart(st, i + 1)
                           : static_cast<std::int64_t>(cfg.numSlots);
        if (blockEnd(st, i) + static_cast<std::int64_t>(m.gap) + 1 != nextStart)
            bad(i, "geometry: end + gap + 1 != next start");
        if (size > 0) occupied += static_cast<std::size_t>(size);
    }
    if (blocks > 0 && blockEnd(st, blocks - 1) > static_cast<std::int64_t>(cfg.numSlots) - 1)
        bad(blocks - 1, "block extends past the table end");
    if (occupied + st.meta[0].offset > cfg.numSlots &&
        out.empty()) // conservation is implied by geometry; report only if somehow reached
        out.push_back("occupied cells exceed table size");
    return out;
}

} // namespace slick
