#pragma once

// Linear-probing and Robin Hood open-addressing tables sharing the key and
// hash plumbing of the main structure. Both use backward-shift deletion, so
// long churn runs are not polluted by tombstone decay, and both need one
// reserved empty marker per slot (an optional wrapper) in deliberate
// contrast to the markerless sliding-block layout.

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slick/core.hpp"
#include "slick/hashing.hpp"

namespace slick {

enum class ProbeKind { LinearProbing, RobinHood };
enum class ProbeInsertOutcome { Inserted, AlreadyPresent, TableFull };

struct ProbeCounters {
    std::uint64_t finds = 0;
    std::uint64_t findHits = 0;
    std::uint64_t findMisses = 0;
    std::uint64_t findProbesOnHits = 0;
    std::uint64_t findProbesOnMisses = 0;
    std::uint64_t findMaxProbes = 0;
    std::uint64_t inserts = 0;
    std::uint64_t insertProbes = 0;
    std::uint64_t erases = 0;
};

template <class Key, class Value, class Bits = KeyBits<Key>>
class ProbingTable {
public:
    using Elem = Element<Key, Value>;

    ProbingTable(std::size_t numSlots, ProbeKind kind, std::uint64_t seed)
        : slots_(numSlots), kind_(kind), seed_(mix64(seed)) {
        assert(numSlots >= 1);
    }

    std::size_t capacity() const { return slots_.size(); }
    std::size_t size() const { return size_; }
    ProbeKind kind() const { return kind_; }

    const ProbeCounters& counters() const { return counters_; }
    void resetCounters() { counters_ = ProbeCounters{}; }

    std::size_t homeOf(const Key& k) const {
        return static_cast<std::size_t>(
            reduceToRange(hashBits(Bits{}(k), seed_), slots_.size()));
    }

    const Elem* find(const Key& k) const {
        ++counters_.finds;
        std::size_t probes = 0;
        const std::int64_t j = locate(k, probes);
        counters_.findMaxProbes = std::max(counters_.findMaxProbes,
                                           static_cast<std::uint64_t>(probes));
        if (j >= 0) {
            ++counters_.findHits;
            counters_.findProbesOnHits += probes;
            return &*slots_[static_cast<std::size_t>(j)];
        }
        ++counters_.findMisses;
        counters_.findProbesOnMisses += probes;
        return nullptr;
    }

    ProbeInsertOutcome insert(const Elem& e) {
        ++counters_.inserts;
        std::size_t probes = 0;
        if (locate(e.key, probes) >= 0) {
            counters_.insertProbes += probes;
            return ProbeInsertOutcome::AlreadyPresent;
        }
        counters_.insertProbes += probes;
        if (size_ == slots_.size()) return ProbeInsertOutcome::TableFull;
        const std::size_t m = slots_.size();
        if (kind_ == ProbeKind::LinearProbing) {
            std::size_t j = homeOf(e.key);
            while (slots_[j]) {
                j = j + 1 == m ? 0 : j + 1;
                ++counters_.insertProbes;
            }
            slots_[j] = e;
        } else {
            // Robin Hood: steal from any occupant closer to its home slot.
            Elem carry = e;
            std::size_t d = 0;
            std::size_t j = homeOf(carry.key);
            for (;;) {
                ++counters_.insertProbes;
                if (!slots_[j]) {
                    slots_[j] = std::move(carry);
                    break;
                }
                const std::size_t occD = displacement(j);
                if (occD < d) {
                    std::swap(carry, *slots_[j]);
                    d = occD;
                }
                j = j + 1 == m ? 0 : j + 1;
                ++d;
            }
        }
        ++size_;
        return ProbeInsertOutcome::Inserted;
    }

    bool erase(const Key& k) {
        ++counters_.erases;
        std::size_t probes = 0;
        const std::int64_t found = locate(k, probes);
        if (found < 0) return false;
        std::size_t j = static_cast<std::size_t>(found);
        const std::size_t m = slots_.size();
        slots_[j].reset();
        --size_;
        if (kind_ == ProbeKind::RobinHood) {
            // Shift the rest of the run back one slot until an element sits
            // at its home (or the run ends).
            std::size_t k2 = j + 1 == m ? 0 : j + 1;
            while (slots_[k2] && displacement(k2) > 0) {
                slots_[j] = std::move(*slots_[k2]);
                slots_[k2].reset();
                j = k2;
                k2 = k2 + 1 == m ? 0 : k2 + 1;
            }
        } else {
            // Backward-shift: pull any later run member whose home does not
            // lie strictly behind the hole.
            std::size_t k2 = j;
            for (;;) {
                k2 = k2 + 1 == m ? 0 : k2 + 1;
                if (!slots_[k2]) break;
                const std::size_t h = homeOf(slots_[k2]->key);
                const std::size_t distToHole = (j + m - h) % m;
                const std::size_t distToSlot = (k2 + m - h) % m;
                if (distToHole <= distToSlot) {
                    slots_[j] = std::move(*slots_[k2]);
                    slots_[k2].reset();
                    j = k2;
                }
            }
        }
        return true;
    }

    // Structural audit. Linear probing: every element must be reachable from
    // its home without crossing an empty slot. Robin Hood additionally keeps
    // each maximal occupied run sorted by home slot.
    std::vector<std::string> auditOrdering() const {
        std::vector<std::string> out;
        const std::size_t m = slots_.size();
        bool anyEmpty = false;
        for (std::size_t j = 0; j < m; ++j)
            if (!slots_[j]) {
                anyEmpty = true;
                break;
            }
        if (!anyEmpty) return out; // full table: runs are undefined
        for (std::size_t j = 0; j < m; ++j) {
            if (!slots_[j]) continue;
            const std::size_t h = homeOf(slots_[j]->key);
            for (std::size_t p = h; p != j; p = p + 1 == m ? 0 : p + 1)
                if (!slots_[p]) {
                    out.push_back("slot " + std::to_string(j) +
                                  ": unreachable from home " + std::to_string(h));
                    break;
                }
        }
        if (kind_ == ProbeKind::RobinHood) {
            // Home slots are non-decreasing within each maximal occupied run
            // (measured from the run start to break the cyclic ambiguity).
            for (std::size_t j = 0; j < m; ++j) {
                const std::size_t prev = j == 0 ? m - 1 : j - 1;
                if (!slots_[j] || !slots_[prev]) continue;
                const std::size_t runStart = runStartOf(j);
                const std::size_t homePrev = (homeOf(slots_[prev]->key) + m - runStart) % m;
                const std::size_t homeCur = (homeOf(slots_[j]->key) + m - runStart) % m;
                if (homeCur < homePrev)
                    out.push_back("slot " + std::to_string(j) +
                                  ": home order violated within run");
            }
        }
        return out;
    }

private:
    std::size_t displacement(std::size_t j) const {
        const std::size_t m = slots_.size();
        return (j + m - homeOf(slots_[j]->key)) % m;
    }

    std::size_t runStartOf(std::size_t j) const {
        const std::size_t m = slots_.size();
        std::size_t s = j;
        for (std::size_t guard = 0; guard < m; ++guard) {
            const std::size_t prev = s == 0 ? m - 1 : s - 1;
            if (!slots_[prev]) return s;
            s = prev;
        }
        return s;
    }

    std::int64_t locate(const Key& k, std::size_t& probes) const {
        const std::size_t m = slots_.size();
        std::size_t j = homeOf(k);
        for (std::size_t d = 0; d < m; ++d) {
            ++probes;
            if (!slots_[j]) return -1;
            if (slots_[j]->key == k) return static_cast<std::int64_t>(j);
            if (kind_ == ProbeKind::RobinHood && displacement(j) < d) return -1;
            j = j + 1 == m ? 0 : j + 1;
        }
        return -1; // full table, key absent
    }

    std::vector<std::optional<Elem>> slots_;
    std::size_t size_ = 0;
    ProbeKind kind_;
    std::uint64_t seed_;
    mutable ProbeCounters counters_;
};

} // namespace slick
