#pragma once

// Second-layer table holding bumped elements. Any associative map works
// here; a standard hash map is plenty since few elements should ever live
// in it. Insert never overwrites: the main table owns key uniqueness.

#include <cstddef>
#include <unordered_map>
#include <utility>
#include <vector>

#include "slick/core.hpp"

namespace slick {

template <class Key, class Value>
class Backyard {
public:
    using Elem = Element<Key, Value>;

    const Elem* find(const Key& k) const {
        auto it = entries_.find(k);
        return it == entries_.end() ? nullptr : &it->second;
    }

    // No-op (returns false) if the key is already present.
    bool insert(const Elem& e) {
        return entries_.emplace(e.key, e).second;
    }

    bool erase(const Key& k) { return entries_.erase(k) > 0; }

    // Removes and returns every stored element, in unspecified order.
    std::vector<Elem> drain() {
        std::vector<Elem> out;
        out.reserve(entries_.size());
        for (auto& kv : entries_) out.push_back(std::move(kv.second));
        entries_.clear();
        return out;
    }

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    const std::unordered_map<Key, Elem>& entries() const { return entries_; }

private:
    std::unordered_map<Key, Elem> entries_;
};

} // namespace slick
