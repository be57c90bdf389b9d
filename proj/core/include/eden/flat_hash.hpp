#pragma once

#include <cstdint>
#include <vector>

namespace eden {

// Open-addressing hash set/map over 64-bit keys with linear probing and
// backward-shift deletion.  The all-ones key is reserved as the empty slot
// marker (packed cell keys never produce it).  Much faster than the node
// based standard containers in the per-step hot loop.

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

template <typename Value>
class FlatMap64 {
public:
    static constexpr std::uint64_t kEmpty = ~std::uint64_t{0};

    FlatMap64() { rehash(64); }

    void clear() {
        keys_.assign(keys_.size(), kEmpty);
        size_ = 0;
    }

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    bool contains(std::uint64_t k) const { return find_slot(k) != npos; }

    const Value* find(std::uint64_t k) const {
        const std::size_t s = find_slot(k);
        return s == npos ? nullptr : &vals_[s];
    }
    Value* find(std::uint64_t k) {
        const std::size_t s = find_slot(k);
        return s == npos ? nullptr : &vals_[s];
    }

    // Insert-or-assign; returns true when the key was newly inserted.
    bool insert(std::uint64_t k, const Value& v) {
        if ((size_ + 1) * 10 >= keys_.size() * 7) rehash(keys_.size() * 2);
        std::size_t i = probe_start(k);
        while (keys_[i] != kEmpty) {
            if (keys_[i] == k) {
                vals_[i] = v;
                return false;
            }
            i = next(i);
        }
        keys_[i] = k;
        vals_[i] = v;
        ++size_;
        return true;
    }

    // Insert only if absent; an existing value is left untouched.
    bool emplace(std::uint64_t k, const Value& v) {
        if ((size_ + 1) * 10 >= keys_.size() * 7) rehash(keys_.size() * 2);
        std::size_t i = probe_start(k);
        while (keys_[i] != kEmpty) {
            if (keys_[i] == k) return false;
            i = next(i);
        }
        keys_[i] = k;
        vals_[i] = v;
        ++size_;
        return true;
    }

    bool erase(std::uint64_t k) {
        std::size_t i = find_slot(k);
        if (i == npos) return false;
        // Backward-shift deletion keeps probe chains intact.
        std::size_t j = i;
        for (;;) {
            j = next(j);
            if (keys_[j] == kEmpty) break;
            const std::size_t home = probe_start(keys_[j]);
            // Can slot j legally move into the hole at i?
            const bool wraps = i <= j ? (home > i && home <= j) : (home > i || home <= j);
            if (!wraps) {
                keys_[i] = keys_[j];
                vals_[i] = vals_[j];
                i = j;
            }
        }
        keys_[i] = kEmpty;
        --size_;
        return true;
    }

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (std::size_t i = 0; i < keys_.size(); ++i)
            if (keys_[i] != kEmpty) fn(keys_[i], vals_[i]);
    }

    void reserve(std::size_t n) {
        std::size_t want = 64;
        while (n * 10 >= want * 7) want *= 2;
        if (want > keys_.size()) rehash(want);
    }

private:
    static constexpr std::size_t npos = ~std::size_t{0};

    std::size_t probe_start(std::uint64_t k) const { return mix64(k) & (keys_.size() - 1); }
    std::size_t next(std::size_t i) const { return (i + 1) & (keys_.size() - 1); }

    std::size_t find_slot(std::uint64_t k) const {
        std::size_t i = probe_start(k);
        while (keys_[i] != kEmpty) {
            if (keys_[i] == k) return i;
            i = next(i);
        }
        return npos;
    }

    void rehash(std::size_t n) {
        std::vector<std::uint64_t> old_keys = std::move(keys_);
        std::vector<Value> old_vals = std::move(vals_);
        keys_.assign(n, kEmpty);
        vals_.assign(n, Value{});
        size_ = 0;
        for (std::size_t i = 0; i < old_keys.size(); ++i)
            if (old_keys[i] != kEmpty) insert(old_keys[i], old_vals[i]);
    }

    std::vector<std::uint64_t> keys_;
    std::vector<Value> vals_;
    std::size_t size_ = 0;
};

class FlatSet64 {
public:
    void clear() { map_.clear(); }
    std::size_t size() const { return map_.size(); }
    bool empty() const { return map_.empty(); }
    bool contains(std::uint64_t k) const { return map_.contains(k); }
    bool insert(std::uint64_t k) { return map_.insert(k, 0); }
    bool erase(std::uint64_t k) { return map_.erase(k); }
    void reserve(std::size_t n) { map_.reserve(n); }

    template <typename Fn>
    void for_each(Fn&& fn) const {
        map_.for_each([&](std::uint64_t k, unsigned char) { fn(k); });
    }

private:
    FlatMap64<unsigned char> map_;
};

}  // namespace eden
