#ifndef RNK_SEARCH_H_
#define RNK_SEARCH_H_

#include <cassert>
#include <cstdint>
#include <vector>

#include "rnk/types.h"

namespace rnk {

// Binary heap of (key, id) pairs stored inline in one array. Keys are never
// decreased; duplicate ids are allowed and callers skip stale pops via a
// SettledSet.
class MinQueue {
public:
    struct Entry {
        Distance key;
        std::uint64_t id;
    };

    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }
    void clear() { heap_.clear(); }

    void push(Distance key, std::uint64_t id) {
        heap_.push_back(Entry{key, id});
        sift_up(heap_.size() - 1);
    }

    const Entry& top() const {
        assert(!heap_.empty());
        return heap_.front();
    }

    Entry pop_min() {
        assert(!heap_.empty());
        Entry min = heap_.front();
        heap_.front() = heap_.back();
        heap_.pop_back();
        if (!heap_.empty()) sift_down(0);
        return min;
    }

private:
    void sift_up(std::size_t i) {
        Entry e = heap_[i];
        while (i > 0) {
            std::size_t parent = (i - 1) / 2;
            if (heap_[parent].key <= e.key) break;
            heap_[i] = heap_[parent];
            i = parent;
        }
        heap_[i] = e;
    }

    void sift_down(std::size_t i) {
        Entry e = heap_[i];
        const std::size_t n = heap_.size();
        for (;;) {
            std::size_t child = 2 * i + 1;
            if (child >= n) break;
            if (child + 1 < n && heap_[child + 1].key < heap_[child].key) ++child;
            if (heap_[child].key >= e.key) break;
            heap_[i] = heap_[child];
            i = child;
        }
        heap_[i] = e;
    }

    std::vector<Entry> heap_;
};

// One bit per vertex plus a dirty list so that small searches do not pay the
// full |V|-word clear on reset. Falls back to a full clear once more than
// |V|/64 ids were marked.
class SettledSet {
public:
    SettledSet() = default;
    explicit SettledSet(std::size_t n) { resize(n); }

    void resize(std::size_t n) {
        n_ = n;
        bits_.assign((n + 63) / 64, 0);
        dirty_.clear();
        dirty_.reserve(dirty_limit());
        overflowed_ = false;
    }

    std::size_t size() const { return n_; }

    void mark(std::uint32_t id) {
        assert(id < n_);
        std::uint64_t& word = bits_[id >> 6];
        const std::uint64_t bit = std::uint64_t{1} << (id & 63);
        if (word & bit) return;
        word |= bit;
        if (!overflowed_) {
            if (dirty_.size() < dirty_limit()) {
                dirty_.push_back(id);
            } else {
                overflowed_ = true;
            }
        }
    }

    bool query(std::uint32_t id) const {
        assert(id < n_);
        return (bits_[id >> 6] >> (id & 63)) & 1;
    }

    void reset() {
        if (overflowed_) {
            std::fill(bits_.begin(), bits_.end(), 0);
            overflowed_ = false;
        } else {
            for (std::uint32_t id : dirty_) bits_[id >> 6] &= ~(std::uint64_t{1} << (id & 63));
        }
        dirty_.clear();
    }

private:
    std::size_t dirty_limit() const { return n_ / 64 + 1; }

    std::size_t n_ = 0;
    std::vector<std::uint64_t> bits_;
    std::vector<std::uint32_t> dirty_;
    bool overflowed_ = false;
};

}  // namespace rnk

#endif  // RNK_SEARCH_H_
