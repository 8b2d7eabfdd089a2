#ifndef RNK_KNN_H_
#define RNK_KNN_H_

#include <algorithm>
#include <vector>

#include "rnk/types.h"

namespace rnk {

// Ordered (object, network distance) pairs, ascending (distance, id).
using KnnResult = std::vector<KnnEntry>;

inline bool knn_entry_less(const KnnEntry& a, const KnnEntry& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.vertex < b.vertex;
}

// Canonical answer from a superset of candidates that is complete up to and
// including the kth distance: sort by (distance, id), keep the first k. Every
// method funnels through this so cross-method equality is id-exact.
inline KnnResult finalize_candidates(std::vector<KnnEntry>& candidates, std::size_t k) {
    std::sort(candidates.begin(), candidates.end(), knn_entry_less);
    if (candidates.size() > k) candidates.resize(k);
    return std::move(candidates);
}

// Max-heap of up to `capacity` candidates by (distance, id); the root is the
// current worst, so the kth-distance bound D_k reads off the top once full.
// Offering an entry that ties the root on distance but has a smaller id
// replaces it, keeping id ties canonical.
class CandidateHeap {
public:
    explicit CandidateHeap(std::size_t capacity) : capacity_(capacity) {}

    bool full() const { return heap_.size() == capacity_; }
    std::size_t size() const { return heap_.size(); }
    Distance d_k() const { return full() && capacity_ > 0 ? heap_.front().distance : kInfDistance; }

    void offer(KnnEntry e) {
        if (capacity_ == 0) return;
        if (!full()) {
            heap_.push_back(e);
            std::push_heap(heap_.begin(), heap_.end(), knn_entry_less);
        } else if (knn_entry_less(e, heap_.front())) {
            std::pop_heap(heap_.begin(), heap_.end(), knn_entry_less);
            heap_.back() = e;
            std::push_heap(heap_.begin(), heap_.end(), knn_entry_less);
        }
    }

    KnnResult finalize() {
        return finalize_candidates(heap_, capacity_);
    }

private:
    std::size_t capacity_;
    std::vector<KnnEntry> heap_;
};

}  // namespace rnk

#endif  // RNK_KNN_H_
