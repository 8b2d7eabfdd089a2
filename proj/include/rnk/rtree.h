#ifndef RNK_RTREE_H_
#define RNK_RTREE_H_

#include <cstdint>
#include <vector>

#include "rnk/graph.h"
#include "rnk/object_set.h"
#include "rnk/search.h"
#include "rnk/types.h"

namespace rnk {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Rect {
    double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;

    double min_dist2(Point p) const {
        const double dx = p.x < min_x ? min_x - p.x : (p.x > max_x ? p.x - max_x : 0.0);
        const double dy = p.y < min_y ? min_y - p.y : (p.y > max_y ? p.y - max_y : 0.0);
        return dx * dx + dy * dy;
    }
    bool contains(Point p) const {
        return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
    }
};

// Static R-tree over object points, bulk-loaded by sort-tile-recursive
// packing. Nodes live in one array; leaves reference entry ranges.
class RTree {
public:
    struct Node {
        Rect rect;
        std::uint32_t first = 0;  // child node index, or entry index for leaves
        std::uint32_t count = 0;
        bool leaf = false;
    };
    struct Entry {
        Point point;
        Vertex object;
    };

    RTree(const ObjectSet& objects, const CoordinateTable& coords, std::size_t node_capacity = 64);

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Entry>& entries() const { return entries_; }
    std::uint32_t root() const { return root_; }
    std::size_t object_count() const { return entries_.size(); }
    std::size_t byte_size() const {
        return nodes_.size() * sizeof(Node) + entries_.size() * sizeof(Entry);
    }

private:
    std::vector<Node> nodes_;
    std::vector<Entry> entries_;
    std::uint32_t root_ = 0;
};

// Resumable best-first Euclidean NN search; emits every object exactly once
// in non-decreasing distance, ties by ascending object id.
class NNCursor {
public:
    NNCursor(const RTree& tree, Point query);

    // Returns false when exhausted.
    bool next(Vertex& object, double& distance);

    // Lower bound on the distance of everything not yet emitted; false when
    // exhausted.
    bool peek(double& distance) const;

private:
    struct QueueEntry {
        double key;
        std::uint64_t tag;  // entries sort before nodes at equal distance
        bool operator>(const QueueEntry& other) const;
    };

    const RTree& tree_;
    Point query_;
    std::vector<QueueEntry> heap_;

    void push(QueueEntry e);
    QueueEntry pop();
};

// Quadtree over object coordinates storing per-node object counts; leaves
// split above `leaf_capacity` objects unless all points coincide.
class ObjectHierarchy {
public:
    struct Node {
        Rect block;
        std::uint32_t count = 0;
        std::int32_t first_child = -1;  // 4 consecutive children, or -1 for leaf
        std::uint32_t first_entry = 0;  // leaf object range
    };

    ObjectHierarchy(const ObjectSet& objects, const CoordinateTable& coords, std::size_t leaf_capacity = 500);

    const std::vector<Node>& nodes() const { return nodes_; }
    std::uint32_t root() const { return 0; }
    bool is_leaf(std::uint32_t n) const { return nodes_[n].first_child < 0; }
    // Objects of a leaf, ascending id.
    std::span<const Vertex> leaf_objects(std::uint32_t n) const {
        return {leaf_entries_.data() + nodes_[n].first_entry, nodes_[n].count};
    }
    Point object_point(Vertex v) const;
    std::size_t object_count() const { return leaf_entries_.size(); }

private:
    std::vector<Node> nodes_;
    std::vector<Vertex> leaf_entries_;
    const CoordinateTable* coords_;
};

}  // namespace rnk

#endif  // RNK_RTREE_H_
