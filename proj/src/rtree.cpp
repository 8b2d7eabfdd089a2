#include "rnk/rtree.h"

#include <algorithm>
#include <cmath>

namespace rnk {

namespace {

Rect rect_of_points(const std::vector<RTree::Entry>& entries, std::size_t first, std::size_t count) {
    Rect r{entries[first].point.x, entries[first].point.y, entries[first].point.x, entries[first].point.y};
    for (std::size_t i = first + 1; i < first + count; ++i) {
        r.min_x = std::min(r.min_x, entries[i].point.x);
        r.min_y = std::min(r.min_y, entries[i].point.y);
        r.max_x = std::max(r.max_x, entries[i].point.x);
        r.max_y = std::max(r.max_y, entries[i].point.y);
    }
    return r;
}

Rect rect_union(Rect a, Rect b) {
    return {std::min(a.min_x, b.min_x), std::min(a.min_y, b.min_y), std::max(a.max_x, b.max_x),
            std::max(a.max_y, b.max_y)};
}

}  // namespace

RTree::RTree(const ObjectSet& objects, const CoordinateTable& coords, std::size_t node_capacity) {
    if (objects.size() == 0) throw FormatError("R-tree over empty object set");
    if (node_capacity < 2) throw FormatError("R-tree node capacity must be at least 2");
    entries_.reserve(objects.size());
    for (Vertex v : objects.ids) entries_.push_back({{coords.x[v], coords.y[v]}, v});

    // Sort-tile-recursive packing: sort by x, cut into vertical strips of
    // sqrt(#leaves) runs, sort each strip by y, pack leaves in order.
    const std::size_t cap = node_capacity;
    auto str_pack = [&](auto&& sort_x, auto&& sort_y, std::size_t n, auto&& emit) {
        const std::size_t leaves = (n + cap - 1) / cap;
        const std::size_t strips = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(leaves))));
        const std::size_t strip_size = strips * cap;
        sort_x(0, n);
        for (std::size_t s = 0; s * strip_size < n; ++s) {
            const std::size_t lo = s * strip_size;
            const std::size_t hi = std::min(n, lo + strip_size);
            sort_y(lo, hi);
            for (std::size_t f = lo; f < hi; f += cap) emit(f, std::min(hi, f + cap) - f);
        }
    };

    str_pack(
        [&](std::size_t lo, std::size_t hi) {
            std::sort(entries_.begin() + lo, entries_.begin() + hi, [](const Entry& a, const Entry& b) {
                return a.point.x != b.point.x ? a.point.x < b.point.x
                       : a.point.y != b.point.y ? a.point.y < b.point.y
                                                : a.object < b.object;
            });
        },
        [&](std::size_t lo, std::size_t hi) {
            std::sort(entries_.begin() + lo, entries_.begin() + hi, [](const Entry& a, const Entry& b) {
                return a.point.y != b.point.y ? a.point.y < b.point.y
                       : a.point.x != b.point.x ? a.point.x < b.point.x
                                                : a.object < b.object;
            });
        },
        entries_.size(),
        [&](std::size_t first, std::size_t count) {
            Node leaf;
            leaf.rect = rect_of_points(entries_, first, count);
            leaf.first = static_cast<std::uint32_t>(first);
            leaf.count = static_cast<std::uint32_t>(count);
            leaf.leaf = true;
            nodes_.push_back(leaf);
        });

    // Pack upper levels the same way over node center points.
    std::vector<std::uint32_t> level(nodes_.size());
    for (std::size_t i = 0; i < level.size(); ++i) level[i] = static_cast<std::uint32_t>(i);
    while (level.size() > 1) {
        auto center = [&](std::uint32_t n) -> Point {
            const Rect& r = nodes_[n].rect;
            return {(r.min_x + r.max_x) / 2, (r.min_y + r.max_y) / 2};
        };
        std::vector<std::uint32_t> next;
        str_pack(
            [&](std::size_t lo, std::size_t hi) {
                std::sort(level.begin() + lo, level.begin() + hi, [&](std::uint32_t a, std::uint32_t b) {
                    const Point pa = center(a), pb = center(b);
                    return pa.x != pb.x ? pa.x < pb.x : (pa.y != pb.y ? pa.y < pb.y : a < b);
                });
            },
            [&](std::size_t lo, std::size_t hi) {
                std::sort(level.begin() + lo, level.begin() + hi, [&](std::uint32_t a, std::uint32_t b) {
                    const Point pa = center(a), pb = center(b);
                    return pa.y != pb.y ? pa.y < pb.y : (pa.x != pb.x ? pa.x < pb.x : a < b);
                });
            },
            level.size(),
            [&](std::size_t first, std::size_t count) {
                // children must sit consecutively; copy this run to the end
                const std::uint32_t child_base = static_cast<std::uint32_t>(nodes_.size());
                Node inner;
                inner.rect = nodes_[level[first]].rect;
                for (std::size_t i = 0; i < count; ++i) {
                    nodes_.push_back(nodes_[level[first + i]]);
                    inner.rect = rect_union(inner.rect, nodes_[level[first + i]].rect);
                }
                inner.first = child_base;
                inner.count = static_cast<std::uint32_t>(count);
                inner.leaf = false;
                nodes_.push_back(inner);
                next.push_back(static_cast<std::uint32_t>(nodes_.size() - 1));
            });
        level = std::move(next);
    }
    root_ = level[0];
}

bool NNCursor::QueueEntry::operator>(const QueueEntry& other) const {
    return key != other.key ? key > other.key : tag > other.tag;
}

NNCursor::NNCursor(const RTree& tree, Point query) : tree_(tree), query_(query) {
    push({tree.nodes()[tree.root()].rect.min_dist2(query), tree.root()});
}

void NNCursor::push(QueueEntry e) {
    heap_.push_back(e);
    std::push_heap(heap_.begin(), heap_.end(), std::greater<>());
}

NNCursor::QueueEntry NNCursor::pop() {
    std::pop_heap(heap_.begin(), heap_.end(), std::greater<>());
    QueueEntry e = heap_.back();
    heap_.pop_back();
    return e;
}

bool NNCursor::next(Vertex& object, double& distance) {
    // Nodes sort before entries at equal key, so every object at the current
    // distance is already enqueued before any of them is emitted; entry ties
    // then resolve by ascending object id.
    constexpr std::uint64_t kEntryBit = std::uint64_t{1} << 63;
    while (!heap_.empty()) {
        const QueueEntry e = pop();
        if (e.tag & kEntryBit) {
            object = static_cast<Vertex>(e.tag & ~kEntryBit);
            distance = std::sqrt(e.key);
            return true;
        }
        const RTree::Node& node = tree_.nodes()[static_cast<std::uint32_t>(e.tag)];
        if (node.leaf) {
            for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
                const RTree::Entry& entry = tree_.entries()[i];
                const double dx = entry.point.x - query_.x, dy = entry.point.y - query_.y;
                push({dx * dx + dy * dy, kEntryBit | entry.object});
            }
        } else {
            for (std::uint32_t i = node.first; i < node.first + node.count; ++i)
                push({tree_.nodes()[i].rect.min_dist2(query_), i});
        }
    }
    return false;
}

bool NNCursor::peek(double& distance) const {
    if (heap_.empty()) return false;
    distance = std::sqrt(heap_.front().key);
    return true;
}

ObjectHierarchy::ObjectHierarchy(const ObjectSet& objects, const CoordinateTable& coords,
                                 std::size_t leaf_capacity)
    : coords_(&coords) {
    if (objects.size() == 0) throw FormatError("object hierarchy over empty object set");
    Rect bounds{coords.x[objects.ids[0]], coords.y[objects.ids[0]], coords.x[objects.ids[0]],
                coords.y[objects.ids[0]]};
    for (Vertex v : objects.ids) {
        bounds.min_x = std::min(bounds.min_x, coords.x[v]);
        bounds.min_y = std::min(bounds.min_y, coords.y[v]);
        bounds.max_x = std::max(bounds.max_x, coords.x[v]);
        bounds.max_y = std::max(bounds.max_y, coords.y[v]);
    }

    struct Work {
        std::uint32_t node;
        std::vector<Vertex> members;
        int depth;
    };
    nodes_.push_back(Node{bounds, static_cast<std::uint32_t>(objects.size()), -1, 0});
    std::vector<Work> stack;
    stack.push_back({0, objects.ids, 0});
    while (!stack.empty()) {
        Work w = std::move(stack.back());
        stack.pop_back();
        Node& node = nodes_[w.node];
        const bool coincident = [&] {
            for (Vertex v : w.members)
                if (coords.x[v] != coords.x[w.members[0]] || coords.y[v] != coords.y[w.members[0]])
                    return false;
            return true;
        }();
        if (w.members.size() <= leaf_capacity || coincident || w.depth >= 60) {
            node.first_entry = static_cast<std::uint32_t>(leaf_entries_.size());
            leaf_entries_.insert(leaf_entries_.end(), w.members.begin(), w.members.end());
            continue;
        }
        const Rect b = node.block;
        const double mid_x = (b.min_x + b.max_x) / 2, mid_y = (b.min_y + b.max_y) / 2;
        const Rect quads[4] = {{b.min_x, b.min_y, mid_x, mid_y},
                               {mid_x, b.min_y, b.max_x, mid_y},
                               {b.min_x, mid_y, mid_x, b.max_y},
                               {mid_x, mid_y, b.max_x, b.max_y}};
        std::vector<Vertex> parts[4];
        for (Vertex v : w.members) {
            const int qi = (coords.x[v] >= mid_x ? 1 : 0) | (coords.y[v] >= mid_y ? 2 : 0);
            parts[qi].push_back(v);
        }
        const std::int32_t child_base = static_cast<std::int32_t>(nodes_.size());
        nodes_[w.node].first_child = child_base;
        for (int qi = 0; qi < 4; ++qi)
            nodes_.push_back(Node{quads[qi], static_cast<std::uint32_t>(parts[qi].size()), -1, 0});
        for (int qi = 0; qi < 4; ++qi) {
            if (!parts[qi].empty())
                stack.push_back({static_cast<std::uint32_t>(child_base + qi), std::move(parts[qi]),
                                 w.depth + 1});
        }
    }
}

Point ObjectHierarchy::object_point(Vertex v) const {
    return {coords_->x[v], coords_->y[v]};
}

}  // namespace rnk
