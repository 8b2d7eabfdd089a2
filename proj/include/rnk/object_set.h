#ifndef RNK_OBJECT_SET_H_
#define RNK_OBJECT_SET_H_

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rnk/graph.h"
#include "rnk/types.h"

namespace rnk {

enum class ObjectKind : std::uint8_t { kUniform = 0, kClustered = 1, kMinDist = 2, kFile = 3 };

const char* object_kind_name(ObjectKind kind);

// Immutable set of object (POI) vertices, decoupled from every index.
struct ObjectSet {
    std::vector<Vertex> ids;  // sorted, unique
    double density = 0.0;     // |O| / |V|
    ObjectKind kind = ObjectKind::kFile;
    std::uint64_t seed = 0;

    std::size_t size() const { return ids.size(); }
    bool contains(Vertex v) const;
};

// max(1, round(d * |V|)) distinct vertices, uniform without replacement.
ObjectSet gen_uniform(const Graph& g, double density, std::uint64_t seed);

// `clusters` random centers, each expanded in network-distance order to
// max_size vertices; overlapping clusters are deduplicated.
ObjectSet gen_clustered(const Graph& g, std::size_t clusters, std::size_t max_size, std::uint64_t seed);

// Vertex nearest the coordinate mean; ties by lowest id.
Vertex euclidean_centre_vertex(const CoordinateTable& coords);

// `size` vertices at network distance >= D_max / 2^(m - i + 1) from the
// centre vertex, where D_max is the network eccentricity of the centre.
// Throws FormatError when fewer vertices qualify than requested.
ObjectSet gen_min_dist(const Graph& g, const CoordinateTable& coords, std::size_t size, std::size_t bucket_i,
                       std::size_t bucket_m, std::uint64_t seed);

// Query vertices for min-dist workloads: closer to the centre than the
// innermost object threshold D_max / 2^m.
std::vector<Vertex> min_dist_query_pool(const Graph& g, const CoordinateTable& coords, std::size_t bucket_m);

// Newline-separated vertex ids; `#`-prefixed header/comment lines skipped.
ObjectSet load_objects(std::istream& in, std::size_t vertex_count);
void save_objects(std::ostream& out, const ObjectSet& objects);

}  // namespace rnk

#endif  // RNK_OBJECT_SET_H_
