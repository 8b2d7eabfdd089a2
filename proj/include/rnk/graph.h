#ifndef RNK_GRAPH_H_
#define RNK_GRAPH_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rnk/search.h"
#include "rnk/types.h"

namespace rnk {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Undirected weighted graph in a contiguous-adjacency layout: first_edge has
// |V|+1 offsets into edge_target/edge_weight, each undirected edge appears in
// both endpoints' ranges. Immutable once loaded; indexes hold references.
struct Graph {
    std::vector<std::uint64_t> first_edge;
    std::vector<Vertex> edge_target;
    std::vector<Weight> edge_weight;
    WeightKind weight_kind = WeightKind::kDistance;

    std::size_t vertex_count() const { return first_edge.empty() ? 0 : first_edge.size() - 1; }
    std::size_t undirected_edge_count() const { return edge_target.size() / 2; }
    std::size_t directed_arc_count() const { return edge_target.size(); }

    std::span<const Vertex> neighbors(Vertex v) const {
        return {edge_target.data() + first_edge[v], edge_target.data() + first_edge[v + 1]};
    }
    std::span<const Weight> weights(Vertex v) const {
        return {edge_weight.data() + first_edge[v], edge_weight.data() + first_edge[v + 1]};
    }
    std::size_t degree(Vertex v) const { return first_edge[v + 1] - first_edge[v]; }
};

struct CoordinateTable {
    std::vector<double> x;
    std::vector<double> y;

    std::size_t size() const { return x.size(); }
};

// Builds the CSR arrays from an unordered list of undirected edges (u, v, w).
Graph build_graph(std::size_t vertex_count, std::span<const std::tuple<Vertex, Vertex, Weight>> edges,
                  WeightKind kind);

// DIMACS 9th-challenge .gr reader. Directed arc pairs (u,v,w)/(v,u,w) collapse
// to one undirected edge; an unpaired or mismatched arc is a format error.
// Vertex ids are rebased to 0..|V|-1. The graph must be connected.
Graph parse_dimacs_gr(std::istream& in, WeightKind kind = WeightKind::kDistance);

// DIMACS .co reader; every vertex must appear exactly once. Coincident
// coordinates are separated by a deterministic spiral of minimal offsets so
// that no two vertices share a point.
CoordinateTable parse_dimacs_co(std::istream& in, std::size_t vertex_count);

// Applied by parse_dimacs_co; exposed so synthetic graphs get the same
// treatment before SILC construction.
void jitter_duplicate_coordinates(CoordinateTable& coords);

double euclidean_distance(Vertex a, Vertex b, const CoordinateTable& coords);

// DIMACS writers, the inverse of the parsers; coordinates keep full double
// precision (the reader accepts both integer and decimal fields).
void write_dimacs_gr(std::ostream& out, const Graph& g);
void write_dimacs_co(std::ostream& out, const CoordinateTable& coords);

// Throws FormatError naming a stranded vertex if the graph is disconnected.
void verify_connected(const Graph& g);

// Caller-owned scratch; one instance per in-flight search.
struct DijkstraScratch {
    std::vector<Distance> dist;
    SettledSet settled;
    MinQueue queue;

    void prepare(std::size_t n) {
        if (dist.size() != n) {
            dist.assign(n, kInfDistance);
            settled.resize(n);
        }
        queue.clear();
    }
};

// Exact network distance; duplicate-push binary heap, skip-if-settled.
Distance dijkstra_distance(Vertex s, Vertex t, const Graph& g, DijkstraScratch& scratch);

// Full single-source table into `out` (resized to |V|).
void dijkstra_sssp(Vertex s, const Graph& g, DijkstraScratch& scratch, std::vector<Distance>& out);

// Maximum d_E(u,v)/w(u,v) over all edges; d_E(p,q)/S is then a valid network
// distance lower bound on travel-time graphs.
double max_speed(const Graph& g, const CoordinateTable& coords);

// Versioned little-endian binary cache for fast reload.
void save_graph_cache(std::ostream& out, const Graph& g, const CoordinateTable& coords);
void load_graph_cache(std::istream& in, Graph& g, CoordinateTable& coords);

}  // namespace rnk

#endif  // RNK_GRAPH_H_
