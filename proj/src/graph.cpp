#include "rnk/graph.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "rnk/binary_io.h"

namespace rnk {

namespace {

constexpr char kGraphMagic[8] = {'R', 'N', 'K', 'G', 'R', 'P', 'H', '\0'};
constexpr std::uint32_t kGraphCacheVersion = 1;

[[noreturn]] void fail_line(std::size_t line_no, const std::string& what) {
    throw FormatError("line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

Graph build_graph(std::size_t vertex_count, std::span<const std::tuple<Vertex, Vertex, Weight>> edges,
                  WeightKind kind) {
    Graph g;
    g.weight_kind = kind;
    g.first_edge.assign(vertex_count + 1, 0);
    for (const auto& [u, v, w] : edges) {
        if (u >= vertex_count || v >= vertex_count) throw FormatError("edge endpoint out of range");
        if (u == v) throw FormatError("self-loop edge");
        if (w == 0) throw FormatError("non-positive edge weight");
        ++g.first_edge[u + 1];
        ++g.first_edge[v + 1];
    }
    for (std::size_t i = 1; i <= vertex_count; ++i) g.first_edge[i] += g.first_edge[i - 1];
    g.edge_target.resize(edges.size() * 2);
    g.edge_weight.resize(edges.size() * 2);
    std::vector<std::uint64_t> cursor(g.first_edge.begin(), g.first_edge.end() - 1);
    for (const auto& [u, v, w] : edges) {
        g.edge_target[cursor[u]] = v;
        g.edge_weight[cursor[u]++] = w;
        g.edge_target[cursor[v]] = u;
        g.edge_weight[cursor[v]++] = w;
    }
    // Sorted adjacency makes load order canonical for the binary cache.
    for (Vertex v = 0; v < vertex_count; ++v) {
        const auto begin = g.first_edge[v], end = g.first_edge[v + 1];
        std::vector<std::pair<Vertex, Weight>> adj;
        adj.reserve(end - begin);
        for (auto i = begin; i < end; ++i) adj.emplace_back(g.edge_target[i], g.edge_weight[i]);
        std::sort(adj.begin(), adj.end());
        for (auto i = begin; i < end; ++i) {
            g.edge_target[i] = adj[i - begin].first;
            g.edge_weight[i] = adj[i - begin].second;
        }
    }
    return g;
}

Graph parse_dimacs_gr(std::istream& in, WeightKind kind) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t declared_vertices = 0, declared_arcs = 0;
    bool have_problem = false;
    // (min(u,v), max(u,v)) -> (weight, direction mask); bit 0 = arc u<v seen,
    // bit 1 = reverse arc seen.
    std::map<std::pair<Vertex, Vertex>, std::pair<Weight, unsigned>> arcs;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == 'c') continue;
        std::istringstream ls(line);
        char tag;
        ls >> tag;
        if (tag == 'p') {
            std::string sp;
            if (!(ls >> sp >> declared_vertices >> declared_arcs) || sp != "sp")
                fail_line(line_no, "malformed problem line");
            have_problem = true;
        } else if (tag == 'a') {
            if (!have_problem) fail_line(line_no, "arc before problem line");
            long long u, v, w;
            if (!(ls >> u >> v >> w)) fail_line(line_no, "malformed arc line");
            if (u < 1 || v < 1 || static_cast<std::size_t>(u) > declared_vertices ||
                static_cast<std::size_t>(v) > declared_vertices)
                fail_line(line_no, "arc endpoint out of range");
            if (u == v) fail_line(line_no, "self-loop arc");
            if (w <= 0) fail_line(line_no, "non-positive arc weight");
            const Vertex a = static_cast<Vertex>(u - 1), b = static_cast<Vertex>(v - 1);
            const auto key = std::minmax(a, b);
            const unsigned dir = (a < b) ? 1u : 2u;
            auto [it, inserted] = arcs.try_emplace({key.first, key.second},
                                                   std::make_pair(static_cast<Weight>(w), dir));
            if (!inserted) {
                if (it->second.first != static_cast<Weight>(w))
                    fail_line(line_no, "asymmetric arc pair weight");
                it->second.second |= dir;
            }
        } else {
            fail_line(line_no, std::string("unknown line tag '") + tag + "'");
        }
    }
    if (!have_problem) throw FormatError("missing problem line");

    std::vector<std::tuple<Vertex, Vertex, Weight>> edges;
    edges.reserve(arcs.size());
    for (const auto& [key, value] : arcs) {
        if (value.second != 3u)
            throw FormatError("arc (" + std::to_string(key.first + 1) + "," +
                              std::to_string(key.second + 1) + ") has no reverse arc");
        edges.emplace_back(key.first, key.second, value.first);
    }
    Graph g = build_graph(declared_vertices, edges, kind);
    verify_connected(g);
    return g;
}

CoordinateTable parse_dimacs_co(std::istream& in, std::size_t vertex_count) {
    CoordinateTable coords;
    coords.x.assign(vertex_count, 0.0);
    coords.y.assign(vertex_count, 0.0);
    std::vector<char> seen(vertex_count, 0);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == 'c' || line[0] == 'p') continue;
        std::istringstream ls(line);
        char tag;
        long long id;
        double x, y;
        if (!(ls >> tag) || tag != 'v') fail_line(line_no, "expected coordinate line");
        if (!(ls >> id >> x >> y)) fail_line(line_no, "malformed coordinate line");
        if (id < 1 || static_cast<std::size_t>(id) > vertex_count)
            fail_line(line_no, "vertex id out of range");
        const std::size_t v = static_cast<std::size_t>(id - 1);
        if (seen[v]) fail_line(line_no, "duplicate id " + std::to_string(id));
        seen[v] = 1;
        coords.x[v] = x;
        coords.y[v] = y;
    }
    for (std::size_t v = 0; v < vertex_count; ++v)
        if (!seen[v]) throw FormatError("coordinate missing for vertex " + std::to_string(v + 1));
    jitter_duplicate_coordinates(coords);
    return coords;
}

void jitter_duplicate_coordinates(CoordinateTable& coords) {
    // Coincident points break the SILC distance ratios (division by d_E), so
    // the k-th duplicate of a point is pushed onto a tiny deterministic spiral.
    std::map<std::pair<double, double>, std::uint32_t> counts;
    double scale = 1.0;
    for (std::size_t v = 0; v < coords.size(); ++v)
        scale = std::max({scale, std::fabs(coords.x[v]), std::fabs(coords.y[v])});
    const double step = scale * std::numeric_limits<double>::epsilon() * 8.0;
    for (std::size_t v = 0; v < coords.size(); ++v) {
        auto [it, inserted] = counts.try_emplace({coords.x[v], coords.y[v]}, 0u);
        const std::uint32_t k = it->second++;
        if (k == 0) continue;
        const double angle = 2.399963229728653 * k;  // golden angle
        coords.x[v] += step * k * std::cos(angle);
        coords.y[v] += step * k * std::sin(angle);
    }
}

double euclidean_distance(Vertex a, Vertex b, const CoordinateTable& coords) {
    const double dx = coords.x[a] - coords.x[b];
    const double dy = coords.y[a] - coords.y[b];
    return std::sqrt(dx * dx + dy * dy);
}

void verify_connected(const Graph& g) {
    const std::size_t n = g.vertex_count();
    if (n == 0) throw FormatError("empty graph");
    std::vector<char> reached(n, 0);
    std::vector<Vertex> stack{0};
    reached[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
        const Vertex v = stack.back();
        stack.pop_back();
        for (Vertex u : g.neighbors(v)) {
            if (!reached[u]) {
                reached[u] = 1;
                ++count;
                stack.push_back(u);
            }
        }
    }
    if (count != n) {
        for (Vertex v = 0; v < n; ++v)
            if (!reached[v])
                throw FormatError("graph is disconnected: vertex " + std::to_string(v + 1) +
                                  " is unreachable from vertex 1");
    }
}

Distance dijkstra_distance(Vertex s, Vertex t, const Graph& g, DijkstraScratch& scratch) {
    if (s == t) return 0;
    scratch.prepare(g.vertex_count());
    scratch.settled.reset();
    scratch.dist[s] = 0;
    scratch.queue.push(0, s);
    std::vector<Vertex> touched{s};
    Distance result = kInfDistance;
    while (!scratch.queue.empty()) {
        const auto [d, id] = scratch.queue.pop_min();
        const Vertex v = static_cast<Vertex>(id);
        if (scratch.settled.query(v)) continue;
        scratch.settled.mark(v);
        if (v == t) {
            result = d;
            break;
        }
        const auto nbrs = g.neighbors(v);
        const auto ws = g.weights(v);
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            const Vertex u = nbrs[i];
            const Distance nd = d + ws[i];
            if (nd < scratch.dist[u]) {
                if (scratch.dist[u] == kInfDistance) touched.push_back(u);
                scratch.dist[u] = nd;
                scratch.queue.push(nd, u);
            }
        }
    }
    for (Vertex v : touched) scratch.dist[v] = kInfDistance;
    scratch.queue.clear();
    return result;
}

void dijkstra_sssp(Vertex s, const Graph& g, DijkstraScratch& scratch, std::vector<Distance>& out) {
    const std::size_t n = g.vertex_count();
    out.assign(n, kInfDistance);
    scratch.prepare(n);
    scratch.settled.reset();
    scratch.queue.clear();
    out[s] = 0;
    scratch.queue.push(0, s);
    while (!scratch.queue.empty()) {
        const auto [d, id] = scratch.queue.pop_min();
        const Vertex v = static_cast<Vertex>(id);
        if (scratch.settled.query(v)) continue;
        scratch.settled.mark(v);
        const auto nbrs = g.neighbors(v);
        const auto ws = g.weights(v);
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            const Vertex u = nbrs[i];
            const Distance nd = d + ws[i];
            if (nd < out[u]) {
                out[u] = nd;
                scratch.queue.push(nd, u);
            }
        }
    }
}

double max_speed(const Graph& g, const CoordinateTable& coords) {
    double best = 0.0;
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        const auto nbrs = g.neighbors(v);
        const auto ws = g.weights(v);
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            if (ws[i] == 0) throw FormatError("zero-weight edge in max_speed");
            best = std::max(best, euclidean_distance(v, nbrs[i], coords) / static_cast<double>(ws[i]));
        }
    }
    return best;
}

void save_graph_cache(std::ostream& out, const Graph& g, const CoordinateTable& coords) {
    io::write_magic(out, kGraphMagic, kGraphCacheVersion);
    io::write_scalar<std::uint8_t>(out, static_cast<std::uint8_t>(g.weight_kind));
    io::write_vector(out, g.first_edge);
    io::write_vector(out, g.edge_target);
    io::write_vector(out, g.edge_weight);
    io::write_vector(out, coords.x);
    io::write_vector(out, coords.y);
}

void load_graph_cache(std::istream& in, Graph& g, CoordinateTable& coords) {
    io::check_magic(in, kGraphMagic, kGraphCacheVersion);
    g.weight_kind = static_cast<WeightKind>(io::read_scalar<std::uint8_t>(in));
    io::read_vector(in, g.first_edge);
    io::read_vector(in, g.edge_target);
    io::read_vector(in, g.edge_weight);
    io::read_vector(in, coords.x);
    io::read_vector(in, coords.y);
}

void write_dimacs_gr(std::ostream& out, const Graph& g) {
    out << "p sp " << g.vertex_count() << " " << g.directed_arc_count() << "\n";
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        const auto nbrs = g.neighbors(v);
        const auto ws = g.weights(v);
        for (std::size_t i = 0; i < nbrs.size(); ++i)
            out << "a " << v + 1 << " " << nbrs[i] + 1 << " " << ws[i] << "\n";
    }
}

void write_dimacs_co(std::ostream& out, const CoordinateTable& coords) {
    out << "p aux sp co " << coords.size() << "\n";
    std::ostringstream fmt;
    fmt.precision(17);
    for (std::size_t v = 0; v < coords.size(); ++v) {
        fmt.str("");
        fmt << "v " << v + 1 << " " << coords.x[v] << " " << coords.y[v] << "\n";
        out << fmt.str();
    }
}

}  // namespace rnk
