#include "rnk/object_set.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "rnk/rng.h"

namespace rnk {

namespace {

std::vector<Vertex> pick_distinct(std::mt19937_64& rng, std::size_t n, std::size_t count) {
    std::vector<char> used(n, 0);
    std::vector<Vertex> out;
    out.reserve(count);
    while (out.size() < count) {
        const Vertex v = static_cast<Vertex>(rand_range(rng, 0, n - 1));
        if (!used[v]) {
            used[v] = 1;
            out.push_back(v);
        }
    }
    return out;
}

ObjectSet finish(std::vector<Vertex> ids, std::size_t n, ObjectKind kind, std::uint64_t seed) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    ObjectSet o;
    o.ids = std::move(ids);
    o.density = static_cast<double>(o.ids.size()) / static_cast<double>(n);
    o.kind = kind;
    o.seed = seed;
    return o;
}

}  // namespace

const char* object_kind_name(ObjectKind kind) {
    switch (kind) {
        case ObjectKind::kUniform: return "uniform";
        case ObjectKind::kClustered: return "clustered";
        case ObjectKind::kMinDist: return "min_dist";
        case ObjectKind::kFile: return "file";
    }
    return "file";
}

bool ObjectSet::contains(Vertex v) const {
    return std::binary_search(ids.begin(), ids.end(), v);
}

ObjectSet gen_uniform(const Graph& g, double density, std::uint64_t seed) {
    const std::size_t n = g.vertex_count();
    if (!(density > 0.0) || density > 1.0) throw FormatError("density out of range (0, 1]");
    const std::size_t count = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(density * static_cast<double>(n))));
    std::mt19937_64 rng(seed);
    return finish(pick_distinct(rng, n, std::min(count, n)), n, ObjectKind::kUniform, seed);
}

ObjectSet gen_clustered(const Graph& g, std::size_t clusters, std::size_t max_size, std::uint64_t seed) {
    const std::size_t n = g.vertex_count();
    if (clusters == 0 || max_size == 0) throw FormatError("clusters and max_size must be positive");
    if (clusters > n) throw FormatError("more clusters than vertices");
    std::mt19937_64 rng(seed);
    const std::vector<Vertex> centers = pick_distinct(rng, n, clusters);
    std::vector<Vertex> ids;
    ids.reserve(clusters * max_size);
    DijkstraScratch scratch;
    SettledSet settled(n);
    for (Vertex c : centers) {
        // settle vertices in network-distance order around the center
        scratch.prepare(n);
        settled.reset();
        scratch.queue.push(0, c);
        std::size_t taken = 0;
        while (!scratch.queue.empty() && taken < max_size) {
            const auto [d, id] = scratch.queue.pop_min();
            const Vertex v = static_cast<Vertex>(id);
            if (settled.query(v)) continue;
            settled.mark(v);
            ids.push_back(v);
            ++taken;
            const auto nbrs = g.neighbors(v);
            const auto ws = g.weights(v);
            for (std::size_t i = 0; i < nbrs.size(); ++i)
                if (!settled.query(nbrs[i])) scratch.queue.push(d + ws[i], nbrs[i]);
        }
        scratch.queue.clear();
    }
    return finish(std::move(ids), n, ObjectKind::kClustered, seed);
}

Vertex euclidean_centre_vertex(const CoordinateTable& coords) {
    const std::size_t n = coords.size();
    double cx = 0.0, cy = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
        cx += coords.x[v];
        cy += coords.y[v];
    }
    cx /= static_cast<double>(n);
    cy /= static_cast<double>(n);
    Vertex best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Vertex v = 0; v < n; ++v) {
        const double dx = coords.x[v] - cx, dy = coords.y[v] - cy;
        const double d = dx * dx + dy * dy;
        if (d < best_d) {
            best_d = d;
            best = v;
        }
    }
    return best;
}

ObjectSet gen_min_dist(const Graph& g, const CoordinateTable& coords, std::size_t size, std::size_t bucket_i,
                       std::size_t bucket_m, std::uint64_t seed) {
    if (bucket_i < 1 || bucket_i > bucket_m) throw FormatError("bucket index out of range");
    if (size == 0) throw FormatError("empty object set requested");
    const std::size_t n = g.vertex_count();
    const Vertex centre = euclidean_centre_vertex(coords);
    DijkstraScratch scratch;
    std::vector<Distance> dist;
    dijkstra_sssp(centre, g, scratch, dist);
    const Distance d_max = *std::max_element(dist.begin(), dist.end());
    const double threshold =
        static_cast<double>(d_max) / std::pow(2.0, static_cast<double>(bucket_m - bucket_i + 1));
    std::vector<Vertex> pool;
    for (Vertex v = 0; v < n; ++v)
        if (static_cast<double>(dist[v]) >= threshold) pool.push_back(v);
    if (pool.size() < size)
        throw FormatError("min-dist bucket " + std::to_string(bucket_i) + " has only " +
                          std::to_string(pool.size()) + " qualifying vertices");
    std::mt19937_64 rng(seed);
    const std::vector<Vertex> picks = pick_distinct(rng, pool.size(), size);
    std::vector<Vertex> ids;
    ids.reserve(size);
    for (Vertex p : picks) ids.push_back(pool[p]);
    return finish(std::move(ids), n, ObjectKind::kMinDist, seed);
}

std::vector<Vertex> min_dist_query_pool(const Graph& g, const CoordinateTable& coords, std::size_t bucket_m) {
    const Vertex centre = euclidean_centre_vertex(coords);
    DijkstraScratch scratch;
    std::vector<Distance> dist;
    dijkstra_sssp(centre, g, scratch, dist);
    const Distance d_max = *std::max_element(dist.begin(), dist.end());
    const double threshold = static_cast<double>(d_max) / std::pow(2.0, static_cast<double>(bucket_m));
    std::vector<Vertex> pool;
    for (Vertex v = 0; v < g.vertex_count(); ++v)
        if (static_cast<double>(dist[v]) < threshold) pool.push_back(v);
    return pool;
}

ObjectSet load_objects(std::istream& in, std::size_t vertex_count) {
    std::vector<Vertex> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        long long id;
        if (!(ls >> id) || id < 0)
            throw FormatError("line " + std::to_string(line_no) + ": malformed object id");
        if (static_cast<std::size_t>(id) >= vertex_count)
            throw FormatError("line " + std::to_string(line_no) + ": object id out of range");
        ids.push_back(static_cast<Vertex>(id));
    }
    if (ids.empty()) throw FormatError("empty object file");
    return finish(std::move(ids), vertex_count, ObjectKind::kFile, 0);
}

void save_objects(std::ostream& out, const ObjectSet& objects) {
    out << "# density=" << objects.density << " kind=" << object_kind_name(objects.kind)
        << " seed=" << objects.seed << "\n";
    for (Vertex v : objects.ids) out << v << "\n";
}

}  // namespace rnk
