#include "rnk/synth.h"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <vector>

#include "rnk/rng.h"

namespace rnk {

SyntheticNetwork make_synthetic_network(std::size_t vertices, std::size_t edges, std::uint64_t seed) {
    if (vertices < 2) throw FormatError("synthetic network needs at least 2 vertices");
    std::mt19937_64 rng(seed);

    const std::size_t cols =
        std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(vertices)))));
    const std::size_t rows = (vertices + cols - 1) / cols;  // last row may be partial
    const auto id_of = [&](std::size_t r, std::size_t c) { return r * cols + c; };
    const auto exists = [&](std::size_t r, std::size_t c) {
        return r < rows && c < cols && id_of(r, c) < vertices;
    };

    // jittered grid points, spacing 100 world units
    CoordinateTable coords;
    coords.x.resize(vertices);
    coords.y.resize(vertices);
    for (std::size_t v = 0; v < vertices; ++v) {
        const std::size_t r = v / cols, c = v % cols;
        coords.x[v] = static_cast<double>(c) * 100.0 + (rand_unit(rng) - 0.5) * 60.0;
        coords.y[v] = static_cast<double>(r) * 100.0 + (rand_unit(rng) - 0.5) * 60.0;
    }
    jitter_duplicate_coordinates(coords);

    std::vector<std::pair<Vertex, Vertex>> picked;
    picked.reserve(edges);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            if (!exists(r, c)) continue;
            if (exists(r, c + 1)) picked.emplace_back(id_of(r, c), id_of(r, c + 1));
            if (exists(r + 1, c)) picked.emplace_back(id_of(r, c), id_of(r + 1, c));
        }
    if (picked.size() > edges)
        throw FormatError("synthetic network: edge budget below the connecting grid");

    // diagonal candidates in a deterministic shuffle; take as many as needed
    std::vector<std::pair<Vertex, Vertex>> diagonals;
    for (std::size_t r = 0; r + 1 < rows; ++r)
        for (std::size_t c = 0; c + 1 < cols; ++c) {
            if (exists(r, c) && exists(r + 1, c + 1))
                diagonals.emplace_back(id_of(r, c), id_of(r + 1, c + 1));
            if (exists(r, c + 1) && exists(r + 1, c))
                diagonals.emplace_back(id_of(r, c + 1), id_of(r + 1, c));
        }
    for (std::size_t i = diagonals.size(); i > 1; --i)
        std::swap(diagonals[i - 1], diagonals[rand_range(rng, 0, i - 1)]);
    if (picked.size() + diagonals.size() < edges)
        throw FormatError("synthetic network: edge budget beyond grid plus diagonals");
    picked.insert(picked.end(), diagonals.begin(), diagonals.begin() + (edges - picked.size()));

    std::vector<std::tuple<Vertex, Vertex, Weight>> dist_edges, time_edges;
    dist_edges.reserve(edges);
    time_edges.reserve(edges);
    const double speeds[4] = {30.0, 50.0, 70.0, 110.0};
    for (auto [u, v] : picked) {
        const double len = euclidean_distance(u, v, coords);
        const Weight w_dist = std::max<Weight>(1, static_cast<Weight>(std::llround(len * 10.0)));
        const double speed = speeds[rand_range(rng, 0, 3)];
        const Weight w_time = std::max<Weight>(1, static_cast<Weight>(std::llround(len * 360.0 / speed)));
        dist_edges.emplace_back(u, v, w_dist);
        time_edges.emplace_back(u, v, w_time);
    }

    SyntheticNetwork out;
    out.distance_graph = build_graph(vertices, dist_edges, WeightKind::kDistance);
    out.time_graph = build_graph(vertices, time_edges, WeightKind::kTime);
    out.coords = std::move(coords);
    verify_connected(out.distance_graph);
    return out;
}

}  // namespace rnk
