#include "rnk/silc.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <queue>
#include <set>
#include <string>
#include <thread>
#include <unordered_map>

#include "rnk/binary_io.h"
#include "rnk/search.h"

namespace rnk {

namespace {

constexpr char kSilcMagic[8] = {'R', 'N', 'K', 'S', 'I', 'L', 'C', '\0'};
constexpr std::uint32_t kSilcVersion = 1;
constexpr std::uint32_t kGridBits = 16;
constexpr std::uint64_t kGridSide = std::uint64_t{1} << kGridBits;

std::uint64_t spread_bits(std::uint64_t x) {
    x &= 0xffff;
    x = (x | (x << 8)) & 0x00ff00ff;
    x = (x | (x << 4)) & 0x0f0f0f0f;
    x = (x | (x << 2)) & 0x33333333;
    x = (x | (x << 1)) & 0x55555555;
    return x;
}

std::uint64_t compact_bits(std::uint64_t x) {
    x &= 0x55555555;
    x = (x | (x >> 1)) & 0x33333333;
    x = (x | (x >> 2)) & 0x0f0f0f0f;
    x = (x | (x >> 4)) & 0x00ff00ff;
    x = (x | (x >> 8)) & 0x0000ffff;
    return x;
}

double point_distance(const CoordinateTable& coords, Vertex a, Vertex b) {
    return std::hypot(coords.x[a] - coords.x[b], coords.y[a] - coords.y[b]);
}

Distance edge_between(const Graph& g, Vertex u, Vertex v) {
    const auto nbrs = g.neighbors(u);
    const auto ws = g.weights(u);
    Distance best = kInfDistance;
    for (std::size_t i = 0; i < nbrs.size(); ++i)
        if (nbrs[i] == v && ws[i] < best) best = ws[i];
    return best;
}

void sssp_with_order(const Graph& g, Vertex s, std::vector<Distance>& dist,
                     std::vector<Vertex>& order, MinQueue& queue, std::vector<std::uint8_t>& done) {
    dist.assign(g.vertex_count(), kInfDistance);
    done.assign(g.vertex_count(), 0);
    order.clear();
    queue.clear();
    dist[s] = 0;
    queue.push(0, s);
    while (!queue.empty()) {
        const auto [d, id] = queue.pop_min();
        const Vertex v = static_cast<Vertex>(id);
        if (done[v]) continue;
        done[v] = 1;
        order.push_back(v);
        const auto nbrs = g.neighbors(v);
        const auto ws = g.weights(v);
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            const Distance nd = d + ws[i];
            if (nd < dist[nbrs[i]]) {
                dist[nbrs[i]] = nd;
                queue.push(nd, nbrs[i]);
            }
        }
    }
}

struct PerVertex {
    std::vector<SilcBlock> blocks;
    std::vector<SilcException> exceptions;
    double min_lambda = 0.0;
};

}  // namespace

SilcIndex::SilcIndex(const Graph& g, const CoordinateTable& coords, const SilcBuildOptions& options)
    : graph_(&g), coords_(&coords) {
    const std::size_t n = g.vertex_count();

    double min_x = coords.x[0], max_x = coords.x[0], min_y = coords.y[0], max_y = coords.y[0];
    for (Vertex v = 1; v < n; ++v) {
        min_x = std::min(min_x, coords.x[v]);
        max_x = std::max(max_x, coords.x[v]);
        min_y = std::min(min_y, coords.y[v]);
        max_y = std::max(max_y, coords.y[v]);
    }
    grid_min_x_ = min_x;
    grid_min_y_ = min_y;
    grid_cell_w_ = (max_x > min_x ? max_x - min_x : 1.0) / static_cast<double>(kGridSide);
    grid_cell_h_ = (max_y > min_y ? max_y - min_y : 1.0) / static_cast<double>(kGridSide);
    morton_.resize(n);
    for (Vertex v = 0; v < n; ++v) {
        const auto gx = std::min<std::uint64_t>(
            kGridSide - 1, static_cast<std::uint64_t>((coords.x[v] - grid_min_x_) / grid_cell_w_));
        const auto gy = std::min<std::uint64_t>(
            kGridSide - 1, static_cast<std::uint64_t>((coords.y[v] - grid_min_y_) / grid_cell_h_));
        morton_[v] = spread_bits(gx) | (spread_bits(gy) << 1);
    }

    // one shared Morton order; every per-vertex build walks the same list
    std::vector<Vertex> order(n);
    for (Vertex v = 0; v < n; ++v) order[v] = v;
    std::sort(order.begin(), order.end(), [&](Vertex a, Vertex b) {
        return morton_[a] != morton_[b] ? morton_[a] < morton_[b] : a < b;
    });

    build_chains();

    std::vector<PerVertex> built(n);
    std::atomic<std::uint64_t> bytes{0};
    std::atomic<std::size_t> done_count{0};
    std::atomic<bool> over_budget{false};
    std::mutex progress_mutex;

    const auto build_range = [&](Vertex begin, Vertex end) {
        std::vector<Distance> dist;
        std::vector<Vertex> settle_order;
        std::vector<std::uint8_t> done;
        MinQueue queue;
        std::vector<Vertex> fh(n, kNoVertex);
        std::vector<double> lam(n, 0.0);
        std::vector<std::pair<std::uint64_t, Vertex>> pts;
        pts.reserve(n);
        for (Vertex s = begin; s < end; ++s) {
            if (over_budget.load(std::memory_order_relaxed)) return;
            sssp_with_order(g, s, dist, settle_order, queue, done);
            // lowest-id first hop among all shortest paths; predecessors are
            // always settled first, so one pass in settle order suffices
            for (Vertex v : settle_order) {
                if (v == s) continue;
                const auto nbrs = g.neighbors(v);
                const auto ws = g.weights(v);
                Vertex best = kNoVertex;
                for (std::size_t i = 0; i < nbrs.size(); ++i) {
                    if (dist[nbrs[i]] == kInfDistance || dist[nbrs[i]] + ws[i] != dist[v]) continue;
                    const Vertex cand = nbrs[i] == s ? v : fh[nbrs[i]];
                    best = std::min(best, cand);
                }
                fh[v] = best;
            }
            PerVertex& out = built[s];
            pts.clear();
            for (Vertex v : order) {
                if (v == s) continue;
                const double de = point_distance(coords, s, v);
                if (de <= 0.0) {
                    out.exceptions.push_back({v, fh[v], dist[v]});
                    continue;
                }
                lam[v] = static_cast<double>(dist[v]) / de;
                pts.push_back({morton_[v], v});
            }
            const auto emit = [&](auto&& self, std::size_t b, std::size_t e, std::uint64_t lo,
                                  std::uint64_t hi) -> void {
                if (b == e) return;
                const Vertex color = fh[pts[b].second];
                bool uniform = true;
                for (std::size_t i = b + 1; i < e && uniform; ++i)
                    if (fh[pts[i].second] != color) uniform = false;
                if (uniform) {
                    double lo_l = lam[pts[b].second], hi_l = lo_l;
                    for (std::size_t i = b + 1; i < e; ++i) {
                        lo_l = std::min(lo_l, lam[pts[i].second]);
                        hi_l = std::max(hi_l, lam[pts[i].second]);
                    }
                    SilcBlock blk;
                    blk.lo = static_cast<std::uint32_t>(lo);
                    blk.level = static_cast<std::uint8_t>(std::countr_zero(hi - lo) / 2);
                    blk.color = color;
                    blk.lam_min = std::nextafterf(static_cast<float>(lo_l), 0.0f);
                    blk.lam_max =
                        std::nextafterf(static_cast<float>(hi_l), std::numeric_limits<float>::infinity());
                    out.blocks.push_back(blk);
                    return;
                }
                if (hi - lo == 1) {
                    // differently colored vertices in one grid cell
                    for (std::size_t i = b; i < e; ++i)
                        out.exceptions.push_back({pts[i].second, fh[pts[i].second], dist[pts[i].second]});
                    return;
                }
                const std::uint64_t quarter = (hi - lo) / 4;
                std::size_t at = b;
                for (int c = 0; c < 4; ++c) {
                    const std::uint64_t clo = lo + quarter * c, chi = clo + quarter;
                    const std::size_t ce =
                        std::lower_bound(pts.begin() + at, pts.begin() + e, chi,
                                         [](const std::pair<std::uint64_t, Vertex>& p,
                                            std::uint64_t v) { return p.first < v; }) -
                        pts.begin();
                    self(self, at, ce, clo, chi);
                    at = ce;
                }
            };
            emit(emit, 0, pts.size(), 0, std::uint64_t{1} << (2 * kGridBits));
            std::sort(out.exceptions.begin(), out.exceptions.end(),
                      [](const SilcException& a, const SilcException& b) { return a.vertex < b.vertex; });
            out.min_lambda = std::numeric_limits<double>::infinity();
            for (const SilcBlock& blk : out.blocks)
                out.min_lambda = std::min(out.min_lambda, static_cast<double>(blk.lam_min));
            for (const SilcException& ex : out.exceptions) {
                const double de = point_distance(coords, s, ex.vertex);
                if (de > 0.0)
                    out.min_lambda = std::min(
                        out.min_lambda,
                        static_cast<double>(std::nextafterf(
                            static_cast<float>(static_cast<double>(ex.distance) / de), 0.0f)));
                else
                    out.min_lambda = 0.0;
            }
            if (!std::isfinite(out.min_lambda)) out.min_lambda = 0.0;

            const std::uint64_t used =
                bytes.fetch_add(out.blocks.size() * sizeof(SilcBlock) +
                                out.exceptions.size() * sizeof(SilcException)) +
                out.blocks.size() * sizeof(SilcBlock) + out.exceptions.size() * sizeof(SilcException);
            if (used > options.memory_budget) over_budget.store(true);
            const std::size_t finished = done_count.fetch_add(1) + 1;
            if (options.progress && (finished % 256 == 0 || finished == n)) {
                std::scoped_lock lock(progress_mutex);
                options.progress(finished, n);
            }
        }
    };

    const unsigned workers = std::max(1u, options.workers);
    if (workers == 1 || n < 2 * workers) {
        build_range(0, static_cast<Vertex>(n));
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            const Vertex begin = static_cast<Vertex>(n * w / workers);
            const Vertex end = static_cast<Vertex>(n * (w + 1) / workers);
            pool.emplace_back(build_range, begin, end);
        }
        for (auto& t : pool) t.join();
    }
    if (over_budget.load()) {
        const std::size_t done_n = std::max<std::size_t>(1, done_count.load());
        const std::uint64_t projected = bytes.load() / done_n * n;
        throw FormatError("SILC build refused: projected index size is about " +
                          std::to_string(projected >> 20) + " MiB, over the " +
                          std::to_string(options.memory_budget >> 20) + " MiB budget");
    }

    block_first_.assign(n + 1, 0);
    exception_first_.assign(n + 1, 0);
    min_lambda_.resize(n);
    for (Vertex v = 0; v < n; ++v) {
        block_first_[v + 1] = block_first_[v] + built[v].blocks.size();
        exception_first_[v + 1] = exception_first_[v] + built[v].exceptions.size();
        min_lambda_[v] = built[v].min_lambda;
    }
    blocks_.reserve(block_first_[n]);
    exceptions_.reserve(exception_first_[n]);
    for (Vertex v = 0; v < n; ++v) {
        blocks_.insert(blocks_.end(), built[v].blocks.begin(), built[v].blocks.end());
        exceptions_.insert(exceptions_.end(), built[v].exceptions.begin(), built[v].exceptions.end());
        // release as we go; at full scale the per-vertex buffers and the
        // final arrays must not both stay resident
        std::vector<SilcBlock>().swap(built[v].blocks);
        std::vector<SilcException>().swap(built[v].exceptions);
    }
}

void SilcIndex::build_chains() {
    const Graph& g = *graph_;
    const std::size_t n = g.vertex_count();
    chain_id_.assign(n, kNoChain);
    chains_.assign(n, {});
    std::vector<std::uint8_t> processed(n, 0);
    const auto eligible = [&](Vertex v) {
        const auto nbrs = g.neighbors(v);
        if (nbrs.size() > 2) return false;
        if (nbrs.size() == 2 && nbrs[0] == nbrs[1]) return false;  // parallel edge
        return true;
    };
    const auto other_neighbor = [&](Vertex v, Vertex from) {
        for (Vertex u : g.neighbors(v))
            if (u != from) return u;
        return kNoVertex;
    };
    // walks through eligible vertices; returns via junction/cycle flags
    const auto walk = [&](Vertex origin, Vertex first, std::vector<Vertex>& out, Vertex& junction,
                          bool& cycle) {
        Vertex prev = origin, cur = first;
        junction = kNoVertex;
        while (true) {
            if (cur == origin) {
                cycle = true;
                return;
            }
            if (!eligible(cur)) {
                junction = cur;
                return;
            }
            out.push_back(cur);
            const Vertex nxt = other_neighbor(cur, prev);
            if (nxt == kNoVertex) return;  // degree-1 terminus
            prev = cur;
            cur = nxt;
        }
    };
    std::uint32_t next_id = 0;
    std::vector<Vertex> left, right, seq;
    for (Vertex v = 0; v < n; ++v) {
        if (processed[v] || !eligible(v)) continue;
        left.clear();
        right.clear();
        const auto nbrs = g.neighbors(v);
        Vertex end_left = kNoVertex, end_right = kNoVertex;
        bool cycle = false;
        if (!nbrs.empty()) walk(v, nbrs[0], right, end_right, cycle);
        if (!cycle && nbrs.size() == 2) walk(v, nbrs[1], left, end_left, cycle);
        if (cycle) {
            // a pure degree-2 cycle has no junction to jump to
            processed[v] = 1;
            for (Vertex u : right) processed[u] = 1;
            continue;
        }
        seq.assign(left.rbegin(), left.rend());
        seq.push_back(v);
        seq.insert(seq.end(), right.begin(), right.end());
        std::vector<Distance> cum(seq.size(), 0);
        for (std::size_t i = 1; i < seq.size(); ++i)
            cum[i] = cum[i - 1] + edge_between(g, seq[i - 1], seq[i]);
        const Distance w_left = end_left == kNoVertex ? 0 : edge_between(g, seq.front(), end_left);
        const Distance w_right = end_right == kNoVertex ? 0 : edge_between(g, seq.back(), end_right);
        const std::uint32_t id = next_id++;
        for (std::size_t i = 0; i < seq.size(); ++i) {
            const Vertex x = seq[i];
            processed[x] = 1;
            chain_id_[x] = id;
            ChainEntry& ce = chains_[x];
            ce.end[0] = end_left != kNoVertex ? end_left : seq.front();
            ce.dist[0] = cum[i] + (end_left != kNoVertex ? w_left : 0);
            ce.toward[0] = i > 0 ? seq[i - 1] : end_left;
            ce.end[1] = end_right != kNoVertex ? end_right : seq.back();
            ce.dist[1] = cum.back() - cum[i] + (end_right != kNoVertex ? w_right : 0);
            ce.toward[1] = i + 1 < seq.size() ? seq[i + 1] : end_right;
        }
    }
}

Rect SilcIndex::block_rect(const SilcBlock& b) const {
    const std::uint64_t side = std::uint64_t{1} << b.level;
    const double cx = static_cast<double>(compact_bits(b.lo));
    const double cy = static_cast<double>(compact_bits(b.lo >> 1));
    return {grid_min_x_ + cx * grid_cell_w_, grid_min_y_ + cy * grid_cell_h_,
            grid_min_x_ + (cx + static_cast<double>(side)) * grid_cell_w_,
            grid_min_y_ + (cy + static_cast<double>(side)) * grid_cell_h_};
}

SilcIndex::Lookup SilcIndex::lookup(Vertex s, Vertex t) const {
    const auto exc = exceptions(s);
    const auto it = std::lower_bound(exc.begin(), exc.end(), t,
                                     [](const SilcException& e, Vertex v) { return e.vertex < v; });
    if (it != exc.end() && it->vertex == t) return {true, it->distance, it->first_hop, 0.0, 0.0};
    const auto blks = blocks(s);
    const std::uint64_t m = morton_[t];
    auto bit = std::upper_bound(blks.begin(), blks.end(), m,
                                [](std::uint64_t v, const SilcBlock& b) { return v < b.lo; });
    --bit;
    return {false, kInfDistance, bit->color, bit->lam_min, bit->lam_max};
}

std::size_t SilcIndex::byte_size() const {
    return blocks_.size() * sizeof(SilcBlock) + exceptions_.size() * sizeof(SilcException) +
           (block_first_.size() + exception_first_.size()) * sizeof(std::uint64_t) +
           morton_.size() * sizeof(std::uint64_t) + min_lambda_.size() * sizeof(double) +
           chain_id_.size() * sizeof(std::uint32_t) + chains_.size() * sizeof(ChainEntry);
}

void SilcIndex::save(std::ostream& out) const {
    io::write_magic(out, kSilcMagic, kSilcVersion);
    io::write_scalar<std::uint64_t>(out, graph_->vertex_count());
    io::write_scalar<double>(out, grid_min_x_);
    io::write_scalar<double>(out, grid_min_y_);
    io::write_scalar<double>(out, grid_cell_w_);
    io::write_scalar<double>(out, grid_cell_h_);
    io::write_vector(out, morton_);
    // field-wise so struct padding never reaches the stream
    io::write_scalar<std::uint64_t>(out, blocks_.size());
    for (const SilcBlock& b : blocks_) {
        io::write_scalar<std::uint32_t>(out, b.lo);
        io::write_scalar<Vertex>(out, b.color);
        io::write_scalar<float>(out, b.lam_min);
        io::write_scalar<float>(out, b.lam_max);
        io::write_scalar<std::uint8_t>(out, b.level);
    }
    io::write_vector(out, block_first_);
    io::write_vector(out, exceptions_);
    io::write_vector(out, exception_first_);
    io::write_vector(out, min_lambda_);
    io::write_vector(out, chain_id_);
    io::write_vector(out, chains_);
}

SilcIndex SilcIndex::load(std::istream& in, const Graph& g, const CoordinateTable& coords) {
    io::check_magic(in, kSilcMagic, kSilcVersion);
    SilcIndex idx(g, coords, Unbuilt{});
    if (io::read_scalar<std::uint64_t>(in) != g.vertex_count())
        throw FormatError("SILC cache was built for a different graph");
    idx.grid_min_x_ = io::read_scalar<double>(in);
    idx.grid_min_y_ = io::read_scalar<double>(in);
    idx.grid_cell_w_ = io::read_scalar<double>(in);
    idx.grid_cell_h_ = io::read_scalar<double>(in);
    io::read_vector(in, idx.morton_);
    idx.blocks_.resize(io::read_scalar<std::uint64_t>(in));
    for (SilcBlock& b : idx.blocks_) {
        b.lo = io::read_scalar<std::uint32_t>(in);
        b.color = io::read_scalar<Vertex>(in);
        b.lam_min = io::read_scalar<float>(in);
        b.lam_max = io::read_scalar<float>(in);
        b.level = io::read_scalar<std::uint8_t>(in);
    }
    io::read_vector(in, idx.block_first_);
    io::read_vector(in, idx.exceptions_);
    io::read_vector(in, idx.exception_first_);
    io::read_vector(in, idx.min_lambda_);
    io::read_vector(in, idx.chain_id_);
    io::read_vector(in, idx.chains_);
    return idx;
}

DistanceInterval make_interval(Vertex source, Vertex target) {
    DistanceInterval iv;
    iv.target = target;
    iv.v_n = source;
    iv.d = 0;
    if (source == target) {
        iv.exact = 0;
        iv.lb = iv.ub = 0.0;
    }
    return iv;
}

namespace {

void collapse(DistanceInterval& iv, Distance exact) {
    iv.exact = exact;
    iv.lb = iv.ub = static_cast<double>(exact);
    iv.prev = iv.v_n;
    iv.v_n = iv.target;
}

// one Morton-list consult: tightens bounds from v_n's block of the target
// and returns the next hop
Vertex consult(const SilcIndex& idx, DistanceInterval& iv, std::size_t* lookups, bool& collapsed) {
    if (lookups) ++*lookups;
    const auto f = idx.lookup(iv.v_n, iv.target);
    if (f.exact) {
        collapse(iv, iv.d + f.distance);
        collapsed = true;
        return kNoVertex;
    }
    const double de = point_distance(idx.coords(), iv.v_n, iv.target);
    iv.lb = std::max(iv.lb, static_cast<double>(iv.d) + f.lam_min * de);
    iv.ub = std::min(iv.ub, static_cast<double>(iv.d) + f.lam_max * de);
    collapsed = false;
    return f.first_hop;
}

void step_to(const SilcIndex& idx, DistanceInterval& iv, Vertex u) {
    iv.d += edge_between(idx.graph(), iv.v_n, u);
    iv.prev = iv.v_n;
    iv.v_n = u;
    if (iv.v_n == iv.target) {
        iv.exact = iv.d;
        iv.lb = iv.ub = static_cast<double>(iv.d);
    }
}

}  // namespace

void refine(const SilcIndex& idx, DistanceInterval& iv, std::size_t* lookups) {
    if (iv.refined()) return;
    bool collapsed;
    const Vertex u = consult(idx, iv, lookups, collapsed);
    if (!collapsed) step_to(idx, iv, u);
}

void refine_with_chain(const SilcIndex& idx, DistanceInterval& iv, std::size_t* lookups) {
    if (iv.refined()) return;
    const std::uint32_t cn = idx.chain_of(iv.v_n);
    if (cn != SilcIndex::kNoChain && iv.prev != kNoVertex) {
        // on a chain the next hop is forced; no lookup needed
        const auto& ce = idx.chain_entry(iv.v_n);
        const int side = ce.toward[0] == iv.prev ? 1 : 0;
        if (ce.toward[side] != kNoVertex) {
            if (idx.chain_of(iv.target) == cn) {
                step_to(idx, iv, ce.toward[side]);
            } else {
                // target lies beyond: jump straight to the junction
                iv.d += ce.dist[side];
                iv.prev = kNoVertex;
                iv.v_n = ce.end[side];
                if (iv.v_n == iv.target) {
                    iv.exact = iv.d;
                    iv.lb = iv.ub = static_cast<double>(iv.d);
                }
            }
            return;
        }
    }
    bool collapsed;
    const Vertex u = consult(idx, iv, lookups, collapsed);
    if (collapsed) return;
    const std::uint32_t cu = idx.chain_of(u);
    if (u != iv.target && cu != SilcIndex::kNoChain && cu != idx.chain_of(iv.target)) {
        const auto& ce = idx.chain_entry(u);
        const int side = ce.toward[0] == iv.v_n ? 1 : 0;
        if (ce.toward[side] != kNoVertex || ce.end[side] != u) {
            iv.d += edge_between(idx.graph(), iv.v_n, u) + ce.dist[side];
            iv.prev = kNoVertex;
            iv.v_n = ce.end[side];
            if (iv.v_n == iv.target) {
                iv.exact = iv.d;
                iv.lb = iv.ub = static_cast<double>(iv.d);
            }
            return;
        }
    }
    step_to(idx, iv, u);
}

namespace {

struct QueueItem {
    double lb = 0.0;
    std::uint32_t id = 0;  // hierarchy node index or object vertex
    bool is_node = false;
    DistanceInterval iv;
};

struct QueueItemAfter {
    bool operator()(const QueueItem& a, const QueueItem& b) const {
        if (a.lb != b.lb) return a.lb > b.lb;
        if (a.is_node != b.is_node) return !a.is_node;  // nodes first
        return a.id > b.id;
    }
};

// shared candidate bookkeeping for both browsing variants
struct Browse {
    Browse(Vertex q, std::size_t want, const SilcIndex& idx, bool chain, DisbrwStats* stats)
        : q(q), want(want), idx(&idx), chain(chain), stats(stats), heap(want) {
        qp = {idx.coords().x[q], idx.coords().y[q]};
    }

    Vertex q;
    std::size_t want;
    const SilcIndex* idx;
    bool chain;
    DisbrwStats* stats;
    CandidateHeap heap;
    Point qp;
    std::priority_queue<QueueItem, std::vector<QueueItem>, QueueItemAfter> queue;
    std::unordered_map<Vertex, double> best_ub;
    std::multiset<double> ubs;
    double dk_region = std::numeric_limits<double>::infinity();

    // upper bound on the kth distance: region bound, kth-smallest candidate
    // upper bound, and the exact heap once full
    double dk() const {
        double b = dk_region;
        if (ubs.size() >= want && want > 0) b = std::min(b, *std::next(ubs.begin(), want - 1));
        if (heap.full()) b = std::min(b, static_cast<double>(heap.d_k()));
        return b;
    }

    void update_ub(Vertex o, double ub) {
        const auto [it, fresh] = best_ub.try_emplace(o, ub);
        if (fresh) {
            ubs.insert(ub);
        } else if (ub < it->second) {
            ubs.erase(ubs.find(it->second));
            it->second = ub;
            ubs.insert(ub);
        }
    }

    void do_refine(DistanceInterval& iv) {
        std::size_t* lookups = stats ? &stats->lookups : nullptr;
        if (chain)
            refine_with_chain(*idx, iv, lookups);
        else
            refine(*idx, iv, lookups);
        if (stats) ++stats->refinements;
    }

    // a fresh candidate: O(1) Euclidean prune, one refinement, then enqueue
    void offer_candidate(Vertex o) {
        if (o == q) {
            heap.offer({q, 0});
            update_ub(q, 0.0);
            return;
        }
        const double lb0 =
            idx->min_lambda(q) * std::hypot(qp.x - idx->coords().x[o], qp.y - idx->coords().y[o]);
        if (lb0 > dk()) return;
        DistanceInterval iv = make_interval(q, o);
        do_refine(iv);
        admit(o, iv);
    }

    void admit(Vertex o, DistanceInterval& iv) {
        if (iv.refined()) {
            heap.offer({o, iv.exact});
            update_ub(o, static_cast<double>(iv.exact));
            return;
        }
        update_ub(o, iv.ub);
        if (iv.lb <= dk()) queue.push({iv.lb, o, false, iv});
    }

    // returns false once the front lower bound proves the heap final
    bool pop(QueueItem& item) {
        if (queue.empty()) return false;
        item = queue.top();
        if (heap.full() && item.lb > static_cast<double>(heap.d_k())) return false;
        queue.pop();
        return true;
    }
};

bool rect_overlap(const Rect& a, const Rect& b) {
    return a.min_x <= b.max_x && b.min_x <= a.max_x && a.min_y <= b.max_y && b.min_y <= a.max_y;
}

double max_dist_to_rect(Point p, const Rect& r) {
    const double dx = std::max(std::abs(p.x - r.min_x), std::abs(p.x - r.max_x));
    const double dy = std::max(std::abs(p.y - r.min_y), std::abs(p.y - r.max_y));
    return std::hypot(dx, dy);
}

}  // namespace

KnnResult knn_disbrw(Vertex q, std::size_t k, const SilcIndex& idx, const ObjectHierarchy& oh,
                     DisbrwStats* stats, bool chain_refine) {
    Browse st(q, std::min(k, oh.object_count()), idx, chain_refine, stats);
    const auto node_interval = [&](const Rect& r, double& lb, double& ub) {
        if (stats) ++stats->node_intervals;
        lb = std::numeric_limits<double>::infinity();
        ub = 0.0;
        bool any = false;
        double lam_lo = std::numeric_limits<double>::infinity(), lam_hi = -1.0;
        for (const SilcBlock& b : idx.blocks(q))
            if (rect_overlap(idx.block_rect(b), r)) {
                lam_lo = std::min(lam_lo, static_cast<double>(b.lam_min));
                lam_hi = std::max(lam_hi, static_cast<double>(b.lam_max));
            }
        if (lam_hi >= 0.0) {
            lb = lam_lo * std::sqrt(r.min_dist2(st.qp));
            ub = lam_hi * max_dist_to_rect(st.qp, r);
            any = true;
        }
        for (const SilcException& e : idx.exceptions(q))
            if (r.contains({idx.coords().x[e.vertex], idx.coords().y[e.vertex]})) {
                lb = std::min(lb, static_cast<double>(e.distance));
                ub = std::max(ub, static_cast<double>(e.distance));
                any = true;
            }
        if (r.contains(st.qp)) lb = 0.0;
        if (!any) {
            lb = 0.0;
            ub = std::numeric_limits<double>::infinity();
        }
    };

    st.queue.push({0.0, oh.root(), true, {}});
    QueueItem item;
    while (st.pop(item)) {
        if (!item.is_node) {
            st.do_refine(item.iv);
            st.admit(item.id, item.iv);
            continue;
        }
        if (oh.is_leaf(item.id)) {
            for (Vertex o : oh.leaf_objects(item.id)) st.offer_candidate(o);
            continue;
        }
        const auto& node = oh.nodes()[item.id];
        for (std::int32_t c = node.first_child; c < node.first_child + 4; ++c) {
            const auto& child = oh.nodes()[c];
            if (child.count == 0) continue;
            double lb, ub;
            node_interval(child.block, lb, ub);
            if (lb > st.dk()) continue;
            st.queue.push({lb, static_cast<std::uint32_t>(c), true, {}});
            if (child.count >= st.want && ub < st.dk_region) st.dk_region = ub;
        }
    }
    return st.heap.finalize();
}

KnnResult knn_db_enn(Vertex q, std::size_t k, const SilcIndex& idx, const RTree& rtree,
                     DisbrwStats* stats, bool chain_refine) {
    Browse st(q, std::min(k, rtree.object_count()), idx, chain_refine, stats);
    NNCursor cursor(rtree, st.qp);
    Vertex o;
    double de;
    for (std::size_t i = 0; i < st.want; ++i) {
        if (!cursor.next(o, de)) break;
        if (stats) ++stats->cursor_pulls;
        st.offer_candidate(o);
    }
    for (;;) {
        double front_e;
        const bool has_e = cursor.peek(front_e);
        // the cursor front, scaled by the minimum ratio, bounds every object
        // not yet pulled
        const double e_lb = has_e ? idx.min_lambda(q) * front_e : 0.0;
        if (st.queue.empty() || (has_e && e_lb < st.queue.top().lb)) {
            if (!has_e) break;
            if (st.heap.full() && e_lb > static_cast<double>(st.heap.d_k())) break;
            if (!cursor.next(o, de)) break;
            if (stats) ++stats->cursor_pulls;
            st.offer_candidate(o);
            continue;
        }
        QueueItem item;
        if (!st.pop(item)) break;
        st.do_refine(item.iv);
        st.admit(item.id, item.iv);
    }
    return st.heap.finalize();
}

}  // namespace rnk
