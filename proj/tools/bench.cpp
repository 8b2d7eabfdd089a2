#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rnk/gtree.h"
#include "rnk/ier.h"
#include "rnk/ine.h"
#include "rnk/rng.h"
#include "rnk/road.h"
#include "rnk/silc.h"
#include "rnk/synth.h"

using namespace rnk;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Network {
    Graph graph;
    CoordinateTable coords;
};

Network load_network(const std::string& gr_path, const std::string& co_path, const std::string& kind) {
    Network net;
    const WeightKind wk = kind == "time" ? WeightKind::kTime : WeightKind::kDistance;
    std::ifstream gr(gr_path);
    if (!gr) throw FormatError("cannot open graph file " + gr_path);
    net.graph = parse_dimacs_gr(gr, wk);
    std::ifstream co(co_path);
    if (!co) throw FormatError("cannot open coordinate file " + co_path);
    net.coords = parse_dimacs_co(co, net.graph.vertex_count());
    return net;
}

std::size_t silc_budget_from_env() {
    if (const char* e = std::getenv("RNKNN_SILC_BUDGET")) return std::stoull(e);
    return std::size_t{8} << 30;
}

bool has_method(const std::vector<std::string>& methods, const std::string& name) {
    for (const auto& m : methods)
        if (m == name || m == "all") return true;
    return false;
}

template <class F>
double timed_ms(F&& f) {
    const auto t0 = Clock::now();
    f();
    return ms_since(t0);
}

// ---------------------------------------------------------------- build ----

int cmd_build(const std::string& gr, const std::string& co, const std::string& kind,
              const std::string& out_dir, const std::vector<std::string>& methods, unsigned fanout,
              unsigned tau, unsigned levels, unsigned silc_workers, const std::string& csv_path) {
    const Network net = load_network(gr, co, kind);
    fs::create_directories(out_dir);

    std::ostringstream csv;
    csv << "# build report\n# graph=" << gr << " weights=" << kind << " fanout=" << fanout
        << " tau=" << tau << " levels=" << levels << "\n";
    csv << "method,build_ms,index_bytes\n";

    const auto persist = [&](const std::string& name, const auto& index) {
        std::ofstream out(fs::path(out_dir) / (name + ".idx"), std::ios::binary);
        index.save(out);
    };

    if (has_method(methods, "gtree")) {
        double ms = 0;
        std::size_t bytes = 0;
        ms = timed_ms([&] {
            GTreeIndex idx(net.graph, fanout, tau);
            bytes = idx.byte_size();
            persist("gtree", idx);
        });
        csv << "gtree," << ms << "," << bytes << "\n";
        std::cout << "gtree built in " << ms << " ms, " << bytes << " bytes\n";
    }
    if (has_method(methods, "road")) {
        double ms = 0;
        std::size_t bytes = 0;
        ms = timed_ms([&] {
            RoadIndex idx(net.graph, fanout, levels);
            bytes = idx.byte_size();
            persist("road", idx);
        });
        csv << "road," << ms << "," << bytes << "\n";
        std::cout << "road built in " << ms << " ms, " << bytes << " bytes\n";
    }
    if (has_method(methods, "silc")) {
        SilcBuildOptions opts;
        opts.workers = silc_workers;
        opts.memory_budget = silc_budget_from_env();
        double ms = 0;
        std::size_t bytes = 0;
        ms = timed_ms([&] {
            SilcIndex idx(net.graph, net.coords, opts);
            bytes = idx.byte_size();
            persist("silc", idx);
        });
        csv << "silc," << ms << "," << bytes << "\n";
        std::cout << "silc built in " << ms << " ms, " << bytes << " bytes\n";
    }

    if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        out << csv.str();
    }
    return 0;
}

// ----------------------------------------------------------- genobjects ----

int cmd_genobjects(const std::string& gr, const std::string& co, const std::string& kind,
                   double density, unsigned clusters, unsigned cluster_size, unsigned size,
                   unsigned bucket_i, unsigned bucket_m, unsigned sets, std::uint64_t seed,
                   const std::string& out_dir) {
    const Network net = load_network(gr, co, "distance");
    fs::create_directories(out_dir);
    for (unsigned i = 0; i < sets; ++i) {
        const std::uint64_t set_seed = seed + i;
        ObjectSet o;
        std::string tag;
        if (kind == "uniform") {
            o = gen_uniform(net.graph, density, set_seed);
            tag = "uniform_d" + std::to_string(density);
        } else if (kind == "clustered") {
            o = gen_clustered(net.graph, clusters, cluster_size, set_seed);
            tag = "clustered_c" + std::to_string(clusters);
        } else if (kind == "mindist") {
            o = gen_min_dist(net.graph, net.coords, size, bucket_i, bucket_m, set_seed);
            tag = "mindist_i" + std::to_string(bucket_i);
        } else {
            throw FormatError("unknown object kind " + kind);
        }
        std::ofstream out(fs::path(out_dir) / ("objects_" + tag + "_" + std::to_string(i) + ".txt"));
        out << "# kind=" << kind << " seed=" << set_seed << " count=" << o.size() << "\n";
        save_objects(out, o);
        std::cout << "wrote " << o.size() << " objects (seed " << set_seed << ")\n";
    }
    return 0;
}

// ---------------------------------------------------------------- query ----

struct QueryAccum {
    std::vector<double> times_us;
    double settled = 0, queue_inserts = 0, oracle_calls = 0, false_hits = 0;
    double path_cost = 0, sweeps = 0, vertices_bypassed = 0;
    double refinements = 0, lookups = 0, cursor_pulls = 0;

    double mean_us() const {
        double s = 0;
        for (double t : times_us) s += t;
        return times_us.empty() ? 0 : s / static_cast<double>(times_us.size());
    }
    double percentile_us(double p) const {
        if (times_us.empty()) return 0;
        std::vector<double> t = times_us;
        std::sort(t.begin(), t.end());
        return t[std::min(t.size() - 1, static_cast<std::size_t>(p * static_cast<double>(t.size())))];
    }
};

int cmd_query(const std::string& gr, const std::string& co, const std::string& kind,
              const std::string& index_dir, const std::vector<std::string>& object_files,
              const std::vector<std::string>& methods, const std::vector<std::size_t>& ks,
              std::size_t queries, std::uint64_t seed, std::size_t warmup, bool verify,
              unsigned rtree_cap, const std::string& csv_path) {
    const Network net = load_network(gr, co, kind);
    const double lb_scale = 1.0 / max_speed(net.graph, net.coords);

    const auto load_index = [&](const std::string& name) {
        std::ifstream in(fs::path(index_dir) / (name + ".idx"), std::ios::binary);
        if (!in) throw FormatError("missing index file " + name + ".idx in " + index_dir);
        return in;
    };

    std::unique_ptr<GTreeIndex> gtree;
    std::unique_ptr<RoadIndex> road;
    std::unique_ptr<SilcIndex> silc;
    const bool want_gtree = has_method(methods, "gtree") || has_method(methods, "ier-mgtree");
    if (want_gtree) {
        auto in = load_index("gtree");
        gtree = std::make_unique<GTreeIndex>(GTreeIndex::load(in, net.graph));
    }
    if (has_method(methods, "road")) {
        auto in = load_index("road");
        road = std::make_unique<RoadIndex>(RoadIndex::load(in, net.graph));
    }
    if (has_method(methods, "disbrw") || has_method(methods, "db-enn")) {
        auto in = load_index("silc");
        silc = std::make_unique<SilcIndex>(SilcIndex::load(in, net.graph, net.coords));
    }

    std::ostringstream csv;
    csv << "# query report\n# graph=" << gr << " weights=" << kind << " seed=" << seed
        << " queries=" << queries << " warmup=" << warmup << " verify=" << (verify ? 1 : 0) << "\n";
    csv << "method,objects,k,queries,mean_us,p50_us,p95_us,settled,queue_inserts,oracle_calls,"
           "false_hits,path_cost,sweeps,vertices_bypassed,refinements,lookups,cursor_pulls\n";

    std::size_t mismatches = 0;
    for (const std::string& obj_path : object_files) {
        std::ifstream oin(obj_path);
        if (!oin) throw FormatError("cannot open object file " + obj_path);
        ObjectSet objects = load_objects(oin, net.graph.vertex_count());

        // object-side structures (index injection, outside the timed region)
        RTree rtree(objects, net.coords, rtree_cap);
        std::unique_ptr<ObjectHierarchy> oh;
        if (has_method(methods, "disbrw"))
            oh = std::make_unique<ObjectHierarchy>(objects, net.coords);
        std::unique_ptr<AssociationDirectory> ad;
        if (road) ad = std::make_unique<AssociationDirectory>(build_association_directory(*road, objects));
        std::unique_ptr<OccurrenceList> ol;
        if (gtree && has_method(methods, "gtree"))
            ol = std::make_unique<OccurrenceList>(build_occurrence_list(*gtree, objects));

        DijkstraScratch scratch;
        DijkstraOracle dijkstra_oracle(net.graph);
        std::unique_ptr<MGtreeOracle> mgtree_oracle;
        if (gtree && has_method(methods, "ier-mgtree"))
            mgtree_oracle = std::make_unique<MGtreeOracle>(*gtree);

        for (std::size_t k : ks) {
            std::mt19937_64 rng(seed);
            std::vector<Vertex> qs(warmup + queries);
            for (auto& q : qs) q = static_cast<Vertex>(rand_range(rng, 0, net.graph.vertex_count() - 1));

            struct Runner {
                std::string name;
                std::function<KnnResult(Vertex, QueryAccum&)> run;
            };
            std::vector<Runner> runners;
            if (has_method(methods, "ine"))
                runners.push_back({"ine", [&](Vertex q, QueryAccum& a) {
                                       IneStats st;
                                       auto r = knn_ine(q, k, net.graph, objects, scratch, &st);
                                       a.settled += static_cast<double>(st.settled);
                                       return r;
                                   }});
            if (has_method(methods, "ier-dijkstra"))
                runners.push_back({"ier-dijkstra", [&](Vertex q, QueryAccum& a) {
                                       IerStats st;
                                       auto r = knn_ier(q, k, dijkstra_oracle, rtree, net.coords, lb_scale, &st);
                                       a.oracle_calls += static_cast<double>(st.oracle_calls);
                                       a.false_hits += static_cast<double>(st.false_hits);
                                       return r;
                                   }});
            if (mgtree_oracle)
                runners.push_back({"ier-mgtree", [&](Vertex q, QueryAccum& a) {
                                       IerStats st;
                                       auto r = knn_ier(q, k, *mgtree_oracle, rtree, net.coords, lb_scale, &st);
                                       a.oracle_calls += static_cast<double>(st.oracle_calls);
                                       a.false_hits += static_cast<double>(st.false_hits);
                                       return r;
                                   }});
            if (silc && oh)
                runners.push_back({"disbrw", [&](Vertex q, QueryAccum& a) {
                                       DisbrwStats st;
                                       auto r = knn_disbrw(q, k, *silc, *oh, &st);
                                       a.refinements += static_cast<double>(st.refinements);
                                       a.lookups += static_cast<double>(st.lookups);
                                       return r;
                                   }});
            if (silc && has_method(methods, "db-enn"))
                runners.push_back({"db-enn", [&](Vertex q, QueryAccum& a) {
                                       DisbrwStats st;
                                       auto r = knn_db_enn(q, k, *silc, rtree, &st);
                                       a.refinements += static_cast<double>(st.refinements);
                                       a.lookups += static_cast<double>(st.lookups);
                                       a.cursor_pulls += static_cast<double>(st.cursor_pulls);
                                       return r;
                                   }});
            if (road && ad)
                runners.push_back({"road", [&](Vertex q, QueryAccum& a) {
                                       RoadStats st;
                                       auto r = knn_road(q, k, *road, *ad, &st);
                                       a.settled += static_cast<double>(st.settled);
                                       a.queue_inserts += static_cast<double>(st.queue_inserts);
                                       a.vertices_bypassed += static_cast<double>(st.vertices_bypassed);
                                       return r;
                                   }});
            if (gtree && ol)
                runners.push_back({"gtree", [&](Vertex q, QueryAccum& a) {
                                       GtreeStats st;
                                       auto r = knn_gtree(q, k, *gtree, *ol, &st);
                                       a.settled += static_cast<double>(st.leaf_settled);
                                       a.path_cost += static_cast<double>(st.path_cost);
                                       a.sweeps += static_cast<double>(st.sweeps);
                                       return r;
                                   }});

            for (auto& runner : runners) {
                QueryAccum accum;
                QueryAccum warm_discard;
                for (std::size_t i = 0; i < qs.size(); ++i) {
                    const Vertex q = qs[i];
                    const bool measured = i >= warmup;
                    QueryAccum& a = measured ? accum : warm_discard;
                    const auto t0 = Clock::now();
                    const KnnResult r = runner.run(q, a);
                    const double us = std::chrono::duration<double, std::micro>(Clock::now() - t0).count();
                    if (measured) a.times_us.push_back(us);
                    if (verify && measured) {
                        IneStats ist;
                        const KnnResult expect = knn_ine(q, k, net.graph, objects, scratch, &ist);
                        if (r != expect) {
                            ++mismatches;
                            std::cerr << "MISMATCH method=" << runner.name << " objects=" << obj_path
                                      << " seed=" << seed << " q=" << q << " k=" << k << "\n";
                            return 2;
                        }
                    }
                }
                const double n = static_cast<double>(queries ? queries : 1);
                csv << runner.name << "," << fs::path(obj_path).filename().string() << "," << k << ","
                    << queries << "," << accum.mean_us() << "," << accum.percentile_us(0.50) << ","
                    << accum.percentile_us(0.95) << "," << accum.settled / n << ","
                    << accum.queue_inserts / n << "," << accum.oracle_calls / n << ","
                    << accum.false_hits / n << "," << accum.path_cost / n << "," << accum.sweeps / n
                    << "," << accum.vertices_bypassed / n << "," << accum.refinements / n << ","
                    << accum.lookups / n << "," << accum.cursor_pulls / n << "\n";
                std::cout << runner.name << " k=" << k << ": mean " << accum.mean_us() << " us\n";
            }
        }
    }

    if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        out << csv.str();
    } else {
        std::cout << csv.str();
    }
    return mismatches ? 2 : 0;
}

// --------------------------------------------------------------- verify ----

int cmd_verify(std::size_t trials, std::uint64_t seed, const std::vector<std::string>& methods) {
    std::mt19937_64 rng(seed);
    std::size_t checked = 0, mismatched = 0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const std::size_t n = rand_range(rng, 60, 300);
        const std::size_t m = 2 * n + rand_range(rng, 0, n);
        const auto net = make_synthetic_network(n, m, seed * 1000 + trial);
        const Graph& g = net.distance_graph;
        ObjectSet objects = gen_uniform(g, 0.02 + 0.1 * rand_unit(rng), rng());
        const Vertex q = static_cast<Vertex>(rand_range(rng, 0, n - 1));
        const std::size_t k = 1 + rand_range(rng, 0, 14);

        DijkstraScratch scratch;
        std::vector<Distance> dist;
        dijkstra_sssp(q, g, scratch, dist);
        std::vector<KnnEntry> expect;
        for (Vertex o : objects.ids) expect.push_back({o, dist[o]});
        const KnnResult oracle = finalize_candidates(expect, k);

        RTree rtree(objects, net.coords, 8);
        ObjectHierarchy oh(objects, net.coords, 16);
        const double lb_scale = 1.0 / max_speed(g, net.coords);

        const auto check = [&](const std::string& name, const KnnResult& got) {
            ++checked;
            if (got != oracle) {
                ++mismatched;
                std::cerr << "MISMATCH method=" << name << " trial=" << trial << " seed=" << seed
                          << " q=" << q << " k=" << k << "\n";
            }
        };

        if (has_method(methods, "ine")) check("ine", knn_ine(q, k, g, objects, scratch));
        if (has_method(methods, "ier-dijkstra")) {
            DijkstraOracle oracle_d(g);
            check("ier-dijkstra", knn_ier(q, k, oracle_d, rtree, net.coords, lb_scale));
        }
        if (has_method(methods, "ier-mgtree") || has_method(methods, "gtree")) {
            GTreeIndex gt(g, 4, 32);
            if (has_method(methods, "ier-mgtree")) {
                MGtreeOracle oracle_g(gt);
                check("ier-mgtree", knn_ier(q, k, oracle_g, rtree, net.coords, lb_scale));
            }
            if (has_method(methods, "gtree")) {
                const OccurrenceList ol = build_occurrence_list(gt, objects);
                check("gtree", knn_gtree(q, k, gt, ol));
            }
        }
        if (has_method(methods, "disbrw") || has_method(methods, "db-enn")) {
            SilcIndex silc(g, net.coords);
            if (has_method(methods, "disbrw")) check("disbrw", knn_disbrw(q, k, silc, oh));
            if (has_method(methods, "db-enn")) check("db-enn", knn_db_enn(q, k, silc, rtree));
        }
        if (has_method(methods, "road")) {
            // keep roughly 8+ vertices per leaf Rnet on small instances
            std::uint32_t road_levels = 1;
            while ((n >> (2 * (road_levels + 1))) >= 8) ++road_levels;
            RoadIndex rd(g, 4, road_levels);
            const AssociationDirectory ad = build_association_directory(rd, objects);
            check("road", knn_road(q, k, rd, ad));
        }
    }
    std::cout << "verify: " << checked << " method runs over " << trials << " trials, " << mismatched
              << " mismatches\n";
    return mismatched ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"road-network kNN benchmark harness"};
    app.require_subcommand(1);

    std::string gr, co, kind = "distance", out_dir = ".", csv_path, index_dir = ".";
    std::vector<std::string> methods{"all"};
    unsigned fanout = 4, tau = 64, levels = 7, silc_workers = 1, rtree_cap = 64;
    std::uint64_t seed = 1;

    auto* build = app.add_subcommand("build", "build and serialize network indexes");
    build->add_option("--gr", gr, "DIMACS .gr graph file")->required();
    build->add_option("--co", co, "DIMACS .co coordinate file")->required();
    build->add_option("--weights", kind, "distance|time");
    build->add_option("--out", out_dir, "output directory");
    build->add_option("--methods", methods, "gtree road silc (or all)");
    build->add_option("--fanout", fanout, "partition fanout f");
    build->add_option("--tau", tau, "G-tree leaf capacity tau");
    build->add_option("--levels", levels, "ROAD hierarchy levels l");
    build->add_option("--silc-workers", silc_workers, "SILC build threads");
    build->add_option("--csv", csv_path, "CSV build report path");

    std::string obj_kind = "uniform";
    double density = 0.001;
    unsigned clusters = 5, cluster_size = 100, size = 100, bucket_i = 1, bucket_m = 5, sets = 1;
    auto* gen = app.add_subcommand("genobjects", "generate object sets");
    gen->add_option("--gr", gr, "DIMACS .gr graph file")->required();
    gen->add_option("--co", co, "DIMACS .co coordinate file")->required();
    gen->add_option("--kind", obj_kind, "uniform|clustered|mindist");
    gen->add_option("--density", density, "uniform density d");
    gen->add_option("--clusters", clusters, "clustered: cluster count");
    gen->add_option("--cluster-size", cluster_size, "clustered: max vertices per cluster");
    gen->add_option("--size", size, "mindist: object count");
    gen->add_option("--bucket-i", bucket_i, "mindist: bucket index i");
    gen->add_option("--bucket-m", bucket_m, "mindist: bucket count m");
    gen->add_option("--sets", sets, "number of sets to emit");
    gen->add_option("--seed", seed, "base seed");
    gen->add_option("--out", out_dir, "output directory");

    std::vector<std::string> object_files;
    std::vector<std::size_t> ks{10};
    std::size_t queries = 10000, warmup = 100;
    bool verify = false;
    auto* query = app.add_subcommand("query", "run a query workload");
    query->add_option("--gr", gr, "DIMACS .gr graph file")->required();
    query->add_option("--co", co, "DIMACS .co coordinate file")->required();
    query->add_option("--weights", kind, "distance|time");
    query->add_option("--index-dir", index_dir, "directory with *.idx files");
    query->add_option("--objects", object_files, "object set files")->required();
    query->add_option("--methods", methods,
                      "ine ier-dijkstra ier-mgtree disbrw db-enn road gtree (or all)");
    query->add_option("--k", ks, "k values");
    query->add_option("--queries", queries, "measured queries per batch");
    query->add_option("--warmup", warmup, "unmeasured warm-up queries");
    query->add_option("--seed", seed, "query seed");
    query->add_option("--rtree-cap", rtree_cap, "R-tree node capacity");
    query->add_flag("--verify", verify, "compare every result against INE");
    query->add_option("--csv", csv_path, "CSV output path (stdout when omitted)");

    std::size_t trials = 100;
    auto* ver = app.add_subcommand("verify", "oracle equivalence on random graphs");
    ver->add_option("--trials", trials, "number of random instances");
    ver->add_option("--seed", seed, "base seed");
    ver->add_option("--methods", methods, "methods to verify (or all)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed())
            return cmd_build(gr, co, kind, out_dir, methods, fanout, tau, levels, silc_workers, csv_path);
        if (gen->parsed())
            return cmd_genobjects(gr, co, obj_kind, density, clusters, cluster_size, size, bucket_i,
                                  bucket_m, sets, seed, out_dir);
        if (query->parsed())
            return cmd_query(gr, co, kind, index_dir, object_files, methods, ks, queries, seed, warmup,
                             verify, rtree_cap, csv_path);
        if (ver->parsed()) return cmd_verify(trials, seed, methods);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
