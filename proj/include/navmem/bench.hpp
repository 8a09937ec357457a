#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "navmem/memory.hpp"
#include "navmem/retrieval.hpp"
#include "navmem/scene.hpp"

namespace navmem::bench {

struct BenchmarkCase {
    sim::SceneDescription scene;
    std::string instruction;
    std::map<int, int> ground_truth;  // task id -> topo node id
    std::uint64_t seed = 0;
};

struct BenchParams {
    int case_count = 14;
    double mean_nodes = 80.0;
    double node_stddev = 10.0;
    int tasks_per_case = 2;
    int decoys_per_task = 2;   // 0 disables the anchor-discrimination stressor
    int timing_repeats = 5;
    double lambda = 1.0;
    memory::MemoryParams memory;
    retrieval::Query query_defaults;  // k, hops, sigma, eta, beam_width
};

// Retrieval configurations under comparison. Oracle answers from ground
// truth and is the harness-neutrality check.
enum class Config {
    Oracle,
    Flat,
    ForestOnly,
    Anchor,
    Full,        // anchor + neighbor boost
    WoForest,    // ablation: flat retrieval only
    WoTopoMap,   // ablation: edges removed, straight-line costs
    WoSpatial,   // ablation: no anchor stage (forest + boost)
    WoNeighbor,  // ablation: anchor with eta = 0
};

std::string config_name(Config c);

struct MetricsRecord {
    std::string config;
    std::string suite;
    int cases = 0;
    int queries = 0;
    double total_task_time_s = 0.0;
    double retrieval_time_ms = 0.0;  // median over timing repeats
    double top1_accuracy = 0.0;
    double success_rate = 0.0;
    double travel_distance_m = 0.0;  // mean per successful plan
    double nodes_visited = 0.0;      // mean scored nodes per query
};

// Deterministic per seed. Each task plants one correct target (anchor
// object adjacent) plus `decoys_per_task` same-label decoys that violate
// the spatial constraint.
std::vector<BenchmarkCase> generate_benchmark(const BenchParams& params,
                                              std::uint64_t seed);

// Survey observation stream for a scene: one pose per free cell in
// serpentine order, short-range sensing. Node count tracks free-cell count.
std::vector<sim::ObservationRecord> survey_stream(
    const sim::SceneDescription& scene, double sense_range = 1.6);

// Memory as the bench builds it for a case (survey stream -> dual basis).
memory::Memory build_case_memory(const BenchmarkCase& c,
                                 const BenchParams& params);

std::vector<MetricsRecord> run_retrieval_bench(
    const std::vector<BenchmarkCase>& suite, const BenchParams& params,
    const std::vector<Config>& configs);

std::vector<MetricsRecord> run_navigation_bench(
    const std::vector<BenchmarkCase>& suite, const BenchParams& params,
    const std::vector<Config>& configs);

// Component ablation sweep: Full plus the four w/o variants, same metrics.
std::vector<MetricsRecord> run_ablations(const std::vector<BenchmarkCase>& suite,
                                         const BenchParams& params);

void write_suite_jsonl(std::ostream& out,
                       const std::vector<BenchmarkCase>& suite);
std::vector<BenchmarkCase> read_suite_jsonl(std::istream& in);

// Fixed-column CSV / JSON export; throws on empty records or bad paths.
void export_csv(const std::vector<MetricsRecord>& records,
                const std::string& path);
void export_json(const std::vector<MetricsRecord>& records,
                 const std::string& path);
nlohmann::json records_to_json(const std::vector<MetricsRecord>& records);

}  // namespace navmem::bench
