// navmem: scene generation, exploration, memory construction, retrieval,
// route planning, and benchmarking behind one executable.
//
// Exit codes: 0 success, 2 parse error, 3 I/O error, 4 domain error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "navmem/bench.hpp"
#include "navmem/errors.hpp"
#include "navmem/explore.hpp"
#include "navmem/instruction.hpp"
#include "navmem/memory.hpp"
#include "navmem/planner.hpp"
#include "navmem/retrieval.hpp"
#include "navmem/scene.hpp"
#include "navmem/service.hpp"

using nlohmann::json;
using namespace navmem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitIo = 3;
constexpr int kExitDomain = 4;

json read_json_file(const std::string& path, const char* stage) {
    std::ifstream in(path);
    if (!in) throw IoError(std::string(stage) + ": cannot open " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded())
        throw ParseError(std::string(stage) + ": invalid JSON in " + path);
    return j;
}

void write_text_file(const std::string& path, const std::string& text,
                     const char* stage) {
    std::ofstream out(path);
    if (!out) throw IoError(std::string(stage) + ": cannot open " + path);
    out << text;
    if (!out) throw IoError(std::string(stage) + ": write failed for " + path);
}

void emit(const json& j, const std::string& out_path, const char* stage) {
    if (out_path.empty())
        std::cout << j.dump(2) << '\n';
    else
        write_text_file(out_path, j.dump(2) + "\n", stage);
}

// Config file (JSON object keyed by long flag names) provides defaults for
// the global flags and the active subcommand; flags given on the command
// line win. Unknown keys are rejected.
void apply_config(CLI::App& app, const json& cfg, const std::string& path) {
    if (!cfg.is_object())
        throw ParseError("config: " + path + " must be a JSON object");
    std::vector<CLI::App*> scopes{&app};
    for (auto* sub : app.get_subcommands()) scopes.push_back(sub);
    for (const auto& [key, value] : cfg.items()) {
        CLI::Option* opt = nullptr;
        for (auto* scope : scopes)
            for (auto* o : scope->get_options())
                for (const auto& n : o->get_lnames())
                    if (n == key) opt = o;
        if (!opt)
            throw ParseError("config: unknown key \"" + key + "\" in " + path);
        if (opt->count() > 0) continue;  // explicit flag wins
        if (value.is_array()) {
            for (const auto& v : value)
                opt->add_result(v.is_string() ? v.get<std::string>() : v.dump());
        } else {
            opt->add_result(value.is_string() ? value.get<std::string>()
                                              : value.dump());
        }
        opt->run_callback();
    }
}

std::vector<int> parse_id_list(const std::string& s, const char* stage) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw ParseError(std::string(stage) + ": bad node id \"" + item +
                             "\" in list \"" + s + "\"");
        }
    }
    if (out.empty())
        throw ParseError(std::string(stage) + ": empty id list \"" + s + "\"");
    return out;
}

std::vector<std::pair<int, int>> parse_precedence(const std::string& s) {
    std::vector<std::pair<int, int>> out;
    if (s.empty()) return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto lt = item.find('<');
        if (lt == std::string::npos)
            throw ParseError("plan: precedence entry \"" + item +
                             "\" must look like before<after");
        try {
            out.emplace_back(std::stoi(item.substr(0, lt)),
                             std::stoi(item.substr(lt + 1)));
        } catch (const std::exception&) {
            throw ParseError("plan: bad precedence entry \"" + item + "\"");
        }
    }
    return out;
}

std::vector<bench::MetricsRecord> records_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("export: results must be a JSON array");
    std::vector<bench::MetricsRecord> out;
    for (const auto& rj : j) {
        try {
            bench::MetricsRecord r;
            r.config = rj.at("config");
            r.suite = rj.at("suite");
            r.cases = rj.at("cases");
            r.queries = rj.at("queries");
            r.total_task_time_s = rj.at("total_task_time_s");
            r.retrieval_time_ms = rj.at("retrieval_time_ms");
            r.top1_accuracy = rj.at("top1_accuracy");
            r.success_rate = rj.at("success_rate");
            r.travel_distance_m = rj.at("travel_distance_m");
            r.nodes_visited = rj.at("nodes_visited");
            out.push_back(std::move(r));
        } catch (const json::exception& e) {
            throw ParseError(std::string("export: bad record: ") + e.what());
        }
    }
    return out;
}

struct Cli {
    std::string config_path;
    std::uint64_t seed = 0;
    bool verbose = false;

    // gen-scene
    sim::SceneConfig scene_cfg;
    std::string out_path;

    // explore
    std::string scene_path;
    double start_x = 0.5, start_y = 0.5;
    sim::ExploreParams explore_params;

    // build-memory
    std::string stream_path;
    memory::MemoryParams mem_params;

    // query / plan
    std::string memory_path;
    std::string instruction;
    std::string query_path;
    std::string mode_override;
    retrieval::Query query_defaults;

    // plan
    std::string targets_csv;
    std::string semantic_csv;
    std::string precedence_csv;
    int start_node = -1;
    double lambda = 1.0;
    bool guide = false;

    // bench / ablate / export
    bench::BenchParams bench_params;
    std::string suite_in, suite_out, csv_path, json_path, results_path;
    bool retrieval_only = false;
};

void add_query_flags(CLI::App* sub, Cli& o) {
    sub->add_option("--k", o.query_defaults.k, "Candidates to return");
    sub->add_option("--hops", o.query_defaults.hops, "Neighborhood hop count");
    sub->add_option("--sigma", o.query_defaults.sigma,
                    "Gaussian falloff scale (m)");
    sub->add_option("--eta", o.query_defaults.eta, "Neighbor boost strength");
    sub->add_option("--beam-width", o.query_defaults.beam_width,
                    "Forest descent beam width");
    sub->add_option("--match-threshold", o.query_defaults.match_threshold,
                    "Anchor/context match threshold");
}

void add_memory_flags(CLI::App* sub, Cli& o) {
    sub->add_option("--delta-spatial", o.mem_params.delta_spatial,
                    "Edge distance threshold (m)");
    sub->add_option("--omega", o.mem_params.omega,
                    "Spatial weight in pair similarity");
    sub->add_option("--alpha", o.mem_params.alpha,
                    "Spatial weight in fused features");
    sub->add_option("--tau", o.mem_params.merge_stop_tau,
                    "Agglomeration stop threshold");
    sub->add_option("--embedding-dim", o.mem_params.embedding_dim,
                    "Embedding dimension");
    sub->add_option("--dedup-radius", o.mem_params.dedup_radius,
                    "Key position dedup radius (m)");
    sub->add_option("--max-branching", o.mem_params.max_branching,
                    "Forest fan-out cap");
}

int run(int argc, char** argv) {
    Cli o;
    CLI::App app{"Spatial-semantic memory, retrieval and route planning"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    app.add_option("--config", o.config_path,
                   "JSON config file; explicit flags override it");
    app.add_option("--seed", o.seed, "Seed for all randomness");
    app.add_flag("--verbose", o.verbose, "Progress logging on stderr");

    auto* gen = app.add_subcommand("gen-scene", "Generate a synthetic scene");
    gen->add_option("--width", o.scene_cfg.width, "Scene width (m)");
    gen->add_option("--height", o.scene_cfg.height, "Scene height (m)");
    gen->add_option("--objects", o.scene_cfg.object_count, "Object count");
    gen->add_option("--obstacles", o.scene_cfg.obstacle_count, "Obstacle count");
    gen->add_option("--min-separation", o.scene_cfg.min_separation,
                    "Minimum object separation (m)");
    gen->add_option("--out", o.out_path, "Output path (default stdout)");

    auto* exp = app.add_subcommand("explore",
                                   "Frontier-explore a scene into a stream");
    exp->add_option("--scene", o.scene_path, "Scene JSON")->required();
    exp->add_option("--start-x", o.start_x, "Start x (m)");
    exp->add_option("--start-y", o.start_y, "Start y (m)");
    exp->add_option("--sensor-range", o.explore_params.sensor_range,
                    "Sensor disk radius (m)");
    exp->add_option("--min-frontier-size", o.explore_params.min_frontier_size,
                    "Minimum frontier cluster size");
    exp->add_option("--step-budget", o.explore_params.step_budget,
                    "Maximum exploration steps");
    exp->add_option("--out", o.out_path, "Output JSONL path (default stdout)");

    auto* bm = app.add_subcommand("build-memory",
                                  "Build dual-basis memory from a stream");
    bm->add_option("--stream", o.stream_path, "Observation JSONL")->required();
    add_memory_flags(bm, o);
    bm->add_option("--out", o.out_path, "Output path (default stdout)");

    auto* qr = app.add_subcommand("query", "Retrieve nodes for an instruction");
    qr->add_option("--memory", o.memory_path, "Memory JSON")->required();
    qr->add_option("--instruction", o.instruction,
                   "Instruction text (mini-grammar)");
    qr->add_option("--query", o.query_path, "Explicit query JSON file");
    qr->add_option("--mode", o.mode_override,
                   "Force mode: flat|forest|anchor|boosted");
    add_query_flags(qr, o);
    qr->add_option("--out", o.out_path, "Output path (default stdout)");

    auto* pl = app.add_subcommand("plan", "Plan a visiting order and route");
    pl->add_option("--memory", o.memory_path, "Memory JSON")->required();
    pl->add_option("--targets", o.targets_csv, "Target node ids, comma list")
        ->required();
    pl->add_option("--semantic", o.semantic_csv,
                   "Instruction order of the same ids (default: as given)");
    pl->add_option("--precedence", o.precedence_csv,
                   "Hard orderings, e.g. 3<7,7<9");
    pl->add_option("--start", o.start_node, "Start node id");
    pl->add_option("--lambda", o.lambda, "Semantic-penalty weight");
    pl->add_flag("--guide", o.guide, "Include a human-readable guide");
    pl->add_option("--out", o.out_path, "Output path (default stdout)");

    auto* be = app.add_subcommand("bench", "Run the benchmark suite");
    be->add_option("--cases", o.bench_params.case_count, "Benchmark cases");
    be->add_option("--tasks-per-case", o.bench_params.tasks_per_case,
                   "Tasks per instruction");
    be->add_option("--decoys", o.bench_params.decoys_per_task,
                   "Spatial-violating decoys per task");
    be->add_option("--timing-repeats", o.bench_params.timing_repeats,
                   "Timing repetitions (median reported)");
    be->add_option("--lambda", o.bench_params.lambda, "Planner lambda");
    be->add_flag("--retrieval-only", o.retrieval_only,
                 "Skip the navigation suite");
    be->add_option("--suite-in", o.suite_in, "Read cases from JSONL");
    be->add_option("--suite-out", o.suite_out, "Write generated cases to JSONL");
    be->add_option("--csv", o.csv_path, "Also export CSV here");
    be->add_option("--json", o.json_path, "Also export JSON here");
    be->add_option("--out", o.out_path, "Results path (default stdout)");

    auto* ab = app.add_subcommand("ablate", "Run the component ablation sweep");
    ab->add_option("--cases", o.bench_params.case_count, "Benchmark cases");
    ab->add_option("--tasks-per-case", o.bench_params.tasks_per_case,
                   "Tasks per instruction");
    ab->add_option("--decoys", o.bench_params.decoys_per_task,
                   "Spatial-violating decoys per task");
    ab->add_option("--timing-repeats", o.bench_params.timing_repeats,
                   "Timing repetitions (median reported)");
    ab->add_option("--lambda", o.bench_params.lambda, "Planner lambda");
    ab->add_option("--suite-in", o.suite_in, "Read cases from JSONL");
    ab->add_option("--csv", o.csv_path, "Also export CSV here");
    ab->add_option("--json", o.json_path, "Also export JSON here");
    ab->add_option("--out", o.out_path, "Results path (default stdout)");

    auto* ex = app.add_subcommand("export", "Convert results JSON to CSV/JSON");
    ex->add_option("--results", o.results_path, "Results JSON (records array)")
        ->required();
    ex->add_option("--csv", o.csv_path, "CSV output path");
    ex->add_option("--json", o.json_path, "JSON output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitParse;
    }
    if (!o.config_path.empty())
        apply_config(app, read_json_file(o.config_path, "config"),
                     o.config_path);

    if (app.got_subcommand(gen)) {
        auto scene = sim::generate_scene(o.scene_cfg, o.seed);
        emit(sim::scene_to_json(scene), o.out_path, "gen-scene");
    } else if (app.got_subcommand(exp)) {
        auto scene = sim::scene_from_json(
            read_json_file(o.scene_path, "explore"));
        auto result =
            sim::explore(scene, Point{o.start_x, o.start_y}, o.explore_params);
        std::ostringstream buf;
        sim::write_stream_jsonl(buf, result.stream);
        if (o.verbose)
            std::cerr << "explore: " << result.stream.size() << " records, "
                      << (result.frontier_free ? "frontier-free"
                                               : "budget-limited")
                      << "\n";
        if (o.out_path.empty())
            std::cout << buf.str();
        else
            write_text_file(o.out_path, buf.str(), "explore");
    } else if (app.got_subcommand(bm)) {
        std::ifstream in(o.stream_path);
        if (!in)
            throw IoError("build-memory: cannot open " + o.stream_path);
        auto stream = sim::read_stream_jsonl(in);
        auto embed = service::embedder_from_env(o.mem_params.embedding_dim);
        auto mem = memory::build_memory(stream, o.mem_params, embed);
        if (o.verbose)
            std::cerr << "build-memory: " << mem.map.nodes.size() << " nodes, "
                      << mem.map.edges.size() << " edges, "
                      << mem.forest.roots.size() << " roots\n";
        emit(memory::memory_to_json(mem), o.out_path, "build-memory");
    } else if (app.got_subcommand(qr)) {
        auto mem = memory::memory_from_json(
            read_json_file(o.memory_path, "query"));
        auto embed = service::embedder_from_env(mem.params.embedding_dim);
        auto run_one = [&](retrieval::Query q) {
            if (!o.mode_override.empty()) {
                json mj = retrieval::query_to_json(q);
                mj["mode"] = o.mode_override;
                q = retrieval::query_from_json(mj);
            }
            return retrieval::result_to_json(retrieval::search(q, mem, embed));
        };
        if (!o.query_path.empty()) {
            auto q = retrieval::query_from_json(
                read_json_file(o.query_path, "query"));
            emit(run_one(q), o.out_path, "query");
        } else if (!o.instruction.empty()) {
            auto graph = service::parse_instruction_from_env(o.instruction);
            auto steps = instr::schedule(graph, o.query_defaults);
            json results = json::array();
            for (const auto& step : steps) {
                if (step.anchor_resolution) continue;
                results.push_back({{"task_id", step.task_id},
                                   {"query", retrieval::query_to_json(step.query)},
                                   {"result", run_one(step.query)}});
            }
            emit(results.size() == 1 ? results[0]["result"] : results,
                 o.out_path, "query");
        } else {
            throw ParseError("query: provide --instruction or --query");
        }
    } else if (app.got_subcommand(pl)) {
        auto mem = memory::memory_from_json(
            read_json_file(o.memory_path, "plan"));
        auto targets = parse_id_list(o.targets_csv, "plan");
        auto semantic = o.semantic_csv.empty()
                            ? targets
                            : parse_id_list(o.semantic_csv, "plan");
        std::optional<int> start;
        if (pl->count("--start")) start = o.start_node;
        auto plan = planner::plan_route(mem.map, targets, semantic, o.lambda,
                                        start, parse_precedence(o.precedence_csv));
        json out = planner::plan_to_json(plan);
        if (o.guide) out["guide"] = planner::structured_guide(plan, mem.map);
        emit(out, o.out_path, "plan");
    } else if (app.got_subcommand(be) || app.got_subcommand(ab)) {
        const char* stage = app.got_subcommand(be) ? "bench" : "ablate";
        std::vector<bench::BenchmarkCase> suite;
        if (!o.suite_in.empty()) {
            std::ifstream in(o.suite_in);
            if (!in)
                throw IoError(std::string(stage) + ": cannot open " + o.suite_in);
            suite = bench::read_suite_jsonl(in);
        } else {
            suite = bench::generate_benchmark(o.bench_params, o.seed);
        }
        if (!o.suite_out.empty()) {
            std::ofstream out(o.suite_out);
            if (!out)
                throw IoError(std::string(stage) + ": cannot open " +
                              o.suite_out);
            bench::write_suite_jsonl(out, suite);
        }
        std::vector<bench::MetricsRecord> records;
        if (app.got_subcommand(ab)) {
            records = bench::run_ablations(suite, o.bench_params);
        } else {
            std::vector<bench::Config> configs{
                bench::Config::Oracle, bench::Config::Flat,
                bench::Config::ForestOnly, bench::Config::Anchor,
                bench::Config::Full};
            records = bench::run_retrieval_bench(suite, o.bench_params, configs);
            if (!o.retrieval_only) {
                auto nav =
                    bench::run_navigation_bench(suite, o.bench_params, configs);
                records.insert(records.end(), nav.begin(), nav.end());
            }
            for (const auto& r : records)
                if (r.config == "oracle" &&
                    (r.top1_accuracy != 1.0 ||
                     (r.suite == "navigation" && r.success_rate != 1.0)))
                    throw DomainError(
                        "bench: harness neutrality violated; oracle config "
                        "scored below 1.0 on suite " + r.suite);
        }
        if (!o.csv_path.empty()) bench::export_csv(records, o.csv_path);
        if (!o.json_path.empty()) bench::export_json(records, o.json_path);
        emit(bench::records_to_json(records), o.out_path, stage);
    } else if (app.got_subcommand(ex)) {
        auto records =
            records_from_json(read_json_file(o.results_path, "export"));
        if (o.csv_path.empty() && o.json_path.empty())
            throw ParseError("export: provide --csv and/or --json");
        if (!o.csv_path.empty()) bench::export_csv(records, o.csv_path);
        if (!o.json_path.empty()) bench::export_json(records, o.json_path);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
