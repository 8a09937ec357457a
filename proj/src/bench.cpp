#include "navmem/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <set>
#include <sstream>

#include "navmem/errors.hpp"
#include "navmem/instruction.hpp"
#include "navmem/planner.hpp"

namespace navmem::bench {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string config_name(Config c) {
    switch (c) {
        case Config::Oracle: return "oracle";
        case Config::Flat: return "flat";
        case Config::ForestOnly: return "forest";
        case Config::Anchor: return "anchor";
        case Config::Full: return "full";
        case Config::WoForest: return "wo_semantic_forest";
        case Config::WoTopoMap: return "wo_topological_map";
        case Config::WoSpatial: return "wo_spatial_enhancement";
        case Config::WoNeighbor: return "wo_neighbor_enhancement";
    }
    return "unknown";
}

std::vector<sim::ObservationRecord> survey_stream(
    const sim::SceneDescription& scene, double sense_range) {
    std::vector<sim::ObservationRecord> stream;
    int w = static_cast<int>(scene.bounds.width());
    int h = static_cast<int>(scene.bounds.height());
    int t = 0;
    for (int y = 0; y < h; ++y) {
        for (int step = 0; step < w; ++step) {
            int x = (y % 2 == 0) ? step : (w - 1 - step);  // serpentine
            Point pose{scene.bounds.min_x + x + 0.5, scene.bounds.min_y + y + 0.5};
            if (scene.in_obstacle(pose)) continue;
            sim::ObservationRecord rec;
            rec.t = t++;
            rec.pose.position = pose;
            for (const auto& obj : scene.objects)
                if (distance(obj.position, pose) <= sense_range)
                    rec.visible_object_ids.push_back(obj.id);
            std::sort(rec.visible_object_ids.begin(),
                      rec.visible_object_ids.end());
            rec.obs_token = sim::synthesize_obs_token(scene, rec.visible_object_ids);
            stream.push_back(std::move(rec));
        }
    }
    return stream;
}

namespace {

// Planting grid for one case: every object sits at a cell center so that
// the short-range survey makes descriptions strictly local (one cell sees
// only its own objects).
struct Plant {
    int cx = 0;
    int cy = 0;
};

constexpr double kSurveyRange = 0.7;

int cell_node_id(const sim::SceneDescription& scene, int cx, int cy) {
    // Matches survey_stream's serpentine numbering on obstacle-free scenes.
    int w = static_cast<int>(scene.bounds.width());
    int x_in_row = (cy % 2 == 0) ? cx : (w - 1 - cx);
    return cy * w + x_in_row;
}

int chebyshev(const Plant& a, const Plant& b) {
    return std::max(std::abs(a.cx - b.cx), std::abs(a.cy - b.cy));
}

}  // namespace

std::vector<BenchmarkCase> generate_benchmark(const BenchParams& params,
                                              std::uint64_t seed) {
    if (params.case_count < 1 || params.tasks_per_case < 1 ||
        params.decoys_per_task < 0 || params.mean_nodes < 16.0)
        throw DomainError("generate_benchmark: infeasible params");
    const auto& vocab = sim::default_vocabulary();
    if (static_cast<std::size_t>(params.tasks_per_case) * 3 > vocab.size())
        throw DomainError(
            "generate_benchmark: not enough labels for that many tasks");

    std::vector<BenchmarkCase> suite;
    for (int c = 0; c < params.case_count; ++c) {
        std::uint64_t case_seed = seed * 7919 + static_cast<std::uint64_t>(c);
        Rng rng(case_seed);

        double target_nodes =
            params.mean_nodes + params.node_stddev * rng.next_normal();
        target_nodes = std::max(25.0, target_nodes);
        int w = std::max(5, static_cast<int>(std::lround(std::sqrt(target_nodes))));
        int h = std::max(5, static_cast<int>(std::lround(target_nodes / w)));
        // Grow the grid until rejection sampling has comfortable headroom
        // for all plants at the Chebyshev-2 spacing.
        int required = params.tasks_per_case * (3 + params.decoys_per_task);
        auto capacity = [](int gw, int gh) {
            return ((gw + 1) / 2) * ((gh + 1) / 2);
        };
        while (capacity(w, h) < 2 * required) {
            if (w <= h)
                ++w;
            else
                ++h;
        }

        BenchmarkCase bc;
        bc.seed = case_seed;
        bc.scene.bounds = Rect{0.0, 0.0, static_cast<double>(w),
                               static_cast<double>(h)};
        bc.scene.rng_seed = case_seed;

        // Planted cells stay Chebyshev >= 2 apart (no topological edge can
        // form between them at 1 m spacing); a plant adjacent to its own
        // reference cell is the single allowed exception.
        std::vector<Plant> occupied;
        auto place = [&](int near_x, int near_y, bool adjacent) -> Plant {
            for (int attempt = 0; attempt < 2000; ++attempt) {
                Plant p;
                if (adjacent) {
                    static const int dx[4] = {1, -1, 0, 0};
                    static const int dy[4] = {0, 0, 1, -1};
                    int k = static_cast<int>(rng.next_below(4));
                    p = Plant{near_x + dx[k], near_y + dy[k]};
                } else {
                    p = Plant{static_cast<int>(rng.next_below(
                                  static_cast<std::uint64_t>(w))),
                              static_cast<int>(rng.next_below(
                                  static_cast<std::uint64_t>(h)))};
                }
                if (p.cx < 0 || p.cx >= w || p.cy < 0 || p.cy >= h) continue;
                bool clear = true;
                for (const auto& o : occupied) {
                    // A task's own anchor/context cells may sit next to other
                    // plants (labels differ across tasks); targets and decoys
                    // must stay out of every existing plant's edge range.
                    if (chebyshev(p, o) < (adjacent ? 1 : 2)) clear = false;
                }
                if (!clear) continue;
                occupied.push_back(p);
                return p;
            }
            throw DomainError("generate_benchmark: could not plant objects; "
                              "reduce decoy count or task count");
        };

        int next_obj = 0;
        auto add_object = [&](const sim::LabelSpec& spec, const Plant& p) {
            bc.scene.objects.push_back(sim::SceneObject{
                next_obj++, spec.label, spec.description,
                Point{p.cx + 0.5, p.cy + 0.5}});
        };

        std::string instruction;
        for (int t = 0; t < params.tasks_per_case; ++t) {
            const auto& target_spec = vocab[static_cast<std::size_t>(3 * t)];
            const auto& anchor_spec = vocab[static_cast<std::size_t>(3 * t + 1)];
            const auto& context_spec = vocab[static_cast<std::size_t>(3 * t + 2)];
            bool with_context = (rng.next_below(5) < 3);  // ~60% of tasks

            Plant truth = place(0, 0, false);
            add_object(target_spec, truth);
            int truth_node = cell_node_id(bc.scene, truth.cx, truth.cy);

            Plant anchor = place(truth.cx, truth.cy, true);
            add_object(anchor_spec, anchor);
            if (with_context) {
                Plant ctx = place(truth.cx, truth.cy, true);
                add_object(context_spec, ctx);
            }
            for (int d = 0; d < params.decoys_per_task; ++d) {
                // Same label and description, but no anchor in reach: the
                // spatial-constraint violator.
                Plant decoy = place(0, 0, false);
                add_object(target_spec, decoy);
            }

            if (!instruction.empty()) instruction += " then ";
            instruction += target_spec.label + " near " + anchor_spec.label;
            if (with_context) instruction += " with " + context_spec.label;
            bc.ground_truth[t + 1] = truth_node;
        }
        bc.instruction = instruction;
        suite.push_back(std::move(bc));
    }
    return suite;
}

memory::Memory build_case_memory(const BenchmarkCase& c,
                                 const BenchParams& params) {
    auto stream = survey_stream(c.scene, kSurveyRange);
    return memory::build_memory(stream, params.memory);
}

namespace {

retrieval::Query query_for(const instr::Task& task, Config config,
                           const BenchParams& params) {
    retrieval::Query q = params.query_defaults;
    q.target_text = task.target_text;
    q.anchor_text.reset();
    q.context_texts.clear();
    switch (config) {
        case Config::Flat:
        case Config::WoForest:
            q.mode = retrieval::QueryMode::Flat;
            break;
        case Config::ForestOnly:
            q.mode = retrieval::QueryMode::Forest;
            break;
        case Config::Anchor:
        case Config::WoNeighbor:
        case Config::WoTopoMap:
            if (!task.anchor_text.empty()) {
                q.anchor_text = task.anchor_text;
                q.mode = retrieval::QueryMode::Anchor;
            } else {
                q.mode = retrieval::QueryMode::Forest;
            }
            if (config == Config::WoNeighbor) q.eta = 0.0;
            break;
        case Config::Full:
            if (!task.anchor_text.empty()) q.anchor_text = task.anchor_text;
            q.context_texts = task.context_texts;
            q.mode = retrieval::QueryMode::Boosted;
            break;
        case Config::WoSpatial:
            // Spatial stage removed: anchor constraint dropped, neighbor
            // co-occurrence kept.
            q.context_texts = task.context_texts;
            q.mode = retrieval::QueryMode::Boosted;
            break;
        case Config::Oracle:
            break;
    }
    return q;
}

struct CaseRun {
    int correct = 0;
    int queries = 0;
    bool success = false;
    bool planned = false;
    double travel = 0.0;
    std::size_t visited = 0;
};

CaseRun run_case(const BenchmarkCase& bc, const memory::Memory& mem,
                 const memory::Memory& edgeless, Config config,
                 const BenchParams& params, const EmbedFn& embed,
                 bool navigate) {
    CaseRun out;
    auto graph = instr::parse(bc.instruction);
    const memory::Memory& m = (config == Config::WoTopoMap) ? edgeless : mem;

    std::vector<int> chosen;  // per task, -1 when retrieval came up empty
    for (const auto& task : graph.tasks) {
        ++out.queries;
        int pick = -1;
        if (config == Config::Oracle) {
            auto it = bc.ground_truth.find(task.id);
            if (it != bc.ground_truth.end()) pick = it->second;
        } else {
            auto q = query_for(task, config, params);
            auto res = retrieval::search(q, m, embed);
            out.visited += res.nodes_visited;
            if (!res.candidates.empty()) pick = res.candidates.front().node_id;
        }
        chosen.push_back(pick);
        auto it = bc.ground_truth.find(task.id);
        if (it != bc.ground_truth.end() && pick == it->second) ++out.correct;
    }

    if (!navigate) return out;

    bool all_correct = out.correct == out.queries;
    std::set<int> unique(chosen.begin(), chosen.end());
    if (std::count(chosen.begin(), chosen.end(), -1) > 0 ||
        unique.size() != chosen.size()) {
        out.success = false;
        return out;
    }

    std::vector<int> sem_seq = chosen;  // task order == semantic sequence
    std::vector<std::pair<int, int>> precedence;
    for (const auto& [a, b] : graph.temporal_edges)
        precedence.emplace_back(chosen[static_cast<std::size_t>(a - 1)],
                                chosen[static_cast<std::size_t>(b - 1)]);

    try {
        planner::PlanResult plan;
        if (config == Config::WoTopoMap) {
            // No topology: straight-line costs between chosen nodes.
            planner::CostMatrix cm;
            cm.target_node_ids = chosen;
            cm.costs.assign(chosen.size(),
                            std::vector<double>(chosen.size(), 0.0));
            for (std::size_t i = 0; i < chosen.size(); ++i)
                for (std::size_t j = 0; j < chosen.size(); ++j)
                    cm.costs[i][j] = distance(m.map.node(chosen[i]).position,
                                              m.map.node(chosen[j]).position);
            plan = planner::plan_sequence(cm, sem_seq, params.lambda,
                                          std::nullopt, precedence);
        } else {
            plan = planner::plan_route(m.map, chosen, sem_seq, params.lambda,
                                       std::nullopt, precedence);
        }
        out.planned = true;
        out.travel = plan.travel_cost;
        // Traversal visits exactly the planned nodes; success requires every
        // task's visited node to be the ground truth.
        out.success = all_correct;
    } catch (const Error&) {
        out.success = false;
    }
    return out;
}

MetricsRecord aggregate(const std::vector<BenchmarkCase>& suite,
                        const std::vector<memory::Memory>& memories,
                        const std::vector<memory::Memory>& edgeless,
                        Config config, const BenchParams& params,
                        const std::string& suite_name, bool navigate) {
    EmbedFn embed = make_default_embedder(params.memory.embedding_dim);
    MetricsRecord rec;
    rec.config = config_name(config);
    rec.suite = suite_name;
    rec.cases = static_cast<int>(suite.size());

    int correct = 0, queries = 0, successes = 0, planned = 0;
    double travel = 0.0;
    std::size_t visited = 0;

    auto t0 = Clock::now();
    for (std::size_t i = 0; i < suite.size(); ++i) {
        auto run = run_case(suite[i], memories[i], edgeless[i], config, params,
                            embed, navigate);
        correct += run.correct;
        queries += run.queries;
        visited += run.visited;
        if (run.success) ++successes;
        if (run.planned) {
            ++planned;
            travel += run.travel;
        }
    }
    auto t1 = Clock::now();

    rec.queries = queries;
    rec.top1_accuracy = queries ? static_cast<double>(correct) / queries : 0.0;
    rec.success_rate =
        suite.empty() ? 0.0 : static_cast<double>(successes) / suite.size();
    rec.travel_distance_m = planned ? travel / planned : 0.0;
    rec.nodes_visited = queries ? static_cast<double>(visited) / queries : 0.0;
    rec.total_task_time_s =
        std::chrono::duration<double>(t1 - t0).count() /
        std::max<std::size_t>(1, suite.size());

    // Retrieval latency: median over timing repeats of mean per-query time.
    std::vector<double> samples;
    for (int r = 0; r < std::max(1, params.timing_repeats); ++r) {
        auto s0 = Clock::now();
        for (std::size_t i = 0; i < suite.size(); ++i)
            run_case(suite[i], memories[i], edgeless[i], config, params, embed,
                     false);
        auto s1 = Clock::now();
        samples.push_back(
            std::chrono::duration<double, std::milli>(s1 - s0).count() /
            std::max(1, queries));
    }
    std::sort(samples.begin(), samples.end());
    rec.retrieval_time_ms = samples[samples.size() / 2];
    return rec;
}

std::vector<memory::Memory> strip_edges(const std::vector<memory::Memory>& ms) {
    std::vector<memory::Memory> out = ms;
    for (auto& m : out) m.map.edges.clear();
    return out;
}

}  // namespace

std::vector<MetricsRecord> run_retrieval_bench(
    const std::vector<BenchmarkCase>& suite, const BenchParams& params,
    const std::vector<Config>& configs) {
    std::vector<memory::Memory> memories;
    for (const auto& c : suite) memories.push_back(build_case_memory(c, params));
    auto edgeless = strip_edges(memories);
    std::vector<MetricsRecord> records;
    for (Config c : configs)
        records.push_back(aggregate(suite, memories, edgeless, c, params,
                                    "retrieval", false));
    return records;
}

std::vector<MetricsRecord> run_navigation_bench(
    const std::vector<BenchmarkCase>& suite, const BenchParams& params,
    const std::vector<Config>& configs) {
    std::vector<memory::Memory> memories;
    for (const auto& c : suite) memories.push_back(build_case_memory(c, params));
    auto edgeless = strip_edges(memories);
    std::vector<MetricsRecord> records;
    for (Config c : configs)
        records.push_back(aggregate(suite, memories, edgeless, c, params,
                                    "navigation", true));
    return records;
}

std::vector<MetricsRecord> run_ablations(const std::vector<BenchmarkCase>& suite,
                                         const BenchParams& params) {
    return run_navigation_bench(
        suite, params,
        {Config::WoForest, Config::WoTopoMap, Config::WoSpatial,
         Config::WoNeighbor, Config::Full});
}

void write_suite_jsonl(std::ostream& out,
                       const std::vector<BenchmarkCase>& suite) {
    for (const auto& c : suite) {
        json gt = json::object();
        for (const auto& [task, node] : c.ground_truth)
            gt[std::to_string(task)] = node;
        out << json{{"scene", sim::scene_to_json(c.scene)},
                    {"instruction", c.instruction},
                    {"ground_truth", gt},
                    {"seed", c.seed}}
                   .dump()
            << '\n';
    }
}

std::vector<BenchmarkCase> read_suite_jsonl(std::istream& in) {
    std::vector<BenchmarkCase> suite;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw ParseError("suite line " + std::to_string(line_no) +
                             ": invalid JSON");
        try {
            BenchmarkCase c;
            c.scene = sim::scene_from_json(j.at("scene"));
            c.instruction = j.at("instruction");
            for (const auto& [k, v] : j.at("ground_truth").items())
                c.ground_truth[std::stoi(k)] = v.get<int>();
            c.seed = j.value("seed", 0);
            instr::parse(c.instruction);  // must parse under the mini-grammar
            suite.push_back(std::move(c));
        } catch (const json::exception& e) {
            throw ParseError("suite line " + std::to_string(line_no) + ": " +
                             e.what());
        }
    }
    return suite;
}

json records_to_json(const std::vector<MetricsRecord>& records) {
    json out = json::array();
    for (const auto& r : records)
        out.push_back({{"config", r.config},
                       {"suite", r.suite},
                       {"cases", r.cases},
                       {"queries", r.queries},
                       {"total_task_time_s", r.total_task_time_s},
                       {"retrieval_time_ms", r.retrieval_time_ms},
                       {"top1_accuracy", r.top1_accuracy},
                       {"success_rate", r.success_rate},
                       {"travel_distance_m", r.travel_distance_m},
                       {"nodes_visited", r.nodes_visited}});
    return out;
}

void export_csv(const std::vector<MetricsRecord>& records,
                const std::string& path) {
    if (records.empty()) throw DomainError("export: no records");
    std::ofstream out(path);
    if (!out) throw IoError("export: cannot open " + path);
    out << "config,suite,cases,queries,total_task_time_s,retrieval_time_ms,"
           "top1_accuracy,success_rate,travel_distance_m,nodes_visited\n";
    out.precision(17);
    for (const auto& r : records)
        out << r.config << ',' << r.suite << ',' << r.cases << ',' << r.queries
            << ',' << r.total_task_time_s << ',' << r.retrieval_time_ms << ','
            << r.top1_accuracy << ',' << r.success_rate << ','
            << r.travel_distance_m << ',' << r.nodes_visited << '\n';
    if (!out) throw IoError("export: write failed for " + path);
}

void export_json(const std::vector<MetricsRecord>& records,
                 const std::string& path) {
    if (records.empty()) throw DomainError("export: no records");
    std::ofstream out(path);
    if (!out) throw IoError("export: cannot open " + path);
    out << records_to_json(records).dump(2) << '\n';
    if (!out) throw IoError("export: write failed for " + path);
}

}  // namespace navmem::bench
