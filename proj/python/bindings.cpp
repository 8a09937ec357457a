// Python bindings for the spatial-semantic retrieval and planning core.
// The API is JSON-centric: scenes, streams, memories, queries, plans and
// benchmark records cross the boundary as plain dicts/lists matching the
// documented file formats.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>

#include "navmem/bench.hpp"
#include "navmem/errors.hpp"
#include "navmem/explore.hpp"
#include "navmem/instruction.hpp"
#include "navmem/memory.hpp"
#include "navmem/planner.hpp"
#include "navmem/retrieval.hpp"
#include "navmem/scene.hpp"
#include "navmem/service.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace navmem;

namespace {

py::object json_to_py(const json& j) {
    switch (j.type()) {
        case json::value_t::null: return py::none();
        case json::value_t::boolean: return py::bool_(j.get<bool>());
        case json::value_t::number_integer:
            return py::int_(j.get<std::int64_t>());
        case json::value_t::number_unsigned:
            return py::int_(j.get<std::uint64_t>());
        case json::value_t::number_float:
            return py::float_(j.get<double>());
        case json::value_t::string: return py::str(j.get<std::string>());
        case json::value_t::array: {
            py::list out;
            for (const auto& e : j) out.append(json_to_py(e));
            return out;
        }
        case json::value_t::object: {
            py::dict out;
            for (const auto& [k, v] : j.items())
                out[py::str(k)] = json_to_py(v);
            return out;
        }
        default: return py::none();
    }
}

json py_to_json(py::handle h) {
    if (h.is_none()) return nullptr;
    if (py::isinstance<py::bool_>(h)) return h.cast<bool>();
    if (py::isinstance<py::int_>(h)) return h.cast<std::int64_t>();
    if (py::isinstance<py::float_>(h)) return h.cast<double>();
    if (py::isinstance<py::str>(h)) return h.cast<std::string>();
    if (py::isinstance<py::dict>(h)) {
        json out = json::object();
        for (auto item : h.cast<py::dict>())
            out[item.first.cast<std::string>()] = py_to_json(item.second);
        return out;
    }
    if (py::isinstance<py::list>(h) || py::isinstance<py::tuple>(h)) {
        json out = json::array();
        for (auto item : h.cast<py::sequence>()) out.push_back(py_to_json(item));
        return out;
    }
    throw py::type_error("unsupported value for JSON conversion");
}

std::vector<sim::ObservationRecord> stream_from_py(py::object stream) {
    std::vector<sim::ObservationRecord> out;
    for (auto item : stream.cast<py::sequence>())
        out.push_back(sim::record_from_json(py_to_json(item)));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Spatial-semantic memory, retrieval and route planning core";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

    m.def(
        "generate_scene",
        [](double width, double height, int objects, int obstacles,
           double min_separation, std::uint64_t seed) {
            sim::SceneConfig cfg;
            cfg.width = width;
            cfg.height = height;
            cfg.object_count = objects;
            cfg.obstacle_count = obstacles;
            cfg.min_separation = min_separation;
            return json_to_py(sim::scene_to_json(sim::generate_scene(cfg, seed)));
        },
        py::arg("width") = 20.0, py::arg("height") = 20.0,
        py::arg("objects") = 6, py::arg("obstacles") = 2,
        py::arg("min_separation") = 1.5, py::arg("seed") = 0,
        "Generate a deterministic synthetic scene as a dict.");

    m.def(
        "explore",
        [](py::object scene, double start_x, double start_y,
           double sensor_range, int min_frontier_size, int step_budget) {
            sim::ExploreParams params;
            params.sensor_range = sensor_range;
            params.min_frontier_size = min_frontier_size;
            params.step_budget = step_budget;
            auto stream =
                sim::explore_stream(sim::scene_from_json(py_to_json(scene)),
                                    Point{start_x, start_y}, params);
            py::list out;
            for (const auto& rec : stream)
                out.append(json_to_py(sim::record_to_json(rec)));
            return out;
        },
        py::arg("scene"), py::arg("start_x") = 0.5, py::arg("start_y") = 0.5,
        py::arg("sensor_range") = 3.0, py::arg("min_frontier_size") = 2,
        py::arg("step_budget") = 4096,
        "Frontier-explore a scene; returns the observation stream.");

    m.def(
        "build_memory",
        [](py::object stream, double delta_spatial, double omega, double alpha,
           double tau, int embedding_dim, double dedup_radius,
           int max_branching) {
            memory::MemoryParams params;
            params.delta_spatial = delta_spatial;
            params.omega = omega;
            params.alpha = alpha;
            params.merge_stop_tau = tau;
            params.embedding_dim = embedding_dim;
            params.dedup_radius = dedup_radius;
            params.max_branching = max_branching;
            auto mem = memory::build_memory(
                stream_from_py(stream), params,
                service::embedder_from_env(params.embedding_dim));
            return json_to_py(memory::memory_to_json(mem));
        },
        py::arg("stream"), py::arg("delta_spatial") = 2.0,
        py::arg("omega") = 0.5, py::arg("alpha") = 0.5, py::arg("tau") = 0.6,
        py::arg("embedding_dim") = 64, py::arg("dedup_radius") = 0.5,
        py::arg("max_branching") = 32,
        "Build the dual-basis memory (topological map + semantic forest).");

    m.def(
        "query",
        [](py::object mem, py::object query) {
            auto m_ = memory::memory_from_json(py_to_json(mem));
            auto q = retrieval::query_from_json(py_to_json(query));
            auto embed = service::embedder_from_env(m_.params.embedding_dim);
            return json_to_py(
                retrieval::result_to_json(retrieval::search(q, m_, embed)));
        },
        py::arg("memory"), py::arg("query"),
        "Run one retrieval query against a memory dict.");

    m.def(
        "parse_instruction",
        [](const std::string& text) {
            return json_to_py(instr::graph_to_json(instr::parse(text)));
        },
        py::arg("text"), "Parse an instruction into its task graph.");

    m.def(
        "render_instruction",
        [](py::object graph) {
            return instr::render(instr::graph_from_json(py_to_json(graph)));
        },
        py::arg("graph"), "Render a task graph back to instruction text.");

    m.def(
        "plan",
        [](py::object mem, const std::vector<int>& targets,
           py::object semantic, double lambda_, py::object start,
           const std::vector<std::pair<int, int>>& precedence) {
            auto m_ = memory::memory_from_json(py_to_json(mem));
            std::vector<int> sem = semantic.is_none()
                                       ? targets
                                       : semantic.cast<std::vector<int>>();
            std::optional<int> s;
            if (!start.is_none()) s = start.cast<int>();
            auto plan = planner::plan_route(m_.map, targets, sem, lambda_, s,
                                            precedence);
            return json_to_py(planner::plan_to_json(plan));
        },
        py::arg("memory"), py::arg("targets"), py::arg("semantic") = py::none(),
        py::arg("lambda_") = 1.0, py::arg("start") = py::none(),
        py::arg("precedence") = std::vector<std::pair<int, int>>{},
        "Plan a visiting order (travel + ordering penalty) with route legs.");

    m.def(
        "run_benchmark",
        [](std::uint64_t seed, int cases, int tasks_per_case,
           int decoys_per_task, bool navigation) {
            bench::BenchParams params;
            params.case_count = cases;
            params.tasks_per_case = tasks_per_case;
            params.decoys_per_task = decoys_per_task;
            auto suite = bench::generate_benchmark(params, seed);
            std::vector<bench::Config> configs{
                bench::Config::Oracle, bench::Config::Flat,
                bench::Config::ForestOnly, bench::Config::Anchor,
                bench::Config::Full};
            auto records =
                navigation
                    ? bench::run_navigation_bench(suite, params, configs)
                    : bench::run_retrieval_bench(suite, params, configs);
            return json_to_py(bench::records_to_json(records));
        },
        py::arg("seed") = 42, py::arg("cases") = 14,
        py::arg("tasks_per_case") = 2, py::arg("decoys_per_task") = 2,
        py::arg("navigation") = false,
        "Generate and run the benchmark suite; returns metric records.");
}
