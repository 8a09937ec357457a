#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "navmem/retrieval.hpp"

namespace navmem::instr {

struct Task {
    int id = 0;  // 1-based, textual order
    std::string target_text;
    std::string anchor_text;  // empty when absent
    std::vector<std::string> context_texts;
};

struct TaskGraph {
    std::vector<Task> tasks;
    std::vector<std::pair<int, int>> temporal_edges;  // (before, after)
    std::vector<int> semantic_sequence;               // topological order

    const Task& task(int id) const;
};

// Mini-grammar:
//   instruction := group (("then" | ";") group)*
//   group       := task ("and" task)*
//   task        := phrase ["near" phrase] ["with" phrase ("," phrase)*]
//   phrase      := one or more non-keyword words
// "near" binds tighter than "and", which binds tighter than "then".
// Consecutive groups are fully connected by temporal edges in textual order.
// Throws ParseError with the offending token position.
TaskGraph parse(const std::string& instruction);

// Canonical text; parse(render(g)) == g.
std::string render(const TaskGraph& graph);

enum class Dependency { Spatial, Temporal, Independent };

// Spatial when one task's anchor names the other's target; Temporal when a
// temporal edge connects them directly or transitively (either direction).
Dependency classify_dependency(const TaskGraph& graph, const Task& a,
                               const Task& b);

struct PlanStep {
    int task_id = 0;
    int batch_group = 0;       // steps sharing a group may run in parallel
    bool parallelizable = false;
    bool anchor_resolution = false;  // resolves the anchor before the target
    retrieval::Query query;
};

// Deterministic retrieval schedule: anchor resolution precedes its
// dependent's conditioned retrieval; independent tasks of a temporal rank
// share one batch group.
std::vector<PlanStep> schedule(const TaskGraph& graph,
                               const retrieval::Query& defaults);

nlohmann::json graph_to_json(const TaskGraph& graph);
// Validates the same invariants as parse (DAG, ids, ordering).
TaskGraph graph_from_json(const nlohmann::json& j);

}  // namespace navmem::instr
