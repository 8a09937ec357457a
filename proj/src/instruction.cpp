#include "navmem/instruction.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "navmem/errors.hpp"

namespace navmem::instr {

using nlohmann::json;

const Task& TaskGraph::task(int id) const {
    for (const auto& t : tasks)
        if (t.id == id) return t;
    throw DomainError("TaskGraph: unknown task id " + std::to_string(id));
}

namespace {

struct Token {
    std::string text;
    std::size_t pos = 0;  // byte offset in the instruction
};

bool is_keyword(const std::string& w) {
    return w == "then" || w == "and" || w == "near" || w == "with" ||
           w == ";" || w == ",";
}

std::vector<Token> tokenize(const std::string& input) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < input.size()) {
        unsigned char c = static_cast<unsigned char>(input[i]);
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        if (c == ';' || c == ',') {
            tokens.push_back({std::string(1, static_cast<char>(c)), i});
            ++i;
            continue;
        }
        std::size_t start = i;
        std::string word;
        while (i < input.size()) {
            unsigned char w = static_cast<unsigned char>(input[i]);
            if (std::isspace(w) || w == ';' || w == ',') break;
            word.push_back(static_cast<char>(std::tolower(w)));
            ++i;
        }
        tokens.push_back({word, start});
    }
    return tokens;
}

class Parser {
public:
    explicit Parser(const std::string& input)
        : input_(input), tokens_(tokenize(input)) {}

    TaskGraph run() {
        if (tokens_.empty())
            throw ParseError("instruction: empty input");
        TaskGraph graph;
        std::vector<std::vector<int>> groups;
        groups.push_back(parse_group(graph));
        while (!done()) {
            if (peek().text == "then" || peek().text == ";") {
                advance();
                groups.push_back(parse_group(graph));
            } else {
                fail("expected 'then', ';' or end of instruction");
            }
        }
        for (std::size_t g = 0; g + 1 < groups.size(); ++g)
            for (int a : groups[g])
                for (int b : groups[g + 1])
                    graph.temporal_edges.emplace_back(a, b);
        for (const auto& t : graph.tasks) graph.semantic_sequence.push_back(t.id);
        return graph;
    }

private:
    std::vector<int> parse_group(TaskGraph& graph) {
        std::vector<int> ids{parse_task(graph)};
        while (!done() && peek().text == "and") {
            advance();
            ids.push_back(parse_task(graph));
        }
        return ids;
    }

    int parse_task(TaskGraph& graph) {
        Task task;
        task.id = static_cast<int>(graph.tasks.size()) + 1;
        task.target_text = parse_phrase("target");
        if (!done() && peek().text == "near") {
            advance();
            task.anchor_text = parse_phrase("anchor");
        }
        if (!done() && peek().text == "with") {
            advance();
            task.context_texts.push_back(parse_phrase("context"));
            while (!done() && peek().text == ",") {
                advance();
                task.context_texts.push_back(parse_phrase("context"));
            }
        }
        graph.tasks.push_back(std::move(task));
        return static_cast<int>(graph.tasks.size());
    }

    std::string parse_phrase(const char* what) {
        if (done() || is_keyword(peek().text))
            fail(std::string("expected ") + what + " phrase");
        std::string phrase;
        while (!done() && !is_keyword(peek().text)) {
            if (!phrase.empty()) phrase += ' ';
            phrase += peek().text;
            advance();
        }
        return phrase;
    }

    bool done() const { return idx_ >= tokens_.size(); }
    const Token& peek() const { return tokens_[idx_]; }
    void advance() { ++idx_; }

    [[noreturn]] void fail(const std::string& msg) const {
        std::size_t pos = done() ? input_.size() : peek().pos;
        throw ParseError("instruction: " + msg + " at position " +
                         std::to_string(pos));
    }

    const std::string& input_;
    std::vector<Token> tokens_;
    std::size_t idx_ = 0;
};

}  // namespace

TaskGraph parse(const std::string& instruction) {
    return Parser(instruction).run();
}

std::string render(const TaskGraph& graph) {
    // Group tasks by temporal rank (longest chain of incoming edges).
    std::map<int, int> rank;
    for (const auto& t : graph.tasks) rank[t.id] = 0;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [a, b] : graph.temporal_edges) {
            if (rank[b] < rank[a] + 1) {
                rank[b] = rank[a] + 1;
                changed = true;
            }
        }
    }
    std::map<int, std::vector<const Task*>> groups;
    for (int id : graph.semantic_sequence)
        groups[rank[id]].push_back(&graph.task(id));

    std::string out;
    for (auto& [r, tasks] : groups) {
        if (!out.empty()) out += " then ";
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            if (i) out += " and ";
            out += tasks[i]->target_text;
            if (!tasks[i]->anchor_text.empty())
                out += " near " + tasks[i]->anchor_text;
            if (!tasks[i]->context_texts.empty()) {
                out += " with ";
                for (std::size_t c = 0; c < tasks[i]->context_texts.size(); ++c) {
                    if (c) out += ", ";
                    out += tasks[i]->context_texts[c];
                }
            }
        }
    }
    return out;
}

Dependency classify_dependency(const TaskGraph& graph, const Task& a,
                               const Task& b) {
    if ((!a.anchor_text.empty() && a.anchor_text == b.target_text) ||
        (!b.anchor_text.empty() && b.anchor_text == a.target_text))
        return Dependency::Spatial;

    // Transitive reachability over temporal edges, either direction.
    auto reachable = [&](int from, int to) {
        std::set<int> seen{from};
        std::vector<int> stack{from};
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            if (v == to) return true;
            for (const auto& [x, y] : graph.temporal_edges)
                if (x == v && seen.insert(y).second) stack.push_back(y);
        }
        return false;
    };
    if (reachable(a.id, b.id) || reachable(b.id, a.id))
        return Dependency::Temporal;
    return Dependency::Independent;
}

std::vector<PlanStep> schedule(const TaskGraph& graph,
                               const retrieval::Query& defaults) {
    // Same ranking as render: one batch group per temporal rank.
    std::map<int, int> rank;
    for (const auto& t : graph.tasks) rank[t.id] = 0;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [a, b] : graph.temporal_edges)
            if (rank[b] < rank[a] + 1) {
                rank[b] = rank[a] + 1;
                changed = true;
            }
    }

    std::vector<PlanStep> plan;
    int batch = 0;
    std::map<int, std::vector<int>> by_rank;
    for (int id : graph.semantic_sequence) by_rank[rank[id]].push_back(id);

    for (auto& [r, ids] : by_rank) {
        bool parallel = ids.size() > 1;
        for (int id : ids) {
            const Task& t = graph.task(id);
            if (!t.anchor_text.empty()) {
                // Anchor-first: resolve B, then the conditioned target.
                PlanStep resolve;
                resolve.task_id = id;
                resolve.batch_group = batch;
                resolve.parallelizable = false;
                resolve.anchor_resolution = true;
                resolve.query = defaults;
                resolve.query.target_text = t.anchor_text;
                resolve.query.anchor_text.reset();
                resolve.query.context_texts.clear();
                resolve.query.mode = retrieval::QueryMode::Forest;
                plan.push_back(std::move(resolve));
            }
            PlanStep step;
            step.task_id = id;
            step.batch_group = batch;
            step.parallelizable = parallel && t.anchor_text.empty();
            step.query = defaults;
            step.query.target_text = t.target_text;
            step.query.context_texts = t.context_texts;
            if (!t.anchor_text.empty()) {
                step.query.anchor_text = t.anchor_text;
                step.query.mode = t.context_texts.empty()
                                      ? retrieval::QueryMode::Anchor
                                      : retrieval::QueryMode::Boosted;
            } else {
                step.query.anchor_text.reset();
                step.query.mode = t.context_texts.empty()
                                      ? retrieval::QueryMode::Forest
                                      : retrieval::QueryMode::Boosted;
            }
            plan.push_back(std::move(step));
        }
        ++batch;
    }
    return plan;
}

json graph_to_json(const TaskGraph& graph) {
    json tasks = json::array();
    for (const auto& t : graph.tasks) {
        json tj{{"id", t.id}, {"target", t.target_text}};
        if (!t.anchor_text.empty()) tj["anchor"] = t.anchor_text;
        if (!t.context_texts.empty()) tj["context"] = t.context_texts;
        tasks.push_back(std::move(tj));
    }
    json edges = json::array();
    for (const auto& [a, b] : graph.temporal_edges)
        edges.push_back({{"before", a}, {"after", b}});
    return json{{"tasks", tasks},
                {"temporal_edges", edges},
                {"semantic_sequence", graph.semantic_sequence}};
}

TaskGraph graph_from_json(const json& j) {
    TaskGraph graph;
    try {
        for (const auto& tj : j.at("tasks")) {
            Task t;
            t.id = tj.at("id");
            t.target_text = tj.at("target");
            t.anchor_text = tj.value("anchor", "");
            t.context_texts = tj.value("context", std::vector<std::string>{});
            if (t.target_text.empty())
                throw ParseError("task graph: empty target text");
            graph.tasks.push_back(std::move(t));
        }
        for (const auto& ej : j.at("temporal_edges"))
            graph.temporal_edges.emplace_back(ej.at("before"), ej.at("after"));
        graph.semantic_sequence =
            j.at("semantic_sequence").get<std::vector<int>>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("graph_from_json: ") + e.what());
    }

    // Invariants: ids exist and are unique, edges form a DAG, and the
    // semantic sequence is a topological order of the edges.
    std::set<int> ids;
    for (const auto& t : graph.tasks)
        if (!ids.insert(t.id).second)
            throw ParseError("task graph: duplicate task id");
    for (const auto& [a, b] : graph.temporal_edges)
        if (!ids.count(a) || !ids.count(b))
            throw ParseError("task graph: edge endpoint not a task");
    if (graph.semantic_sequence.size() != graph.tasks.size())
        throw ParseError("task graph: semantic_sequence length mismatch");
    std::map<int, std::size_t> pos;
    for (std::size_t i = 0; i < graph.semantic_sequence.size(); ++i) {
        int id = graph.semantic_sequence[i];
        if (!ids.count(id) || pos.count(id))
            throw ParseError("task graph: semantic_sequence is not a permutation");
        pos[id] = i;
    }
    for (const auto& [a, b] : graph.temporal_edges)
        if (pos[a] >= pos[b])
            throw ParseError(
                "task graph: semantic_sequence violates a temporal edge (also "
                "rejects cycles)");
    return graph;
}

}  // namespace navmem::instr
