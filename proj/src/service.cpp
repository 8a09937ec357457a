#include "navmem/service.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <nlohmann/json.hpp>

#include <httplib.h>

#include "navmem/errors.hpp"

namespace navmem::service {

using nlohmann::json;

namespace {

std::optional<std::string> env_url(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
}

void warn_once(const std::string& what) {
    static std::mutex mu;
    static bool warned = false;
    std::lock_guard<std::mutex> lock(mu);
    if (!warned) {
        std::cerr << "warning: " << what
                  << "; falling back to deterministic stub\n";
        warned = true;
    }
}

std::optional<json> post_json(const std::string& url, const json& body) {
    auto slash = url.find('/', url.find("//") + 2);
    std::string host = slash == std::string::npos ? url : url.substr(0, slash);
    std::string path = slash == std::string::npos ? "/" : url.substr(slash);
    httplib::Client client(host);
    client.set_connection_timeout(2, 0);
    client.set_read_timeout(5, 0);
    auto res = client.Post(path, body.dump(), "application/json");
    if (!res || res->status != 200) return std::nullopt;
    json parsed = json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) return std::nullopt;
    return parsed;
}

}  // namespace

EmbedFn make_embedder(std::optional<std::string> url, int dim) {
    EmbedFn fallback = make_default_embedder(dim);
    if (!url) return fallback;
    std::string endpoint = *url;
    return [endpoint, fallback, dim](const std::string& text) -> Vec {
        if (text.empty()) throw DomainError("embed: empty text");
        auto res = post_json(endpoint, json{{"texts", {text}}});
        if (res && res->contains("vectors") && (*res)["vectors"].is_array() &&
            !(*res)["vectors"].empty()) {
            try {
                Vec v = (*res)["vectors"][0].get<Vec>();
                if (static_cast<int>(v.size()) == dim) return normalized(v);
            } catch (...) {
            }
        }
        warn_once("embedding service at " + endpoint + " unavailable or invalid");
        return fallback(text);
    };
}

EmbedFn embedder_from_env(int dim) {
    return make_embedder(env_url(kEmbedUrlEnv), dim);
}

instr::TaskGraph parse_instruction(const std::string& instruction,
                                   std::optional<std::string> llm_url) {
    if (llm_url) {
        auto res = post_json(*llm_url, json{{"instruction", instruction}});
        if (res) {
            try {
                return instr::graph_from_json(*res);
            } catch (const Error&) {
                // Invalid graphs from the service are rejected, not trusted.
            }
        }
        warn_once("LLM parser service at " + *llm_url + " unavailable or invalid");
    }
    return instr::parse(instruction);
}

instr::TaskGraph parse_instruction_from_env(const std::string& instruction) {
    return parse_instruction(instruction, env_url(kLlmUrlEnv));
}

}  // namespace navmem::service
