#pragma once

#include <optional>
#include <string>

#include "navmem/embedding.hpp"
#include "navmem/instruction.hpp"

namespace navmem::service {

// Optional external services. URLs come from the environment; when unset
// (or on any request failure) the deterministic stubs are used instead.
inline constexpr const char* kEmbedUrlEnv = "NAVMEM_EMBED_URL";
inline constexpr const char* kLlmUrlEnv = "NAVMEM_LLM_URL";

// POST {"texts": [...]} -> {"vectors": [[...]]}. Falls back to the n-gram
// embedder with a one-time stderr warning on failure.
EmbedFn make_embedder(std::optional<std::string> url, int dim);

// Reads kEmbedUrlEnv; absent env var means the deterministic embedder.
EmbedFn embedder_from_env(int dim);

// POST {"instruction": ...} -> TaskGraph JSON, validated against the same
// invariants as the grammar parser before acceptance. Falls back to the
// deterministic grammar on failure.
instr::TaskGraph parse_instruction(const std::string& instruction,
                                   std::optional<std::string> llm_url);
instr::TaskGraph parse_instruction_from_env(const std::string& instruction);

}  // namespace navmem::service
