#pragma once

#include <functional>
#include <string>
#include <vector>

namespace navmem {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b);
double norm(const Vec& v);
// Throws DomainError on (near-)zero input.
Vec normalized(const Vec& v);
double cosine(const Vec& a, const Vec& b);
// Cosine mapped into [0, 1]: (1 + cos) / 2. Used uniformly so scores from
// different formulas stay comparable.
double cosine01(const Vec& a, const Vec& b);

// Deterministic character-trigram hash embedding. Identical texts map to
// identical unit-norm vectors; texts sharing words share trigram mass.
class NGramEmbedder {
public:
    explicit NGramEmbedder(int dim = 64) : dim_(dim) {}

    int dim() const { return dim_; }
    // Throws DomainError on empty text.
    Vec embed(const std::string& text) const;

private:
    int dim_;
};

// Text -> unit-norm vector. The default is NGramEmbedder; an HTTP-backed
// provider (see service.hpp) can be swapped in and falls back to the
// deterministic embedder on failure.
using EmbedFn = std::function<Vec(const std::string&)>;

EmbedFn make_default_embedder(int dim);

}  // namespace navmem
