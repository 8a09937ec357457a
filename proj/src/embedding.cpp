#include "navmem/embedding.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>

#include "navmem/errors.hpp"

namespace navmem {

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double norm(const Vec& v) { return std::sqrt(dot(v, v)); }

Vec normalized(const Vec& v) {
    double n = norm(v);
    if (n < 1e-12) throw DomainError("normalized: zero vector");
    Vec out = v;
    for (auto& x : out) x /= n;
    return out;
}

double cosine(const Vec& a, const Vec& b) {
    double na = norm(a), nb = norm(b);
    if (na < 1e-12 || nb < 1e-12)
        throw DomainError("cosine: zero vector");
    double c = dot(a, b) / (na * nb);
    return std::clamp(c, -1.0, 1.0);
}

double cosine01(const Vec& a, const Vec& b) {
    return 0.5 * (1.0 + cosine(a, b));
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

Vec NGramEmbedder::embed(const std::string& text) const {
    if (text.empty()) throw DomainError("embed: empty text");
    Vec v(static_cast<std::size_t>(dim_), 0.0);

    // Lowercased words, padded with '#', sliced into character trigrams.
    std::string word;
    auto flush = [&]() {
        if (word.empty()) return;
        std::string padded = "#" + word + "#";
        for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
            std::uint64_t h = fnv1a(padded.substr(i, 3));
            auto bucket = static_cast<std::size_t>(h % dim_);
            double sign = ((h >> 32) & 1) ? 1.0 : -1.0;
            v[bucket] += sign;
        }
        word.clear();
    };
    for (unsigned char c : text) {
        if (std::isalnum(c))
            word.push_back(static_cast<char>(std::tolower(c)));
        else
            flush();
    }
    flush();

    double n = norm(v);
    if (n < 1e-12) {
        // Text with no alphanumeric content still needs a deterministic
        // direction; hash the raw bytes.
        v[static_cast<std::size_t>(fnv1a(text) % dim_)] = 1.0;
        n = 1.0;
    }
    for (auto& x : v) x /= n;
    return v;
}

EmbedFn make_default_embedder(int dim) {
    NGramEmbedder e(dim);
    return [e](const std::string& text) { return e.embed(text); };
}

}  // namespace navmem
