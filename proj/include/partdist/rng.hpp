#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace partdist {

// Seed material for reproducible sampling.  The same (seed, stream_id) pair
// always yields the same draw sequence; distinct stream_ids are treated as
// statistically independent streams.
struct SamplerConfig {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

// Deterministic 64-bit stream.  The engine is std::mt19937_64, whose output
// sequence is fully pinned down by the standard, seeded through std::seed_seq
// (also standard-specified) over the 32-bit words of (seed, stream_id) plus an
// optional derivation path.  Bounded draws use rejection sampling rather than
// std::uniform_int_distribution, because distribution objects are not
// guaranteed to produce identical streams across standard library
// implementations.
class SplitStream {
public:
    explicit SplitStream(const SamplerConfig& cfg,
                         std::initializer_list<std::uint64_t> path = {}) {
        std::vector<std::uint32_t> words;
        words.reserve(4 + 2 * path.size());
        push_words(words, cfg.seed);
        push_words(words, cfg.stream_id);
        for (std::uint64_t p : path) push_words(words, p);
        std::seed_seq seq(words.begin(), words.end());
        engine_.seed(seq);
    }

    std::uint64_t next() { return engine_(); }

    // Uniform draw from {0, ..., bound-1}, unbiased via top-block rejection.
    std::uint64_t below(std::uint64_t bound) {
        std::uint64_t x, r;
        do {
            x = next();
            r = x % bound;
        } while (x - r > std::uint64_t(0) - bound);
        return r;
    }

    // Uniform cluster index in {0, ..., k-1}.
    int index(int k) { return static_cast<int>(below(static_cast<std::uint64_t>(k))); }

private:
    static void push_words(std::vector<std::uint32_t>& words, std::uint64_t v) {
        words.push_back(static_cast<std::uint32_t>(v));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    }

    std::mt19937_64 engine_;
};

}  // namespace partdist
