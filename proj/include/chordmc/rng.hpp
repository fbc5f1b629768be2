#pragma once

#include <cstdint>
#include <string_view>

namespace chordmc {

// Counter-based stream generator (SplitMix-style): the state advances by a
// stream-specific odd increment and each output is a bijective mix of the
// counter. Identical (seed, stream_id) pairs reproduce identical sequences;
// distinct stream ids give statistically independent streams, so parallel
// workers can partition streams deterministically.
class RngStream {
public:
    explicit RngStream(uint64_t seed, uint64_t stream_id = 0) {
        state_ = mix(seed ^ 0x9e3779b97f4a7c15ULL);
        state_ = mix(state_ ^ stream_id);
        inc_ = mix(state_ ^ mix(stream_id + 0x61c88646ULL)) | 1ULL;  // must be odd
    }

    uint64_t next_u64() {
        state_ += inc_;
        return mix(state_);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

private:
    static uint64_t mix(uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    uint64_t state_;
    uint64_t inc_;
};

// Stable stream id from a module tag and worker index (FNV-1a).
inline uint64_t stream_id(std::string_view module_tag, uint64_t worker = 0) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : module_tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    h ^= worker;
    h *= 0x100000001b3ULL;
    return h;
}

}  // namespace chordmc
