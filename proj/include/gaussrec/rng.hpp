#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace gaussrec {

/// Philox4x32-10 block function: maps (counter, key) to four 32-bit words.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);

/// Derives a stream id from a master seed and a path of integers, e.g.
/// (seed, replication, purpose). Distinct paths give independent streams.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

/// Counter-based generator. The output depends only on (key, stream, position),
/// so any number of streams can be drawn concurrently without shared state.
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
public:
    using result_type = std::uint32_t;

    CounterRng(std::uint64_t key, std::uint64_t stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();
    std::uint64_t next_u64();

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Standard normal via Box-Muller; caches the second variate.
    double normal();

private:
    void refill();

    std::array<std::uint32_t, 2> key_{};
    std::uint64_t stream_ = 0;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace gaussrec
