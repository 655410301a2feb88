#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace projcond {

enum class Exec { Serial, Parallel };

// Worker count: PROJCOND_THREADS if set to a positive integer, else the
// OpenMP default. Results never depend on this value.
int thread_count();

// Chunk size used by every Monte Carlo reduction. Fixed so that the order of
// floating-point accumulation is independent of the worker count.
inline constexpr std::size_t kChunk = 256;

// Evaluates fn(i) for i in [0, n) into a vector, in parallel or serially.
template <class T, class Fn>
std::vector<T> map_indices(std::size_t n, Fn&& fn, Exec exec = Exec::Parallel) {
    std::vector<T> out(n);
    if (exec == Exec::Serial) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    const std::int64_t nn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 16) num_threads(thread_count())
    for (std::int64_t i = 0; i < nn; ++i) out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    return out;
}

// Reduces over [0, n) in fixed chunks: chunk_fn(begin, end) -> Acc, then
// merge(acc, part) left to right. Bit-identical between Serial and Parallel.
template <class Acc, class ChunkFn, class Merge>
Acc chunked_reduce(std::size_t n, ChunkFn&& chunk_fn, Merge&& merge, Exec exec = Exec::Parallel) {
    const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
    auto parts = map_indices<Acc>(
        n_chunks,
        [&](std::size_t c) {
            const std::size_t b = c * kChunk;
            const std::size_t e = b + kChunk < n ? b + kChunk : n;
            return chunk_fn(b, e);
        },
        exec);
    if (parts.empty()) return Acc{};
    Acc acc = std::move(parts[0]);
    for (std::size_t c = 1; c < parts.size(); ++c) merge(acc, parts[c]);
    return acc;
}

}  // namespace projcond
