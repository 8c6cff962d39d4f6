#pragma once

#include <cstdint>
#include <functional>
#include <random>

namespace smilelab {

/// Worker count: hardware concurrency, capped by SMILE_LAB_THREADS when set.
int thread_count();

/// Calls body(block) for block = 0..n_blocks-1 on up to thread_count() threads.
/// Blocks are claimed dynamically; callers write results into per-block slots and
/// reduce them in block order afterwards, so results do not depend on scheduling.
void parallel_blocks(int n_blocks, const std::function<void(int block)>& body);

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent engine for (seed, stream). Path p of a run always draws from stream p.
inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(stream ^ 0x5851f42d4c957f2dULL)));
}

}  // namespace smilelab
