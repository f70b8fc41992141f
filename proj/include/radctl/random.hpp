#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace radctl {

/// Mixes a global seed with a sequence of string keys into a per-site seed.
///
/// The key bytes are folded with 64-bit FNV-1a (a 0x1f separator between
/// keys) and the result is passed through the splitmix64 finalizer together
/// with the global seed. The derivation is pure integer arithmetic, so the
/// same (seed, keys) yields the same value on every platform.
std::uint64_t derive_seed(std::uint64_t global_seed, std::initializer_list<std::string_view> keys);

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Reproducible random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The standard distributions are implementation-defined, so
/// every draw used by the library goes through the members below instead.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
  std::uint64_t uniform_index(std::uint64_t bound);

  /// Uniform integer in [lo, hi] (inclusive).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace radctl
