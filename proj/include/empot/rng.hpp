#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace empot {

// Counter-style random stream. Every (seed, key...) tuple names an independent
// stream, so replication i of cell c can be generated on any thread without
// coordinating state. Transforms to uniform/normal/exponential are done here
// rather than through <random> distributions so output is identical across
// standard library implementations.
class RandomStream {
public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed) : state_(seed) {}
  RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next(); }
  std::uint64_t next();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1]; safe under log().
  double uniform_open0();
  double normal();
  double exponential();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

}  // namespace empot
