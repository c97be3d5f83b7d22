#pragma once

#include <cstdint>
#include <random>

namespace bnpl {

// A seeded pseudo-random stream. Each chain or replicate owns one; the pair
// (seed, stream_id) fully determines the sequence.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  // Standard normal (Marsaglia polar method, spare value cached).
  double normal();

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Deterministic 64-bit mixing of a base seed with a tag; used to derive
// per-replicate and per-fold seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag);

}  // namespace bnpl
