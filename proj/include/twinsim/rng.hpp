#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace twinsim {

// Splittable deterministic random stream. The state is derived from
// (global seed, label) only, so the draw sequence of one entity is
// insensitive to what every other entity does: adding a flow never
// perturbs another flow's randomness. Same (seed, label) reproduces the
// same sequence on every platform.
class RandomStream {
 public:
  RandomStream() = default;
  RandomStream(std::uint64_t seed, std::string_view label);

  std::uint64_t next_u64();

  // Uniform on [lo, hi).
  double uniform_real(double lo, double hi);

  // Uniform integer on [0, bound] inclusive. Unbiased.
  std::uint64_t uniform_int(std::uint64_t bound);

  const std::string& label() const { return label_; }

 private:
  std::uint64_t state_ = 0x853c49e6748fea9bULL;
  std::string label_;
};

// Spec-facing spelling: derive the per-entity stream for a label.
inline RandomStream substream(std::uint64_t seed, std::string_view label) {
  return RandomStream(seed, label);
}

std::uint64_t fnv1a64(std::string_view s);

}  // namespace twinsim
