#include "mcsel/random.hpp"

#include <cmath>
#include <numbers>

namespace mcsel {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RandomStream::RandomStream(std::uint64_t seed) noexcept : seed_(seed), state_(mix64(seed)) {}

RandomStream RandomStream::for_task(std::uint64_t master_seed, std::uint64_t task_index) noexcept {
  return RandomStream(master_seed).split(task_index);
}

RandomStream RandomStream::split(std::uint64_t index) const noexcept {
  return RandomStream(mix64(mix64(seed_) ^ (index * kGolden + kStreamSalt)));
}

std::uint64_t RandomStream::next_u64() noexcept {
  state_ += kGolden;
  return mix64(state_);
}

double RandomStream::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_open() noexcept {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform_open()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace mcsel
