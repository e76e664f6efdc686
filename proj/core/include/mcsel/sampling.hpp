#pragma once

// Direct samplers over the regions: uniform on a box, uniform on an ellipsoid
// (box proposal + rejection), Gaussian around the MLE and its truncation to
// the ellipsoid. Every sampler returns exactly m accepted points.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mcsel/models.hpp"
#include "mcsel/random.hpp"
#include "mcsel/regions.hpp"

namespace mcsel {

class SampleBatch {
 public:
  explicit SampleBatch(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::size_t accepted_count() const noexcept { return size(); }
  std::uint64_t proposed_count() const noexcept { return proposed_; }
  double acceptance_rate() const noexcept {
    return proposed_ == 0 ? 0.0 : static_cast<double>(size()) / static_cast<double>(proposed_);
  }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<const double> coords() const noexcept { return coords_; }

  void reserve(std::size_t m) { coords_.reserve(m * dim_); }
  void append(std::span<const double> theta) {
    coords_.insert(coords_.end(), theta.begin(), theta.end());
  }
  void add_proposals(std::uint64_t n) noexcept { proposed_ += n; }

  friend bool operator==(const SampleBatch&, const SampleBatch&) = default;

 private:
  std::size_t dim_;
  std::vector<double> coords_;
  std::uint64_t proposed_ = 0;
};

/// Fails loudly instead of spinning when a rejection sampler starves.
struct AcceptanceGuard {
  double floor = 1e-4;
  std::uint64_t warmup = 10'000;
};

/// Writes one proposal draw into its argument.
using ProposalSampler = std::function<void(RandomStream&, std::span<double>)>;
/// f(theta) / (c g(theta)), must lie in [0, 1].
using DensityRatio = std::function<double(std::span<const double>)>;

/// Two-step loop: draw theta from the proposal, then u ~ U(0,1); accept when
/// u <= ratio(theta). Repeats until m points are accepted. Throws
/// kAcceptanceTooLow once past the warm-up with acceptance below the floor.
SampleBatch accept_reject(RandomStream& rng, std::size_t dim, const ProposalSampler& proposal,
                          const DensityRatio& ratio, std::size_t m,
                          const AcceptanceGuard& guard = {});

SampleBatch sample_uniform_box(RandomStream& rng, const Box& box, std::size_t m);

/// Uniform on e by rejection from its bounding box.
SampleBatch sample_uniform_ellipsoid(RandomStream& rng, const Ellipsoid& e, std::size_t m,
                                     const AcceptanceGuard& guard = {});

/// theta = theta_hat + L^{-T} z with L L' = J, so cov(theta) = J^{-1}.
SampleBatch sample_gaussian(RandomStream& rng, const FittedModel& model, std::size_t m);

/// Gaussian proposal restricted to e by rejection; acceptance -> chi2_cdf(d, mu).
SampleBatch sample_truncated_gaussian(RandomStream& rng, const FittedModel& model,
                                      const Ellipsoid& e, std::size_t m,
                                      const AcceptanceGuard& guard = {});

}  // namespace mcsel
