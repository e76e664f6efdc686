#include "mcsel/sampling.hpp"

#include <string>

#include "mcsel/error.hpp"

namespace mcsel {

namespace {

void draw_in_box(RandomStream& rng, const Box& box, std::span<double> out) {
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = rng.uniform(box.lo[k], box.hi[k]);
}

void draw_gaussian(RandomStream& rng, const FittedModel& model, std::span<double> out) {
  std::vector<double> z(model.dim);
  for (double& v : z) v = rng.normal();
  const auto offset = model.fim_factor.solve_upper(z);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = model.theta_hat[k] + offset[k];
}

}  // namespace

SampleBatch accept_reject(RandomStream& rng, std::size_t dim, const ProposalSampler& proposal,
                          const DensityRatio& ratio, std::size_t m,
                          const AcceptanceGuard& guard) {
  if (m < 1) throw Error(Errc::kInvalidArgument, "sampler needs m >= 1");
  SampleBatch batch(dim);
  batch.reserve(m);
  std::vector<double> theta(dim);
  std::uint64_t proposed = 0;
  while (batch.size() < m) {
    proposal(rng, theta);
    const double u = rng.uniform_open();
    ++proposed;
    if (u <= ratio(theta)) batch.append(theta);
    if (proposed >= guard.warmup &&
        static_cast<double>(batch.size()) < guard.floor * static_cast<double>(proposed)) {
      throw Error(Errc::kAcceptanceTooLow,
                  "acceptance rate fell below " + std::to_string(guard.floor) + " after " +
                      std::to_string(proposed) + " proposals in d=" + std::to_string(dim));
    }
  }
  batch.add_proposals(proposed);
  return batch;
}

SampleBatch sample_uniform_box(RandomStream& rng, const Box& box, std::size_t m) {
  if (m < 1) throw Error(Errc::kInvalidArgument, "sampler needs m >= 1");
  SampleBatch batch(box.dim());
  batch.reserve(m);
  std::vector<double> theta(box.dim());
  for (std::size_t i = 0; i < m; ++i) {
    draw_in_box(rng, box, theta);
    batch.append(theta);
  }
  batch.add_proposals(m);
  return batch;
}

SampleBatch sample_uniform_ellipsoid(RandomStream& rng, const Ellipsoid& e, std::size_t m,
                                     const AcceptanceGuard& guard) {
  const Box box = bounding_box(e);
  return accept_reject(
      rng, e.dim(), [&box](RandomStream& r, std::span<double> out) { draw_in_box(r, box, out); },
      [&e](std::span<const double> theta) { return contains(e, theta) ? 1.0 : 0.0; }, m, guard);
}

SampleBatch sample_gaussian(RandomStream& rng, const FittedModel& model, std::size_t m) {
  if (m < 1) throw Error(Errc::kInvalidArgument, "sampler needs m >= 1");
  SampleBatch batch(model.dim);
  batch.reserve(m);
  std::vector<double> theta(model.dim);
  for (std::size_t i = 0; i < m; ++i) {
    draw_gaussian(rng, model, theta);
    batch.append(theta);
  }
  batch.add_proposals(m);
  return batch;
}

SampleBatch sample_truncated_gaussian(RandomStream& rng, const FittedModel& model,
                                      const Ellipsoid& e, std::size_t m,
                                      const AcceptanceGuard& guard) {
  if (e.dim() != model.dim) {
    throw Error(Errc::kDimensionMismatch, "ellipsoid and model dimensions differ");
  }
  return accept_reject(
      rng, model.dim,
      [&model](RandomStream& r, std::span<double> out) { draw_gaussian(r, model, out); },
      [&e](std::span<const double> theta) { return contains(e, theta) ? 1.0 : 0.0; }, m, guard);
}

}  // namespace mcsel
