#include "mcsel/regions.hpp"

#include <cmath>
#include <string>

#include "mcsel/error.hpp"

namespace mcsel {

double default_mu(int d) {
  if (d < 1) throw Error(Errc::kInvalidArgument, "default_mu requires d >= 1");
  return 6.0 + 2.0 * d;
}

double Ellipsoid::quadratic_form(std::span<const double> theta) const {
  if (theta.size() != center.size()) {
    throw Error(Errc::kDimensionMismatch, "point and ellipsoid dimensions differ");
  }
  std::vector<double> delta(theta.size());
  for (std::size_t k = 0; k < delta.size(); ++k) delta[k] = theta[k] - center[k];
  return metric_factor.quadratic_form(delta);
}

Ellipsoid make_ellipsoid(std::vector<double> center, SymMatrix metric, double mu) {
  if (!(mu > 0.0)) throw Error(Errc::kInvalidArgument, "ellipsoid radius mu must be positive");
  if (center.size() != metric.dim()) {
    throw Error(Errc::kDimensionMismatch, "ellipsoid center and metric dimensions differ");
  }
  Ellipsoid e;
  e.metric_factor = cholesky(metric);
  e.center = std::move(center);
  e.metric = std::move(metric);
  e.radius = mu;
  return e;
}

Ellipsoid build_ellipsoid(const FittedModel& model, double mu) {
  if (!(mu > 0.0)) throw Error(Errc::kInvalidArgument, "ellipsoid radius mu must be positive");
  Ellipsoid e;
  e.center = model.theta_hat;
  e.metric = model.fim;
  e.metric_factor = model.fim_factor.dim() == model.fim.dim() ? model.fim_factor
                                                              : cholesky(model.fim);
  e.radius = mu;
  return e;
}

bool contains(const Ellipsoid& e, std::span<const double> theta) {
  return e.quadratic_form(theta) <= e.radius;
}

double ellipsoid_log_volume(const Ellipsoid& e) {
  const int d = static_cast<int>(e.dim());
  return 0.5 * d * std::log(e.radius) + log_unit_ball_volume(d) -
         0.5 * e.metric_factor.log_det();
}

double Box::log_volume() const {
  double acc = 0.0;
  for (std::size_t k = 0; k < lo.size(); ++k) acc += std::log(hi[k] - lo[k]);
  return acc;
}

bool Box::contains(std::span<const double> theta) const {
  if (theta.size() != lo.size()) {
    throw Error(Errc::kDimensionMismatch, "point and box dimensions differ");
  }
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (theta[k] < lo[k] || theta[k] > hi[k]) return false;
  }
  return true;
}

Box bounding_box(const Ellipsoid& e) {
  const std::size_t d = e.dim();
  Box box{std::vector<double>(d), std::vector<double>(d)};
  for (std::size_t k = 0; k < d; ++k) {
    const double half = std::sqrt(e.radius * e.metric_factor.inverse_diagonal(k));
    box.lo[k] = e.center[k] - half;
    box.hi[k] = e.center[k] + half;
  }
  return box;
}

std::uint64_t partition_cell_count(std::size_t segments, std::size_t dim, std::uint64_t cap) {
  std::uint64_t cells = 1;
  for (std::size_t k = 0; k < dim; ++k) {
    if (cells > cap / segments) return 0;
    cells *= segments;
  }
  return cells <= cap ? cells : 0;
}

std::size_t auto_segments(std::size_t dim, std::uint64_t budget) {
  std::size_t segments = 1;
  while (partition_cell_count(segments + 1, dim, budget) != 0) ++segments;
  return segments;
}

BoxPartition partition(const Box& box, std::size_t segments, std::uint64_t cap) {
  if (segments < 1) throw Error(Errc::kInvalidArgument, "partition needs L >= 1 segments");
  const std::uint64_t cells = partition_cell_count(segments, box.dim(), cap);
  if (cells == 0) {
    throw Error(Errc::kPartitionTooLarge,
                "partition with L=" + std::to_string(segments) + " in d=" +
                    std::to_string(box.dim()) + " exceeds the cell cap of " +
                    std::to_string(cap));
  }
  BoxPartition p;
  p.source_ = box;
  p.segments_ = segments;
  p.cells_ = static_cast<std::size_t>(cells);
  return p;
}

Box BoxPartition::cell(std::size_t k) const {
  if (k >= cells_) throw Error(Errc::kInvalidArgument, "partition cell index out of range");
  const std::size_t d = source_.dim();
  Box out{std::vector<double>(d), std::vector<double>(d)};
  const double L = static_cast<double>(segments_);
  for (std::size_t axis = d; axis-- > 0;) {
    const std::size_t j = k % segments_;
    k /= segments_;
    const double lo = source_.lo[axis];
    const double width = source_.hi[axis] - lo;
    out.lo[axis] = lo + width * (static_cast<double>(j) / L);
    out.hi[axis] = (j + 1 == segments_) ? source_.hi[axis]
                                        : lo + width * (static_cast<double>(j + 1) / L);
  }
  return out;
}

double BoxPartition::weight(std::size_t k) const {
  if (k >= cells_) throw Error(Errc::kInvalidArgument, "partition cell index out of range");
  return 1.0 / static_cast<double>(cells_);
}

}  // namespace mcsel
