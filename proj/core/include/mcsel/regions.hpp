#pragma once

// Concentration ellipsoid around the MLE, its enclosing axis-aligned box and
// the equal-width stratification of that box.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mcsel/models.hpp"
#include "mcsel/numerics.hpp"

namespace mcsel {

/// 6 + 2d
double default_mu(int d);

/// { theta : (theta - center)' metric (theta - center) <= radius }
struct Ellipsoid {
  std::vector<double> center;
  SymMatrix metric;
  CholeskyFactor metric_factor;
  double radius = 0.0;

  std::size_t dim() const noexcept { return center.size(); }
  double quadratic_form(std::span<const double> theta) const;
};

/// Throws kNotPositiveDefinite for a singular FIM and kInvalidArgument for mu <= 0.
Ellipsoid build_ellipsoid(const FittedModel& model, double mu);
Ellipsoid make_ellipsoid(std::vector<double> center, SymMatrix metric, double mu);

/// Closed set membership.
bool contains(const Ellipsoid& e, std::span<const double> theta);

/// (d/2) ln mu + ln V_d - (1/2) ln|J|
double ellipsoid_log_volume(const Ellipsoid& e);

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dim() const noexcept { return lo.size(); }
  double log_volume() const;
  bool contains(std::span<const double> theta) const;
};

/// Smallest axis-aligned box enclosing e: half-widths sqrt(mu (J^{-1})_kk).
Box bounding_box(const Ellipsoid& e);

inline constexpr std::uint64_t kDefaultPartitionCap = 1'000'000;

/// Source box split into L equal segments per axis. Cells are enumerated
/// lazily in row-major order (axis 0 slowest).
class BoxPartition {
 public:
  const Box& source() const noexcept { return source_; }
  std::size_t segments() const noexcept { return segments_; }
  std::size_t size() const noexcept { return cells_; }

  Box cell(std::size_t k) const;
  double weight(std::size_t k) const;

 private:
  friend BoxPartition partition(const Box& box, std::size_t segments, std::uint64_t cap);
  Box source_;
  std::size_t segments_ = 1;
  std::size_t cells_ = 1;
};

/// Throws kPartitionTooLarge when L^d exceeds `cap`.
BoxPartition partition(const Box& box, std::size_t segments,
                       std::uint64_t cap = kDefaultPartitionCap);

/// Number of cells L^d, or 0 on overflow of `cap`.
std::uint64_t partition_cell_count(std::size_t segments, std::size_t dim, std::uint64_t cap);

/// Largest L >= 1 with L^d <= budget.
std::size_t auto_segments(std::size_t dim, std::uint64_t budget);

}  // namespace mcsel
