#pragma once

#include "sawaml/geometry.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <deque>
#include <random>
#include <span>
#include <vector>

namespace sawaml {

/// One UWB distance sample between robots i and j (0-based, i < j).
struct RawRange {
  int i = 0;
  int j = 1;
  std::int64_t step = 0;
  double distance = 0.0;
};

/// Filtered inter-robot distances at one step. Symmetric, zero diagonal,
/// with a per-pair validity mask.
class RangeSet {
 public:
  RangeSet() = default;
  RangeSet(int robots, Timestamp stamp);

  int size() const { return static_cast<int>(dist_.rows()); }
  Timestamp stamp() const { return stamp_; }

  void set(int i, int j, double distance);
  void invalidate(int i, int j);

  bool valid(int i, int j) const { return i != j && mask_(i, j); }
  double range(int i, int j) const { return dist_(i, j); }
  bool fully_valid() const;
  int valid_pairs() const;

  const Eigen::MatrixXd& matrix() const { return dist_; }

  /// Exact distances between the given positions; every pair valid.
  static RangeSet from_positions(std::span<const Vec3> positions, Timestamp stamp = {});

 private:
  Timestamp stamp_;
  Eigen::MatrixXd dist_;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask_;
};

struct FilterOptions {
  int ma_window = 5;
  int ransac_window = 15;
  int ransac_min_samples = 5;
  double inlier_threshold = 0.3;
  int ransac_iterations = 50;
};

/// Mean of the window. Throws PreconditionError on an empty window.
double moving_average(std::span<const double> window);
/// Same, over raw samples of a single pair.
double moving_average(std::span<const RawRange> window);

struct RansacResult {
  std::vector<bool> inliers;
  double value = 0.0;
  bool valid = false;
};

/// Constant-model RANSAC over a window of distances.
///
/// Each iteration picks one sample as the hypothesis and counts samples
/// within the inlier threshold. The largest set wins (first one on ties) and
/// its mean is the consensus value. The result is invalid unless the set
/// holds at least ceil(window / 2) samples.
RansacResult ransac_filter(std::span<const double> window, const FilterOptions& options,
                           std::mt19937_64& rng);

struct FilteredRange {
  int i = 0;
  int j = 1;
  double distance = 0.0;
  bool valid = false;
};

/// Builds a RangeSet from per-pair results; pairs not listed stay masked.
RangeSet assemble_range_set(int robots, Timestamp stamp, std::span<const FilteredRange> pairs);

/// Streaming moving-average then RANSAC filter for all pairs of N robots.
class RangeFilterBank {
 public:
  RangeFilterBank(int robots, FilterOptions options, std::uint64_t seed);

  /// Feeds one raw sample. Samples for a pair must arrive in time order.
  void push(const RawRange& sample);

  /// Filters every pair with the samples pushed so far and clears the
  /// "seen this step" markers. Pairs without a fresh sample are invalid.
  RangeSet emit(Timestamp stamp);

  const FilterOptions& options() const { return options_; }

 private:
  struct PairState {
    std::deque<double> raw;
    std::deque<double> smoothed;
    bool fresh = false;
  };

  PairState& state(int i, int j);

  int robots_;
  FilterOptions options_;
  std::mt19937_64 rng_;
  std::vector<PairState> pairs_;
};

}  // namespace sawaml
