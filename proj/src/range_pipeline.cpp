#include "sawaml/range_pipeline.hpp"

#include "sawaml/error.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace sawaml {

RangeSet::RangeSet(int robots, Timestamp stamp)
    : stamp_(stamp),
      dist_(Eigen::MatrixXd::Zero(robots, robots)),
      mask_(Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(robots, robots, false)) {}

void RangeSet::set(int i, int j, double distance) {
  if (i == j || i < 0 || j < 0 || i >= size() || j >= size()) {
    throw PreconditionError("range pair (" + std::to_string(i) + "," + std::to_string(j) +
                            ") out of bounds");
  }
  if (!std::isfinite(distance) || distance < 0.0) {
    throw PreconditionError("range must be finite and non-negative");
  }
  dist_(i, j) = dist_(j, i) = distance;
  mask_(i, j) = mask_(j, i) = true;
}

void RangeSet::invalidate(int i, int j) {
  dist_(i, j) = dist_(j, i) = 0.0;
  mask_(i, j) = mask_(j, i) = false;
}

bool RangeSet::fully_valid() const { return valid_pairs() == size() * (size() - 1) / 2; }

int RangeSet::valid_pairs() const {
  int count = 0;
  for (int i = 0; i < size(); ++i)
    for (int j = i + 1; j < size(); ++j) count += mask_(i, j) ? 1 : 0;
  return count;
}

RangeSet RangeSet::from_positions(std::span<const Vec3> positions, Timestamp stamp) {
  const int n = static_cast<int>(positions.size());
  RangeSet set(n, stamp);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) set.set(i, j, (positions[i] - positions[j]).norm());
  return set;
}

double moving_average(std::span<const double> window) {
  if (window.empty()) throw PreconditionError("empty filter window");
  return std::accumulate(window.begin(), window.end(), 0.0) / static_cast<double>(window.size());
}

double moving_average(std::span<const RawRange> window) {
  if (window.empty()) throw PreconditionError("empty filter window");
  double sum = 0.0;
  for (const auto& r : window) {
    if (r.i != window.front().i || r.j != window.front().j) {
      throw PreconditionError("filter window mixes robot pairs");
    }
    sum += r.distance;
  }
  return sum / static_cast<double>(window.size());
}

RansacResult ransac_filter(std::span<const double> window, const FilterOptions& options,
                           std::mt19937_64& rng) {
  const int n = static_cast<int>(window.size());
  if (n < options.ransac_min_samples || n == 0) {
    throw PreconditionError("RANSAC window shorter than the minimum sample count");
  }
  std::uniform_int_distribution<int> pick(0, n - 1);

  int best_count = 0;
  double best_hypothesis = 0.0;
  for (int it = 0; it < options.ransac_iterations; ++it) {
    const double hypothesis = window[pick(rng)];
    int count = 0;
    for (double d : window) count += std::abs(d - hypothesis) <= options.inlier_threshold ? 1 : 0;
    if (count > best_count) {
      best_count = count;
      best_hypothesis = hypothesis;
    }
  }

  RansacResult result;
  result.inliers.assign(n, false);
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    if (std::abs(window[k] - best_hypothesis) <= options.inlier_threshold) {
      result.inliers[k] = true;
      sum += window[k];
    }
  }
  const int majority = (n + 1) / 2;
  result.valid = best_count >= majority;
  result.value = best_count > 0 ? sum / best_count : 0.0;
  return result;
}

RangeSet assemble_range_set(int robots, Timestamp stamp, std::span<const FilteredRange> pairs) {
  RangeSet set(robots, stamp);
  for (const auto& p : pairs) {
    if (p.valid) {
      set.set(p.i, p.j, p.distance);
    } else {
      set.invalidate(p.i, p.j);
    }
  }
  return set;
}

RangeFilterBank::RangeFilterBank(int robots, FilterOptions options, std::uint64_t seed)
    : robots_(robots), options_(options), rng_(seed), pairs_(robots * robots) {
  if (options_.ma_window < 1 || options_.ransac_window < 1 || options_.ransac_min_samples < 1) {
    throw ConfigError("filter windows must be at least one sample");
  }
}

RangeFilterBank::PairState& RangeFilterBank::state(int i, int j) {
  if (i > j) std::swap(i, j);
  if (i == j || i < 0 || j >= robots_) throw PreconditionError("invalid robot pair in range sample");
  return pairs_[i * robots_ + j];
}

void RangeFilterBank::push(const RawRange& sample) {
  auto& s = state(sample.i, sample.j);
  s.raw.push_back(sample.distance);
  if (static_cast<int>(s.raw.size()) > options_.ma_window) s.raw.pop_front();
  // Smoothed samples start once the averaging window is full.
  if (static_cast<int>(s.raw.size()) == options_.ma_window) {
    std::vector<double> w(s.raw.begin(), s.raw.end());
    s.smoothed.push_back(moving_average(w));
    if (static_cast<int>(s.smoothed.size()) > options_.ransac_window) s.smoothed.pop_front();
  }
  s.fresh = true;
}

RangeSet RangeFilterBank::emit(Timestamp stamp) {
  std::vector<FilteredRange> out;
  for (int i = 0; i < robots_; ++i) {
    for (int j = i + 1; j < robots_; ++j) {
      auto& s = state(i, j);
      FilteredRange f{i, j, 0.0, false};
      if (s.fresh && static_cast<int>(s.smoothed.size()) >= options_.ransac_min_samples) {
        std::vector<double> w(s.smoothed.begin(), s.smoothed.end());
        const auto r = ransac_filter(w, options_, rng_);
        f.valid = r.valid;
        f.distance = r.value;
      }
      s.fresh = false;
      out.push_back(f);
    }
  }
  return assemble_range_set(robots_, stamp, out);
}

}  // namespace sawaml
