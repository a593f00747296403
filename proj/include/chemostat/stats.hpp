#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace chemostat {

inline constexpr std::size_t kDefaultBatches = 32;

// Splits a series of known length into contiguous batches of (near) equal
// length and keeps per-batch sums. Batch b covers sample indices
// [b*n/B, (b+1)*n/B).
class BatchMeans {
public:
  BatchMeans(std::size_t expected_samples, std::size_t batches = kDefaultBatches);

  void add(double value);

  std::size_t count() const noexcept { return count_; }
  double sum() const noexcept { return total_; }
  double mean() const;
  std::vector<double> batch_means() const;

private:
  std::size_t boundary(std::size_t batch) const;

  std::size_t expected_;
  std::size_t batches_;
  std::size_t count_ = 0;
  std::size_t current_ = 0;
  std::size_t next_edge_;
  double total_ = 0.0;
  std::vector<double> sums_;
  std::vector<std::size_t> lengths_;
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

// Grand time average over all replicas with a standard error from the spread
// of every replica's batch means (sd / sqrt(total batches)).
Estimate pool_batch_means(std::span<const BatchMeans> replicas);

// Sample mean and standard error of independent values.
Estimate mean_and_error(std::span<const double> values);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Ordinary least squares. Values are shifted by the first point before
// summation, so a constant series has slope exactly 0.
LineFit least_squares(std::span<const double> t, std::span<const double> y);

}  // namespace chemostat
