#include "chemostat/stats.hpp"

#include <cmath>

#include "chemostat/errors.hpp"

namespace chemostat {

BatchMeans::BatchMeans(std::size_t expected_samples, std::size_t batches)
    : expected_(expected_samples), batches_(batches), sums_(batches, 0.0), lengths_(batches, 0) {
  if (batches_ == 0) throw Error(ErrorCode::InvalidArgument, "batch count must be positive");
  if (expected_ < batches_) throw Error(ErrorCode::InvalidArgument, "fewer samples than batches");
  next_edge_ = boundary(1);
}

std::size_t BatchMeans::boundary(std::size_t batch) const { return batch * expected_ / batches_; }

void BatchMeans::add(double value) {
  while (count_ >= next_edge_ && current_ + 1 < batches_) {
    ++current_;
    next_edge_ = boundary(current_ + 1);
  }
  sums_[current_] += value;
  ++lengths_[current_];
  total_ += value;
  ++count_;
}

double BatchMeans::mean() const { return count_ == 0 ? 0.0 : total_ / static_cast<double>(count_); }

std::vector<double> BatchMeans::batch_means() const {
  std::vector<double> out;
  out.reserve(batches_);
  for (std::size_t b = 0; b < batches_; ++b) {
    if (lengths_[b] > 0) out.push_back(sums_[b] / static_cast<double>(lengths_[b]));
  }
  return out;
}

Estimate pool_batch_means(std::span<const BatchMeans> replicas) {
  double total = 0.0;
  std::size_t count = 0;
  std::vector<double> all;
  for (const auto& r : replicas) {
    total += r.sum();
    count += r.count();
    const auto means = r.batch_means();
    all.insert(all.end(), means.begin(), means.end());
  }
  if (count == 0 || all.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two batches");
  const double grand = total / static_cast<double>(count);
  double center = 0.0;
  for (double m : all) center += m;
  center /= static_cast<double>(all.size());
  double ss = 0.0;
  for (double m : all) ss += (m - center) * (m - center);
  const double k = static_cast<double>(all.size());
  return {grand, std::sqrt(ss / (k - 1.0) / k)};
}

Estimate mean_and_error(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "no values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  if (n == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n))};
}

LineFit least_squares(std::span<const double> t, std::span<const double> y) {
  const std::size_t n = t.size();
  if (n < 2 || y.size() != n) throw Error(ErrorCode::InvalidArgument, "least squares needs >= 2 paired points");
  const double t0 = t[0];
  const double y0 = y[0];
  double mt = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mt += t[i] - t0;
    my += y[i] - y0;
  }
  mt /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = (t[i] - t0) - mt;
    sxy += dt * ((y[i] - y0) - my);
    sxx += dt * dt;
  }
  if (sxx == 0.0) throw Error(ErrorCode::InvalidArgument, "degenerate abscissae");
  const double slope = sxy / sxx;
  return {slope, (my + y0) - slope * (mt + t0)};
}

}  // namespace chemostat
