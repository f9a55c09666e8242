#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>

namespace gigmatch {

// One-pass central moments up to order four (Welford's update extended by
// Terriberry). Adding values in the same order gives bit-identical results.
class Moments {
 public:
  void add(double x) {
    const double n1 = static_cast<double>(n_);
    ++n_;
    const double n = static_cast<double>(n_);
    const double delta = x - mean_;
    const double delta_n = delta / n;
    const double delta_n2 = delta_n * delta_n;
    const double term1 = delta * delta_n * n1;
    mean_ += delta_n;
    m4_ += term1 * delta_n2 * (n * n - 3 * n + 3) + 6 * delta_n2 * m2_ - 4 * delta_n * m3_;
    m3_ += term1 * delta_n * (n - 2) - 3 * delta_n * m2_;
    m2_ += term1;
  }

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }

  // Unbiased (n - 1 divisor); undefined for n < 2.
  std::optional<double> variance() const {
    if (n_ < 2) return std::nullopt;
    return m2_ / static_cast<double>(n_ - 1);
  }

  std::optional<double> standard_error() const {
    auto v = variance();
    if (!v) return std::nullopt;
    return std::sqrt(*v / static_cast<double>(n_));
  }

  // Standard error of the unbiased sample variance,
  // sqrt((mu4 - (n-3)/(n-1) s^4) / n) with plug-in central moments.
  std::optional<double> variance_standard_error() const {
    if (n_ < 4) return std::nullopt;
    const double n = static_cast<double>(n_);
    const double s2 = m2_ / (n - 1);
    const double mu4 = m4_ / n;
    const double v = (mu4 - (n - 3) / (n - 1) * s2 * s2) / n;
    return std::sqrt(std::max(0.0, v));
  }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
};

}  // namespace gigmatch
