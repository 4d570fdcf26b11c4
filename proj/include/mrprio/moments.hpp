#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

namespace mrprio {

/// Shape and spread of one sample, from population (denominator n) moments.
template <typename Scalar>
struct ColumnMoments {
  Eigen::Index count = 0;
  Scalar range = 0;
  Scalar variance = 0;
  Scalar stddev = 0;
  /// Fisher-Pearson g1 = m3 / m2^(3/2).
  Scalar skewness = 0;
  /// Excess kurtosis g2 = m4 / m2^2 - 3.
  Scalar kurtosis = 0;
  /// Set when fewer than 3 values or zero range; skewness and kurtosis are then 0.
  bool shape_degenerate = false;

  Scalar shape() const { return skewness + kurtosis; }
  Scalar spread() const { return range + variance + stddev; }
};

/// Population moments of a sample. Values are sorted before accumulation so
/// the result depends only on the multiset of values, not their order.
template <typename Derived>
ColumnMoments<typename Derived::Scalar> column_moments(const Eigen::DenseBase<Derived>& sample) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x = sample.derived().reshaped();
  std::sort(x.begin(), x.end());

  ColumnMoments<Scalar> m;
  m.count = x.size();
  if (m.count == 0) {
    m.shape_degenerate = true;
    return m;
  }
  m.range = x(x.size() - 1) - x(0);
  if (m.range == 0) {
    m.shape_degenerate = true;
    return m;
  }

  const Scalar n = static_cast<Scalar>(m.count);
  Scalar sum = 0;
  for (Scalar v : x) sum += v;
  const Scalar mean = sum / n;
  Scalar s2 = 0, s3 = 0, s4 = 0;
  for (Scalar v : x) {
    const Scalar d = v - mean;
    const Scalar d2 = d * d;
    s2 += d2;
    s3 += d2 * d;
    s4 += d2 * d2;
  }
  const Scalar m2 = s2 / n;
  m.variance = m2;
  m.stddev = std::sqrt(m2);
  if (m.count < 3 || m2 == 0) {
    m.shape_degenerate = true;
    return m;
  }
  m.skewness = (s3 / n) / std::pow(m2, Scalar(1.5));
  m.kurtosis = (s4 / n) / (m2 * m2) - Scalar(3);
  return m;
}

}  // namespace mrprio
