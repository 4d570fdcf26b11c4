#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mrprio/error.hpp"

namespace mrprio {

template <typename Scalar>
struct OutlierReport {
  /// Flagged rows, highest score first.
  std::vector<Eigen::Index> indices;
  /// Distance from each row to its k-th nearest other row.
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> scores;
  Eigen::Index k = 0;
  double contamination = 0;
};

/// Number of rows flagged for a given contamination: round-half-up of
/// contamination × rows, capped at rows − 1.
inline Eigen::Index outlier_count(Eigen::Index rows, double contamination) {
  const auto c = static_cast<Eigen::Index>(std::floor(contamination * static_cast<double>(rows) + 0.5));
  return std::min(c, rows - 1);
}

/// Euclidean distance accumulated feature by feature in index order.
template <typename A, typename B>
typename A::Scalar euclidean(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  typename A::Scalar acc = 0;
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    const auto d = a(j) - b(j);
    acc += d * d;
  }
  return std::sqrt(acc);
}

/// k-th nearest neighbour outlier scores over the rows of `points`.
///
/// A row's score is its distance to the k-th closest other row (duplicates
/// count as neighbours at distance 0). The round-half-up(contamination ×
/// rows) highest scores are flagged, lower row index first on ties.
template <typename Derived>
OutlierReport<typename Derived::Scalar> knn_outliers(const Eigen::MatrixBase<Derived>& points, Eigen::Index k,
                                                     double contamination) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = points.rows();
  if (k < 1) throw InputError("knn: k must be at least 1");
  if (n <= k)
    throw ApplicabilityError("knn: need more rows than k (rows=" + std::to_string(n) + ", k=" + std::to_string(k) + ")");
  if (!(contamination > 0.0 && contamination < 1.0)) throw InputError("knn: contamination must be in (0,1)");

  OutlierReport<Scalar> report;
  report.k = k;
  report.contamination = contamination;
  report.scores.resize(n);

  std::vector<Scalar> dist(static_cast<std::size_t>(n - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::size_t w = 0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) dist[w++] = euclidean(points.row(i), points.row(j));
    auto kth = dist.begin() + (k - 1);
    std::nth_element(dist.begin(), kth, dist.end());
    report.scores(i) = *kth;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return report.scores(a) > report.scores(b); });
  order.resize(static_cast<std::size_t>(outlier_count(n, contamination)));
  report.indices = std::move(order);
  return report;
}

}  // namespace mrprio
