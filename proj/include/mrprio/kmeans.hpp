#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "mrprio/error.hpp"
#include "mrprio/rng.hpp"

namespace mrprio {

template <typename Scalar>
struct ClusterSummary {
  Eigen::Index k = 0;
  /// k × features.
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> centroids;
  std::vector<Eigen::Index> sizes;
  /// Cluster of each input row, in input order.
  std::vector<Eigen::Index> assignment;
  /// Sum of Euclidean distances over all centroid pairs.
  Scalar between_total = 0;
  /// Sum of cluster sizes (equals the row count).
  Scalar size_total = 0;
  /// Mean Euclidean distance from each row to its centroid.
  Scalar within_avg = 0;
  /// Sum of squared row-to-centroid distances after each assignment step.
  std::vector<Scalar> objective_trace;
  int iterations = 0;
  bool converged = false;

  Scalar objective() const { return objective_trace.empty() ? Scalar(0) : objective_trace.back(); }
  Scalar combined() const { return between_total + size_total + within_avg; }
};

namespace detail {

template <typename Scalar>
bool row_less(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& x, Eigen::Index a, Eigen::Index b) {
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (x(a, j) < x(b, j)) return true;
    if (x(b, j) < x(a, j)) return false;
  }
  return false;
}

}  // namespace detail

/// Lloyd's k-means with k-means++ seeding.
///
/// Rows are processed in a canonical (lexicographic) order and seeds are
/// drawn over distinct row contents weighted by multiplicity, so the result
/// depends only on the multiset of rows and the seed. A row changes cluster
/// only when another centroid is strictly closer. Clusters that go empty are
/// re-seeded with the row farthest from its own centroid.
template <typename Derived>
ClusterSummary<typename Derived::Scalar> kmeans_summary(const Eigen::MatrixBase<Derived>& points, Eigen::Index k,
                                                        std::uint64_t seed, int max_iters = 100) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = points.rows();
  const Eigen::Index p = points.cols();
  if (k < 1) throw InputError("kmeans: k must be at least 1");
  if (n < k)
    throw ApplicabilityError("kmeans: need at least k rows (rows=" + std::to_string(n) + ", k=" + std::to_string(k) + ")");
  if (max_iters < 1) throw InputError("kmeans: max_iters must be positive");

  const Mat input = points;
  std::vector<Eigen::Index> canon(static_cast<std::size_t>(n));
  std::iota(canon.begin(), canon.end(), Eigen::Index{0});
  std::stable_sort(canon.begin(), canon.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return detail::row_less<Scalar>(input, a, b); });
  Mat x(n, p);
  for (Eigen::Index i = 0; i < n; ++i) x.row(i) = input.row(canon[static_cast<std::size_t>(i)]);

  auto sq = [&](Eigen::Index i, const Mat& c, Eigen::Index r) { return (x.row(i) - c.row(r)).squaredNorm(); };

  // Seeding over distinct rows (runs of equal rows in canonical order).
  std::vector<Eigen::Index> first_of, multiplicity;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == 0 || detail::row_less<Scalar>(x, i - 1, i)) {
      first_of.push_back(i);
      multiplicity.push_back(1);
    } else {
      ++multiplicity.back();
    }
  }
  const auto distinct = first_of.size();
  Rng rng(seed);
  Mat centroids(k, p);
  std::vector<bool> chosen(distinct, false);
  std::vector<Scalar> d2(distinct, std::numeric_limits<Scalar>::infinity());
  for (Eigen::Index c = 0; c < k; ++c) {
    std::vector<double> weight(distinct);
    double total = 0;
    for (std::size_t u = 0; u < distinct; ++u) {
      weight[u] = c == 0 ? static_cast<double>(multiplicity[u]) : static_cast<double>(multiplicity[u]) * static_cast<double>(d2[u]);
      total += weight[u];
    }
    std::size_t pick = 0;
    if (total > 0) {
      const double r = rng.uniform01() * total;
      double acc = 0;
      pick = distinct;
      for (std::size_t u = 0; u < distinct; ++u) {
        if (weight[u] <= 0) continue;
        acc += weight[u];
        pick = u;
        if (acc > r) break;
      }
    } else {
      // Every distinct row already is a centroid; reuse the first unchosen or row 0.
      pick = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), false) - chosen.begin());
      if (pick == distinct) pick = 0;
    }
    chosen[pick] = true;
    centroids.row(c) = x.row(first_of[pick]);
    for (std::size_t u = 0; u < distinct; ++u) d2[u] = std::min(d2[u], sq(first_of[u], centroids, c));
  }

  ClusterSummary<Scalar> out;
  out.k = k;
  std::vector<Eigen::Index> assign(static_cast<std::size_t>(n), -1);
  std::vector<bool> changed(static_cast<std::size_t>(k), true);

  auto assign_step = [&]() {
    bool moved = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      auto& a = assign[static_cast<std::size_t>(i)];
      Eigen::Index best = a;
      Scalar best_d = a >= 0 ? sq(i, centroids, a) : std::numeric_limits<Scalar>::infinity();
      for (Eigen::Index c = 0; c < k; ++c) {
        const Scalar d = sq(i, centroids, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (best != a) {
        if (a >= 0) changed[static_cast<std::size_t>(a)] = true;
        changed[static_cast<std::size_t>(best)] = true;
        a = best;
        moved = true;
      }
    }
    // Empty-cluster repair.
    std::vector<Eigen::Index> size(static_cast<std::size_t>(k), 0);
    for (auto a : assign) ++size[static_cast<std::size_t>(a)];
    for (Eigen::Index c = 0; c < k; ++c) {
      if (size[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index far = -1;
      Scalar far_d = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto a = assign[static_cast<std::size_t>(i)];
        if (size[static_cast<std::size_t>(a)] < 2) continue;
        const Scalar d = sq(i, centroids, a);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far < 0) throw InvariantError("kmeans: no row available to repair an empty cluster");
      auto& a = assign[static_cast<std::size_t>(far)];
      --size[static_cast<std::size_t>(a)];
      changed[static_cast<std::size_t>(a)] = true;
      a = c;
      size[static_cast<std::size_t>(c)] = 1;
      centroids.row(c) = x.row(far);
      moved = true;
    }
    Scalar objective = 0;
    for (Eigen::Index i = 0; i < n; ++i) objective += sq(i, centroids, assign[static_cast<std::size_t>(i)]);
    out.objective_trace.push_back(objective);
    return moved;
  };

  auto update_step = [&]() {
    for (Eigen::Index c = 0; c < k; ++c) {
      if (!changed[static_cast<std::size_t>(c)]) continue;
      Eigen::Matrix<Scalar, 1, Eigen::Dynamic> sum = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>::Zero(p);
      Eigen::Index count = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (assign[static_cast<std::size_t>(i)] != c) continue;
        sum += x.row(i);
        ++count;
      }
      centroids.row(c) = sum / static_cast<Scalar>(count);
      changed[static_cast<std::size_t>(c)] = false;
    }
  };

  assign_step();
  for (int it = 1; it <= max_iters; ++it) {
    update_step();
    out.iterations = it;
    if (!assign_step()) {
      out.converged = true;
      break;
    }
  }

  out.centroids = centroids;
  out.sizes.assign(static_cast<std::size_t>(k), 0);
  out.assignment.assign(static_cast<std::size_t>(n), 0);
  Scalar within = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto a = assign[static_cast<std::size_t>(i)];
    ++out.sizes[static_cast<std::size_t>(a)];
    out.assignment[static_cast<std::size_t>(canon[static_cast<std::size_t>(i)])] = a;
    within += std::sqrt(sq(i, centroids, a));
  }
  out.within_avg = within / static_cast<Scalar>(n);
  out.size_total = static_cast<Scalar>(n);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = a + 1; b < k; ++b) out.between_total += (centroids.row(a) - centroids.row(b)).norm();
  return out;
}

}  // namespace mrprio
