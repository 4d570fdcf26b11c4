#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mrprio/dataset.hpp"
#include "mrprio/error.hpp"

namespace mrprio {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Numeric, non-class columns of a dataset as a dense rows × features matrix.
template <typename Scalar>
struct NumericView {
  Matrix<Scalar> data;
  std::vector<std::string> feature_names;
  bool standardized = false;
  /// Per-feature mean and population stddev of the imputed column.
  Vector<Scalar> mean;
  Vector<Scalar> stddev;
  /// Features left unscaled because they are constant.
  std::vector<bool> constant;

  Eigen::Index rows() const { return data.rows(); }
  Eigen::Index features() const { return data.cols(); }
};

namespace detail {

// Mean accumulated in ascending order, so it is invariant to row order.
template <typename Scalar>
Scalar sorted_mean(std::vector<Scalar> values) {
  std::sort(values.begin(), values.end());
  Scalar sum = 0;
  for (Scalar v : values) sum += v;
  return sum / static_cast<Scalar>(values.size());
}

}  // namespace detail

/// Extracts numeric features, imputing missing cells with the column mean.
/// With `standardize`, non-constant columns are centered and divided by the
/// population stddev; constant columns are kept as-is and flagged.
template <typename Scalar = double>
NumericView<Scalar> numeric_view(const Dataset& d, bool standardize) {
  const auto cols = d.numeric_feature_indices();
  if (cols.empty()) throw ApplicabilityError("dataset '" + d.name() + "' has no numeric feature attributes");
  if (d.num_rows() == 0) throw ApplicabilityError("dataset '" + d.name() + "' has no rows");

  const auto n = static_cast<Eigen::Index>(d.num_rows());
  const auto p = static_cast<Eigen::Index>(cols.size());
  NumericView<Scalar> view;
  view.data.resize(n, p);
  view.mean.resize(p);
  view.stddev.resize(p);
  view.constant.assign(cols.size(), false);
  view.standardized = standardize;

  for (Eigen::Index j = 0; j < p; ++j) {
    const auto attr = cols[static_cast<std::size_t>(j)];
    view.feature_names.push_back(d.attribute(attr).name);

    std::vector<Scalar> present;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Cell& c = d.row(static_cast<std::size_t>(i))[attr];
      if (const double* v = std::get_if<double>(&c)) present.push_back(static_cast<Scalar>(*v));
    }
    if (present.empty())
      throw ApplicabilityError("attribute '" + d.attribute(attr).name + "' of dataset '" + d.name() +
                               "' has no non-missing values");
    const Scalar fill = detail::sorted_mean(present);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Cell& c = d.row(static_cast<std::size_t>(i))[attr];
      const double* v = std::get_if<double>(&c);
      view.data(i, j) = v ? static_cast<Scalar>(*v) : fill;
    }

    auto column = view.data.col(j);
    std::vector<Scalar> values(column.begin(), column.end());
    const Scalar mu = detail::sorted_mean(values);
    for (auto& v : values) v = (v - mu) * (v - mu);
    const Scalar var = detail::sorted_mean(values);
    view.mean(j) = mu;
    view.stddev(j) = std::sqrt(var);
    const bool is_constant = column.maxCoeff() == column.minCoeff();
    view.constant[static_cast<std::size_t>(j)] = is_constant;
    if (standardize && !is_constant) column = (column.array() - mu) / view.stddev(j);
  }
  return view;
}

}  // namespace mrprio
