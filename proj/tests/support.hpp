#pragma once

// Shared fixtures and hand-rolled generators for the test binaries.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mrprio/dataset.hpp"
#include "mrprio/eval.hpp"
#include "mrprio/metrics.hpp"
#include "mrprio/mr_catalog.hpp"
#include "mrprio/rng.hpp"

namespace mrprio::fx {

/// Numeric columns `x1..` plus an optional nominal class column `class`.
inline Dataset numeric_dataset(const std::vector<std::vector<double>>& columns,
                               const std::vector<std::string>& labels = {}, std::string name = "fixture") {
  std::vector<Attribute> attrs;
  for (std::size_t j = 0; j < columns.size(); ++j) attrs.push_back(Attribute::numeric("x" + std::to_string(j + 1)));
  std::optional<std::size_t> cls;
  const std::size_t n = columns.empty() ? labels.size() : columns.front().size();
  if (!labels.empty()) {
    std::vector<std::string> values;
    for (const auto& l : labels)
      if (std::find(values.begin(), values.end(), l) == values.end()) values.push_back(l);
    cls = attrs.size();
    attrs.push_back(Attribute::nominal("class", values));
  }
  std::vector<Row> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& col : columns) rows[i].emplace_back(col[i]);
    if (!labels.empty()) rows[i].emplace_back(labels[i]);
  }
  return Dataset(std::move(name), std::move(attrs), cls, std::move(rows));
}

struct RandomDatasetOptions {
  std::size_t min_rows = 5;
  std::size_t max_rows = 200;
  std::size_t min_attributes = 2;
  std::size_t max_attributes = 10;
  /// Probability that a non-class attribute is nominal.
  double nominal_share = 0.2;
  double missing_share = 0.0;
};

/// Random classification table. The last attribute is a nominal class; the
/// first feature is always numeric so every metric applies. Values are
/// rounded to 3 decimals so ties and duplicates occur.
inline Dataset random_dataset(Rng& rng, const RandomDatasetOptions& o = {}) {
  const std::size_t rows = o.min_rows + rng.uniform_index(o.max_rows - o.min_rows + 1);
  const std::size_t width = o.min_attributes + rng.uniform_index(o.max_attributes - o.min_attributes + 1);
  const std::size_t classes = 2 + rng.uniform_index(3);
  std::vector<Attribute> attrs;
  for (std::size_t j = 0; j + 1 < width; ++j) {
    if (j > 0 && rng.uniform01() < o.nominal_share)
      attrs.push_back(Attribute::nominal("a" + std::to_string(j), {"p", "q", "r"}));
    else
      attrs.push_back(Attribute::numeric("a" + std::to_string(j)));
  }
  std::vector<std::string> labels;
  for (std::size_t c = 0; c < classes; ++c) labels.push_back("k" + std::to_string(c));
  attrs.push_back(Attribute::nominal("class", labels));

  std::vector<Row> data(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t c = i < classes ? i : rng.uniform_index(classes);
    for (std::size_t j = 0; j + 1 < width; ++j) {
      if (j > 0 && rng.uniform01() < o.missing_share) {
        data[i].emplace_back(Missing{});
      } else if (attrs[j].is_nominal()) {
        data[i].emplace_back(attrs[j].values[rng.uniform_index(3)]);
      } else {
        const double v = static_cast<double>(c) * 1.5 + rng.normal() * (1.0 + static_cast<double>(j));
        data[i].emplace_back(std::round(v * 1000.0) / 1000.0);
      }
    }
    data[i].emplace_back(labels[c]);
  }
  return Dataset("random", std::move(attrs), width - 1, std::move(data));
}

/// Metric parameters valid for a dataset of `rows` rows.
inline MetricParams params_for_rows(std::size_t rows) {
  MetricParams p;
  p.knn_k = std::min<Eigen::Index>(5, static_cast<Eigen::Index>(rows) - 1);
  p.kmeans_k = std::min<Eigen::Index>(3, static_cast<Eigen::Index>(rows));
  return p;
}

inline MrPair make_pair(const MrSpec& mr, const Dataset& source) { return {mr, source, apply_mr(mr, source), true}; }

inline MrPair identity_pair(const Dataset& d) { return make_pair(make_mr("MR0", "identity", "identity", {}, {}), d); }

/// Random 0/1 kill matrix with random times.
inline KillMatrix random_kill_matrix(Rng& rng, std::size_t max_mrs, std::size_t max_mutants) {
  const std::size_t n = 1 + rng.uniform_index(max_mrs);
  const std::size_t m = 1 + rng.uniform_index(max_mutants);
  KillMatrix km;
  for (std::size_t i = 0; i < n; ++i) km.mr_ids.push_back("MR" + std::to_string(i + 1));
  for (std::size_t j = 0; j < m; ++j) km.mutant_ids.push_back("m" + std::to_string(j + 1));
  km.kills.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  const double p = 0.1 + 0.5 * rng.uniform01();
  for (Eigen::Index i = 0; i < km.kills.rows(); ++i)
    for (Eigen::Index j = 0; j < km.kills.cols(); ++j) km.kills(i, j) = rng.uniform01() < p;
  km.kills(static_cast<Eigen::Index>(rng.uniform_index(n)), static_cast<Eigen::Index>(rng.uniform_index(m))) = true;
  km.exec_time.resize(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < km.exec_time.size(); ++i) km.exec_time(i) = std::round(rng.uniform(0.5, 20.0) * 4) / 4;
  return km;
}

inline KillMatrix kill_matrix(const std::vector<std::vector<int>>& rows, std::vector<double> times) {
  KillMatrix km;
  for (std::size_t i = 0; i < rows.size(); ++i) km.mr_ids.push_back("MR" + std::to_string(i + 1));
  for (std::size_t j = 0; j < rows.front().size(); ++j) km.mutant_ids.push_back("m" + std::to_string(j + 1));
  km.kills.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      km.kills(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j] != 0;
  km.exec_time = Eigen::Map<Eigen::VectorXd>(times.data(), static_cast<Eigen::Index>(times.size()));
  return km;
}

inline Ordering shuffled_order(Rng& rng, const KillMatrix& km) {
  Ordering o = km.mr_ids;
  rng.shuffle(std::span(o));
  return o;
}

/// Brute-force APFD: scan the ordering for each killable mutant.
inline double apfd_oracle(const Ordering& order, const KillMatrix& km) {
  long long sum = 0, m = 0;
  for (std::size_t j = 0; j < km.num_mutants(); ++j) {
    for (std::size_t p = 0; p < order.size(); ++p) {
      const auto i = static_cast<Eigen::Index>(km.mr_index(order[p]));
      if (km.kills(i, static_cast<Eigen::Index>(j))) {
        sum += static_cast<long long>(p + 1);
        m += 1;
        break;
      }
    }
  }
  // 1 - sum/(nm) + 1/(2n) as one exact rational.
  const auto n = static_cast<long long>(order.size());
  return static_cast<double>(2 * n * m - 2 * sum + m) / static_cast<double>(2 * n * m);
}

/// Brute-force time to fault: re-sum execution times for each mutant.
inline double time_oracle(const Ordering& order, const KillMatrix& km) {
  double total = 0, m = 0;
  for (std::size_t j = 0; j < km.num_mutants(); ++j) {
    double t = 0;
    for (const auto& id : order) {
      const auto i = static_cast<Eigen::Index>(km.mr_index(id));
      t += km.exec_time(i);
      if (km.kills(i, static_cast<Eigen::Index>(j))) {
        total += t;
        m += 1;
        break;
      }
    }
  }
  return total / m;
}

/// All 2^n sign patterns, written independently of the library routine.
inline double sign_flip_oracle(const std::vector<double>& a, const std::vector<double>& b, bool two_sided) {
  const std::size_t n = a.size();
  std::vector<double> d(n);
  double obs = 0, scale = 0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = a[i] - b[i];
    obs += d[i];
    scale += std::fabs(d[i]);
  }
  std::size_t hits = 0, total = 0;
  std::vector<int> sign(n, 1);
  for (;;) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += sign[i] * d[i];
    const bool extreme = two_sided ? std::fabs(s) >= std::fabs(obs) - 1e-10 * scale : s >= obs - 1e-10 * scale;
    hits += extreme;
    ++total;
    std::size_t i = 0;
    while (i < n && sign[i] == -1) sign[i++] = 1;
    if (i == n) break;
    sign[i] = -1;
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

/// Fresh scratch directory under the system temp directory.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("mrprio_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace mrprio::fx
