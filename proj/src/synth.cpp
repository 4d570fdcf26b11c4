#include "mrprio/synth.hpp"

#include <cmath>

#include "mrprio/error.hpp"
#include "mrprio/rng.hpp"

namespace mrprio {

Dataset synth_dataset(const SynthDatasetOptions& o) {
  if (o.rows == 0 || o.features == 0) throw InputError("synth: rows and features must be positive");
  if (o.classes < 1) throw InputError("synth: need at least one class");
  Rng rng(o.seed);
  std::vector<Attribute> attrs;
  for (std::size_t j = 0; j < o.features; ++j) attrs.push_back(Attribute::numeric("x" + std::to_string(j + 1)));
  std::vector<std::string> labels;
  for (std::size_t c = 0; c < o.classes; ++c) labels.push_back("c" + std::to_string(c));
  attrs.push_back(Attribute::nominal("class", labels));

  std::vector<Row> rows;
  rows.reserve(o.rows);
  for (std::size_t i = 0; i < o.rows; ++i) {
    const std::size_t c = i % o.classes;
    Row row;
    for (std::size_t j = 0; j < o.features; ++j) {
      const double centre = o.separation * static_cast<double>((c + j) % o.classes);
      row.emplace_back(std::round((centre + rng.normal()) * 1e4) / 1e4);
    }
    row.emplace_back(labels[c]);
    rows.push_back(std::move(row));
  }
  return Dataset("synth", std::move(attrs), o.features, std::move(rows));
}

CoverageMatrix synth_coverage(std::size_t n_mrs, std::size_t n_elements, double prob, std::uint64_t seed) {
  if (n_mrs == 0 || n_elements == 0) throw InputError("synth: dimensions must be positive");
  if (!(prob >= 0 && prob <= 1)) throw InputError("synth: coverage probability must lie in [0,1]");
  Rng rng(seed);
  CoverageMatrix cov;
  for (std::size_t i = 0; i < n_mrs; ++i) cov.mr_ids.push_back("MR" + std::to_string(i + 1));
  for (std::size_t e = 0; e < n_elements; ++e) cov.element_ids.push_back("e" + std::to_string(e + 1));
  cov.covered.resize(static_cast<Eigen::Index>(n_mrs), static_cast<Eigen::Index>(n_elements));
  for (Eigen::Index i = 0; i < cov.covered.rows(); ++i)
    for (Eigen::Index e = 0; e < cov.covered.cols(); ++e) cov.covered(i, e) = rng.uniform01() < prob;
  return cov;
}

}  // namespace mrprio
