#pragma once

#include <cstdint>

#include "mrprio/dataset.hpp"
#include "mrprio/eval.hpp"

namespace mrprio {

struct SynthDatasetOptions {
  std::size_t rows = 200;
  std::size_t features = 4;
  std::size_t classes = 2;
  /// Distance between neighbouring class centres, in noise standard deviations.
  double separation = 3.0;
  std::uint64_t seed = 0;
};

/// Gaussian blobs, one per class, with numeric features `x1..xF` and a
/// nominal `class` attribute (`c0..`). Values are rounded to 4 decimals.
Dataset synth_dataset(const SynthDatasetOptions& options);

/// Random MR × element coverage; each cell is covered with probability `prob`.
CoverageMatrix synth_coverage(std::size_t n_mrs, std::size_t n_elements, double prob, std::uint64_t seed);

}  // namespace mrprio
