#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mrprio/dataset.hpp"

namespace mrprio {

namespace transform {

struct Identity {};

/// Reorders the non-class attributes. `order[i]` names which current feature
/// moves into feature slot i. An empty order means "seeded random shuffle".
struct PermuteAttributes {
  std::vector<std::size_t> order;
};

struct PermuteInstances {};

/// x → scale·x + shift on the selected numeric columns (all numeric
/// features when `columns` is empty).
struct AffineNumeric {
  double scale = 1.0;
  double shift = 0.0;
  std::vector<std::string> columns;
};

/// Adds an attribute holding the same value on every row.
struct AddUninformativeAttribute {
  std::string name = "uninformative";
  std::string value = "0";
};

/// Adds an attribute whose value is a function of the class label.
struct AddInformativeAttribute {
  std::string name = "informative";
  std::vector<std::pair<std::string, std::string>> mapping;
};

struct DuplicateInstances {
  double fraction = 0.0;
};

struct RemoveInstances {
  double fraction = 0.0;
};

struct RemoveClass {
  std::string label;
};

/// Relabels class values; labels not mentioned keep their value. The mapping
/// must be a bijection on the class value-set.
struct RelabelClasses {
  std::vector<std::pair<std::string, std::string>> mapping;
};

/// Appends `count` rows sampled uniformly within each column's observed
/// range (numeric) or value-set (nominal).
struct AddDataPoints {
  std::size_t count = 0;
};

}  // namespace transform

using TransformSpec =
    std::variant<transform::Identity, transform::PermuteAttributes, transform::PermuteInstances,
                 transform::AffineNumeric, transform::AddUninformativeAttribute, transform::AddInformativeAttribute,
                 transform::DuplicateInstances, transform::RemoveInstances, transform::RemoveClass,
                 transform::RelabelClasses, transform::AddDataPoints>;

/// Catalog keyword of a transform (`identity`, `affine_numeric`, ...).
std::string transform_name(const TransformSpec& t);
/// True when the transform consumes random numbers for this parameterization.
bool is_randomized(const TransformSpec& t);

struct MrSpec {
  std::string id;
  std::string name;
  TransformSpec transform;
  /// Parameters as written in the catalog, echoed into reports.
  std::map<std::string, std::string> params;
  std::optional<std::uint64_t> seed;
};

struct MrPair {
  MrSpec mr;
  Dataset source;
  Dataset followup;
  /// False when the follow-up was supplied from a file rather than derived
  /// by apply_mr; the pair then cannot be recomputed.
  bool recomputable = true;
};

/// Builds the follow-up dataset of `mr` from `source`.
Dataset apply_mr(const MrSpec& mr, const Dataset& source);

/// Validates a transform's parameter ranges independently of any dataset.
void validate_transform(const TransformSpec& t);

/// Builds a spec from its catalog keyword and key=value parameters.
MrSpec make_mr(std::string id, std::string name, const std::string& transform,
               std::map<std::string, std::string> params, std::optional<std::uint64_t> seed);

std::vector<MrSpec> parse_catalog(std::istream& in, const std::string& source_name = "<catalog>");
std::vector<MrSpec> load_catalog(const std::filesystem::path& path);
void write_catalog(std::ostream& out, const std::vector<MrSpec>& catalog);

std::vector<MrPair> build_pairs(const std::vector<MrSpec>& catalog, const Dataset& source);

/// Pairs the source with pre-built follow-up datasets, one per file in
/// `directory` (`.csv` or `.arff`), MR id = file stem, ordered by file name.
std::vector<MrPair> pairs_from_directory(const Dataset& source, const std::filesystem::path& directory,
                                         const CsvOptions& csv_options);

}  // namespace mrprio
