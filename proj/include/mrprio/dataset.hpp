#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mrprio {

enum class AttributeType { Numeric, Nominal };

struct Attribute {
  std::string name;
  AttributeType type = AttributeType::Numeric;
  /// Declared value-set for nominal attributes (ordered, distinct, non-empty).
  std::vector<std::string> values;

  static Attribute numeric(std::string name) { return {std::move(name), AttributeType::Numeric, {}}; }
  static Attribute nominal(std::string name, std::vector<std::string> values) {
    return {std::move(name), AttributeType::Nominal, std::move(values)};
  }

  bool is_numeric() const { return type == AttributeType::Numeric; }
  bool is_nominal() const { return type == AttributeType::Nominal; }
  /// Position of `value` in the value-set, if declared.
  std::optional<std::size_t> value_index(const std::string& value) const;

  friend bool operator==(const Attribute&, const Attribute&) = default;
};

struct Missing {
  friend bool operator==(Missing, Missing) { return true; }
};

/// One table cell: missing, a number, or a nominal symbol.
using Cell = std::variant<Missing, double, std::string>;
using Row = std::vector<Cell>;

inline bool is_missing(const Cell& c) { return std::holds_alternative<Missing>(c); }

/// Immutable, validated instance/attribute table.
///
/// Construction checks every invariant: unique attribute names, rows of
/// exactly |attributes| cells, cells conforming to their attribute's kind,
/// and a valid class position. Violations throw InputError.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::string name, std::vector<Attribute> attributes, std::optional<std::size_t> class_index,
          std::vector<Row> rows);

  const std::string& name() const { return name_; }
  const std::vector<Attribute>& attributes() const { return attributes_; }
  const Attribute& attribute(std::size_t j) const { return attributes_.at(j); }
  std::optional<std::size_t> class_index() const { return class_index_; }
  bool has_class() const { return class_index_.has_value(); }
  const std::vector<Row>& rows() const { return rows_; }
  const Row& row(std::size_t i) const { return rows_.at(i); }

  std::size_t num_rows() const { return rows_.size(); }
  std::size_t num_attributes() const { return attributes_.size(); }
  std::optional<std::size_t> find_attribute(const std::string& name) const;

  /// Positions of numeric attributes other than the class, in declaration order.
  std::vector<std::size_t> numeric_feature_indices() const;
  /// Positions of all non-class attributes, in declaration order.
  std::vector<std::size_t> feature_indices() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  void validate() const;

  std::string name_;
  std::vector<Attribute> attributes_;
  std::optional<std::size_t> class_index_;
  std::vector<Row> rows_;
};

// ---------------------------------------------------------------------------
// CSV

/// Selects the class column of a CSV file.
struct ClassSelector {
  enum class Kind { None, Last, ByName, ByIndex };
  Kind kind = Kind::None;
  std::string name;
  std::size_t index = 0;

  static ClassSelector none() { return {}; }
  static ClassSelector last() { return {Kind::Last, {}, 0}; }
  static ClassSelector by_name(std::string n) { return {Kind::ByName, std::move(n), 0}; }
  static ClassSelector by_index(std::size_t i) { return {Kind::ByIndex, {}, i}; }
  /// "none", "last", a 0-based column number, or a column name.
  static ClassSelector parse(const std::string& text);
};

struct CsvOptions {
  bool header = true;
  ClassSelector class_column;
  /// Treat the selected class column as nominal even when every value parses
  /// as a number (classification labels such as 0..4).
  bool nominal_class = true;
};

/// Raw RFC-4180 records (quoted fields, doubled quotes, embedded newlines).
std::vector<std::vector<std::string>> parse_csv_records(std::istream& in);

Dataset read_csv(std::istream& in, const CsvOptions& options, std::string name = "data");
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
void write_csv(std::ostream& out, const Dataset& d);
std::string to_csv(const Dataset& d);

// ---------------------------------------------------------------------------
// ARFF (dense subset: numeric and nominal attributes, `?` missing, `%` comments)

Dataset read_arff(std::istream& in, std::string source_name = "<arff>");
Dataset load_arff(const std::filesystem::path& path);
void write_arff(std::ostream& out, const Dataset& d);
std::string to_arff(const Dataset& d);

/// Dispatches on extension: `.arff` → ARFF, anything else → CSV.
Dataset load_dataset(const std::filesystem::path& path, const CsvOptions& csv_options = {});

/// Shortest decimal text that reads back to exactly `v`.
std::string format_number(double v);
/// Parses a finite decimal number occupying the whole string.
std::optional<double> parse_number(const std::string& text);

}  // namespace mrprio
