#include "mrprio/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mrprio/error.hpp"

namespace mrprio {

std::optional<std::size_t> Attribute::value_index(const std::string& value) const {
  auto it = std::find(values.begin(), values.end(), value);
  if (it == values.end()) return std::nullopt;
  return static_cast<std::size_t>(it - values.begin());
}

Dataset::Dataset(std::string name, std::vector<Attribute> attributes, std::optional<std::size_t> class_index,
                 std::vector<Row> rows)
    : name_(std::move(name)),
      attributes_(std::move(attributes)),
      class_index_(class_index),
      rows_(std::move(rows)) {
  validate();
}

void Dataset::validate() const {
  std::set<std::string> names;
  for (const auto& a : attributes_) {
    if (!names.insert(a.name).second) throw InputError("dataset '" + name_ + "': duplicate attribute name '" + a.name + "'");
    if (a.is_nominal()) {
      if (a.values.empty()) throw InputError("dataset '" + name_ + "': nominal attribute '" + a.name + "' has an empty value-set");
      std::set<std::string> seen(a.values.begin(), a.values.end());
      if (seen.size() != a.values.size())
        throw InputError("dataset '" + name_ + "': nominal attribute '" + a.name + "' has duplicate values");
    }
  }
  if (class_index_ && *class_index_ >= attributes_.size())
    throw InputError("dataset '" + name_ + "': class index " + std::to_string(*class_index_) + " out of range");

  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const Row& r = rows_[i];
    if (r.size() != attributes_.size())
      throw InputError("dataset '" + name_ + "': row " + std::to_string(i) + " has " + std::to_string(r.size()) +
                       " cells, expected " + std::to_string(attributes_.size()));
    for (std::size_t j = 0; j < r.size(); ++j) {
      const Attribute& a = attributes_[j];
      const Cell& c = r[j];
      if (is_missing(c)) continue;
      if (a.is_numeric()) {
        const double* v = std::get_if<double>(&c);
        if (!v || !std::isfinite(*v))
          throw InputError("dataset '" + name_ + "': row " + std::to_string(i) + ", attribute '" + a.name +
                           "' expects a finite number");
      } else {
        const std::string* s = std::get_if<std::string>(&c);
        if (!s || !a.value_index(*s))
          throw InputError("dataset '" + name_ + "': row " + std::to_string(i) + ", attribute '" + a.name +
                           "' has undeclared nominal value");
      }
    }
  }
}

std::optional<std::size_t> Dataset::find_attribute(const std::string& name) const {
  for (std::size_t j = 0; j < attributes_.size(); ++j)
    if (attributes_[j].name == name) return j;
  return std::nullopt;
}

std::vector<std::size_t> Dataset::numeric_feature_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < attributes_.size(); ++j)
    if (attributes_[j].is_numeric() && class_index_ != j) out.push_back(j);
  return out;
}

std::vector<std::size_t> Dataset::feature_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < attributes_.size(); ++j)
    if (class_index_ != j) out.push_back(j);
  return out;
}

std::string format_number(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw InvariantError("failed to format number");
  return std::string(buf.data(), ptr);
}

std::optional<double> parse_number(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const char* first = text.data();
  const char* last = first + text.size();
  if (*first == '+') ++first;
  double v = 0;
  auto [ptr, ec] = std::from_chars(first, last, v, std::chars_format::general);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

Dataset load_dataset(const std::filesystem::path& path, const CsvOptions& csv_options) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".arff") return load_arff(path);
  return load_csv(path, csv_options);
}

}  // namespace mrprio
