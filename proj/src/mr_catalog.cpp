#include "mrprio/mr_catalog.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "mrprio/error.hpp"
#include "mrprio/rng.hpp"

namespace mrprio {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::size_t round_half_up(double x) { return static_cast<std::size_t>(std::floor(x + 0.5)); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (s.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::pair<std::string, std::string>> parse_mapping(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& item : split(text, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == item.size())
      throw InputError("malformed mapping entry '" + item + "' (expected from:to)");
    out.emplace_back(item.substr(0, colon), item.substr(colon + 1));
  }
  if (out.empty()) throw InputError("empty mapping");
  return out;
}

std::string format_mapping(const std::vector<std::pair<std::string, std::string>>& m) {
  std::string out;
  for (const auto& [from, to] : m) out += (out.empty() ? "" : ",") + from + ":" + to;
  return out;
}

double parse_double_param(const std::string& key, const std::string& value) {
  auto v = parse_number(value);
  if (!v) throw InputError("parameter '" + key + "' expects a number, got '" + value + "'");
  return *v;
}

std::size_t parse_count_param(const std::string& key, const std::string& value) {
  if (value.empty() || !std::all_of(value.begin(), value.end(), [](unsigned char c) { return std::isdigit(c); }))
    throw InputError("parameter '" + key + "' expects a non-negative integer, got '" + value + "'");
  return std::stoull(value);
}

const Attribute& nominal_class(const Dataset& d, const std::string& what) {
  if (!d.has_class()) throw ApplicabilityError(what + " requires a class attribute");
  const Attribute& c = d.attribute(*d.class_index());
  if (!c.is_nominal()) throw ApplicabilityError(what + " requires a nominal class attribute");
  return c;
}

Rng rng_for(const MrSpec& mr) {
  if (!mr.seed) throw InputError("MR '" + mr.id + "': transform '" + transform_name(mr.transform) + "' requires a seed");
  return Rng(*mr.seed);
}

// Indices of `count` distinct rows chosen by a seeded shuffle, ascending.
std::vector<std::size_t> choose_rows(Rng& rng, std::size_t n, std::size_t count) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  rng.shuffle(std::span(idx));
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

Dataset with_rows(const Dataset& d, std::vector<Row> rows) {
  return Dataset(d.name(), d.attributes(), d.class_index(), std::move(rows));
}

// Inserts a new attribute before the class (or at the end) with per-row cells.
Dataset insert_attribute(const Dataset& d, Attribute attr, const std::vector<Cell>& cells) {
  if (d.find_attribute(attr.name)) throw InputError("attribute '" + attr.name + "' already exists");
  const std::size_t pos = d.class_index().value_or(d.num_attributes());
  auto attrs = d.attributes();
  attrs.insert(attrs.begin() + static_cast<std::ptrdiff_t>(pos), std::move(attr));
  std::vector<Row> rows = d.rows();
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].insert(rows[i].begin() + static_cast<std::ptrdiff_t>(pos), cells[i]);
  std::optional<std::size_t> cls;
  if (d.class_index()) cls = *d.class_index() + 1;
  return Dataset(d.name(), std::move(attrs), cls, std::move(rows));
}

// Attribute for a column of literal values: numeric when all parse.
Attribute literal_attribute(const std::string& name, const std::vector<std::string>& literals) {
  bool numeric = std::all_of(literals.begin(), literals.end(), [](const std::string& s) { return parse_number(s).has_value(); });
  if (numeric) return Attribute::numeric(name);
  std::vector<std::string> values;
  for (const auto& s : literals)
    if (std::find(values.begin(), values.end(), s) == values.end()) values.push_back(s);
  return Attribute::nominal(name, std::move(values));
}

Cell literal_cell(const Attribute& a, const std::string& s) {
  if (a.is_numeric()) return *parse_number(s);
  return s;
}

Dataset apply_transform(const MrSpec& mr, const Dataset& src) {
  using namespace transform;
  return std::visit(
      overloaded{
          [&](const Identity&) { return src; },
          [&](const PermuteAttributes& t) {
            const auto slots = src.feature_indices();
            std::vector<std::size_t> order = t.order;
            if (order.empty()) {
              Rng rng = rng_for(mr);
              order.resize(slots.size());
              std::iota(order.begin(), order.end(), 0);
              rng.shuffle(std::span(order));
            }
            if (order.size() != slots.size())
              throw InputError("permutation has " + std::to_string(order.size()) + " entries but dataset has " +
                               std::to_string(slots.size()) + " feature attributes");
            std::vector<bool> used(slots.size(), false);
            for (auto k : order) {
              if (k >= slots.size() || used[k]) throw InputError("order is not a permutation of the feature attributes");
              used[k] = true;
            }
            auto attrs = src.attributes();
            for (std::size_t i = 0; i < slots.size(); ++i) attrs[slots[i]] = src.attribute(slots[order[i]]);
            std::vector<Row> rows = src.rows();
            for (std::size_t r = 0; r < rows.size(); ++r)
              for (std::size_t i = 0; i < slots.size(); ++i) rows[r][slots[i]] = src.row(r)[slots[order[i]]];
            return Dataset(src.name(), std::move(attrs), src.class_index(), std::move(rows));
          },
          [&](const PermuteInstances&) {
            Rng rng = rng_for(mr);
            std::vector<Row> rows = src.rows();
            rng.shuffle(std::span(rows));
            return with_rows(src, std::move(rows));
          },
          [&](const AffineNumeric& t) {
            std::vector<std::size_t> cols;
            if (t.columns.empty()) {
              cols = src.numeric_feature_indices();
            } else {
              for (const auto& name : t.columns) {
                auto j = src.find_attribute(name);
                if (!j) throw InputError("no attribute named '" + name + "'");
                if (!src.attribute(*j).is_numeric()) throw InputError("attribute '" + name + "' is not numeric");
                cols.push_back(*j);
              }
            }
            std::vector<Row> rows = src.rows();
            for (auto& row : rows)
              for (auto j : cols)
                if (double* v = std::get_if<double>(&row[j])) *v = t.scale * *v + t.shift;
            return with_rows(src, std::move(rows));
          },
          [&](const AddUninformativeAttribute& t) {
            Attribute attr = literal_attribute(t.name, {t.value});
            const Cell cell = literal_cell(attr, t.value);
            return insert_attribute(src, std::move(attr), std::vector<Cell>(src.num_rows(), cell));
          },
          [&](const AddInformativeAttribute& t) {
            const Attribute& cls = nominal_class(src, "add_informative_attribute");
            std::map<std::string, std::string> map;
            for (const auto& [from, to] : t.mapping) {
              if (!cls.value_index(from)) throw InputError("mapping references unknown class '" + from + "'");
              map[from] = to;
            }
            for (const auto& v : cls.values)
              if (!map.count(v)) throw InputError("mapping does not cover class '" + v + "'");
            std::vector<std::string> literals;
            for (const auto& v : cls.values) literals.push_back(map[v]);
            Attribute attr = literal_attribute(t.name, literals);
            std::vector<Cell> cells;
            for (const auto& row : src.rows()) {
              const Cell& c = row[*src.class_index()];
              cells.push_back(is_missing(c) ? Cell{Missing{}} : literal_cell(attr, map[std::get<std::string>(c)]));
            }
            return insert_attribute(src, std::move(attr), cells);
          },
          [&](const DuplicateInstances& t) {
            Rng rng = rng_for(mr);
            const auto picked = choose_rows(rng, src.num_rows(), round_half_up(t.fraction * static_cast<double>(src.num_rows())));
            std::vector<Row> rows = src.rows();
            for (auto i : picked) rows.push_back(src.row(i));
            return with_rows(src, std::move(rows));
          },
          [&](const RemoveInstances& t) {
            Rng rng = rng_for(mr);
            const auto picked = choose_rows(rng, src.num_rows(), round_half_up(t.fraction * static_cast<double>(src.num_rows())));
            std::vector<bool> drop(src.num_rows(), false);
            for (auto i : picked) drop[i] = true;
            std::vector<Row> rows;
            for (std::size_t i = 0; i < src.num_rows(); ++i)
              if (!drop[i]) rows.push_back(src.row(i));
            return with_rows(src, std::move(rows));
          },
          [&](const RemoveClass& t) {
            const Attribute& cls = nominal_class(src, "remove_class");
            const std::size_t c = *src.class_index();
            if (!cls.value_index(t.label)) throw InputError("class '" + t.label + "' is not in the class value-set");
            std::vector<Row> rows;
            bool present = false;
            for (const auto& row : src.rows()) {
              const auto* s = std::get_if<std::string>(&row[c]);
              if (s && *s == t.label)
                present = true;
              else
                rows.push_back(row);
            }
            if (!present) throw InputError("class '" + t.label + "' does not occur in the data");
            auto attrs = src.attributes();
            auto& values = attrs[c].values;
            values.erase(std::find(values.begin(), values.end(), t.label));
            if (values.empty()) throw InputError("removing class '" + t.label + "' leaves no classes");
            return Dataset(src.name(), std::move(attrs), src.class_index(), std::move(rows));
          },
          [&](const RelabelClasses& t) {
            const Attribute& cls = nominal_class(src, "relabel_classes");
            std::map<std::string, std::string> map;
            for (const auto& v : cls.values) map[v] = v;
            for (const auto& [from, to] : t.mapping) {
              if (!cls.value_index(from) || !cls.value_index(to))
                throw InputError("relabel mapping " + from + ":" + to + " references an unknown class");
              map[from] = to;
            }
            std::set<std::string> image;
            for (const auto& [from, to] : map) image.insert(to);
            if (image.size() != map.size()) throw InputError("relabel mapping is not a permutation of the class values");
            const std::size_t c = *src.class_index();
            std::vector<Row> rows = src.rows();
            for (auto& row : rows)
              if (auto* s = std::get_if<std::string>(&row[c])) *s = map[*s];
            return with_rows(src, std::move(rows));
          },
          [&](const AddDataPoints& t) {
            Rng rng = rng_for(mr);
            const std::size_t m = src.num_attributes();
            std::vector<std::optional<std::pair<double, double>>> ranges(m);
            for (std::size_t j = 0; j < m; ++j) {
              if (!src.attribute(j).is_numeric()) continue;
              for (const auto& row : src.rows()) {
                if (const double* v = std::get_if<double>(&row[j])) {
                  auto& r = ranges[j];
                  r = r ? std::pair{std::min(r->first, *v), std::max(r->second, *v)} : std::pair{*v, *v};
                }
              }
            }
            std::vector<Row> rows = src.rows();
            for (std::size_t k = 0; k < t.count; ++k) {
              Row row;
              row.reserve(m);
              for (std::size_t j = 0; j < m; ++j) {
                const Attribute& a = src.attribute(j);
                if (a.is_nominal()) {
                  row.emplace_back(a.values[rng.uniform_index(a.values.size())]);
                } else if (ranges[j]) {
                  const auto [lo, hi] = *ranges[j];
                  row.emplace_back(lo == hi ? lo : rng.uniform(lo, hi));
                } else {
                  row.emplace_back(Missing{});
                }
              }
              rows.push_back(std::move(row));
            }
            return with_rows(src, std::move(rows));
          },
      },
      mr.transform);
}

// key=value tokens; values may be double-quoted with backslash escapes.
std::vector<std::pair<std::string, std::string>> tokenize_entry(const std::string& line, std::size_t& comment_at) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t i = 0;
  comment_at = std::string::npos;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    if (line[i] == '#') {
      comment_at = i;
      break;
    }
    const std::size_t key_start = i;
    while (i < line.size() && line[i] != '=' && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size() || line[i] != '=') throw InputError("expected key=value, got '" + line.substr(key_start, i - key_start) + "'");
    std::string key = line.substr(key_start, i - key_start);
    if (key.empty()) throw InputError("empty key");
    ++i;
    std::string value;
    if (i < line.size() && line[i] == '"') {
      ++i;
      bool closed = false;
      while (i < line.size()) {
        if (line[i] == '\\' && i + 1 < line.size()) {
          value.push_back(line[i + 1]);
          i += 2;
        } else if (line[i] == '"') {
          ++i;
          closed = true;
          break;
        } else {
          value.push_back(line[i++]);
        }
      }
      if (!closed) throw InputError("unterminated quoted value for '" + key + "'");
    } else {
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) value.push_back(line[i++]);
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

std::string quote_if_needed(const std::string& s) {
  if (!s.empty() && s.find_first_of(" \t\"#\\") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

std::string transform_name(const TransformSpec& t) {
  using namespace transform;
  return std::visit(overloaded{
                        [](const Identity&) { return "identity"; },
                        [](const PermuteAttributes&) { return "permute_attributes"; },
                        [](const PermuteInstances&) { return "permute_instances"; },
                        [](const AffineNumeric&) { return "affine_numeric"; },
                        [](const AddUninformativeAttribute&) { return "add_uninformative_attribute"; },
                        [](const AddInformativeAttribute&) { return "add_informative_attribute"; },
                        [](const DuplicateInstances&) { return "duplicate_instances"; },
                        [](const RemoveInstances&) { return "remove_instances"; },
                        [](const RemoveClass&) { return "remove_class"; },
                        [](const RelabelClasses&) { return "relabel_classes"; },
                        [](const AddDataPoints&) { return "add_data_points"; },
                    },
                    t);
}

bool is_randomized(const TransformSpec& t) {
  using namespace transform;
  if (const auto* p = std::get_if<PermuteAttributes>(&t)) return p->order.empty();
  return std::holds_alternative<PermuteInstances>(t) || std::holds_alternative<DuplicateInstances>(t) ||
         std::holds_alternative<RemoveInstances>(t) || std::holds_alternative<AddDataPoints>(t);
}

void validate_transform(const TransformSpec& t) {
  using namespace transform;
  std::visit(overloaded{
                 [](const AffineNumeric& a) {
                   if (a.scale == 0.0 || !std::isfinite(a.scale)) throw InputError("affine_numeric: scale must be finite and nonzero");
                   if (!std::isfinite(a.shift)) throw InputError("affine_numeric: shift must be finite");
                 },
                 [](const DuplicateInstances& a) {
                   if (!(a.fraction > 0.0 && a.fraction <= 1.0)) throw InputError("duplicate_instances: fraction must be in (0,1]");
                 },
                 [](const RemoveInstances& a) {
                   if (!(a.fraction > 0.0 && a.fraction <= 1.0)) throw InputError("remove_instances: fraction must be in (0,1]");
                 },
                 [](const RemoveClass& a) {
                   if (a.label.empty()) throw InputError("remove_class: label is required");
                 },
                 [](const AddDataPoints& a) {
                   if (a.count == 0) throw InputError("add_data_points: count must be positive");
                 },
                 [](const AddUninformativeAttribute& a) {
                   if (a.name.empty()) throw InputError("add_uninformative_attribute: attribute name is empty");
                 },
                 [](const AddInformativeAttribute& a) {
                   if (a.mapping.empty()) throw InputError("add_informative_attribute: map is required");
                 },
                 [](const RelabelClasses& a) {
                   if (a.mapping.empty()) throw InputError("relabel_classes: map is required");
                 },
                 [](const auto&) {},
             },
             t);
}

MrSpec make_mr(std::string id, std::string name, const std::string& transform_kw,
               std::map<std::string, std::string> params, std::optional<std::uint64_t> seed) {
  using namespace transform;
  std::set<std::string> allowed;
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    auto it = params.find(key);
    if (it == params.end()) return std::nullopt;
    return it->second;
  };

  TransformSpec t;
  if (transform_kw == "identity") {
    t = Identity{};
  } else if (transform_kw == "permute_attributes") {
    allowed = {"order"};
    PermuteAttributes p;
    if (auto o = get("order"))
      for (const auto& item : split(*o, ',')) p.order.push_back(parse_count_param("order", item));
    t = p;
  } else if (transform_kw == "permute_instances") {
    t = PermuteInstances{};
  } else if (transform_kw == "affine_numeric") {
    allowed = {"scale", "shift", "columns"};
    AffineNumeric a;
    if (auto v = get("scale")) a.scale = parse_double_param("scale", *v);
    if (auto v = get("shift")) a.shift = parse_double_param("shift", *v);
    if (auto v = get("columns"); v && *v != "*") a.columns = split(*v, ',');
    t = a;
  } else if (transform_kw == "add_uninformative_attribute") {
    allowed = {"attribute", "value"};
    AddUninformativeAttribute a;
    if (auto v = get("attribute")) a.name = *v;
    if (auto v = get("value")) a.value = *v;
    t = a;
  } else if (transform_kw == "add_informative_attribute") {
    allowed = {"attribute", "map"};
    AddInformativeAttribute a;
    if (auto v = get("attribute")) a.name = *v;
    if (auto v = get("map")) a.mapping = parse_mapping(*v);
    t = a;
  } else if (transform_kw == "duplicate_instances") {
    allowed = {"fraction"};
    DuplicateInstances a;
    if (auto v = get("fraction")) a.fraction = parse_double_param("fraction", *v);
    t = a;
  } else if (transform_kw == "remove_instances") {
    allowed = {"fraction"};
    RemoveInstances a;
    if (auto v = get("fraction")) a.fraction = parse_double_param("fraction", *v);
    t = a;
  } else if (transform_kw == "remove_class") {
    allowed = {"label"};
    RemoveClass a;
    if (auto v = get("label")) a.label = *v;
    t = a;
  } else if (transform_kw == "relabel_classes") {
    allowed = {"map"};
    RelabelClasses a;
    if (auto v = get("map")) a.mapping = parse_mapping(*v);
    t = a;
  } else if (transform_kw == "add_data_points") {
    allowed = {"count"};
    AddDataPoints a;
    if (auto v = get("count")) a.count = parse_count_param("count", *v);
    t = a;
  } else {
    throw InputError("unknown transform '" + transform_kw + "'");
  }
  for (const auto& [key, value] : params)
    if (!allowed.count(key)) throw InputError("transform '" + transform_kw + "' does not take parameter '" + key + "'");
  validate_transform(t);
  return MrSpec{std::move(id), std::move(name), std::move(t), std::move(params), seed};
}

Dataset apply_mr(const MrSpec& mr, const Dataset& source) {
  if (is_randomized(mr.transform) && !mr.seed)
    throw InputError("MR '" + mr.id + "': transform '" + transform_name(mr.transform) + "' requires a seed");
  return apply_transform(mr, source);
}

std::vector<MrSpec> parse_catalog(std::istream& in, const std::string& source_name) {
  std::vector<MrSpec> out;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    try {
      std::size_t comment_at = 0;
      const auto tokens = tokenize_entry(line, comment_at);
      if (tokens.empty()) continue;
      std::optional<std::string> id, name, transform_kw;
      std::optional<std::uint64_t> seed;
      std::map<std::string, std::string> params;
      for (const auto& [key, value] : tokens) {
        auto set_once = [&](std::optional<std::string>& slot) {
          if (slot) throw InputError("duplicate key '" + key + "'");
          slot = value;
        };
        if (key == "id")
          set_once(id);
        else if (key == "name")
          set_once(name);
        else if (key == "transform")
          set_once(transform_kw);
        else if (key == "seed") {
          if (seed) throw InputError("duplicate key 'seed'");
          seed = parse_count_param("seed", value);
        } else if (!params.emplace(key, value).second)
          throw InputError("duplicate key '" + key + "'");
      }
      if (!id || id->empty()) throw InputError("entry is missing 'id'");
      if (!transform_kw) throw InputError("entry '" + *id + "' is missing 'transform'");
      if (!ids.insert(*id).second) throw InputError("duplicate MR id '" + *id + "'");
      out.push_back(make_mr(*id, name.value_or(*id), *transform_kw, std::move(params), seed));
    } catch (const InputError& e) {
      throw InputError("catalog " + source_name + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<MrSpec> load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return parse_catalog(in, path.string());
}

void write_catalog(std::ostream& out, const std::vector<MrSpec>& catalog) {
  for (const auto& mr : catalog) {
    out << "id=" << quote_if_needed(mr.id) << " name=" << quote_if_needed(mr.name)
        << " transform=" << transform_name(mr.transform);
    for (const auto& [key, value] : mr.params) out << ' ' << key << '=' << quote_if_needed(value);
    if (mr.seed) out << " seed=" << *mr.seed;
    out << '\n';
  }
}

std::vector<MrPair> build_pairs(const std::vector<MrSpec>& catalog, const Dataset& source) {
  std::vector<MrPair> pairs;
  pairs.reserve(catalog.size());
  for (const auto& mr : catalog) {
    try {
      pairs.push_back(MrPair{mr, source, apply_mr(mr, source), true});
    } catch (const ApplicabilityError& e) {
      throw ApplicabilityError("MR '" + mr.id + "': " + e.what());
    } catch (const InputError& e) {
      throw InputError("MR '" + mr.id + "': " + e.what());
    }
  }
  return pairs;
}

std::vector<MrPair> pairs_from_directory(const Dataset& source, const std::filesystem::path& directory,
                                         const CsvOptions& csv_options) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory)) throw InputError("'" + directory.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".csv" || ext == ".arff") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InputError("no .csv or .arff follow-up files in '" + directory.string() + "'");

  std::vector<MrPair> pairs;
  std::set<std::string> ids;
  for (const auto& f : files) {
    const std::string id = f.stem().string();
    if (!ids.insert(id).second) throw InputError("duplicate follow-up id '" + id + "'");
    MrSpec mr{id, id, transform::Identity{}, {{"followup_file", f.filename().string()}}, std::nullopt};
    pairs.push_back(MrPair{std::move(mr), source, load_dataset(f, csv_options), false});
  }
  return pairs;
}

}  // namespace mrprio
