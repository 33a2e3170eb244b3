#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "roeforge/block_matrix.hpp"
#include "roeforge/coarse_maps.hpp"
#include "roeforge/cylinder.hpp"
#include "roeforge/error.hpp"
#include "roeforge/metric_space.hpp"
#include "roeforge/report.hpp"
#include "roeforge/rotation.hpp"

namespace roeforge::io {

using json = nlohmann::json;

[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Parses JSON text; syntax errors report line and column.
inline json parse_text(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    fail(where + ":" + std::to_string(line) + ":" + std::to_string(col), e.what());
  }
}

inline json load_file(const std::filesystem::path& path) { return parse_text(read_text(path), path.string()); }

// Labels ---------------------------------------------------------------------

inline bool is_integer_text(const std::string& s) {
  if (s.empty() || s.size() > 18) return false;
  std::size_t i = s[0] == '-' ? 1 : 0;
  if (i == s.size()) return false;
  if (s[i] == '0' && s.size() > i + 1) return false;
  return std::all_of(s.begin() + static_cast<std::ptrdiff_t>(i), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

inline Label label_from_json(const json& j, const std::string& where) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  fail(where, "a point label must be a string or an integer");
}

// Integer-looking labels are written back as JSON integers.
inline json label_to_json(const Label& l) {
  if (is_integer_text(l)) return std::stoll(l);
  return l;
}

inline double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

inline const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field \"") + key + "\"");
  return *it;
}

// Spaces ---------------------------------------------------------------------

inline FiniteMetricSpace space_from_json(const json& j, const std::string& where = "space") {
  const json& labels = field(j, "labels", where);
  const json& dist = field(j, "dist", where);
  if (!labels.is_array()) fail(where + ".labels", "expected an array");
  if (!dist.is_array()) fail(where + ".dist", "expected an array of rows");
  std::vector<Label> ls;
  for (std::size_t i = 0; i < labels.size(); ++i)
    ls.push_back(label_from_json(labels[i], where + ".labels[" + std::to_string(i) + "]"));
  std::vector<std::vector<double>> d;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const std::string row = where + ".dist[" + std::to_string(i) + "]";
    if (!dist[i].is_array()) fail(row, "expected an array");
    std::vector<double> r;
    for (std::size_t k = 0; k < dist[i].size(); ++k) r.push_back(number(dist[i][k], row + "[" + std::to_string(k) + "]"));
    d.push_back(std::move(r));
  }
  try {
    return FiniteMetricSpace(std::move(ls), d);
  } catch (const StructuralError& e) {
    fail(where, e.what());
  }
}

inline json space_to_json(const FiniteMetricSpace& s) {
  json labels = json::array();
  for (const auto& l : s.labels()) labels.push_back(label_to_json(l));
  return json{{"labels", labels}, {"dist", s.distance_matrix()}};
}

/// Resolves space references: inline objects, or file paths relative to the
/// referencing document. Each file is loaded once so maps sharing a space
/// file share one SpacePtr.
class SpaceResolver {
 public:
  explicit SpaceResolver(std::filesystem::path base_dir = ".") : base_(std::move(base_dir)) {}

  SpacePtr resolve(const json& ref, const std::string& where) {
    if (ref.is_object()) return share(space_from_json(ref, where));
    if (!ref.is_string()) fail(where, "expected a space object or a path to a space file");
    std::filesystem::path p = ref.get<std::string>();
    if (p.is_relative()) p = base_ / p;
    const std::string key = std::filesystem::weakly_canonical(p).string();
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    SpacePtr s = share(space_from_json(load_file(p), p.string()));
    cache_.emplace(key, s);
    return s;
  }

 private:
  std::filesystem::path base_;
  std::map<std::string, SpacePtr> cache_;
};

// Maps -----------------------------------------------------------------------

inline std::vector<std::size_t> values_from_json(const json& arr, const FiniteMetricSpace& target,
                                                 const std::string& where) {
  if (!arr.is_array()) fail(where, "expected an array of target labels");
  std::vector<std::size_t> v;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    const Label l = label_from_json(arr[i], w);
    if (!target.contains(l)) fail(w, "'" + l + "' is not a point of the target");
    v.push_back(target.index_of(l));
  }
  return v;
}

inline PointMap map_from_json(const json& j, SpaceResolver& spaces, const std::string& where = "map") {
  SpacePtr src = spaces.resolve(field(j, "source", where), where + ".source");
  SpacePtr tgt = spaces.resolve(field(j, "target", where), where + ".target");
  auto values = values_from_json(field(j, "values", where), *tgt, where + ".values");
  try {
    return PointMap(src, tgt, std::move(values));
  } catch (const std::exception& e) {
    fail(where, e.what());
  }
}

inline json values_to_json(const PointMap& f) {
  json v = json::array();
  for (std::size_t x = 0; x < f.size(); ++x) v.push_back(label_to_json(f.target()->label(f(x))));
  return v;
}

/// Spaces are written inline unless references are supplied.
inline json map_to_json(const PointMap& f, const json& source_ref = nullptr, const json& target_ref = nullptr) {
  return json{{"source", source_ref.is_null() ? space_to_json(*f.source()) : source_ref},
              {"target", target_ref.is_null() ? space_to_json(*f.target()) : target_ref},
              {"values", values_to_json(f)}};
}

// Matrices -------------------------------------------------------------------

inline IndexSpace index_from_json(const json& j, SpaceResolver& spaces, const std::string& where) {
  if (j.is_object() && j.contains("outer")) {
    SpacePtr outer = spaces.resolve(j.at("outer"), where + ".outer");
    std::vector<std::size_t> inner;
    if (j.contains("inner")) {
      const json& in = j.at("inner");
      if (!in.is_array()) fail(where + ".inner", "expected an array of sizes");
      for (std::size_t i = 0; i < in.size(); ++i) {
        if (!in[i].is_number_unsigned() || in[i].get<std::size_t>() == 0)
          fail(where + ".inner[" + std::to_string(i) + "]", "expected a positive integer");
        inner.push_back(in[i].get<std::size_t>());
      }
    }
    return IndexSpace(outer, std::move(inner));
  }
  return IndexSpace(spaces.resolve(j, where));
}

inline json index_to_json(const IndexSpace& ix) {
  if (ix.inner_dims().empty()) return space_to_json(*ix.outer());
  return json{{"outer", space_to_json(*ix.outer())}, {"inner", ix.inner_dims()}};
}

inline Complex entry_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {number(j[0], where + "[0]"), number(j[1], where + "[1]")};
  fail(where, "expected [re, im] or a real number");
}

inline Block block_from_json(const json& j, std::size_t d, const std::string& where) {
  if (!j.is_array() || j.size() != d) fail(where, "expected " + std::to_string(d) + " rows");
  Block b(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < d; ++r) {
    const std::string row = where + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != d) fail(row, "expected " + std::to_string(d) + " entries");
    for (std::size_t c = 0; c < d; ++c)
      b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = entry_from_json(j[r][c], row + "[" + std::to_string(c) + "]");
  }
  return b;
}

inline json block_to_json(const Block& b) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < b.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < b.cols(); ++c) row.push_back({b(r, c).real(), b(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

inline BlockKey parse_key(const std::string& key, std::size_t n, const std::string& where) {
  const auto comma = key.find(',');
  auto parse = [&](const std::string& s) -> std::size_t {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &pos);
    } catch (const std::exception&) {
      fail(where, "block key '" + key + "' is not of the form \"i,j\"");
    }
    if (pos != s.size() || v >= n) fail(where, "block key '" + key + "' out of range");
    return static_cast<std::size_t>(v);
  };
  if (comma == std::string::npos) fail(where, "block key '" + key + "' is not of the form \"i,j\"");
  return {parse(key.substr(0, comma)), parse(key.substr(comma + 1))};
}

inline BlockMatrix matrix_from_json(const json& j, SpaceResolver& spaces, const std::string& where = "matrix") {
  const IndexSpace ix = index_from_json(field(j, "index", where), spaces, where + ".index");
  const json& dj = field(j, "d", where);
  if (!dj.is_number_unsigned() || dj.get<std::size_t>() == 0) fail(where + ".d", "expected a positive integer");
  const auto d = dj.get<std::size_t>();
  BlockMatrix m(ix, d);
  if (j.contains("blocks")) {
    const json& blocks = j.at("blocks");
    if (!blocks.is_object()) fail(where + ".blocks", "expected an object keyed by \"i,j\"");
    for (const auto& [key, value] : blocks.items()) {
      const std::string w = where + ".blocks[\"" + key + "\"]";
      const BlockKey k = parse_key(key, ix.size(), w);
      m.set_block(k.first, k.second, block_from_json(value, d, w));
    }
  }
  return m;
}

inline json matrix_to_json(const BlockMatrix& m) {
  json blocks = json::object();
  for (const auto& [key, b] : m.blocks())
    blocks[std::to_string(key.first) + "," + std::to_string(key.second)] = block_to_json(b);
  return json{{"index", index_to_json(m.index())}, {"d", m.block_dim()}, {"blocks", blocks}};
}

// Cylinders and homotopies ---------------------------------------------------

inline std::vector<long long> heights_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of integers");
  std::vector<long long> p;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer()) fail(where + "[" + std::to_string(i) + "]", "expected an integer");
    p.push_back(j[i].get<long long>());
  }
  return p;
}

inline json cylinder_to_json(const PCylinder& cyl) {
  json pts = json::array();
  for (const CylinderPoint& p : cyl.points()) pts.push_back({label_to_json(cyl.base()->label(p.base)), p.level});
  return json{{"base", space_to_json(*cyl.base())},
              {"p", cyl.heights()},
              {"points", pts},
              {"space", space_to_json(*cyl.space())}};
}

// "(x,n)" or "x,n" -> (x label, n).
inline std::pair<Label, std::size_t> parse_cylinder_key(std::string key, const std::string& where) {
  if (key.size() >= 2 && key.front() == '(' && key.back() == ')') key = key.substr(1, key.size() - 2);
  const auto comma = key.rfind(',');
  if (comma == std::string::npos) fail(where, "key '" + key + "' is not of the form \"x,n\"");
  const std::string level = key.substr(comma + 1);
  if (!is_integer_text(level) || level[0] == '-') fail(where, "level in '" + key + "' is not a positive integer");
  return {key.substr(0, comma), static_cast<std::size_t>(std::stoull(level))};
}

inline CoarseHomotopy homotopy_from_json(const json& j, SpaceResolver& spaces, const std::string& where = "homotopy") {
  SpacePtr base = spaces.resolve(field(j, "base", where), where + ".base");
  SpacePtr target = spaces.resolve(field(j, "target", where), where + ".target");
  std::vector<long long> heights = heights_from_json(field(j, "p", where), where + ".p");
  PCylinder cyl = [&] {
    try {
      return PCylinder(base, heights);
    } catch (const StructuralError& e) {
      fail(where + ".p", e.what());
    }
  }();
  const json& hj = field(j, "H", where);
  if (!hj.is_object()) fail(where + ".H", "expected an object keyed by \"(x,n)\"");
  std::vector<std::size_t> values(cyl.size(), static_cast<std::size_t>(-1));
  for (const auto& [key, value] : hj.items()) {
    const std::string w = where + ".H[\"" + key + "\"]";
    auto [xl, n] = parse_cylinder_key(key, w);
    if (!base->contains(xl)) fail(w, "'" + xl + "' is not a point of the base");
    std::size_t pos = 0;
    try {
      pos = cyl.index_of(base->index_of(xl), n);
    } catch (const LookupError& e) {
      fail(w, e.what());
    }
    const Label yl = label_from_json(value, w);
    if (!target->contains(yl)) fail(w, "'" + yl + "' is not a point of the target");
    values[pos] = target->index_of(yl);
  }
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] == static_cast<std::size_t>(-1)) fail(where + ".H", "no value for cylinder point " + cyl.space()->label(i));
  PointMap h(cyl.space(), target, std::move(values));
  CoarseHomotopy data = make_homotopy(std::move(cyl), std::move(h));
  // Declared endpoints, when present, replace the derived ones so that
  // check_endpoints can detect a mismatch.
  if (j.contains("f")) data.f = PointMap(base, target, values_from_json(j.at("f"), *target, where + ".f"));
  if (j.contains("g")) data.g = PointMap(base, target, values_from_json(j.at("g"), *target, where + ".g"));
  return data;
}

inline json homotopy_to_json(const CoarseHomotopy& h) {
  json values = json::object();
  const PCylinder& cyl = h.cylinder;
  for (std::size_t i = 0; i < cyl.size(); ++i) {
    const CylinderPoint& p = cyl.points()[i];
    values[cylinder_label(cyl.base()->label(p.base), p.level)] = label_to_json(h.target()->label(h.homotopy(i)));
  }
  return json{{"base", space_to_json(*h.base())},
              {"target", space_to_json(*h.target())},
              {"p", cyl.heights()},
              {"H", values},
              {"f", values_to_json(h.f)},
              {"g", values_to_json(h.g)}};
}

// Involutions ----------------------------------------------------------------

/// {"labels": [...], "sigma": [image labels], "order": [labels in enumeration order]}.
/// "order" is optional (label order by default).
inline Involution involution_from_json(const json& j, std::vector<Label>* labels_out = nullptr,
                                       const std::string& where = "sigma") {
  const json& lj = field(j, "labels", where);
  if (!lj.is_array()) fail(where + ".labels", "expected an array");
  std::vector<Label> labels;
  std::map<Label, std::size_t> pos;
  for (std::size_t i = 0; i < lj.size(); ++i) {
    labels.push_back(label_from_json(lj[i], where + ".labels[" + std::to_string(i) + "]"));
    if (!pos.emplace(labels.back(), i).second) fail(where + ".labels", "duplicate label '" + labels.back() + "'");
  }
  auto positions = [&](const json& arr, const std::string& w) {
    if (!arr.is_array() || arr.size() != labels.size())
      fail(w, "expected " + std::to_string(labels.size()) + " labels");
    std::vector<std::size_t> v;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const Label l = label_from_json(arr[i], w + "[" + std::to_string(i) + "]");
      auto it = pos.find(l);
      if (it == pos.end()) fail(w + "[" + std::to_string(i) + "]", "unknown label '" + l + "'");
      v.push_back(it->second);
    }
    return v;
  };
  std::vector<std::size_t> sigma = positions(field(j, "sigma", where), where + ".sigma");
  std::vector<std::size_t> rank(labels.size());
  if (j.contains("order")) {
    const auto order = positions(j.at("order"), where + ".order");
    std::vector<bool> seen(labels.size(), false);
    for (std::size_t r = 0; r < order.size(); ++r) {
      if (seen[order[r]]) fail(where + ".order", "repeated label");
      seen[order[r]] = true;
      rank[order[r]] = r;
    }
  } else {
    for (std::size_t i = 0; i < rank.size(); ++i) rank[i] = i;
  }
  if (labels_out) *labels_out = labels;
  try {
    return Involution(std::move(sigma), std::move(rank));
  } catch (const StructuralError& e) {
    fail(where, e.what());
  }
}

inline json involution_to_json(const Involution& inv, const std::vector<Label>& labels) {
  json lj = json::array(), sj = json::array(), oj = json::array();
  std::vector<std::size_t> order(inv.size());
  for (std::size_t i = 0; i < inv.size(); ++i) {
    lj.push_back(label_to_json(labels[i]));
    sj.push_back(label_to_json(labels[inv[i]]));
    order[inv.ranks()[i]] = i;
  }
  for (std::size_t i : order) oj.push_back(label_to_json(labels[i]));
  return json{{"labels", lj}, {"sigma", sj}, {"order", oj}};
}

// Reports ----------------------------------------------------------------------

inline json report_to_json(const VerificationReport& r) {
  json checks = json::array();
  for (const Check& c : r.checks()) {
    json cj{{"name", c.name}, {"status", to_string(c.status)}};
    if (c.measured) cj["measured"] = *c.measured;
    if (c.bound) cj["bound"] = *c.bound;
    if (!c.witness.empty()) cj["witness"] = c.witness;
    if (!c.detail.empty()) cj["detail"] = c.detail;
    checks.push_back(std::move(cj));
  }
  return json{{"title", r.title()}, {"ok", r.ok()}, {"checks", checks}};
}

}  // namespace roeforge::io
