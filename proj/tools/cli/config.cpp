#include "config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "torus_lab/errors.hpp"

namespace torus_lab::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigInvalid(field + ": " + what);
}

double number(const json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  fail(field, "expected a number");
}

double finite_number(const json& j, const std::string& field) {
  const double v = number(j, field);
  if (!std::isfinite(v)) fail(field, "expected a finite number");
  return v;
}

std::int64_t integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) fail(field, "expected an integer");
  return j.get<std::int64_t>();
}

const json& require(const json& obj, const std::string& key, const std::string& field) {
  if (!obj.is_object() || !obj.contains(key)) fail(field, "missing");
  return obj.at(key);
}

Mat2 matrix2(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_array() || !j[1].is_array() || j[0].size() != 2 ||
      j[1].size() != 2) {
    fail(field, "expected [[a, b], [c, d]]");
  }
  return {finite_number(j[0][0], field), finite_number(j[0][1], field), finite_number(j[1][0], field),
          finite_number(j[1][1], field)};
}

TorusMap parse_map(const json& j, const std::string& field) {
  if (!j.is_object()) fail(field, "expected an object");
  const json& m = require(j, "matrix", field + ".matrix");
  const std::string mf = field + ".matrix";
  if (!m.is_array() || m.size() != 2 || !m[0].is_array() || !m[1].is_array() || m[0].size() != 2 ||
      m[1].size() != 2) {
    fail(mf, "expected [[a, b], [c, d]] with integer entries");
  }
  const IntMat2 a{integer(m[0][0], mf), integer(m[0][1], mf), integer(m[1][0], mf), integer(m[1][1], mf)};
  std::vector<FourierMode> modes;
  if (j.contains("modes")) {
    const json& ms = j.at("modes");
    if (!ms.is_array()) fail(field + ".modes", "expected an array");
    for (std::size_t i = 0; i < ms.size(); ++i) {
      const std::string f = field + ".modes[" + std::to_string(i) + "]";
      const json& k = require(ms[i], "k", f + ".k");
      const json& amp = require(ms[i], "amplitude", f + ".amplitude");
      if (!k.is_array() || k.size() != 2) fail(f + ".k", "expected [k1, k2]");
      if (!amp.is_array() || amp.size() != 2) fail(f + ".amplitude", "expected [a1, a2]");
      FourierMode mode;
      mode.k = {static_cast<int>(integer(k[0], f + ".k")), static_cast<int>(integer(k[1], f + ".k"))};
      mode.amplitude = {finite_number(amp[0], f + ".amplitude"), finite_number(amp[1], f + ".amplitude")};
      if (ms[i].contains("phase")) mode.phase = finite_number(ms[i].at("phase"), f + ".phase");
      modes.push_back(mode);
    }
  }
  const double eps = j.contains("epsilon") ? finite_number(j.at("epsilon"), field + ".epsilon") : 0.0;
  const std::string name = j.contains("name") && j.at("name").is_string() ? j.at("name").get<std::string>() : "";
  try {
    return TorusMap(a, std::move(modes), eps, name);
  } catch (const Error& e) {
    fail(field, e.what());
  }
}

Cone parse_cone(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2) fail(field, "expected [from_slope, to_slope]");
  return Cone::from_slopes(number(j[0], field), number(j[1], field));
}

}  // namespace

GeneratorLaw RunConfig::law() const { return {maps, weights}; }

std::pair<const TorusMap*, const TorusMap*> RunConfig::pair() const {
  return {&maps[0], maps.size() > 1 ? &maps[1] : &maps[0]};
}

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) fail("(root)", "expected a JSON object");
  const json& schema = require(doc, "schema", "schema");
  if (!schema.is_string() || schema.get<std::string>() != kSchema) {
    fail("schema", std::string("expected \"") + kSchema + "\"");
  }
  static const std::set<std::string> known{"schema", "seed",   "maps",      "weights", "cones",
                                           "grid",   "quadrature", "scales", "reference", "commands"};
  for (const auto& item : doc.items()) {
    if (!known.contains(item.key())) fail(item.key(), "unknown field");
  }

  RunConfig cfg;
  const json& maps = require(doc, "maps", "maps");
  if (!maps.is_array() || maps.empty()) fail("maps", "expected a non-empty array");
  for (std::size_t i = 0; i < maps.size(); ++i) cfg.maps.push_back(parse_map(maps[i], "maps[" + std::to_string(i) + "]"));

  if (doc.contains("weights")) {
    const json& w = doc.at("weights");
    if (!w.is_array()) fail("weights", "expected an array");
    for (std::size_t i = 0; i < w.size(); ++i) cfg.weights.push_back(finite_number(w[i], "weights[" + std::to_string(i) + "]"));
  } else {
    cfg.weights.assign(cfg.maps.size(), 1.0 / static_cast<double>(cfg.maps.size()));
  }
  try {
    cfg.law().validate();
  } catch (const Error& e) {
    fail("weights", e.what());
  }

  cfg.cones = ConeSystem::standard();
  if (doc.contains("cones")) {
    const json& c = doc.at("cones");
    if (!c.is_object()) fail("cones", "expected an object");
    if (c.contains("unstable")) cfg.cones.cone_u = parse_cone(c.at("unstable"), "cones.unstable");
    if (c.contains("stable")) cfg.cones.cone_s = parse_cone(c.at("stable"), "cones.stable");
    if (c.contains("metric_u")) cfg.cones.metric_u = matrix2(c.at("metric_u"), "cones.metric_u");
    if (c.contains("metric_s")) cfg.cones.metric_s = matrix2(c.at("metric_s"), "cones.metric_s");
  }
  try {
    cfg.cones.validate();
  } catch (const Error& e) {
    fail("cones", e.what());
  }

  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      fail("seed", "expected a non-negative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("grid")) {
    cfg.grid = static_cast<int>(integer(doc.at("grid"), "grid"));
    if (cfg.grid < 64 || cfg.grid > 4096) fail("grid", "expected 64 <= grid <= 4096");
  }
  if (doc.contains("quadrature")) {
    cfg.quadrature = static_cast<int>(integer(doc.at("quadrature"), "quadrature"));
    if (cfg.quadrature < 8 || cfg.quadrature > 4096) fail("quadrature", "expected 8 <= quadrature <= 4096");
  }
  cfg.scales = {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
  if (doc.contains("scales")) {
    const json& s = doc.at("scales");
    if (!s.is_array() || s.empty()) fail("scales", "expected a non-empty array");
    cfg.scales.clear();
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double r = finite_number(s[i], "scales[" + std::to_string(i) + "]");
      if (r <= 0.0 || r >= 0.25) fail("scales[" + std::to_string(i) + "]", "expected 0 < rho < 1/4");
      if (i > 0 && r >= cfg.scales.back()) fail("scales", "expected strictly decreasing scales");
      cfg.scales.push_back(r);
    }
  }
  if (doc.contains("reference")) {
    const json& r = doc.at("reference");
    if (!r.is_array()) fail("reference", "expected an array of terms");
    for (std::size_t i = 0; i < r.size(); ++i) {
      const std::string f = "reference[" + std::to_string(i) + "]";
      SmoothReference::Term t;
      const json& k = require(r[i], "k", f + ".k");
      if (!k.is_array() || k.size() != 2) fail(f + ".k", "expected [k1, k2]");
      t.k = {static_cast<int>(integer(k[0], f + ".k")), static_cast<int>(integer(k[1], f + ".k"))};
      t.a = finite_number(require(r[i], "a", f + ".a"), f + ".a");
      if (r[i].contains("phase")) t.phase = finite_number(r[i].at("phase"), f + ".phase");
      cfg.reference.terms.push_back(t);
    }
    try {
      cfg.reference.validate();
    } catch (const Error& e) {
      fail("reference", e.what());
    }
  }
  if (doc.contains("commands")) {
    if (!doc.at("commands").is_object()) fail("commands", "expected an object");
    cfg.commands = doc.at("commands");
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("config: cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigInvalid(std::string("config: ") + e.what());
  }
  return parse_config(doc);
}

Section::Section(const json& root, std::string name) : name_(std::move(name)) {
  if (root.contains(name_)) {
    section_ = root.at(name_);
    if (!section_.is_object()) fail("commands." + name_, "expected an object");
  } else {
    section_ = json::object();
  }
  name_ = "commands." + name_;
}

const json* Section::node(const std::string& key) const {
  return section_.contains(key) ? &section_.at(key) : nullptr;
}

bool Section::has(const std::string& key) const { return section_.contains(key); }

int Section::get_int(const std::string& key, int fallback, int min_value, int max_value) const {
  const json* j = node(key);
  if (!j) return fallback;
  const std::int64_t v = integer(*j, field(key));
  if (v < min_value || v > max_value) {
    fail(field(key), "expected " + std::to_string(min_value) + " <= value <= " + std::to_string(max_value));
  }
  return static_cast<int>(v);
}

double Section::get_double(const std::string& key, double fallback, double min_value, double max_value) const {
  const json* j = node(key);
  if (!j) return fallback;
  const double v = finite_number(*j, field(key));
  if (v < min_value || v > max_value) fail(field(key), "out of range");
  return v;
}

bool Section::get_bool(const std::string& key, bool fallback) const {
  const json* j = node(key);
  if (!j) return fallback;
  if (!j->is_boolean()) fail(field(key), "expected true or false");
  return j->get<bool>();
}

std::string Section::get_string(const std::string& key, const std::string& fallback) const {
  const json* j = node(key);
  if (!j) return fallback;
  if (!j->is_string()) fail(field(key), "expected a string");
  return j->get<std::string>();
}

std::vector<int> Section::get_ints(const std::string& key, std::vector<int> fallback, int min_value,
                                   int max_value) const {
  const json* j = node(key);
  if (!j) return fallback;
  if (!j->is_array() || j->empty()) fail(field(key), "expected a non-empty array");
  std::vector<int> out;
  for (std::size_t i = 0; i < j->size(); ++i) {
    const std::string f = field(key) + "[" + std::to_string(i) + "]";
    const std::int64_t v = integer((*j)[i], f);
    if (v < min_value || v > max_value) fail(f, "out of range");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<double> Section::get_doubles(const std::string& key, std::vector<double> fallback, double min_value,
                                         double max_value) const {
  const json* j = node(key);
  if (!j) return fallback;
  if (!j->is_array() || j->empty()) fail(field(key), "expected a non-empty array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j->size(); ++i) {
    const std::string f = field(key) + "[" + std::to_string(i) + "]";
    const double v = finite_number((*j)[i], f);
    if (v < min_value || v > max_value) fail(f, "out of range");
    out.push_back(v);
  }
  return out;
}

TorusPoint Section::get_point(const std::string& key, TorusPoint fallback) const {
  const json* j = node(key);
  if (!j) return fallback;
  if (!j->is_array() || j->size() != 2) fail(field(key), "expected [x, y]");
  return {finite_number((*j)[0], field(key)), finite_number((*j)[1], field(key))};
}

void Section::check_known(const std::vector<std::string>& keys) const {
  for (const auto& item : section_.items()) {
    bool found = false;
    for (const auto& k : keys) found = found || k == item.key();
    if (!found) fail(field(item.key()), "unknown field");
  }
}

}  // namespace torus_lab::cli
