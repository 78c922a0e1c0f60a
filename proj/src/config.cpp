#include "escape/config.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "escape/errors.hpp"
#include "escape/schema_data.hpp"
#include "escape/symbolic.hpp"

namespace escape {

namespace {

std::string at(const std::string& ptr) { return ptr.empty() ? "/" : ptr; }

bool integral(const Json& v) {
  if (v.is_number_integer()) return true;
  if (!v.is_number_float()) return false;
  const double d = v.get<double>();
  return std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9007199254740992.0;
}

bool type_matches(const Json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "number") return v.is_number();
  if (type == "integer") return integral(v);
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  throw std::logic_error("schema: unsupported type " + type);
}

class Validator {
 public:
  explicit Validator(const Json& root) : root_(root) {}

  void check(const Json& v, const Json& s, const std::string& ptr) const {
    if (s.contains("$ref")) {
      check(v, resolve(s["$ref"].get<std::string>()), ptr);
      return;
    }
    if (s.contains("oneOf")) {
      int matches = 0;
      std::string first;
      for (const auto& alt : s["oneOf"]) {
        try {
          check(v, alt, ptr);
          ++matches;
        } catch (const ConfigError& e) {
          if (first.empty()) first = e.what();
        }
      }
      if (matches == 0) throw ConfigError("config " + at(ptr) + ": matches no allowed form (" + first + ")");
      if (matches > 1) throw ConfigError("config " + at(ptr) + ": ambiguous form");
    }
    if (s.contains("const") && v != s["const"])
      throw ConfigError("config " + at(ptr) + ": expected " + s["const"].dump());
    if (s.contains("enum")) {
      bool ok = false;
      for (const auto& e : s["enum"]) ok = ok || v == e;
      if (!ok) throw ConfigError("config " + at(ptr) + ": value " + v.dump() + " not in " + s["enum"].dump());
    }
    if (s.contains("type") && !type_matches(v, s["type"].get<std::string>()))
      throw ConfigError("config " + at(ptr) + ": expected " + s["type"].get<std::string>());
    if (v.is_number()) {
      const double d = v.get<double>();
      if (s.contains("minimum") && d < s["minimum"].get<double>())
        throw ConfigError("config " + at(ptr) + ": below minimum " + s["minimum"].dump());
      if (s.contains("maximum") && d > s["maximum"].get<double>())
        throw ConfigError("config " + at(ptr) + ": above maximum " + s["maximum"].dump());
      if (s.contains("exclusiveMinimum") && !(d > s["exclusiveMinimum"].get<double>()))
        throw ConfigError("config " + at(ptr) + ": must exceed " + s["exclusiveMinimum"].dump());
    }
    if (v.is_array()) {
      if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>())
        throw ConfigError("config " + at(ptr) + ": needs at least " + s["minItems"].dump() + " items");
      if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>())
        throw ConfigError("config " + at(ptr) + ": allows at most " + s["maxItems"].dump() + " items");
      if (s.contains("items"))
        for (std::size_t i = 0; i < v.size(); ++i) check(v[i], s["items"], ptr + "/" + std::to_string(i));
    }
    if (v.is_object()) {
      const Json empty = Json::object();
      const Json& props = s.contains("properties") ? s["properties"] : empty;
      if (s.contains("required"))
        for (const auto& r : s["required"])
          if (!v.contains(r.get<std::string>()))
            throw ConfigError("config " + at(ptr) + ": missing required key \"" + r.get<std::string>() + "\"");
      for (const auto& [key, val] : v.items()) {
        if (props.contains(key)) {
          check(val, props[key], ptr + "/" + key);
        } else if (s.contains("additionalProperties") && s["additionalProperties"] == false) {
          throw ConfigError("config " + at(ptr) + ": unknown key \"" + key + "\"");
        }
      }
    }
  }

  const Json& resolve(const std::string& ref) const {
    const std::string prefix = "#/$defs/";
    if (ref.rfind(prefix, 0) != 0) throw std::logic_error("schema: unsupported $ref " + ref);
    return root_.at("$defs").at(ref.substr(prefix.size()));
  }

 private:
  const Json& root_;
};

Json normalized(const Json& j) {
  if (j.is_object()) {
    Json out = Json::object();
    for (const auto& [k, v] : j.items()) out[k] = normalized(v);
    return out;
  }
  if (j.is_array()) {
    Json out = Json::array();
    for (const auto& v : j) out.push_back(normalized(v));
    return out;
  }
  if (j.is_number_float() && integral(j)) return Json(static_cast<std::int64_t>(j.get<double>()));
  return j;
}

Vec2 point(const Json& j) { return {j[0].get<double>(), j[1].get<double>()}; }

Polygon polygon(const Json& j) {
  Polygon p;
  for (const auto& v : j) p.push_back(point(v));
  make_ccw(p);
  return p;
}

HoleKind hole_kind(const std::string& s) {
  if (s == "regular") return HoleKind::regular;
  if (s == "markov") return HoleKind::markov;
  return HoleKind::generic;
}

const TorusMap* torus_of(const Map& f) { return std::get_if<TorusMap>(&f); }

// Polygons plus eigen-aligned rectangles of a hole or family section.
std::vector<Polygon> shapes(const Json& j, const Map& f) {
  std::vector<Polygon> out;
  if (j.contains("polygons"))
    for (const auto& p : j["polygons"]) out.push_back(polygon(p));
  if (j.contains("eigen_rects")) {
    const TorusMap* t = torus_of(f);
    if (!t) throw ConfigError("config: eigen_rects need a toral map");
    for (const auto& r : j["eigen_rects"]) {
      const double u0 = r["u"][0].get<double>(), u1 = r["u"][1].get<double>();
      const double s0 = r["s"][0].get<double>(), s1 = r["s"][1].get<double>();
      if (!(u1 > u0) || !(s1 > s0)) throw ConfigError("config: eigen_rect intervals must be increasing");
      Polygon p = eigen_rect(*t, u0, u1, s0, s1);
      if (r.contains("center")) p = translate(p, point(r["center"]));
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::string hex(const unsigned char* d, unsigned n) {
  std::string s;
  char buf[3];
  for (unsigned i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", d[i]);
    s += buf;
  }
  return s;
}

std::vector<TowerCell> tower_cells(const Json& j) {
  std::vector<TowerCell> out;
  for (const auto& c : j) out.emplace_back(c[0].get<int>(), c[1].get<int>());
  return out;
}

}  // namespace

const Json& experiment_schema() {
  static const Json schema = Json::parse(detail::kSchemaText);
  return schema;
}

void validate(const Json& doc, const std::string& def) {
  const Validator v(experiment_schema());
  v.check(doc, v.resolve("#/$defs/" + def), "");
}

Map parse_map(const Json& j) {
  validate(j, "map");
  if (j["kind"] == "baker") return BakerMap(j["k"].get<int>());
  IntMat2 m{};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) m[r][c] = j["matrix"][r][c].get<long long>();
  return TorusMap(m);
}

Json map_to_json(const Map& f) {
  if (auto t = torus_of(f)) {
    const auto& m = t->matrix();
    return {{"kind", "toral"}, {"matrix", {{m[0][0], m[0][1]}, {m[1][0], m[1][1]}}}};
  }
  return {{"kind", "baker"}, {"k", std::get<BakerMap>(f).k()}};
}

Hole parse_hole(const Json& j, const Map& f) {
  validate(j, "hole");
  const bool complement = j.value("complement", false);
  if (j.contains("markov")) {
    if (j.contains("polygons") || j.contains("eigen_rects") || complement)
      throw ConfigError("config: a markov hole takes no polygons and no complement");
    const int depth = j["markov"]["depth"].get<int>();
    const auto cells = j["markov"]["cells"].get<std::vector<int>>();
    if (auto t = torus_of(f)) return markov_hole(cells, MarkovPartition::toral(*t, depth));
    return markov_hole(cells, MarkovPartition::baker(std::get<BakerMap>(f), depth));
  }
  const HoleKind kind = hole_kind(j.value("kind", std::string("generic")));
  const auto polys = shapes(j, f);
  if (complement) return Hole::complement_of(polys, kind, torus_of(f));
  return Hole(polys, kind, torus_of(f));
}

FamilySpec parse_family(const Json& j, const Map& f) {
  validate(j, "family");
  FamilySpec s;
  s.polygons = shapes(j, f);
  s.complement = j.value("complement", false);
  s.kind = hole_kind(j.value("kind", std::string("generic")));
  if (j.contains("fixed_windows")) {
    if (!s.complement) throw ConfigError("config: fixed_windows need a complement family");
    for (const auto& p : j["fixed_windows"]) s.fixed_windows.push_back(polygon(p));
  }
  s.t_min = j["param"]["min"].get<double>();
  s.t_max = j["param"]["max"].get<double>();
  s.samples = j["param"]["samples"].get<int>();
  const std::string mode = j["mode"].get<std::string>();
  s.mode = mode == "constant"    ? FamilyMode::constant
           : mode == "translate" ? FamilyMode::translate
           : mode == "slide"     ? FamilyMode::slide
                                 : FamilyMode::nested;
  if (j.contains("direction")) s.direction = point(j["direction"]);
  s.polygon = j.value("polygon", 0);
  s.edge = j.value("edge", 0);
  if (s.mode == FamilyMode::translate && norm(s.direction) == 0.0)
    throw ConfigError("config: translate family needs a nonzero direction");
  return s;
}

ExperimentConfig parse_config(const Json& doc_in) {
  const Json doc = normalized(doc_in);
  validate(doc, "experiment");
  ExperimentConfig cfg;
  Json canon = doc;
  if (doc.contains("map")) cfg.map = parse_map(doc["map"]);
  canon["map"] = map_to_json(cfg.map);
  if (doc.contains("hole") && doc.contains("family"))
    throw ConfigError("config: give either a hole or a family, not both");
  if (doc.contains("hole")) {
    cfg.hole = doc["hole"];
    parse_hole(*cfg.hole, cfg.map);  // fail early on geometry errors
  }
  if (doc.contains("family")) {
    cfg.family = doc["family"];
    parse_family(*cfg.family, cfg.map);
  }
  if (doc.contains("estimators")) {
    const Json& e = doc["estimators"];
    Json& ce = canon["estimators"];
    if (e.contains("mc")) {
      const Json& m = e["mc"];
      auto& s = cfg.mc;
      s.enabled = true;
      s.N = m.value("N", s.N);
      s.n_max = m.value("n_max", s.n_max);
      s.mode = m.value("mode", std::string("replenished")) == "plain" ? McMode::plain : McMode::replenished;
      s.seed = m["seed"].get<std::uint64_t>();
      s.drop = m.value("drop", s.drop);
      s.min_count = m.value("min_count", s.min_count);
      ce["mc"] = {{"N", s.N},       {"n_max", s.n_max},         {"mode", s.mode == McMode::plain ? "plain" : "replenished"},
                  {"seed", s.seed}, {"drop", s.drop},           {"min_count", s.min_count}};
    }
    if (e.contains("ulam")) {
      const Json& u = e["ulam"];
      auto& s = cfg.ulam;
      s.enabled = true;
      s.k = u.value("k", s.k);
      s.rule = u.value("rule", std::string("interior")) == "majority" ? CellRule::majority : CellRule::interior;
      s.build = u.value("build", std::string("exact")) == "sampled" ? BuildMode::sampled : BuildMode::exact;
      s.samples_per_box = u.value("samples_per_box", s.samples_per_box);
      ce["ulam"] = {{"k", s.k},
                    {"rule", s.rule == CellRule::majority ? "majority" : "interior"},
                    {"build", s.build == BuildMode::sampled ? "sampled" : "exact"},
                    {"samples_per_box", s.samples_per_box}};
    }
    if (e.contains("pressure")) {
      cfg.pressure.enabled = true;
      cfg.pressure.depth = e["pressure"].value("depth", cfg.pressure.depth);
      ce["pressure"] = {{"depth", cfg.pressure.depth}};
    }
    if (e.contains("survivor")) {
      cfg.survivor.enabled = true;
      cfg.survivor.k = e["survivor"].value("k", cfg.survivor.k);
      cfg.survivor.n = e["survivor"].value("n", cfg.survivor.n);
      ce["survivor"] = {{"k", cfg.survivor.k}, {"n", cfg.survivor.n}};
    }
  }
  if (doc.contains("scenario")) cfg.scenario = doc["scenario"].get<std::string>();
  if (doc.contains("outputs")) cfg.out_dir = doc["outputs"].value("dir", std::string());
  cfg.canonical = canon;
  return cfg;
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) { return parse_config(read_json(path)); }

void override_seed(ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.mc.seed = seed;
  if (cfg.mc.enabled) cfg.canonical["estimators"]["mc"]["seed"] = seed;
}

Hole ExperimentConfig::make_hole() const {
  if (!hole) throw ConfigError("config: no hole section");
  return parse_hole(*hole, map);
}

HoleFamily ExperimentConfig::make_family() const {
  if (!family) throw ConfigError("config: no family section");
  return escape::make_family(parse_family(*family, map), torus_of(map));
}

std::string canonical_dump(const Json& j) { return normalized(j).dump(); }

std::string cache_key(const Json& j) {
  const std::string s = canonical_dump(j);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  if (EVP_Digest(s.data(), s.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  return hex(md, len);
}

std::string cache_key(const ExperimentConfig& cfg) { return cache_key(cfg.canonical); }

TowerSpec parse_tower_spec(const Json& j_in, TailClosure* closure) {
  const Json j = normalized(j_in);
  validate(j, "tower");
  if (j.contains("branches") == j.contains("geometric"))
    throw ConfigError("tower spec: give exactly one of branches and geometric");
  const int L = j.value("L", 32);
  TowerSpec s;
  if (j.contains("geometric")) {
    s = geometric_tower(j["geometric"]["J"].get<int>(), L);
  } else {
    for (const auto& b : j["branches"]) s.branches.push_back({b["w"].get<double>(), b["R"].get<int>()});
    s.L = L;
  }
  s.C = j.value("C", s.C);
  s.theta = j.value("theta", s.theta);
  s.validate();
  if (closure) *closure = j.value("closure", std::string("absorb")) == "reflect" ? TailClosure::reflect : TailClosure::absorb;
  return s;
}

std::vector<std::pair<TowerHole, TowerHole>> parse_tower_pairs(const Json& j_in, const TowerSpec& spec) {
  const Json j = normalized(j_in);
  validate(j, "tower_pairs");
  std::vector<std::pair<TowerHole, TowerHole>> out;
  if (j.contains("pairs"))
    for (const auto& p : j["pairs"]) out.push_back({TowerHole{tower_cells(p["h1"])}, TowerHole{tower_cells(p["h2"])}});
  if (j.contains("depth_pairs")) {
    const auto& d = j["depth_pairs"];
    const TowerHole common{d.contains("common") ? tower_cells(d["common"]) : std::vector<TowerCell>{}};
    for (const auto& n : d["depths"]) out.push_back(depth_pair(spec, common, n.get<int>()));
  }
  if (out.empty()) throw ConfigError("tower pairs: no pairs given");
  for (const auto& [a, b] : out)
    for (const auto* h : {&a, &b})
      for (const auto& [lev, br] : h->cells)
        if (br >= int(spec.branches.size()) || lev >= spec.branches[std::size_t(br)].R)
          throw ConfigError("tower pairs: cell (" + std::to_string(lev) + ", " + std::to_string(br) +
                            ") is not in the tower");
  return out;
}

}  // namespace escape
