#include <gtest/gtest.h>

#include <filesystem>

#include "escape/config.hpp"
#include "escape/errors.hpp"

using namespace escape;

namespace {

const std::string kTools = std::string(ESCAPE_SOURCE_DIR) + "/tools/";

Json base() {
  return Json::parse(R"({
    "map": {"kind": "toral", "matrix": [[2, 1], [1, 1]]},
    "hole": {"polygons": [[[0.1, 0.1], [0.3, 0.1], [0.3, 0.3], [0.1, 0.3]]]},
    "estimators": {"mc": {"N": 100000, "seed": 3}, "ulam": {"k": 64}}
  })");
}

std::string error_of(const Json& doc, const std::string& def = "experiment") {
  try {
    validate(doc, def);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, EmbeddedSchemaMatchesPublishedFile) {
  EXPECT_EQ(experiment_schema(), read_json(kTools + "experiment.schema.json"));
}

TEST(Config, ExampleConfigsValidate) {
  for (const auto& e : std::filesystem::directory_iterator(kTools + "configs")) {
    const std::string name = e.path().filename().string();
    const std::string def = name == "tower.json" ? "tower" : name == "tower_pairs.json" ? "tower_pairs" : "experiment";
    EXPECT_EQ(error_of(read_json(e.path().string()), def), "") << name;
  }
}

TEST(Config, RejectsWhatReferenceValidatorRejects) {
  // Same documents as tools/check_configs.py.
  EXPECT_NE(error_of(Json::parse(R"({"estimators": {"mc": {"N": 1000}}})")), "");
  EXPECT_NE(error_of(Json::parse(R"({"map": {"kind": "toral", "matrix": [[2, 1], [1, 1]]}, "colour": "red"})")), "");
  EXPECT_NE(error_of(Json::parse(R"({"map": {"kind": "baker", "k": 1}})")), "");
  EXPECT_NE(error_of(Json::parse(R"({"branches": [{"w": 0, "R": 1}]})"), "tower"), "");
  EXPECT_NE(error_of(Json::parse(R"({"depth_pairs": {"depths": []}})"), "tower_pairs"), "");
}

TEST(Config, UnknownKeyNamesItsPath) {
  Json d = base();
  d["estimators"]["mc"]["Nmax"] = 10;
  const std::string e = error_of(d);
  EXPECT_NE(e.find("/estimators/mc"), std::string::npos) << e;
  EXPECT_NE(e.find("Nmax"), std::string::npos) << e;
  EXPECT_THROW(parse_config(d), ConfigError);
}

TEST(Config, SeedMandatoryForMonteCarlo) {
  Json d = base();
  d["estimators"]["mc"].erase("seed");
  EXPECT_THROW(parse_config(d), ConfigError);
  d["estimators"].erase("mc");
  EXPECT_NO_THROW(parse_config(d));
}

TEST(Config, ParsesEstimatorsAndHole) {
  const ExperimentConfig c = parse_config(base());
  EXPECT_TRUE(c.mc.enabled);
  EXPECT_EQ(c.mc.N, 100000);
  EXPECT_EQ(c.mc.seed, 3u);
  EXPECT_TRUE(c.ulam.enabled);
  EXPECT_EQ(c.ulam.k, 64);
  EXPECT_FALSE(c.pressure.enabled);
  EXPECT_NEAR(c.make_hole().area(), 0.04, 1e-15);
  EXPECT_THROW(c.make_family(), ConfigError);
}

TEST(Config, EigenRectsNeedToralMap) {
  Json d = Json::parse(R"({"map": {"kind": "baker", "k": 2},
                           "hole": {"eigen_rects": [{"u": [0, 0.1], "s": [0, 0.1]}]}})");
  EXPECT_THROW(parse_config(d).make_hole(), ConfigError);
}

TEST(Config, MarkovHoleFromConfig) {
  const ExperimentConfig c = load_config(kTools + "configs/baker_strip.json");
  EXPECT_NEAR(c.make_hole().area(), 0.25, 1e-15);
  const ExperimentConfig m = load_config(kTools + "configs/markov_cat.json");
  EXPECT_GT(m.make_hole().area(), 0.0);
  EXPECT_EQ(m.make_hole().kind(), HoleKind::markov);
}

TEST(Config, FamilyFromConfig) {
  const ExperimentConfig c = load_config(kTools + "configs/devil_sweep.json");
  const HoleFamily f = c.make_family();
  EXPECT_EQ(f.grid().size(), 200u);
  EXPECT_TRUE(f.monotone_increasing);
}

TEST(Config, CacheKeyStableUnderRepetitionAndKeyOrder) {
  const Json a = base();
  EXPECT_EQ(cache_key(parse_config(a)), cache_key(parse_config(a)));
  const Json b = Json::parse(R"({
    "estimators": {"ulam": {"k": 64}, "mc": {"seed": 3, "N": 100000}},
    "hole": {"polygons": [[[0.1, 0.1], [0.3, 0.1], [0.3, 0.3], [0.1, 0.3]]]},
    "map": {"matrix": [[2, 1], [1, 1]], "kind": "toral"}
  })");
  EXPECT_EQ(cache_key(parse_config(a)), cache_key(parse_config(b)));
  EXPECT_EQ(canonical_dump(Json::parse(R"({"b": 1.0, "a": [2.0, 0.5]})")), R"({"a":[2,0.5],"b":1})");
}

TEST(Config, CacheKeyChangesWithAnyField) {
  const std::string k0 = cache_key(parse_config(base()));
  Json d = base();
  d["estimators"]["mc"]["seed"] = 4;
  EXPECT_NE(cache_key(parse_config(d)), k0);
  d = base();
  d["estimators"]["ulam"]["k"] = 128;
  EXPECT_NE(cache_key(parse_config(d)), k0);
  d = base();
  d["hole"]["polygons"][0][0][0] = 0.11;
  EXPECT_NE(cache_key(parse_config(d)), k0);
  // Spelling out a default does not change the experiment.
  d = base();
  d["estimators"]["ulam"]["rule"] = "interior";
  EXPECT_EQ(cache_key(parse_config(d)), k0);
}

TEST(Config, OverrideSeed) {
  ExperimentConfig c = parse_config(base());
  const std::string k0 = cache_key(c);
  override_seed(c, 99);
  EXPECT_EQ(c.mc.seed, 99u);
  EXPECT_NE(cache_key(c), k0);
  EXPECT_EQ(c.canonical["estimators"]["mc"]["seed"], 99);
}

TEST(Config, CacheKeyIsSha256Hex) {
  const std::string k = cache_key(Json::object());
  EXPECT_EQ(k.size(), 64u);
  // SHA-256 of "{}".
  EXPECT_EQ(k, "44136fa355b3678a1146ad16f7e8649e94fb4fc21fe77e8310c060f61caaff8a");
}

TEST(Config, TowerSpecAndPairs) {
  TailClosure cl = TailClosure::reflect;
  const TowerSpec s = parse_tower_spec(read_json(kTools + "configs/tower.json"), &cl);
  EXPECT_EQ(cl, TailClosure::absorb);
  EXPECT_EQ(s.L, 32);
  const auto pairs = parse_tower_pairs(read_json(kTools + "configs/tower_pairs.json"), s);
  EXPECT_EQ(pairs.size(), 6u);
  EXPECT_THROW(parse_tower_pairs(Json::parse(R"({"pairs": [{"h1": [[5, 0]], "h2": []}]})"), s), ConfigError);
}

TEST(Config, MapRoundTrip) {
  for (const Map& f : {Map(TorusMap::cat()), Map(TorusMap::negated_cat()), Map(BakerMap(3))})
    EXPECT_EQ(map_to_json(parse_map(map_to_json(f))), map_to_json(f));
}
