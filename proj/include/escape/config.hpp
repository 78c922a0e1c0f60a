#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "escape/dynsys.hpp"
#include "escape/holes.hpp"
#include "escape/mc_escape.hpp"
#include "escape/tower.hpp"
#include "escape/ulam.hpp"

namespace escape {

using Json = nlohmann::json;

// The published schema (tools/experiment.schema.json), embedded at build time.
const Json& experiment_schema();

// Validates doc against $defs/<def> of the schema. Throws ConfigError naming
// the offending JSON pointer. Supports the subset the schema uses: type,
// properties, required, additionalProperties, items, min/maxItems, enum,
// const, oneOf, $ref, minimum, maximum, exclusiveMinimum.
void validate(const Json& doc, const std::string& def = "experiment");

struct McSettings {
  bool enabled = false;
  std::int64_t N = 100'000;
  int n_max = 60;
  McMode mode = McMode::replenished;
  std::uint64_t seed = 0;
  int drop = 10;
  int min_count = 100;
};

struct UlamSettings {
  bool enabled = false;
  int k = 256;
  CellRule rule = CellRule::interior;
  BuildMode build = BuildMode::exact;
  int samples_per_box = 8;
};

struct PressureSettings {
  bool enabled = false;
  int depth = 8;
};

struct SurvivorSettings {
  bool enabled = false;
  int k = 256;
  int n = 40;
};

struct ExperimentConfig {
  Map map = TorusMap::cat();
  std::optional<Json> hole, family;  // validated source, built on demand
  McSettings mc;
  UlamSettings ulam;
  PressureSettings pressure;
  SurvivorSettings survivor;
  std::optional<std::string> scenario;
  std::string out_dir;
  Json canonical;  // defaults filled in, numbers normalized

  Hole make_hole() const;  // throws ConfigError without a hole section
  HoleFamily make_family() const;
};

Map parse_map(const Json& j);
Json map_to_json(const Map& f);
Hole parse_hole(const Json& j, const Map& f);
FamilySpec parse_family(const Json& j, const Map& f);

ExperimentConfig parse_config(const Json& doc);
ExperimentConfig load_config(const std::string& path);
Json read_json(const std::string& path);

// Changes the MC seed everywhere it appears and refreshes the canonical form.
void override_seed(ExperimentConfig& cfg, std::uint64_t seed);

// Sorted keys, integral floats as integers, no whitespace.
std::string canonical_dump(const Json& j);
// SHA-256 hex digest of the canonical form.
std::string cache_key(const Json& j);
std::string cache_key(const ExperimentConfig& cfg);

TowerSpec parse_tower_spec(const Json& j, TailClosure* closure = nullptr);
std::vector<std::pair<TowerHole, TowerHole>> parse_tower_pairs(const Json& j, const TowerSpec& spec);

}  // namespace escape
