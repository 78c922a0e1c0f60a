// escape-lab: command-line front end for the escape-rate toolkit.
//
// Exit codes: 0 success or all assertions passed, 1 a run failed or an
// assertion did not hold, 2 configuration error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "escape/artifacts.hpp"
#include "escape/config.hpp"
#include "escape/errors.hpp"
#include "escape/mc_escape.hpp"
#include "escape/parallel.hpp"
#include "escape/scenarios.hpp"
#include "escape/survivor.hpp"
#include "escape/sweep.hpp"
#include "escape/symbolic.hpp"
#include "escape/tower.hpp"
#include "escape/ulam.hpp"

namespace fs = std::filesystem;
using namespace escape;

namespace {

struct Globals {
  std::string config;
  std::string out_dir;
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
  bool no_cache = false;
};

std::string cache_dir() {
  if (const char* d = std::getenv("ESCAPE_LAB_CACHE_DIR"); d && *d) return d;
  if (const char* h = std::getenv("HOME"); h && *h) return (fs::path(h) / ".cache" / "escape-lab").string();
  return ".escape-lab-cache";
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Outputs of one command: file contents in the order of the requested
// paths, plus stdout text.
struct Outputs {
  std::vector<std::string> files;
  std::string stdout_text;
};

// Runs produce() unless the cache holds a result for the same canonical
// inputs. Output paths are not part of the key.
void run_cached(const Globals& g, const std::string& command, const Json& inputs,
                const std::vector<std::string>& paths, const std::function<Outputs()>& produce) {
  const std::string key = cache_key(Json{{"command", command}, {"inputs", inputs}});
  const fs::path entry = fs::path(cache_dir()) / key;
  auto slot = [&](std::size_t i) { return entry / ("file" + std::to_string(i)); };
  Outputs out;
  bool hit = !g.no_cache && fs::exists(entry / "stdout");
  for (std::size_t i = 0; hit && i < paths.size(); ++i) hit = fs::exists(slot(i));
  if (hit) {
    std::cerr << "cache hit " << key << "\n";
    out.stdout_text = read_text(entry / "stdout");
    for (std::size_t i = 0; i < paths.size(); ++i) out.files.push_back(read_text(slot(i)));
  } else {
    out = produce();
    if (out.files.size() != paths.size()) throw std::logic_error(command + ": output count mismatch");
    if (!g.no_cache) {
      for (std::size_t i = 0; i < paths.size(); ++i) write_text(slot(i).string(), out.files[i]);
      write_text((entry / "stdout").string(), out.stdout_text);  // written last: marks the entry complete
    }
  }
  for (std::size_t i = 0; i < paths.size(); ++i) write_text(paths[i], out.files[i]);
  std::cout << out.stdout_text;
}

std::string out_path(const Globals& g, const std::string& explicit_path, const std::string& fallback) {
  if (!explicit_path.empty()) return explicit_path;
  return join_path(g.out_dir, fallback);
}

ExperimentConfig load(const Globals& g, const std::string& path_override = "") {
  const std::string path = path_override.empty() ? g.config : path_override;
  if (path.empty()) throw ConfigError("--config is required");
  ExperimentConfig cfg = load_config(path);
  if (g.seed) override_seed(cfg, *g.seed);
  return cfg;
}

Json map_info(const Map& f) {
  Json j = {{"map", describe(f)}, {"log_lambda", log_expansion(f)}};
  if (const auto* t = std::get_if<TorusMap>(&f)) {
    j["lambda_u"] = t->lambda_u();
    j["lambda_s"] = t->lambda_s();
    j["det"] = t->det();
    j["orientation"] = t->orientation() == Orientation::preserving ? "preserving" : "reversing";
    j["e_u"] = {t->e_u().x, t->e_u().y};
    j["e_s"] = {t->e_s().x, t->e_s().y};
    Json counts = Json::object();
    for (int p = 1; p <= 4; ++p) counts[std::to_string(p)] = periodic_points(*t, p).size();
    j["periodic_point_counts"] = counts;
  } else {
    j["k"] = std::get<BakerMap>(f).k();
  }
  return j;
}

int run_scenario_cmd(const Globals& g, const std::string& name, const ScenarioOptions& base) {
  ScenarioOptions opt = base;
  opt.out_dir = g.out_dir.empty() ? "escape-lab-out" : g.out_dir;
  if (g.seed) opt.seed = *g.seed;
  if (!g.config.empty()) {
    const ExperimentConfig cfg = load(g);
    if (cfg.mc.enabled) {
      opt.seed = cfg.mc.seed;
      if (!opt.N) opt.N = cfg.mc.N;
    }
    if (cfg.ulam.enabled && !opt.k) opt.k = cfg.ulam.k;
    if (cfg.pressure.enabled && !opt.depth) opt.depth = cfg.pressure.depth;
    if (!cfg.out_dir.empty() && g.out_dir.empty()) opt.out_dir = cfg.out_dir;
  }
  const ScenarioOutcome o = run_scenario(name, opt);
  for (const auto& a : o.assertions)
    std::cout << (a.pass ? "PASS " : "FAIL ") << a.name << (a.detail.empty() ? "" : " (" + a.detail + ")") << "\n";
  std::cout << name << ": " << (o.passed() ? "PASS" : "FAIL") << " in " << o.seconds << " s, artifacts in "
            << join_path(opt.out_dir, name) << "\n";
  return o.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Escape rates of open hyperbolic maps: Monte Carlo, Ulam, symbolic pressure, towers"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed_value = 0;
  app.add_option("--config", g.config, "experiment config (JSON)");
  app.add_option("--out-dir", g.out_dir, "directory for artifacts");
  app.add_option("--threads", g.threads, "worker threads, 0 = all cores");
  auto* seed_opt = app.add_option("--seed", seed_value, "override the Monte Carlo seed");
  app.add_flag("--no-cache", g.no_cache, "ignore and do not fill the result cache");
  app.fallthrough();

  std::function<int()> action;

  auto* mi = app.add_subcommand("map-info", "eigen-data and periodic point counts of the map");
  std::string map_name;
  mi->add_option("--map", map_name, "cat | negated-cat | baker<k>, instead of --config");
  mi->callback([&] {
    action = [&] {
      Map f = TorusMap::cat();
      if (!map_name.empty()) {
        if (map_name == "cat") f = TorusMap::cat();
        else if (map_name == "negated-cat") f = TorusMap::negated_cat();
        else if (map_name.rfind("baker", 0) == 0) f = BakerMap(std::stoi(map_name.substr(5)));
        else throw ConfigError("unknown map \"" + map_name + "\"");
      } else {
        f = load(g).map;
      }
      std::cout << map_info(f).dump(2) << "\n";
      return 0;
    };
  });

  auto* mc = app.add_subcommand("escape-mc", "Monte Carlo survivor series and escape-rate fit");
  std::string mc_out;
  mc->add_option("--out", mc_out, "series CSV (n, survivors, rate, cum_log_measure)");
  mc->callback([&] {
    action = [&] {
      const ExperimentConfig cfg = load(g);
      if (!cfg.mc.enabled) throw ConfigError("config has no estimators.mc section");
      const std::string path = out_path(g, mc_out, "series.csv");
      run_cached(g, "escape-mc", cfg.canonical, {path}, [&] {
        const SurvivorSeries s = run_series(cfg.map, cfg.make_hole(), cfg.mc.N, cfg.mc.n_max, cfg.mc.seed, cfg.mc.mode);
        WindowPolicy pol;
        pol.drop = cfg.mc.drop;
        pol.min_count = cfg.mc.min_count;
        const EscapeEstimate e = estimate(s, pol);
        const Json j = {{"rho_hat", fmt(e.rho_hat)}, {"rho_lower", fmt(e.rho_lower_hat)},
                        {"rho_upper", fmt(e.rho_upper_hat)}, {"stderr", e.std_err},
                        {"window", {e.n0, e.n1}},     {"extinct", e.extinct}};
        return Outputs{{series_csv(s)}, j.dump(2) + "\n"};
      });
      return 0;
    };
  });

  auto* ul = app.add_subcommand("ulam", "leading eigenvalue of the open Ulam operator");
  std::optional<int> ul_k;
  std::string ul_out, ul_qsd;
  ul->add_option("--k", ul_k, "grid resolution (overrides the config)");
  ul->add_option("--out", ul_out, "spectral JSON");
  ul->add_option("--qsd", ul_qsd, "quasi-stationary density CSV (cell_i, cell_j, mass)");
  ul->callback([&] {
    action = [&] {
      ExperimentConfig cfg = load(g);
      const int k = ul_k.value_or(cfg.ulam.k);
      if (k < 2 || k > 2048) throw ConfigError("k must lie in [2, 2048]");
      const std::string path = out_path(g, ul_out, "spectral.json");
      Json in = cfg.canonical;
      in["k"] = k;
      in["qsd"] = !ul_qsd.empty();
      std::vector<std::string> paths{path};
      if (!ul_qsd.empty()) paths.push_back(ul_qsd);
      run_cached(g, "ulam", in, paths, [&] {
        const UlamOperator op = mask(build(cfg.map, k, cfg.ulam.build, cfg.ulam.samples_per_box), cfg.make_hole(),
                                     cfg.ulam.rule);
        const SpectralResult sr = leading(op);
        Outputs o{{to_json(sr).dump(2) + "\n"}, to_json(sr).dump(2) + "\n"};
        if (!ul_qsd.empty()) o.files.push_back(qsd_csv(op, sr));
        return o;
      });
      return 0;
    };
  });

  auto* pr = app.add_subcommand("pressure", "symbolic pressure bounds on a Markov partition");
  std::optional<int> pr_depth;
  std::string pr_out;
  pr->add_option("--depth", pr_depth, "partition depth (overrides the config)");
  pr->add_option("--out", pr_out, "pressure JSON");
  pr->callback([&] {
    action = [&] {
      ExperimentConfig cfg = load(g);
      const int depth = pr_depth.value_or(cfg.pressure.depth);
      const std::string path = out_path(g, pr_out, "pressure.json");
      Json in = cfg.canonical;
      in["depth"] = depth;
      run_cached(g, "pressure", in, {path}, [&] {
        const MarkovPartition part = std::holds_alternative<TorusMap>(cfg.map)
                                         ? MarkovPartition::toral(std::get<TorusMap>(cfg.map), depth)
                                         : MarkovPartition::baker(std::get<BakerMap>(cfg.map), depth);
        const PressureReport r = pressure_report(part, cfg.make_hole());
        const Json j = {{"p_upper", fmt(r.p_upper)},     {"p_lower", fmt(r.p_lower)},
                        {"p_lower_entropy", fmt(r.p_lower_entropy)},
                        {"sp_restricted", r.sp_restricted}, {"cycle_witness", r.cycle_witness},
                        {"aligned", r.aligned},           {"states", r.states},
                        {"survivor_states", r.survivor_states}};
        return Outputs{{j.dump(2) + "\n"}, j.dump(2) + "\n"};
      });
      return 0;
    };
  });

  auto* sv = app.add_subcommand("survivor", "outer grid approximation of the survivor set");
  std::optional<int> sv_k, sv_n;
  std::string sv_out;
  sv->add_option("--k", sv_k, "grid resolution");
  sv->add_option("--n", sv_n, "trimming horizon");
  sv->add_option("--out", sv_out, "omega CSV (cell_i, cell_j, retained_at_n)");
  sv->callback([&] {
    action = [&] {
      ExperimentConfig cfg = load(g);
      const int k = sv_k.value_or(cfg.survivor.k), n = sv_n.value_or(cfg.survivor.n);
      const std::string path = out_path(g, sv_out, "omega.csv");
      Json in = cfg.canonical;
      in["k"] = k;
      in["n"] = n;
      run_cached(g, "survivor", in, {path}, [&] {
        const Hole h = cfg.make_hole();
        const SurvivorApprox a = compute(cfg.map, h, k, n);
        const double gap = boundary_gap(a, h);
        const Json j = {{"retained", a.count()}, {"gap", fmt(gap)}, {"gap_flag", to_string(classify(a, gap))},
                        {"stabilized", a.stabilized}};
        return Outputs{{omega_csv(a)}, j.dump(2) + "\n"};
      });
      return 0;
    };
  });

  auto* tw = app.add_subcommand("tower", "eigenvalue closeness of tower hole pairs");
  std::string tw_spec, tw_pairs, tw_out;
  tw->add_option("--spec", tw_spec, "tower JSON")->required();
  tw->add_option("--pairs", tw_pairs, "hole pairs JSON")->required();
  tw->add_option("--out", tw_out, "closeness CSV");
  tw->callback([&] {
    action = [&] {
      const Json sj = read_json(tw_spec), pj = read_json(tw_pairs);
      validate(sj, "tower");
      validate(pj, "tower_pairs");
      TailClosure closure = TailClosure::absorb;
      const TowerSpec spec = parse_tower_spec(sj, &closure);
      const auto pairs = parse_tower_pairs(pj, spec);
      const std::string path = out_path(g, tw_out, "closeness.csv");
      run_cached(g, "tower", Json{{"spec", sj}, {"pairs", pj}}, {path}, [&] {
        const ClosenessReport r = eigenvalue_closeness_experiment(spec, pairs);
        const Json j = {{"slope", r.slope}, {"intercept", r.intercept}, {"r2", r.r2}, {"fitted", r.fitted}};
        return Outputs{{closeness_csv(r)}, j.dump(2) + "\n"};
      });
      return 0;
    };
  });

  auto* sw = app.add_subcommand("sweep", "all estimators along a hole family");
  std::string sw_family, sw_out, sw_report, sw_svg;
  sw->add_option("--family", sw_family, "experiment config with a family section");
  sw->add_option("--out", sw_out, "sweep CSV");
  sw->add_option("--report", sw_report, "staircase JSON");
  sw->add_option("--svg", sw_svg, "staircase chart");
  sw->callback([&] {
    action = [&] {
      const ExperimentConfig cfg = load(g, sw_family);
      const HoleFamily fam = cfg.make_family();
      SweepConfig sc;
      sc.map = cfg.map;
      sc.run_mc = cfg.mc.enabled;
      sc.N = cfg.mc.N;
      sc.n_max = cfg.mc.n_max;
      sc.seed = cfg.mc.seed;
      sc.mode = cfg.mc.mode;
      sc.window.drop = cfg.mc.drop;
      sc.window.min_count = cfg.mc.min_count;
      sc.run_ulam = cfg.ulam.enabled;
      sc.k = cfg.ulam.k;
      sc.rule = cfg.ulam.rule;
      sc.run_survivor = cfg.survivor.enabled || cfg.ulam.enabled;
      if (cfg.survivor.enabled) {
        sc.survivor_k = cfg.survivor.k;
        sc.survivor_n = cfg.survivor.n;
      }
      sc.depth = cfg.pressure.enabled ? cfg.pressure.depth : 0;
      const std::string csv = out_path(g, sw_out, "sweep.csv");
      const std::string rep = out_path(g, sw_report, "staircase.json");
      std::vector<std::string> paths{csv, rep};
      if (!sw_svg.empty()) paths.push_back(sw_svg);
      run_cached(g, "sweep", Json{{"config", cfg.canonical}, {"svg", !sw_svg.empty()}}, paths, [&] {
        const SweepResult r = run(fam, sc);
        const auto series = sc.run_ulam ? SweepResult::Series::ulam : SweepResult::Series::mc;
        const StaircaseReport st = staircase(r, series);
        Outputs o{{sweep_csv(r), to_json(st).dump(2) + "\n"}, ""};
        if (!sw_svg.empty()) o.files.push_back(staircase_svg(r, st, series));
        o.stdout_text = Json{{"samples", r.records.size()},
                             {"plateau_fraction", st.plateau_fraction},
                             {"jumps", st.jumps.size()},
                             {"monotone_violations", st.monotone_violations},
                             {"jumps_colocated", st.jumps_colocated}}
                            .dump(2) +
                        "\n";
        return o;
      });
      return 0;
    };
  });

  auto* scn = app.add_subcommand("scenario", "run a named construction and check its assertions");
  std::string scn_name;
  ScenarioOptions scn_opt;
  bool scn_list = false;
  scn->add_option("name", scn_name, "scenario name");
  scn->add_flag("--list", scn_list, "list scenarios");
  scn->add_option("--samples", scn_opt.samples, "family samples");
  scn->add_option("--k", scn_opt.k, "Ulam / survivor grid resolution");
  scn->add_option("--N", scn_opt.N, "Monte Carlo cloud size");
  scn->add_option("--depth", scn_opt.depth, "Markov partition depth");
  scn->callback([&] {
    action = [&] {
      if (scn_list) {
        for (const auto& n : scenario_names()) std::cout << n << "\t" << scenario_description(n) << "\n";
        return 0;
      }
      if (scn_name.empty()) throw ConfigError("scenario name required (see --list)");
      return run_scenario_cmd(g, scn_name, scn_opt);
    };
  });

  auto* cache = app.add_subcommand("cache", "inspect the result cache");
  cache->require_subcommand(1);
  auto* ck = cache->add_subcommand("key", "canonical digest of --config");
  ck->callback([&] {
    action = [&] {
      std::cout << cache_key(load(g)) << "\n";
      return 0;
    };
  });
  auto* cp = cache->add_subcommand("path", "cache directory");
  cp->callback([&] {
    action = [&] {
      std::cout << cache_dir() << "\n";
      return 0;
    };
  });
  auto* cc = cache->add_subcommand("clear", "delete every cached result");
  cc->callback([&] {
    action = [&] {
      std::error_code ec;
      const auto n = fs::remove_all(cache_dir(), ec);
      if (ec) throw ConfigError("cannot clear " + cache_dir() + ": " + ec.message());
      std::cout << "removed " << n << " entries\n";
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (*seed_opt) g.seed = seed_value;
  try {
    if (g.threads) set_thread_count(g.threads);
    return action ? action() : 2;
  } catch (const ConfigError& e) {
    std::cerr << "escape-lab: " << e.what() << "\n";
    return 2;
  } catch (const ImmediateExtinction& e) {
    std::cerr << "escape-lab: immediate extinction: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "escape-lab: " << e.what() << "\n";
    return 1;
  }
}
