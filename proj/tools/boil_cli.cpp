// Command-line driver: environment generation and validation, optimisation,
// simulation and metric extraction.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "boil/augment.hpp"
#include "boil/boil.hpp"
#include "boil/environment.hpp"
#include "boil/errors.hpp"
#include "boil/io.hpp"
#include "boil/losses.hpp"
#include "boil/markov.hpp"
#include "boil/metrics.hpp"
#include "boil/simulator.hpp"
#include "boil/visibility.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace boil;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInvalid = 2, kNumerical = 3 };

std::string hex(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex;
  s.width(16);
  s.fill('0');
  s << v;
  return s.str();
}

struct VisOptions {
  double radius = 3.5;
  std::string fov = "forward";
  int samples = 4;
  bool no_cache = false;

  VisibilityParams params() const {
    VisibilityParams p;
    p.radius = radius;
    if (fov == "forward") {
      p.fov = FieldOfView::ForwardHalfPlane;
    } else if (fov == "omni") {
      p.fov = FieldOfView::Omni;
    } else {
      throw ConfigError("unknown field of view '" + fov + "'");
    }
    p.samples_per_edge = samples;
    validate_params(p);
    return p;
  }
};

void add_vis_options(CLI::App* cmd, VisOptions& vis) {
  cmd->add_option("--radius", vis.radius, "Vision radius in cells");
  cmd->add_option("--fov", vis.fov, "Field of view while moving: forward or omni");
  cmd->add_option("--samples", vis.samples, "Sample points per edge");
  cmd->add_flag("--no-cache", vis.no_cache, "Recompute the visibility map");
}

ordered_json vis_json(const VisibilityParams& p) {
  return {{"radius", p.radius},
          {"fov", p.fov == FieldOfView::Omni ? "omni" : "forward"},
          {"samples_per_edge", p.samples_per_edge}};
}

/// Environment plus everything derived from it.
struct Loaded {
  fs::path path;
  GridSpec grid;
  MovementGraph graph;
  VisibilityParams params;
  VisibilityMap vis;
  std::uint64_t hash = 0;
};

fs::path cache_path(const fs::path& env, std::uint64_t key) {
  const char* dir = std::getenv("BOIL_CACHE_DIR");
  const std::string name = env.filename().string() + ".vis-" + hex(key) + ".json";
  if (dir && *dir) return fs::path(dir) / name;
  return env.parent_path() / name;
}

Loaded load_env(const fs::path& path, const VisOptions& options) {
  Loaded env;
  env.path = path;
  env.grid = load_environment(path);
  env.graph = build_movement_graph(env.grid);
  const auto report = check_strong_connectivity(env.graph);
  if (!report.is_strong) {
    throw ValidationError("movement graph is not strongly connected (" + std::to_string(report.components.size()) +
                          " components)");
  }
  env.hash = environment_hash(env.grid);
  env.params = options.params();
  const auto key = visibility_hash(env.grid, env.params);
  const auto cache = cache_path(path, key);
  if (!options.no_cache && fs::exists(cache)) {
    env.vis = load_visibility(cache, key);
    if (env.vis.row_count() == env.graph.edge_count()) return env;
  }
  env.vis = compute_visibility(env.grid, env.graph, env.params);
  try {
    save_visibility(env.vis, key, cache);
  } catch (const std::exception& e) {
    std::cerr << "warning: visibility cache not written: " << e.what() << "\n";
  }
  return env;
}

void write_manifest(const fs::path& path, const ordered_json& body) {
  ordered_json doc;
  doc["version"] = "manifest/1";
  doc["code_version"] = kVersion;
  for (const auto& [k, v] : body.items()) doc[k] = v;
  write_text(path, doc.dump(2) + "\n");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

NodeId parse_node(const std::string& s, const MovementGraph& graph) {
  std::size_t used = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("bad node id '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("bad node id '" + s + "'");
  if (v >= graph.node_count()) throw ValidationError("node " + s + " out of range");
  return static_cast<NodeId>(v);
}

// ---------------------------------------------------------------------------
// env

struct EnvGenerateArgs {
  std::string kind = "small";
  std::uint64_t seed = 0;
  int width = 0;
  int height = 0;
  std::string out;
};

int run_env_generate(const EnvGenerateArgs& a) {
  GridSpec grid;
  if (a.width > 0 || a.height > 0) {
    if (a.width <= 0 || a.height <= 0) throw ConfigError("--width and --height go together");
    grid = a.kind == "large" ? generate_open_terrain(a.width, a.height, a.seed)
                             : generate_walled_env(a.width, a.height, a.seed);
  } else if (a.kind == "small") {
    grid = generate_reference_env(EnvKind::Small, a.seed);
  } else if (a.kind == "large") {
    grid = generate_reference_env(EnvKind::Large, a.seed);
  } else {
    throw ConfigError("unknown environment kind '" + a.kind + "'");
  }
  save_environment(grid, a.out);
  std::cout << "wrote " << a.out << " (" << grid.width << "x" << grid.height << ")\n";
  return kOk;
}

int run_env_validate(const std::string& path) {
  const GridSpec grid = load_environment(path);
  const auto graph = build_movement_graph(grid);
  const auto report = check_strong_connectivity(graph);
  if (!report.is_strong) {
    std::cerr << "invalid: strong connectivity (" << report.components.size() << " components)\n";
    return kInvalid;
  }
  std::cout << "ok: " << grid.width << "x" << grid.height << ", " << graph.node_count() << " nodes, "
            << graph.edge_count() << " edges\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// optimize

struct OptimizeArgs {
  std::string env;
  std::string loss = "coverage";
  std::string patrol_nodes;
  double horizon = 10.0;
  OptimizerConfig config;
  std::optional<std::uint64_t> seed;
  std::optional<double> split_p;
  std::optional<double> lambda;
  std::string augment_paths;
  std::string out;
  std::string trace;
  VisOptions vis;
};

int run_optimize(OptimizeArgs a) {
  if (!a.seed) throw ConfigError("--seed is required");
  a.config.seed = *a.seed;
  validate_config(a.config);
  if (a.lambda && !a.split_p) throw ConfigError("--lambda needs --split-p");
  if (a.split_p && !a.augment_paths.empty()) throw ConfigError("--split-p and --augment-paths are exclusive");

  const Loaded env = load_env(a.env, a.vis);
  const MovementGraph& base = env.graph;

  std::vector<NodeId> patrol;
  VisibilityMap reach;
  const VisibilityMap* map = &env.vis;
  if (a.loss == "patrolling") {
    if (a.patrol_nodes == "markers") {
      patrol = marker_nodes(env.grid, base);
    } else {
      for (const auto& s : split_list(a.patrol_nodes)) patrol.push_back(parse_node(s, base));
    }
    if (patrol.empty()) throw EmptyPatrolSet();
  } else if (a.loss == "reachability") {
    reach = build_reachability_map(base, std::vector<double>(base.node_count(), a.horizon));
    map = &reach;
  } else if (a.loss != "coverage") {
    throw ConfigError("unknown loss '" + a.loss + "'");
  }

  const fs::path out(a.out);
  const fs::path trace_path = a.trace.empty() ? fs::path(out.string() + ".trace.csv") : fs::path(a.trace);
  const fs::path manifest_path = fs::path(out.string() + ".manifest.json");

  ordered_json manifest;
  manifest["command"] = "optimize";
  manifest["env"] = a.env;
  manifest["env_hash"] = hex(env.hash);
  manifest["vis_params"] = vis_json(env.params);
  manifest["loss"] = a.loss;
  if (!patrol.empty()) manifest["patrol_nodes"] = patrol;
  if (a.loss == "reachability") manifest["horizon"] = a.horizon;
  manifest["optimizer"] = {{"mu", a.config.step_size},
                           {"steps", a.config.num_steps},
                           {"tau", a.config.perturbation_radius},
                           {"floor", a.config.floor},
                           {"stationary_tol", a.config.stationary_tol}};
  manifest["seeds"] = {{"optimizer", a.config.seed}};
  if (a.split_p) manifest["split"] = {{"p", *a.split_p}, {"lambda", a.lambda.value_or(1.0)}};
  if (!a.augment_paths.empty()) manifest["augment_paths"] = a.augment_paths;
  manifest["outputs"] = {{"distribution", out.filename().string()}, {"loss_trace", trace_path.filename().string()}};
  write_manifest(manifest_path, manifest);

  DistributionFile dist;
  dist.env_hash = env.hash;
  dist.seed = a.config.seed;
  dist.iterations = static_cast<std::uint64_t>(a.config.num_steps);
  std::vector<double> losses;
  std::vector<bool> improved;

  auto make_loss = [&](const VisibilityMap& m) {
    if (a.loss == "patrolling") return LossSpec::patrolling(m, patrol);
    if (a.loss == "reachability") return LossSpec::reachability(m);
    return LossSpec::coverage(m);
  };

  if (a.split_p) {
    SplitConfig split;
    split.fraction = *a.split_p;
    split.penalty.assign(base.edge_count(), a.lambda.value_or(1.0));
    auto result = split_optimize(base, make_loss(*map), a.config, split);
    dist.stationary = std::move(result.combined_stationary);
    dist.transitions = std::move(result.combined_transitions);
    dist.edges = std::move(result.combined);
    dist.loss = result.loss;
    losses = std::move(result.loss_trace);
    improved = std::move(result.improved);
  } else if (!a.augment_paths.empty()) {
    const auto paths = load_paths(a.augment_paths, base);
    const auto aug = augment_with_paths(base, *map, paths);
    auto result = boil_optimize(aug.augmented.graph, make_loss(aug.vis), a.config);
    EdgeDistribution edges = back_project(aug.augmented, result.edges);
    auto [pi, p] = decompose_edge_distribution(edges, base);
    dist.stationary = std::move(pi);
    dist.transitions = std::move(p);
    dist.edges = std::move(edges);
    dist.loss = make_loss(*map)(dist.edges);
    losses = std::move(result.loss_trace);
    improved = std::move(result.improved);
  } else {
    auto result = boil_optimize(base, make_loss(*map), a.config);
    dist.stationary = std::move(result.stationary);
    dist.transitions = std::move(result.transitions);
    dist.edges = std::move(result.edges);
    dist.loss = result.loss;
    losses = std::move(result.loss_trace);
    improved = std::move(result.improved);
  }

  save_distribution(dist, base, out);
  write_loss_trace_csv(trace_path, losses, improved);
  std::cout << "loss " << format_double(losses.front()) << " -> " << format_double(dist.loss) << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string config_file;
  std::string env;
  std::string strategy;
  int agents = 8;
  int steps = 100000;
  int runs = 10;
  std::optional<std::uint64_t> seed;
  std::string dist;
  double lambda = 10.0;
  std::string mode = "bernoulli";
  std::string placement;
  int jobs = 1;
  std::string out;
  VisOptions vis;
};

int run_simulate(const SimulateArgs& a, const CLI::App& cmd) {
  SimulationConfig config;
  const bool from_file = !a.config_file.empty();
  if (from_file) config = simulation_config_from_json(read_text(a.config_file));
  auto given = [&](const char* flag) { return !from_file || cmd.count(flag) > 0; };
  if (given("--strategy")) {
    if (a.strategy.empty()) throw ConfigError("--strategy is required");
    config.strategy.kind = parse_strategy(a.strategy);
  }
  if (given("--lambda")) config.strategy.lambda = a.lambda;
  if (given("--agents")) config.n_agents = a.agents;
  if (given("--steps")) config.steps = a.steps;
  if (given("--runs")) config.runs = a.runs;
  if (given("--jobs")) config.jobs = a.jobs;
  if (given("--seed")) {
    if (!a.seed) throw ConfigError("--seed is required");
    config.seed = *a.seed;
  }
  if (given("--mode")) {
    if (a.mode == "expected") {
      config.mode = VisibilityMode::Expected;
    } else if (a.mode == "bernoulli") {
      config.mode = VisibilityMode::Bernoulli;
    } else {
      throw ConfigError("unknown visibility mode '" + a.mode + "'");
    }
  }
  validate_strategy(config.strategy, !a.dist.empty());

  const Loaded env = load_env(a.env, a.vis);
  if (given("--placement")) {
    config.fixed_placement.clear();
    for (const auto& s : split_list(a.placement)) config.fixed_placement.push_back(parse_node(s, env.graph));
  }
  validate_simulation(config, env.graph, true);

  std::optional<TargetChain> target;
  if (!a.dist.empty()) {
    auto dist = load_distribution(a.dist, env.graph);
    if (dist.env_hash != env.hash) throw ValidationError("distribution was learned on a different environment");
    target.emplace(env.graph, std::move(dist.stationary), std::move(dist.transitions));
  }

  const fs::path out(a.out);
  ordered_json manifest;
  manifest["command"] = "simulate";
  manifest["env"] = fs::absolute(a.env).lexically_normal().string();
  manifest["env_hash"] = hex(env.hash);
  manifest["vis_params"] = vis_json(env.params);
  manifest["strategy"] = strategy_name(config.strategy.kind);
  manifest["lambda"] = config.strategy.lambda;
  manifest["agents"] = config.n_agents;
  manifest["steps"] = config.steps;
  manifest["runs"] = config.runs;
  manifest["mode"] = config.mode == VisibilityMode::Expected ? "expected" : "bernoulli";
  manifest["placement"] = config.fixed_placement.empty() ? ordered_json("uniform") : ordered_json(config.fixed_placement);
  if (!a.dist.empty()) manifest["dist"] = fs::absolute(a.dist).lexically_normal().string();
  manifest["seeds"] = {{"simulation", config.seed}};
  ordered_json outputs = ordered_json::array();
  for (int r = 0; r < config.runs; ++r) {
    const std::string stem = "run_" + std::to_string(r);
    outputs.push_back({{"steps", stem + "_steps.csv"}, {"nodes", stem + "_nodes.csv"}, {"markers", stem + "_markers.csv"}});
  }
  manifest["outputs"] = outputs;
  manifest["config"] = "sim.json";
  write_manifest(out / "manifest.json", manifest);
  write_text(out / "sim.json", simulation_config_to_json(config));

  const auto markers = marker_nodes(env.grid, env.graph);
  const auto traces = run_simulation(env.graph, env.vis, config, target ? &*target : nullptr, markers);
  for (int r = 0; r < config.runs; ++r) {
    const std::string stem = "run_" + std::to_string(r);
    const auto& t = traces[static_cast<std::size_t>(r)];
    write_trace_csv(out / (stem + "_steps.csv"), t, env.graph);
    write_node_summary_csv(out / (stem + "_nodes.csv"), t);
    write_marker_csv(out / (stem + "_markers.csv"), t);
  }
  std::cout << "wrote " << config.runs << " traces to " << out.string() << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// metrics

struct MetricsArgs {
  std::vector<std::string> traces;
  std::string dist;
  std::string report;
  std::string out;
  int bins = 50;
  double ratio = 1.1;
  VisOptions vis;
};

struct TraceSet {
  std::string strategy;
  std::vector<Trace> runs;
};

TraceSet load_trace_set(const fs::path& dir, const MovementGraph& graph, std::uint64_t env_hash) {
  const auto manifest = nlohmann::json::parse(read_text(dir / "manifest.json"));
  if (manifest.value("version", "") != "manifest/1" || manifest.value("command", "") != "simulate") {
    throw ValidationError(dir.string() + " does not hold simulation output");
  }
  if (manifest.at("env_hash").get<std::string>() != hex(env_hash)) {
    throw ValidationError(dir.string() + " was simulated on a different environment");
  }
  TraceSet set;
  set.strategy = manifest.at("strategy").get<std::string>();
  for (const auto& o : manifest.at("outputs")) {
    Trace t = read_trace(dir / o.at("steps").get<std::string>(), dir / o.at("nodes").get<std::string>(), graph);
    std::istringstream markers(read_text(dir / o.at("markers").get<std::string>()));
    std::string line;
    std::getline(markers, line);
    while (std::getline(markers, line)) {
      if (!line.empty()) t.marker_counts.push_back(std::stod(line.substr(line.find(',') + 1)));
    }
    set.runs.push_back(std::move(t));
  }
  return set;
}

int run_metrics(const MetricsArgs& a) {
  if (a.traces.empty()) throw ConfigError("--traces is required");
  const auto first = nlohmann::json::parse(read_text(fs::path(a.traces.front()) / "manifest.json"));
  const Loaded env = load_env(first.at("env").get<std::string>(), a.vis);

  std::vector<TraceSet> sets;
  for (const auto& dir : a.traces) sets.push_back(load_trace_set(dir, env.graph, env.hash));
  const fs::path out(a.out);

  std::ostringstream csv;
  if (a.report == "tv") {
    if (a.dist.empty()) throw ConfigError("the tv report needs --dist");
    const auto dist = load_distribution(a.dist, env.graph);
    csv << "step,tv,strategy,run\n";
    for (const auto& set : sets) {
      for (std::size_t r = 0; r < set.runs.size(); ++r) {
        const auto checkpoints = geometric_checkpoints(set.runs[r].steps, a.ratio);
        for (const auto& c : convergence_series(set.runs[r], dist.edges, checkpoints)) {
          csv << c.step << ',' << format_double(c.tv) << ',' << set.strategy << ',' << r << '\n';
        }
      }
    }
    write_text(out / "tv_series.csv", csv.str());
  } else if (a.report == "hist") {
    double hi = 0.0;
    for (const auto& set : sets) {
      for (const auto& t : set.runs) {
        for (double c : t.node_visibility_counts) hi = std::max(hi, c);
      }
    }
    csv << "strategy,bin_lo,bin_hi,mean,min,max\n";
    for (const auto& set : sets) {
      for (const auto& b : visibility_histogram(set.runs, a.bins, 0.0, hi > 0.0 ? hi : 1.0)) {
        csv << set.strategy << ',' << format_double(b.lo) << ',' << format_double(b.hi) << ','
            << format_double(b.mean) << ',' << format_double(b.min) << ',' << format_double(b.max) << '\n';
      }
    }
    write_text(out / "hist.csv", csv.str());
  } else if (a.report == "markers") {
    csv << "strategy,marker,mean,var\n";
    for (const auto& set : sets) {
      const auto stats = marker_summary(set.runs);
      for (std::size_t m = 0; m < stats.size(); ++m) {
        csv << set.strategy << ',' << m << ',' << format_double(stats[m].mean) << ','
            << format_double(stats[m].variance) << '\n';
      }
    }
    write_text(out / "markers.csv", csv.str());
  } else if (a.report == "bounds") {
    csv << "strategy,run,node,lower,observed,upper,cross,tested,violated\n";
    std::size_t violations = 0;
    for (const auto& set : sets) {
      for (std::size_t r = 0; r < set.runs.size(); ++r) {
        const auto report = theorem1_bound_report(set.runs[r], env.vis);
        violations += report.violations;
        for (const auto& row : report.rows) {
          csv << set.strategy << ',' << r << ',' << row.node << ',' << format_double(row.lower) << ','
              << format_double(row.observed) << ',' << format_double(row.upper) << ',' << format_double(row.cross)
              << ',' << (row.tested ? 1 : 0) << ',' << (row.violated ? 1 : 0) << '\n';
        }
      }
    }
    write_text(out / "bounds.csv", csv.str());
    std::cout << violations << " bound violations\n";
  } else {
    throw ConfigError("unknown report '" + a.report + "'");
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn and evaluate long-horizon multi-agent movement distributions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  auto* env_cmd = app.add_subcommand("env", "Generate or validate environments");
  env_cmd->require_subcommand(1);
  EnvGenerateArgs gen;
  auto* gen_cmd = env_cmd->add_subcommand("generate", "Write a procedurally generated environment");
  gen_cmd->add_option("--kind", gen.kind, "small (walled) or large (open terrain)");
  gen_cmd->add_option("--seed", gen.seed, "Generator seed")->required();
  gen_cmd->add_option("--width", gen.width, "Custom width");
  gen_cmd->add_option("--height", gen.height, "Custom height");
  gen_cmd->add_option("--out", gen.out, "Output file")->required();
  std::string validate_path;
  auto* val_cmd = env_cmd->add_subcommand("validate", "Check every environment invariant");
  val_cmd->add_option("path", validate_path, "Environment file")->required();

  OptimizeArgs opt;
  auto* opt_cmd = app.add_subcommand("optimize", "Learn a transition distribution");
  opt_cmd->add_option("--env", opt.env, "Environment file")->required();
  opt_cmd->add_option("--loss", opt.loss, "coverage, patrolling or reachability");
  opt_cmd->add_option("--patrol-nodes", opt.patrol_nodes, "Comma-separated node ids, or 'markers'");
  opt_cmd->add_option("--horizon", opt.horizon, "Reachability horizon for every node");
  opt_cmd->add_option("--mu", opt.config.step_size, "Step size");
  opt_cmd->add_option("--steps", opt.config.num_steps, "Number of iterations");
  opt_cmd->add_option("--tau", opt.config.perturbation_radius, "Perturbation radius");
  opt_cmd->add_option("--floor", opt.config.floor, "Projection floor");
  opt_cmd->add_option("--seed", opt.seed, "Random seed")->required();
  opt_cmd->add_option("--split-p", opt.split_p, "Optimise two time-split chains with this time share");
  opt_cmd->add_option("--lambda", opt.lambda, "Separation penalty for split chains");
  opt_cmd->add_option("--augment-paths", opt.augment_paths, "Walks to add as macro edges");
  opt_cmd->add_option("--out", opt.out, "Distribution file")->required();
  opt_cmd->add_option("--trace", opt.trace, "Loss trace CSV (default: <out>.trace.csv)");
  add_vis_options(opt_cmd, opt.vis);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run agents and record traces");
  sim_cmd->add_option("--config", sim.config_file, "Simulation config file; flags override it");
  sim_cmd->add_option("--env", sim.env, "Environment file")->required();
  sim_cmd->add_option("--strategy", sim.strategy,
                      "random, opt-random, frontier, sample, comm-frontier, comm-sample or optimal");
  sim_cmd->add_option("--agents", sim.agents, "Number of agents");
  sim_cmd->add_option("--steps", sim.steps, "Steps per run");
  sim_cmd->add_option("--runs", sim.runs, "Independent runs");
  sim_cmd->add_option("--seed", sim.seed, "Random seed");
  sim_cmd->add_option("--dist", sim.dist, "Learned distribution file");
  sim_cmd->add_option("--lambda", sim.lambda, "Frontier weight in the sampling proposal");
  sim_cmd->add_option("--mode", sim.mode, "bernoulli or expected visibility counting");
  sim_cmd->add_option("--placement", sim.placement, "Comma-separated start nodes, one per agent");
  sim_cmd->add_option("--jobs", sim.jobs, "Runs executed in parallel");
  sim_cmd->add_option("--out", sim.out, "Output directory")->required();
  add_vis_options(sim_cmd, sim.vis);

  MetricsArgs met;
  auto* met_cmd = app.add_subcommand("metrics", "Summarise simulation traces");
  met_cmd->add_option("--traces", met.traces, "Simulation output directory (repeatable)")->required();
  met_cmd->add_option("--dist", met.dist, "Learned distribution file");
  met_cmd->add_option("--report", met.report, "tv, hist, markers or bounds")->required();
  met_cmd->add_option("--out", met.out, "Output directory")->required();
  met_cmd->add_option("--bins", met.bins, "Histogram bins");
  met_cmd->add_option("--ratio", met.ratio, "Growth factor between tv checkpoints");
  add_vis_options(met_cmd, met.vis);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen_cmd) return run_env_generate(gen);
    if (*val_cmd) return run_env_validate(validate_path);
    if (*opt_cmd) return run_optimize(opt);
    if (*sim_cmd) return run_simulate(sim, *sim_cmd);
    if (*met_cmd) return run_metrics(met);
  } catch (const ConfigError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const NotConverged& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const NonFiniteLoss& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const ZeroMassNode& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return kInvalid;
  }
  return kUsage;
}
