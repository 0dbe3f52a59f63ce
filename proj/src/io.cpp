#include "boil/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "boil/errors.hpp"

namespace boil {

using nlohmann::json;

namespace {

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 0;
    for (std::size_t i = 0; i < text.size() && i + 1 < e.byte; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 0;
      } else {
        ++col;
      }
    }
    throw ParseError(std::string("malformed ") + what, line, col);
  }
}

void require_version(const json& doc, const char* expected) {
  if (!doc.is_object() || !doc.contains("version") || doc["version"] != expected) {
    throw ValidationError(std::string("expected a \"") + expected + "\" document");
  }
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc()) throw ValidationError("bad number '" + s + "'");
  return v;
}

long long to_int(const std::string& s) {
  long long v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc()) throw ValidationError("bad integer '" + s + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

std::string distribution_to_json(const DistributionFile& dist, const MovementGraph& graph) {
  if (dist.transitions.size() != graph.edge_count() || dist.edges.size() != graph.edge_count() ||
      dist.stationary.size() != graph.node_count()) {
    throw DimensionMismatch("distribution does not match graph");
  }
  // One edge per line keeps the file diffable.
  std::ostringstream out;
  out << "{\n  \"version\": \"dist/1\",\n  \"meta\": {\"loss\": " << format_double(dist.loss)
      << ", \"iterations\": " << dist.iterations << ", \"seed\": " << dist.seed << ", \"env_hash\": \""
      << hex(dist.env_hash) << "\"},\n  \"pi\": [";
  for (std::size_t u = 0; u < dist.stationary.size(); ++u) {
    out << (u ? ", " : "") << format_double(dist.stationary[u]);
  }
  out << "],\n  \"edges\": [\n";
  for (EdgeId e = 0; e < graph.edge_count(); ++e) {
    const auto& edge = graph.edge(e);
    out << "    {\"src\": " << edge.src << ", \"dst\": " << edge.dst
        << ", \"p_transition\": " << format_double(dist.transitions[e])
        << ", \"p_edge\": " << format_double(dist.edges[e]) << "}" << (e + 1 < graph.edge_count() ? ",\n" : "\n");
  }
  out << "  ]\n}\n";
  return out.str();
}

DistributionFile distribution_from_json(const std::string& text, const MovementGraph& graph) {
  const json doc = parse_json(text, "distribution file");
  require_version(doc, "dist/1");
  DistributionFile dist;
  try {
    const auto& meta = doc.at("meta");
    dist.env_hash = std::stoull(meta.at("env_hash").get<std::string>(), nullptr, 16);
    dist.loss = meta.at("loss").get<double>();
    dist.iterations = meta.at("iterations").get<std::uint64_t>();
    dist.seed = meta.at("seed").get<std::uint64_t>();
    const auto& pi = doc.at("pi");
    const auto& edges = doc.at("edges");
    if (pi.size() != graph.node_count() || edges.size() != graph.edge_count()) {
      throw ValidationError("distribution has " + std::to_string(edges.size()) + " edges, graph has " +
                            std::to_string(graph.edge_count()));
    }
    dist.stationary = StationaryDist(pi.get<std::vector<double>>());
    dist.transitions = TransitionVector(graph.edge_count());
    dist.edges = EdgeDistribution(graph.edge_count());
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
      const auto& row = edges[e];
      if (row.at("src").get<NodeId>() != graph.edge(e).src || row.at("dst").get<NodeId>() != graph.edge(e).dst) {
        throw ValidationError("edge " + std::to_string(e) + " does not match graph");
      }
      dist.transitions[e] = row.at("p_transition").get<double>();
      dist.edges[e] = row.at("p_edge").get<double>();
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad distribution file: ") + e.what());
  } catch (const std::logic_error& e) {
    throw ValidationError(std::string("bad distribution file: ") + e.what());
  }
  return dist;
}

void save_distribution(const DistributionFile& dist, const MovementGraph& graph, const std::filesystem::path& path) {
  write_text(path, distribution_to_json(dist, graph));
}

DistributionFile load_distribution(const std::filesystem::path& path, const MovementGraph& graph) {
  return distribution_from_json(read_text(path), graph);
}

std::string simulation_config_to_json(const SimulationConfig& config) {
  nlohmann::ordered_json doc;
  doc["version"] = "sim/1";
  doc["agents"] = config.n_agents;
  doc["steps"] = config.steps;
  doc["runs"] = config.runs;
  doc["seed"] = config.seed;
  doc["strategy"] = strategy_name(config.strategy.kind);
  doc["lambda"] = config.strategy.lambda;
  doc["mode"] = config.mode == VisibilityMode::Expected ? "expected" : "bernoulli";
  if (config.fixed_placement.empty()) {
    doc["placement"] = "uniform";
  } else {
    doc["placement"] = config.fixed_placement;
  }
  doc["jobs"] = config.jobs;
  return doc.dump(2) + "\n";
}

SimulationConfig simulation_config_from_json(const std::string& text) {
  const json doc = parse_json(text, "simulation config");
  require_version(doc, "sim/1");
  SimulationConfig config;
  try {
    config.n_agents = doc.value("agents", config.n_agents);
    config.steps = doc.value("steps", config.steps);
    config.runs = doc.value("runs", config.runs);
    config.seed = doc.value("seed", config.seed);
    config.jobs = doc.value("jobs", config.jobs);
    if (doc.contains("strategy")) config.strategy.kind = parse_strategy(doc["strategy"].get<std::string>());
    config.strategy.lambda = doc.value("lambda", config.strategy.lambda);
    const std::string mode = doc.value("mode", std::string("bernoulli"));
    if (mode == "expected") {
      config.mode = VisibilityMode::Expected;
    } else if (mode != "bernoulli") {
      throw ValidationError("unknown visibility mode '" + mode + "'");
    }
    if (doc.contains("placement") && doc["placement"].is_array()) {
      config.fixed_placement = doc["placement"].get<std::vector<NodeId>>();
    } else if (doc.contains("placement") && doc["placement"] != "uniform") {
      throw ValidationError("placement must be \"uniform\" or a list of nodes");
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad simulation config: ") + e.what());
  }
  return config;
}

std::vector<std::vector<NodeId>> load_paths(const std::filesystem::path& path, const MovementGraph& graph) {
  const json doc = parse_json(read_text(path), "paths file");
  require_version(doc, "paths/1");
  if (!graph.has_cells()) throw ValidationError("paths need a grid-backed graph");
  std::vector<std::vector<NodeId>> out;
  try {
    for (const auto& walk : doc.at("paths")) {
      std::vector<NodeId> nodes;
      for (const auto& cell : walk) {
        const int row = cell.at(0).get<int>();
        const int col = cell.at(1).get<int>();
        if (row < 0 || col < 0 || row >= graph.grid_height() || col >= graph.grid_width()) {
          throw ValidationError("path cell out of range");
        }
        const auto u = graph.node_of_cell(row * graph.grid_width() + col);
        if (!u) throw ValidationError("path crosses a wall");
        nodes.push_back(*u);
      }
      out.push_back(std::move(nodes));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad paths file: ") + e.what());
  }
  return out;
}

void write_loss_trace_csv(const std::filesystem::path& path, const std::vector<double>& losses,
                          const std::vector<bool>& improved) {
  std::ostringstream out;
  out << "iteration,loss,accepted_best\n";
  for (std::size_t k = 0; k < losses.size(); ++k) {
    out << k << ',' << format_double(losses[k]) << ',' << (improved[k] ? 1 : 0) << '\n';
  }
  write_text(path, out.str());
}

void write_trace_csv(const std::filesystem::path& path, const Trace& trace, const MovementGraph& graph) {
  std::string text = "step,agent,edge_src,edge_dst\n";
  text.reserve(trace.edge_sequence.size() * 20);
  const std::size_t agents = static_cast<std::size_t>(trace.n_agents);
  auto label = [&](NodeId u) { return graph.has_cells() ? graph.cell_of(u) : static_cast<int>(u); };
  for (std::size_t k = 0; k < trace.edge_sequence.size(); ++k) {
    const auto& edge = graph.edge(trace.edge_sequence[k]);
    text += std::to_string(k / agents);
    text += ',';
    text += std::to_string(k % agents);
    text += ',';
    text += std::to_string(label(edge.src));
    text += ',';
    text += std::to_string(label(edge.dst));
    text += '\n';
  }
  write_text(path, text);
}

void write_node_summary_csv(const std::filesystem::path& path, const Trace& trace) {
  std::ostringstream out;
  out << "node,visibility_count,expected_count,variance,pair_count";
  for (int i = 0; i < trace.n_agents; ++i) out << ",agent_" << i;
  out << '\n';
  for (std::size_t w = 0; w < trace.node_visibility_counts.size(); ++w) {
    out << w << ',' << format_double(trace.node_visibility_counts[w]) << ','
        << format_double(trace.expected_visibility_counts[w]) << ',' << format_double(trace.visibility_variance[w])
        << ',' << format_double(trace.pair_visibility_counts[w]);
    for (const auto& a : trace.per_agent_visibility_counts) out << ',' << format_double(a[w]);
    out << '\n';
  }
  write_text(path, out.str());
}

void write_marker_csv(const std::filesystem::path& path, const Trace& trace) {
  std::ostringstream out;
  out << "marker,count\n";
  for (std::size_t m = 0; m < trace.marker_counts.size(); ++m) {
    out << m << ',' << format_double(trace.marker_counts[m]) << '\n';
  }
  write_text(path, out.str());
}

Trace read_trace(const std::filesystem::path& steps_csv, const std::filesystem::path& nodes_csv,
                 const MovementGraph& graph) {
  Trace trace;
  std::istringstream steps(read_text(steps_csv));
  std::string line;
  std::getline(steps, line);
  if (line != "step,agent,edge_src,edge_dst") throw ValidationError("unexpected header in " + steps_csv.string());
  trace.edge_counts.assign(graph.edge_count(), 0);
  long long max_step = -1;
  long long max_agent = -1;
  auto node = [&](long long label) -> NodeId {
    if (!graph.has_cells()) return static_cast<NodeId>(label);
    const auto u = graph.node_of_cell(static_cast<int>(label));
    if (!u) throw ValidationError("trace refers to a wall cell");
    return *u;
  };
  while (std::getline(steps, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 4) throw ValidationError("bad trace row '" + line + "'");
    max_step = std::max(max_step, to_int(cells[0]));
    max_agent = std::max(max_agent, to_int(cells[1]));
    const auto e = graph.find_edge(node(to_int(cells[2])), node(to_int(cells[3])));
    if (!e) throw ValidationError("trace uses an unknown edge");
    trace.edge_sequence.push_back(*e);
    ++trace.edge_counts[*e];
  }
  trace.steps = static_cast<int>(max_step + 1);
  trace.n_agents = static_cast<int>(max_agent + 1);
  if (static_cast<std::size_t>(trace.steps) * static_cast<std::size_t>(trace.n_agents) !=
      trace.edge_sequence.size()) {
    throw ValidationError("trace is not rectangular");
  }
  for (int i = 0; i < trace.n_agents; ++i) {
    trace.start_nodes.push_back(graph.edge(trace.edge_sequence[static_cast<std::size_t>(i)]).src);
  }

  std::istringstream nodes(read_text(nodes_csv));
  std::getline(nodes, line);
  const std::size_t n = graph.node_count();
  trace.node_visibility_counts.assign(n, 0.0);
  trace.expected_visibility_counts.assign(n, 0.0);
  trace.visibility_variance.assign(n, 0.0);
  trace.pair_visibility_counts.assign(n, 0.0);
  trace.per_agent_visibility_counts.assign(static_cast<std::size_t>(trace.n_agents), std::vector<double>(n, 0.0));
  while (std::getline(nodes, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 5 + static_cast<std::size_t>(trace.n_agents)) {
      throw ValidationError("bad node summary row '" + line + "'");
    }
    const auto w = static_cast<std::size_t>(to_int(cells[0]));
    if (w >= n) throw ValidationError("node summary refers to an unknown node");
    trace.node_visibility_counts[w] = to_double(cells[1]);
    trace.expected_visibility_counts[w] = to_double(cells[2]);
    trace.visibility_variance[w] = to_double(cells[3]);
    trace.pair_visibility_counts[w] = to_double(cells[4]);
    for (int i = 0; i < trace.n_agents; ++i) {
      trace.per_agent_visibility_counts[static_cast<std::size_t>(i)][w] = to_double(cells[5 + i]);
    }
  }
  return trace;
}

}  // namespace boil
