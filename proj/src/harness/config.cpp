#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dlsq/harness.hpp"

namespace dlsq {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ValidationError("config: " + path + ": " + msg);
}

const json& get(const json& j, const std::string& path, const char* key) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing");
  return *it;
}

const json* get_opt(const json& j, const char* key) {
  if (!j.is_object()) return nullptr;
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

Eigen::VectorXd as_vector(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v(i) = as_number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

Eigen::MatrixXd as_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) fail(path + "[0]", "expected a non-empty row");
  Eigen::MatrixXd m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols) fail(rp, "ragged row");
    for (std::size_t c = 0; c < cols; ++c)
      m(r, c) = as_number(j[r][c], rp + "[" + std::to_string(c) + "]");
  }
  return m;
}

// "src dst weight" (1-indexed) or [src, dst, weight]
Digraph::Edge parse_edge(const json& j, const std::string& path) {
  Digraph::Edge e;
  double src = 0, dst = 0, w = 1.0;
  if (j.is_string()) {
    std::istringstream in(j.get<std::string>());
    if (!(in >> src >> dst)) fail(path, "expected 'src dst [weight]'");
    if (!(in >> w)) w = 1.0;
  } else if (j.is_array() && (j.size() == 2 || j.size() == 3)) {
    src = as_number(j[0], path + "[0]");
    dst = as_number(j[1], path + "[1]");
    w = j.size() == 3 ? as_number(j[2], path + "[2]") : 1.0;
  } else {
    fail(path, "expected \"src dst weight\" or [src, dst, weight]");
  }
  e.src = static_cast<int>(src) - 1;  // nodes are 1-indexed in configs
  e.dst = static_cast<int>(dst) - 1;
  e.weight = w;
  return e;
}

SolverCore parse_core(const json& j, const std::string& path) {
  const std::string s = j.is_string() ? j.get<std::string>() : "";
  if (s == "exact") return SolverCore::Exact;
  if (s == "undirected") return SolverCore::Undirected;
  fail(path, "expected \"exact\" or \"undirected\"");
}

CompensatorMode parse_mode(const json& j, const std::string& path) {
  const std::string s = j.is_string() ? j.get<std::string>() : "";
  if (s == "none") return CompensatorMode::None;
  if (s == "known_freq") return CompensatorMode::KnownFreq;
  if (s == "adaptive") return CompensatorMode::Adaptive;
  if (s == "washout") return CompensatorMode::Washout;
  fail(path, "expected one of none|known_freq|adaptive|washout");
}

}  // namespace

Digraph ScenarioConfig::build_graph() const {
  if (adjacency.size() > 0) return Digraph(adjacency);
  return Digraph::from_edges(graph_nodes, edges);
}

LsqProblem ScenarioConfig::build_problem() const { return LsqProblem(H, z); }

DisturbanceSpec ScenarioConfig::build_disturbance() const { return DisturbanceSpec(disturbance); }

ScenarioConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }

  ScenarioConfig cfg;
  if (const json* name = get_opt(root, "name")) cfg.name = name->get<std::string>();
  if (const json* desc = get_opt(root, "description")) cfg.description = desc->get<std::string>();

  const json& prob = get(root, "", "problem");
  cfg.H = as_matrix(get(prob, "problem", "H"), "problem.H");
  cfg.z = as_vector(get(prob, "problem", "z"), "problem.z");

  const json& graph = get(root, "", "graph");
  if (const json* adj = get_opt(graph, "adjacency")) {
    cfg.adjacency = as_matrix(*adj, "graph.adjacency");
    cfg.graph_nodes = static_cast<int>(cfg.adjacency.rows());
  } else {
    cfg.graph_nodes = static_cast<int>(as_number(get(graph, "graph", "nodes"), "graph.nodes"));
    const json& edges = get(graph, "graph", "edges");
    if (!edges.is_array()) fail("graph.edges", "expected an array");
    for (std::size_t i = 0; i < edges.size(); ++i)
      cfg.edges.push_back(parse_edge(edges[i], "graph.edges[" + std::to_string(i) + "]"));
  }

  if (const json* dist = get_opt(root, "disturbance")) {
    if (!dist->is_array()) fail("disturbance", "expected an array (one entry per node)");
    for (std::size_t i = 0; i < dist->size(); ++i) {
      const std::string np = "disturbance[" + std::to_string(i) + "]";
      const json& node = (*dist)[i];
      if (!node.is_array()) fail(np, "expected an array of [amplitude, frequency, phase]");
      std::vector<Sinusoid> sins;
      for (std::size_t s = 0; s < node.size(); ++s) {
        const std::string sp = np + "[" + std::to_string(s) + "]";
        const json& tri = node[s];
        if (!tri.is_array() || tri.size() != 3) fail(sp, "expected [amplitude, frequency, phase]");
        sins.push_back({as_number(tri[0], sp + "[0]"), as_number(tri[1], sp + "[1]"),
                        as_number(tri[2], sp + "[2]")});
      }
      cfg.disturbance.push_back(std::move(sins));
    }
  }

  if (const json* solver = get_opt(root, "solver")) {
    if (const json* core = get_opt(*solver, "core")) cfg.core = parse_core(*core, "solver.core");
    if (const json* k1 = get_opt(*solver, "kappa1"))
      cfg.gains.kappa1 = as_number(*k1, "solver.kappa1");
    if (const json* k2 = get_opt(*solver, "kappa2"))
      cfg.gains.kappa2 = as_number(*k2, "solver.kappa2");
  }

  if (const json* comp = get_opt(root, "compensator")) {
    cfg.compensator.mode = parse_mode(get(*comp, "compensator", "mode"), "compensator.mode");
    if (const json* gains = get_opt(*comp, "observer_gains")) {
      if (!gains->is_array()) fail("compensator.observer_gains", "expected an array per node");
      for (std::size_t i = 0; i < gains->size(); ++i)
        cfg.compensator.observer_gains.push_back(
            as_vector((*gains)[i], "compensator.observer_gains[" + std::to_string(i) + "]"));
    }
    if (const json* coeffs = get_opt(*comp, "filter_coeffs")) {
      if (coeffs->is_array() && !coeffs->empty() && (*coeffs)[0].is_array()) {
        for (std::size_t i = 0; i < coeffs->size(); ++i)
          cfg.compensator.filter_coeffs_per_node.push_back(
              as_vector((*coeffs)[i], "compensator.filter_coeffs[" + std::to_string(i) + "]"));
      } else {
        cfg.compensator.filter_coeffs = as_vector(*coeffs, "compensator.filter_coeffs");
      }
    }
    if (const json* lr = get_opt(*comp, "learning_rate")) {
      if (lr->is_array()) {
        const Eigen::VectorXd v = as_vector(*lr, "compensator.learning_rate");
        cfg.compensator.learning_rates.assign(v.data(), v.data() + v.size());
      } else {
        cfg.compensator.learning_rates = {as_number(*lr, "compensator.learning_rate")};
      }
    }
    if (const json* nu = get_opt(*comp, "normalization_weight"))
      cfg.compensator.normalization_weight = as_number(*nu, "compensator.normalization_weight");
    if (const json* a0 = get_opt(*comp, "alpha_hat_init")) {
      if (a0->is_array()) {
        for (std::size_t i = 0; i < a0->size(); ++i)
          cfg.compensator.alpha_hat_init.push_back(
              as_vector((*a0)[i], "compensator.alpha_hat_init[" + std::to_string(i) + "]"));
      } else if (as_number(*a0, "compensator.alpha_hat_init") != 0.0) {
        fail("compensator.alpha_hat_init", "scalar form must be 0 (default)");
      }
    }
    if (const json* stride = get_opt(*comp, "sylvester_stride"))
      cfg.compensator.sylvester_stride =
          static_cast<int>(as_number(*stride, "compensator.sylvester_stride"));
    if (const json* gate = get_opt(*comp, "conditioning_gate"))
      cfg.compensator.conditioning_gate = as_number(*gate, "compensator.conditioning_gate");
    if (const json* pole = get_opt(*comp, "washout_pole"))
      cfg.compensator.washout_pole = as_number(*pole, "compensator.washout_pole");
    if (const json* sched = get_opt(*comp, "toggle_schedule")) {
      if (!sched->is_array()) fail("compensator.toggle_schedule", "expected an array");
      for (std::size_t i = 0; i < sched->size(); ++i) {
        const std::string sp = "compensator.toggle_schedule[" + std::to_string(i) + "]";
        const json& ev = (*sched)[i];
        if (!ev.is_array() || ev.size() != 2) fail(sp, "expected [time, \"on\"|\"off\"]");
        ToggleEvent te;
        te.time = as_number(ev[0], sp + "[0]");
        const std::string onoff = ev[1].is_string() ? ev[1].get<std::string>() : "";
        if (onoff == "on")
          te.on = true;
        else if (onoff == "off")
          te.on = false;
        else
          fail(sp + "[1]", "expected \"on\" or \"off\"");
        cfg.compensator.schedule.push_back(te);
      }
    }
  }

  if (const json* noise = get_opt(root, "noise")) {
    if (const json* s = get_opt(*noise, "sigma")) cfg.noise.sigma = as_number(*s, "noise.sigma");
    if (const json* h = get_opt(*noise, "hold_dt"))
      cfg.noise.hold_dt = as_number(*h, "noise.hold_dt");
  }

  const json& sim = get(root, "", "sim");
  cfg.sim.t_end = as_number(get(sim, "sim", "t_end"), "sim.t_end");
  if (const json* dt = get_opt(sim, "dt")) cfg.sim.dt = as_number(*dt, "sim.dt");
  if (const json* dec = get_opt(sim, "decimation"))
    cfg.sim.decimation = static_cast<int>(as_number(*dec, "sim.decimation"));
  if (const json* seed = get_opt(sim, "seed"))
    cfg.sim.seed = static_cast<std::uint64_t>(as_number(*seed, "sim.seed"));
  if (const json* range = get_opt(sim, "init_range"))
    cfg.sim.init_range = as_number(*range, "sim.init_range");
  if (const json* ws = get_opt(sim, "energy_window_start"))
    cfg.sim.energy_window_start = as_number(*ws, "sim.energy_window_start");

  // structural validation that does not need the heavy constructors
  if (!(cfg.sim.dt > 0.0)) fail("sim.dt", "must be positive");
  if (!(cfg.sim.t_end > 0.0)) fail("sim.t_end", "must be positive");
  if (cfg.sim.decimation < 1) fail("sim.decimation", "must be >= 1");
  if (cfg.noise.sigma < 0.0) fail("noise.sigma", "must be nonnegative");
  if (!(cfg.noise.hold_dt > 0.0)) fail("noise.hold_dt", "must be positive");
  if (cfg.graph_nodes < 2) fail("graph", "need at least 2 nodes");
  if (cfg.H.rows() != cfg.graph_nodes)
    fail("problem.H", "row count (" + std::to_string(cfg.H.rows()) +
                          ") must match the node count (" + std::to_string(cfg.graph_nodes) + ")");
  if (!cfg.disturbance.empty() && static_cast<int>(cfg.disturbance.size()) != cfg.graph_nodes)
    fail("disturbance", "entry count must match the node count");
  for (const auto& e : cfg.edges)
    if (e.src < 0 || e.src >= cfg.graph_nodes || e.dst < 0 || e.dst >= cfg.graph_nodes)
      fail("graph.edges", "node index out of range (nodes are 1-indexed)");
  if (cfg.sim.energy_window_start < 0.0 || cfg.sim.energy_window_start >= cfg.sim.t_end)
    fail("sim.energy_window_start", "must lie in [0, t_end)");
  if (cfg.core == SolverCore::Undirected &&
      (cfg.gains.kappa1 != 1.0 || cfg.gains.kappa2 != 1.0))
    fail("solver", "the undirected core fixes kappa1 = kappa2 = 1");
  return cfg;
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  ScenarioConfig cfg = parse_config(buf.str());
  if (cfg.name.empty()) cfg.name = path;
  return cfg;
}

}  // namespace dlsq
