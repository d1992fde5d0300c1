#include "etc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace etc {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError("config: " + path + ": " + msg);
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         std::initializer_list<const char*> allowed) {
  const std::set<std::string> known(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!known.count(key)) fail(path + "." + key, "unknown key");
  }
}

double get_number(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) fail(path, std::string("missing key '") + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

double get_number_or(const json& obj, const std::string& path, const char* key, double fallback) {
  return obj.contains(key) ? get_number(obj, path, key) : fallback;
}

Mat parse_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    fail(path, "expected a matrix (array of rows)");
  }
  const auto rows = j.size();
  const auto cols = j.front().size();
  Mat M(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) fail(path, "ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) fail(path, "matrix entries must be numbers");
      M(r, c) = j[r][c].get<double>();
    }
  }
  return M;
}

Vec parse_vector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a vector (array of numbers)");
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(path, "vector entries must be numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

KInfFunction parse_kinf(const json& j, const std::string& path) {
  require_object(j, path);
  if (!j.contains("kind")) fail(path, "missing key 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "linear") {
    reject_unknown_keys(j, path, {"kind", "c"});
    return KInfFunction::linear(get_number(j, path, "c"));
  }
  if (kind == "power") {
    reject_unknown_keys(j, path, {"kind", "c", "p"});
    return KInfFunction::power(get_number(j, path, "c"), get_number(j, path, "p"));
  }
  if (kind == "sum") {
    reject_unknown_keys(j, path, {"kind", "lhs", "rhs"});
    if (!j.contains("lhs") || !j.contains("rhs")) fail(path, "sum needs 'lhs' and 'rhs'");
    return KInfFunction::sum(parse_kinf(j.at("lhs"), path + ".lhs"),
                             parse_kinf(j.at("rhs"), path + ".rhs"));
  }
  fail(path + ".kind", "expected linear, power or sum");
}

json kinf_to_json(const KInfFunction& f) {
  switch (f.kind()) {
    case KInfFunction::Kind::Linear:
      return {{"kind", "linear"}, {"c", f.gain()}};
    case KInfFunction::Kind::Power:
      return {{"kind", "power"}, {"c", f.gain()}, {"p", f.exponent()}};
    case KInfFunction::Kind::Sum:
      return {{"kind", "sum"}, {"lhs", kinf_to_json(f.lhs())}, {"rhs", kinf_to_json(f.rhs())}};
  }
  return {};
}

json matrix_to_json(const Mat& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(row);
  }
  return rows;
}

void parse_plant(const json& doc, RunConfig& config) {
  if (!doc.contains("plant")) throw ConfigError("config: missing 'plant' section");
  const json& p = doc.at("plant");
  require_object(p, "plant");
  const std::string type = p.value("type", "linear");

  if (type == "linear") {
    reject_unknown_keys(p, "plant", {"type", "A", "B", "K", "P", "Q", "kappa"});
    for (const char* key : {"A", "B", "K", "P", "Q"}) {
      if (!p.contains(key)) fail("plant", std::string("missing matrix '") + key + "'");
    }
    std::optional<double> kappa;
    if (p.contains("kappa")) kappa = get_number(p, "plant", "kappa");
    try {
      config.linear = make_linear_plant(
          parse_matrix(p.at("A"), "plant.A"), parse_matrix(p.at("B"), "plant.B"),
          parse_matrix(p.at("K"), "plant.K"), parse_matrix(p.at("P"), "plant.P"),
          parse_matrix(p.at("Q"), "plant.Q"), kappa);
    } catch (const std::invalid_argument& ex) {
      fail("plant", ex.what());
    }
    config.model = loop_model(*config.linear);
    config.kappa = config.linear->kappa;
    return;
  }

  if (type == "scalar_cubic" || type == "scalar_linear") {
    reject_unknown_keys(p, "plant", {"type", "alpha", "gamma"});
    const double default_power = type == "scalar_cubic" ? 4.0 : 2.0;
    KInfFunction alpha = p.contains("alpha") ? parse_kinf(p.at("alpha"), "plant.alpha")
                                             : KInfFunction::power(2.0, default_power);
    KInfFunction gamma = p.contains("gamma") ? parse_kinf(p.at("gamma"), "plant.gamma")
                                             : KInfFunction::linear(1.0);
    config.nonlinear = type == "scalar_cubic" ? scalar_cubic_problem(alpha, gamma)
                                              : scalar_linear_problem(alpha, gamma);
    config.model = loop_model(*config.nonlinear);
    return;
  }
  fail("plant.type", "unknown plant type '" + type + "'");
}

Generator parse_generator(const json& g, const std::string& path, const RunConfig& config) {
  require_object(g, path);
  if (!g.contains("type")) fail(path, "missing key 'type'");
  const std::string type = g.at("type").get<std::string>();
  try {
    if (type == "static") {
      reject_unknown_keys(g, path, {"type", "sigma"});
      Generator gen = StaticGenerator{get_number(g, path, "sigma")};
      validate_generator(gen);
      return gen;
    }
    if (type == "dynamic") {
      reject_unknown_keys(g, path, {"type", "sigma", "theta", "lambda", "beta"});
      DynamicGenerator dyn;
      dyn.sigma = get_number(g, path, "sigma");
      dyn.theta = get_number_or(g, path, "theta", 0.0);
      if (g.contains("lambda") && g.contains("beta")) {
        fail(path, "give either 'lambda' or 'beta', not both");
      }
      if (g.contains("lambda")) {
        dyn.lambda = get_number(g, path, "lambda");
      } else if (g.contains("beta")) {
        dyn.beta = parse_kinf(g.at("beta"), path + ".beta");
      } else if (config.kappa) {
        dyn.lambda = (1.0 - dyn.sigma) * *config.kappa;
      } else {
        fail(path, "dynamic generator needs 'lambda' or 'beta' (no plant decay rate available)");
      }
      Generator gen = dyn;
      validate_generator(gen);
      return gen;
    }
  } catch (const std::invalid_argument& ex) {
    fail(path, ex.what());
  }
  fail(path + ".type", "expected static or dynamic");
}

void parse_generators(const json& doc, RunConfig& config) {
  if (doc.contains("generator")) {
    config.generators.push_back(parse_generator(doc.at("generator"), "generator", config));
  }
  if (doc.contains("generators")) {
    const json& list = doc.at("generators");
    if (!list.is_array()) fail("generators", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      std::ostringstream path;
      path << "generators[" << i << "]";
      config.generators.push_back(parse_generator(list[i], path.str(), config));
    }
  }
  if (doc.contains("grid")) {
    const json& grid = doc.at("grid");
    require_object(grid, "grid");
    reject_unknown_keys(grid, "grid", {"sigmas", "thetas", "static"});
    if (!grid.contains("sigmas") || !grid.contains("thetas")) {
      fail("grid", "needs 'sigmas' and 'thetas'");
    }
    const Vec sigmas = parse_vector(grid.at("sigmas"), "grid.sigmas");
    const Vec thetas = parse_vector(grid.at("thetas"), "grid.thetas");
    const bool with_static = grid.value("static", true);
    try {
      if (with_static) {
        for (Eigen::Index s = 0; s < sigmas.size(); ++s) {
          Generator gen = StaticGenerator{sigmas[s]};
          validate_generator(gen);
          config.generators.push_back(gen);
        }
      }
      for (Eigen::Index t = 0; t < thetas.size(); ++t) {
        for (Eigen::Index s = 0; s < sigmas.size(); ++s) {
          if (!config.kappa) fail("grid", "grid needs a plant decay rate for lambda");
          DynamicGenerator dyn;
          dyn.sigma = sigmas[s];
          dyn.theta = thetas[t];
          dyn.lambda = (1.0 - dyn.sigma) * *config.kappa;
          Generator gen = dyn;
          validate_generator(gen);
          config.generators.push_back(gen);
        }
      }
    } catch (const std::invalid_argument& ex) {
      fail("grid", ex.what());
    }
  }
}

void parse_initial(const json& doc, RunConfig& config) {
  if (!doc.contains("initial")) return;
  const json& init = doc.at("initial");
  require_object(init, "initial");
  reject_unknown_keys(init, "initial", {"circle", "states"});
  if (init.contains("circle")) {
    const json& c = init.at("circle");
    require_object(c, "initial.circle");
    reject_unknown_keys(c, "initial.circle", {"radius", "count"});
    if (config.model.dim != 2) fail("initial.circle", "circle spec requires state dimension 2");
    try {
      config.initial_conditions = circle_initial_conditions(
          get_number(c, "initial.circle", "radius"),
          static_cast<int>(get_number(c, "initial.circle", "count")));
    } catch (const std::invalid_argument& ex) {
      fail("initial.circle", ex.what());
    }
  }
  if (init.contains("states")) {
    const json& list = init.at("states");
    if (!list.is_array()) fail("initial.states", "expected an array of vectors");
    for (std::size_t i = 0; i < list.size(); ++i) {
      std::ostringstream path;
      path << "initial.states[" << i << "]";
      Vec x = parse_vector(list[i], path.str());
      if (x.size() != config.model.dim) fail(path.str(), "state dimension mismatch");
      config.initial_conditions.push_back(x);
    }
  }
}

void parse_sim(const json& doc, RunConfig& config) {
  if (!doc.contains("sim")) return;
  const json& s = doc.at("sim");
  require_object(s, "sim");
  reject_unknown_keys(s, "sim",
                      {"dt", "horizon", "event_tol", "max_events", "record_stride"});
  config.sim.dt = get_number_or(s, "sim", "dt", config.sim.dt);
  config.sim.horizon = get_number_or(s, "sim", "horizon", config.sim.horizon);
  config.sim.event_tol = get_number_or(s, "sim", "event_tol", config.sim.event_tol);
  config.sim.max_events =
      static_cast<long>(get_number_or(s, "sim", "max_events", double(config.sim.max_events)));
  config.sim.record_stride = static_cast<int>(
      get_number_or(s, "sim", "record_stride", double(config.sim.record_stride)));
  try {
    config.sim.validate();
  } catch (const std::invalid_argument& ex) {
    fail("sim", ex.what());
  }
}

void parse_check(const json& doc, RunConfig& config) {
  if (!doc.contains("check")) return;
  const json& c = doc.at("check");
  require_object(c, "check");
  reject_unknown_keys(c, "check",
                      {"seed", "prop1_samples", "prop1_eta_samples", "remark1_samples"});
  config.check.seed =
      static_cast<std::uint64_t>(get_number_or(c, "check", "seed", double(config.check.seed)));
  config.check.prop1_samples = static_cast<int>(
      get_number_or(c, "check", "prop1_samples", config.check.prop1_samples));
  config.check.prop1_eta_samples = static_cast<int>(
      get_number_or(c, "check", "prop1_eta_samples", config.check.prop1_eta_samples));
  config.check.remark1_samples = static_cast<int>(
      get_number_or(c, "check", "remark1_samples", config.check.remark1_samples));
}

}  // namespace

BatchSpec RunConfig::batch_spec() const {
  BatchSpec spec;
  spec.model = model;
  spec.kappa = kappa;
  spec.generators = generators;
  spec.initial_conditions = initial_conditions;
  spec.sim = sim;
  return spec;
}

RunConfig parse_run_config(const nlohmann::json& doc) {
  require_object(doc, "(root)");
  reject_unknown_keys(doc, "(root)",
                      {"plant", "generator", "generators", "grid", "initial", "sim",
                       "check", "output"});
  RunConfig config;
  parse_plant(doc, config);
  parse_generators(doc, config);
  parse_initial(doc, config);
  parse_sim(doc, config);
  parse_check(doc, config);
  if (doc.contains("output")) {
    if (!doc.at("output").is_string()) fail("output", "expected a string");
    config.output_dir = doc.at("output").get<std::string>();
  }
  config.raw = serialize_run_config(config);
  return config;
}

nlohmann::json read_config_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  try {
    return nlohmann::json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& ex) {
    // Map the byte offset back to a line/column anchor.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < ex.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << "config: " << path << ":" << line << ":" << col << ": " << ex.what();
    throw ConfigError(os.str());
  }
}

RunConfig load_run_config(const std::string& path) {
  return parse_run_config(read_config_json(path));
}

nlohmann::json serialize_run_config(const RunConfig& config) {
  json doc;
  if (config.linear) {
    doc["plant"] = {{"type", "linear"},
                    {"A", matrix_to_json(config.linear->A)},
                    {"B", matrix_to_json(config.linear->B)},
                    {"K", matrix_to_json(config.linear->K)},
                    {"P", matrix_to_json(config.linear->P)},
                    {"Q", matrix_to_json(config.linear->Q)},
                    {"kappa", config.linear->kappa}};
  } else if (config.nonlinear) {
    doc["plant"] = {{"type", config.nonlinear->name},
                    {"alpha", kinf_to_json(config.nonlinear->alpha)},
                    {"gamma", kinf_to_json(config.nonlinear->gamma)}};
  }
  json gens = json::array();
  for (const auto& gen : config.generators) {
    if (const auto* dyn = std::get_if<DynamicGenerator>(&gen)) {
      json g = {{"type", "dynamic"}, {"sigma", dyn->sigma}, {"theta", dyn->theta}};
      if (dyn->lambda) g["lambda"] = *dyn->lambda;
      if (dyn->beta) g["beta"] = kinf_to_json(*dyn->beta);
      gens.push_back(g);
    } else {
      gens.push_back({{"type", "static"}, {"sigma", generator_sigma(gen)}});
    }
  }
  doc["generators"] = gens;
  json states = json::array();
  for (const Vec& x : config.initial_conditions) {
    json v = json::array();
    for (Eigen::Index i = 0; i < x.size(); ++i) v.push_back(x[i]);
    states.push_back(v);
  }
  doc["initial"] = {{"states", states}};
  doc["sim"] = {{"dt", config.sim.dt},
                {"horizon", config.sim.horizon},
                {"event_tol", config.sim.event_tol},
                {"max_events", config.sim.max_events},
                {"record_stride", config.sim.record_stride}};
  doc["check"] = {{"seed", config.check.seed},
                  {"prop1_samples", config.check.prop1_samples},
                  {"prop1_eta_samples", config.check.prop1_eta_samples},
                  {"remark1_samples", config.check.remark1_samples}};
  doc["output"] = config.output_dir;
  return doc;
}

void apply_override(nlohmann::json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override: expected KEY=VALUE, got '" + assignment + "'");
  }
  std::string key = assignment.substr(0, eq);
  const std::string raw_value = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw_value);
  } catch (const nlohmann::json::parse_error&) {
    value = raw_value;  // bare strings are taken literally
  }

  static const std::set<std::string> generator_keys = {"sigma", "theta", "lambda"};
  static const std::set<std::string> sim_keys = {"dt", "horizon", "event_tol", "max_events",
                                                 "record_stride"};
  if (key.find('.') == std::string::npos) {
    if (generator_keys.count(key)) {
      bool applied = false;
      if (doc.contains("generator")) {
        doc["generator"][key] = value;
        applied = true;
      }
      if (doc.contains("generators")) {
        for (auto& g : doc["generators"]) g[key] = value;
        applied = true;
      }
      if (!applied) throw ConfigError("override: no generator block to apply '" + key + "' to");
      return;
    }
    if (sim_keys.count(key)) {
      doc["sim"][key] = value;
      return;
    }
    if (key == "seed") {
      doc["check"]["seed"] = value;
      return;
    }
    if (key == "output") {
      doc["output"] = value;
      return;
    }
  }
  // Dotted path from the root.
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    if (!node->contains(part)) {
      throw ConfigError("override: path '" + key.substr(0, dot) + "' not found");
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

}  // namespace etc
