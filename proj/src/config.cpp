#include "chemostat/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace chemostat {

using nlohmann::ordered_json;

namespace {

[[noreturn]] void schema_error(const std::string& key, const std::string& why) {
  throw Error(ErrorCode::SchemaError, "\"" + key + "\": " + why);
}

// Reads one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown.
class Fields {
public:
  Fields(const ordered_json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) schema_error(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const ordered_json& at(const std::string& key) {
    seen_.insert(key);
    if (!obj_.contains(key)) schema_error(key_path(key), "required key is missing");
    return obj_.at(key);
  }

  double number(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_number()) schema_error(key_path(key), "expected a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  std::uint64_t unsigned_integer(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_number_unsigned()) schema_error(key_path(key), "expected a nonnegative integer");
    return v.get<std::uint64_t>();
  }
  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    return has(key) ? unsigned_integer(key) : fallback;
  }

  std::string string(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_string()) schema_error(key_path(key), "expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) { return has(key) ? string(key) : fallback; }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = at(key);
    if (!v.is_boolean()) schema_error(key_path(key), "expected true or false");
    return v.get<bool>();
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) schema_error(key_path(key), "unknown key");
    }
  }

private:
  const ordered_json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

RegimeParams parse_regime(const ordered_json& j, const std::string& path) {
  Fields f(j, path);
  RegimeParams r;
  r.k_m = f.number("k_m");
  r.k_d = f.number("k_d");
  r.Y = f.number("Y");
  r.sigma1 = f.number("sigma1");
  r.sigma2 = f.number("sigma2");
  f.finish();
  return r;
}

ChemostatModel parse_model(const ordered_json& j) {
  Fields f(j, "model");
  ChemostatModel m;
  m.S0 = f.number("S0");
  m.theta = f.number("theta");
  m.K_S = f.number("K_S");
  m.R = f.number("R", 0.0);
  m.allow_degenerate_noise = f.boolean("degenerate_noise", false);
  const auto& regimes = f.at("regimes");
  if (!regimes.is_array()) schema_error("model.regimes", "expected an array");
  for (std::size_t i = 0; i < regimes.size(); ++i) {
    m.regimes.push_back(parse_regime(regimes[i], "model.regimes[" + std::to_string(i + 1) + "]"));
  }
  if (f.has("generator")) {
    const auto& g = f.at("generator");
    if (!g.is_array()) schema_error("model.generator", "expected an array of rows");
    std::vector<std::vector<double>> q;
    for (const auto& row : g) {
      if (!row.is_array()) schema_error("model.generator", "expected an array of rows");
      std::vector<double> values;
      for (const auto& v : row) {
        if (!v.is_number()) schema_error("model.generator", "entries must be numbers");
        values.push_back(v.get<double>());
      }
      q.push_back(std::move(values));
    }
    m.generator = SwitchingGenerator(std::move(q));
  } else if (m.regimes.size() != 1) {
    schema_error("model.generator", "required key is missing (more than one regime)");
  }
  f.finish();
  return m;
}

IntegratorConfig parse_integrator(const ordered_json* j, double default_dt) {
  IntegratorConfig c;
  c.dt = default_dt;
  if (j == nullptr) return c;
  Fields f(*j, "integrator");
  c.dt = f.number("dt", default_dt);
  c.positivity_floor = f.number("positivity_floor", c.positivity_floor);
  c.record_stride = f.unsigned_integer("record_stride", c.record_stride);
  const std::string scheme = f.string("scheme", "euler_maruyama_log_x");
  if (scheme != "euler_maruyama_log_x") schema_error("integrator.scheme", "unsupported scheme \"" + scheme + "\"");
  f.finish();
  return c;
}

SystemState parse_initial(Fields& parent, const std::string& key, const ChemostatModel& model) {
  SystemState s{0.0, model.S0, 1.0, 0};
  if (!parent.has(key)) return s;
  Fields f(parent.at(key), parent.key_path(key));
  s.s = f.number("s", s.s);
  s.x = f.number("x", s.x);
  const std::uint64_t regime = f.unsigned_integer("regime", 1);
  if (regime < 1 || regime > model.regime_count()) {
    schema_error(f.key_path("regime"), "must be between 1 and the number of regimes");
  }
  s.regime = static_cast<std::size_t>(regime - 1);
  f.finish();
  if (!(s.s >= 0.0) || !(s.x >= 0.0)) schema_error(parent.key_path(key), "s and x must be nonnegative");
  return s;
}

EnsembleBlock read_ensemble(Fields& f, EnsembleBlock defaults) {
  defaults.burn_in = f.number("burn_in", defaults.burn_in);
  defaults.horizon = f.number("horizon", defaults.horizon);
  defaults.replicas = f.unsigned_integer("replicas", defaults.replicas);
  defaults.batches = f.unsigned_integer("batches", defaults.batches);
  return defaults;
}

EnsembleBlock parse_ensemble(const ordered_json& j, const std::string& path) {
  Fields f(j, path);
  EnsembleBlock b = read_ensemble(f, {});
  f.finish();
  return b;
}

LambdaMethod parse_method(Fields& f) {
  const std::string m = f.string("method", "closed_form");
  if (m == "closed_form") return LambdaMethod::ClosedFormQuadrature;
  if (m == "monte_carlo") return LambdaMethod::ErgodicMC;
  schema_error(f.key_path("method"), "expected \"closed_form\" or \"monte_carlo\"");
}

std::string method_name(LambdaMethod m) {
  return m == LambdaMethod::ClosedFormQuadrature ? "closed_form" : "monte_carlo";
}

std::string choice_name(LambdaChoice c) {
  switch (c) {
    case LambdaChoice::ClosedForm: return "closed_form";
    case LambdaChoice::MonteCarlo: return "monte_carlo";
    case LambdaChoice::Both: return "both";
  }
  return "closed_form";
}

std::pair<double, double> parse_range(const ordered_json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    schema_error(path, "expected [lo, hi]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

ExperimentSettings parse_experiment(const std::string& name, const ordered_json& j, const ChemostatModel& model) {
  Fields f(j, name);
  if (name == "simulate") {
    SimulateSettings s;
    s.horizon = f.number("horizon");
    s.initial = parse_initial(f, "initial", model);
    f.finish();
    return s;
  }
  if (name == "lambda") {
    LambdaSettings s;
    const std::string m = f.string("method", "closed_form");
    if (m == "closed_form") {
      s.method = LambdaChoice::ClosedForm;
    } else if (m == "monte_carlo") {
      s.method = LambdaChoice::MonteCarlo;
    } else if (m == "both") {
      s.method = LambdaChoice::Both;
    } else {
      schema_error("lambda.method", "expected \"closed_form\", \"monte_carlo\" or \"both\"");
    }
    s.mc = read_ensemble(f, {});
    f.finish();
    return s;
  }
  if (name == "washout") {
    WashoutSettings s;
    s.theta_lo = f.number("theta_lo");
    s.theta_hi = f.number("theta_hi");
    s.method = parse_method(f);
    s.tol = f.number("tol", s.method == LambdaMethod::ErgodicMC ? 1e-2 : 1e-8);
    s.mc = read_ensemble(f, {});
    f.finish();
    return s;
  }
  if (name == "sweep") {
    SweepSettings s;
    const auto& grid = f.at("thetas");
    if (!grid.is_array() || grid.empty()) schema_error("sweep.thetas", "expected a non-empty array");
    for (const auto& v : grid) {
      if (!v.is_number()) schema_error("sweep.thetas", "entries must be numbers");
      s.thetas.push_back(v.get<double>());
    }
    s.method = parse_method(f);
    if (f.has("lambda_mc")) s.lambda_mc = parse_ensemble(f.at("lambda_mc"), "sweep.lambda_mc");
    if (f.has("es_star")) s.es_star = parse_ensemble(f.at("es_star"), "sweep.es_star");
    s.x0 = f.number("x0", s.x0);
    f.finish();
    return s;
  }
  if (name == "density") {
    DensitySettings s;
    s.horizon = f.number("horizon", s.horizon);
    s.burn_in = f.number("burn_in", s.burn_in);
    s.replicas = f.unsigned_integer("replicas", s.replicas);
    s.bins.s_bins = f.unsigned_integer("s_bins", s.bins.s_bins);
    s.bins.x_bins = f.unsigned_integer("x_bins", s.bins.x_bins);
    if (f.has("s_range")) s.bins.s_range = parse_range(f.at("s_range"), "density.s_range");
    if (f.has("x_range")) s.bins.x_range = parse_range(f.at("x_range"), "density.x_range");
    s.initial = parse_initial(f, "initial", model);
    f.finish();
    return s;
  }
  schema_error("experiment", "unknown experiment \"" + name + "\"");
}

ordered_json ensemble_json(const EnsembleBlock& b) {
  ordered_json j;
  j["burn_in"] = b.burn_in;
  j["horizon"] = b.horizon;
  j["replicas"] = b.replicas;
  j["batches"] = b.batches;
  return j;
}

ordered_json initial_json(const SystemState& s) {
  ordered_json j;
  j["s"] = s.s;
  j["x"] = s.x;
  j["regime"] = s.regime + 1;
  return j;
}

const char* const kExperiments[] = {"simulate", "lambda", "washout", "sweep", "density"};

}  // namespace

MonteCarloSettings EnsembleBlock::to_settings(const IntegratorConfig& integrator) const {
  MonteCarloSettings s;
  s.integrator = integrator;
  s.burn_in = burn_in;
  s.horizon = horizon;
  s.replicas = replicas;
  s.batches = batches;
  return s;
}

std::string_view experiment_name(const ExperimentSettings& settings) { return kExperiments[settings.index()]; }

std::string_view RunConfig::experiment_name() const { return chemostat::experiment_name(experiment); }

RunConfig parse_config(std::string_view text) {
  ordered_json root;
  try {
    root = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte);
    std::ostringstream msg;
    msg << "line " << line << ", column " << column << ": " << e.what();
    throw Error(ErrorCode::SyntaxError, msg.str());
  }

  Fields f(root, "");
  RunConfig config;
  const std::string experiment = f.string("experiment");
  bool known = false;
  for (const char* name : kExperiments) known = known || experiment == name;
  if (!known) schema_error("experiment", "unknown experiment \"" + experiment + "\"");

  config.model = parse_model(f.at("model"));
  require_valid(config.model);

  const bool trajectory_like = experiment == "simulate" || experiment == "density";
  const double default_dt = trajectory_like ? kTrajectoryDt : kLambdaDt;
  config.integrator = parse_integrator(f.has("integrator") ? &f.at("integrator") : nullptr, default_dt);
  config.experiment = parse_experiment(experiment, f.at(experiment), config.model);
  config.seed = f.unsigned_integer("seed", 0);
  config.output_dir = f.string("output_dir", "out");
  f.finish();
  (void)check_integrator(config.integrator, config.model);
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& config) {
  ordered_json root;
  const std::string name(config.experiment_name());
  root["experiment"] = name;
  root["seed"] = config.seed;
  root["output_dir"] = config.output_dir;

  const auto& m = config.model;
  ordered_json model;
  model["S0"] = m.S0;
  model["theta"] = m.theta;
  model["K_S"] = m.K_S;
  model["R"] = m.R;
  model["degenerate_noise"] = m.allow_degenerate_noise;
  model["regimes"] = ordered_json::array();
  for (const auto& r : m.regimes) {
    ordered_json rj;
    rj["k_m"] = r.k_m;
    rj["k_d"] = r.k_d;
    rj["Y"] = r.Y;
    rj["sigma1"] = r.sigma1;
    rj["sigma2"] = r.sigma2;
    model["regimes"].push_back(rj);
  }
  if (!m.generator.is_constant()) {
    throw Error(ErrorCode::SchemaError, "state-dependent generators cannot be serialized");
  }
  model["generator"] = m.generator.matrix();
  root["model"] = model;

  ordered_json integrator;
  integrator["dt"] = config.integrator.dt;
  integrator["positivity_floor"] = config.integrator.positivity_floor;
  integrator["record_stride"] = config.integrator.record_stride;
  integrator["scheme"] = "euler_maruyama_log_x";
  root["integrator"] = integrator;

  ordered_json exp;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SimulateSettings>) {
          exp["horizon"] = s.horizon;
          exp["initial"] = initial_json(s.initial);
        } else if constexpr (std::is_same_v<T, LambdaSettings>) {
          exp = ensemble_json(s.mc);
          exp["method"] = choice_name(s.method);
        } else if constexpr (std::is_same_v<T, WashoutSettings>) {
          exp = ensemble_json(s.mc);
          exp["theta_lo"] = s.theta_lo;
          exp["theta_hi"] = s.theta_hi;
          exp["tol"] = s.tol;
          exp["method"] = method_name(s.method);
        } else if constexpr (std::is_same_v<T, SweepSettings>) {
          exp["thetas"] = s.thetas;
          exp["method"] = method_name(s.method);
          exp["lambda_mc"] = ensemble_json(s.lambda_mc);
          exp["es_star"] = ensemble_json(s.es_star);
          exp["x0"] = s.x0;
        } else {
          exp["horizon"] = s.horizon;
          exp["burn_in"] = s.burn_in;
          exp["replicas"] = s.replicas;
          exp["s_bins"] = s.bins.s_bins;
          exp["x_bins"] = s.bins.x_bins;
          if (s.bins.s_range) exp["s_range"] = {s.bins.s_range->first, s.bins.s_range->second};
          if (s.bins.x_range) exp["x_range"] = {s.bins.x_range->first, s.bins.x_range->second};
          exp["initial"] = initial_json(s.initial);
        }
      },
      config.experiment);
  root[name] = exp;
  return root.dump(2) + "\n";
}

}  // namespace chemostat
