#include "chemostat/run.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "chemostat/csv.hpp"
#include "chemostat/parallel.hpp"

namespace chemostat {

namespace fs = std::filesystem;

namespace {

std::string iso_time(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

class OutputDir {
public:
  explicit OutputDir(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create output directory " + dir + ": " + ec.message());
  }

  template <class Writer>
  fs::path write(const std::string& name, Writer&& writer) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    writer(out);
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
    return path;
  }

private:
  fs::path dir_;
};

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

StreamFamily streams_for(const RunConfig& c) { return {c.seed, 0}; }

void run_simulate(const RunConfig& c, const SimulateSettings& s, OutputDir& out, RunResult& result) {
  RngStream rng = streams_for(c).replica(0);
  const Trajectory traj = simulate(c.model, s.initial, s.horizon, c.integrator, rng);
  result.files.push_back(out.write("trajectory.csv", [&](std::ostream& o) { csv::write_trajectory(o, traj); }));
  std::ostringstream msg;
  msg << "simulated " << s.horizon << " days: " << traj.samples.size() << " samples, terminal (S, X) = ("
      << fmt(traj.terminal.s) << ", " << fmt(traj.terminal.x) << "), floor hits " << traj.floor_hits;
  result.summary = msg.str();
}

void run_lambda(const RunConfig& c, const LambdaSettings& s, OutputDir& out, RunResult& result) {
  std::vector<LambdaEstimate> rows;
  if (s.method != LambdaChoice::MonteCarlo) rows.push_back(lambda_closed_form(c.model));
  if (s.method != LambdaChoice::ClosedForm) {
    rows.push_back(estimate_lambda_mc(c.model, s.mc.to_settings(c.integrator), streams_for(c)));
  }
  result.files.push_back(out.write("lambda.csv", [&](std::ostream& o) { csv::write_lambda(o, rows); }));
  std::ostringstream msg;
  for (const auto& r : rows) {
    if (!msg.str().empty()) msg << '\n';
    msg << "lambda (" << csv::method_label(r.method) << ") = " << fmt(r.value) << " +/- " << fmt(r.std_error);
  }
  result.summary = msg.str();
}

void run_washout(const RunConfig& c, const WashoutSettings& s, OutputDir& out, RunResult& result) {
  const LambdaMethodSpec spec{s.method, s.mc.to_settings(c.integrator)};
  const WashoutResult w = washout_time(c.model, s.theta_lo, s.theta_hi, s.tol, spec, streams_for(c));
  result.files.push_back(out.write("washout.csv", [&](std::ostream& o) { csv::write_washout(o, w); }));
  std::ostringstream msg;
  msg << "wash-out time theta0 = " << fmt(w.theta0) << " day after " << w.iterations << " bisection steps, |lambda| = "
      << fmt(w.lambda_at_root);
  result.summary = msg.str();
}

void run_sweep(const RunConfig& c, const SweepSettings& s, OutputDir& out, RunResult& result) {
  EffluentSettings settings;
  settings.lambda = {s.method, s.lambda_mc.to_settings(c.integrator)};
  settings.es_star = s.es_star.to_settings(c.integrator);
  settings.x0 = s.x0;
  const auto rows = effluent_curve(c.model, s.thetas, settings, streams_for(c));
  result.files.push_back(out.write("sweep.csv", [&](std::ostream& o) { csv::write_sweep(o, rows); }));
  std::ostringstream msg;
  msg << "swept " << rows.size() << " theta values";
  for (const auto& r : rows) msg << "\n  theta " << fmt(r.theta) << ": lambda " << fmt(r.lambda) << ", ES* " << fmt(r.es_star);
  result.summary = msg.str();
}

void run_density(const RunConfig& c, const DensitySettings& s, OutputDir& out, RunResult& result) {
  const auto trajectories = simulate_ensemble(c.model, s.initial, s.horizon, c.integrator, s.replicas,
                                              streams_for(c), Execution::Parallel);
  const RegimeHistogram h = empirical_density(trajectories, s.bins, s.burn_in);
  result.files.push_back(out.write("density.csv", [&](std::ostream& o) { csv::write_histogram(o, h); }));
  std::ostringstream msg;
  msg << "density over " << h.total_weight << " samples; regime masses";
  for (std::size_t r = 0; r < h.regimes; ++r) msg << ' ' << fmt(h.regime_mass(r));
  result.summary = msg.str();
}

}  // namespace

int exit_code_for(const Error& e) {
  switch (e.category()) {
    case ErrorCategory::Config: return kExitConfig;
    case ErrorCategory::Numerical: return kExitNumerical;
    case ErrorCategory::Io: return kExitIo;
  }
  return kExitNumerical;
}

std::string config_hash(const RunConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize_config(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

RunResult execute(const RunConfig& config) {
  const auto started = std::chrono::system_clock::now();
  const auto clock_start = std::chrono::steady_clock::now();
  RunResult result;
  result.warnings = check_integrator(config.integrator, config.model);
  OutputDir out(config.output_dir);

  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SimulateSettings>) run_simulate(config, s, out, result);
        if constexpr (std::is_same_v<T, LambdaSettings>) run_lambda(config, s, out, result);
        if constexpr (std::is_same_v<T, WashoutSettings>) run_washout(config, s, out, result);
        if constexpr (std::is_same_v<T, SweepSettings>) run_sweep(config, s, out, result);
        if constexpr (std::is_same_v<T, DensitySettings>) run_density(config, s, out, result);
      },
      config.experiment);

  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
  nlohmann::ordered_json manifest;
  manifest["experiment"] = std::string(config.experiment_name());
  manifest["config_hash"] = config_hash(config);
  manifest["seed"] = config.seed;
  manifest["version"] = kVersion;
  #if defined(__clang__)
  manifest["compiler"] = "clang " __clang_version__;
#elif defined(__GNUC__)
  manifest["compiler"] = "gcc " __VERSION__;
#else
  manifest["compiler"] = "unknown";
#endif
  manifest["workers"] = worker_count();
  manifest["started_at"] = iso_time(started);
  manifest["finished_at"] = iso_time(std::chrono::system_clock::now());
  manifest["wall_clock_seconds"] = elapsed;
  manifest["files"] = nlohmann::ordered_json::array();
  for (const auto& f : result.files) manifest["files"].push_back(f.filename().string());
  manifest["warnings"] = result.warnings;
  result.files.push_back(out.write("manifest.json", [&](std::ostream& o) { o << manifest.dump(2) << '\n'; }));
  return result;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const RunResult result = execute(config);
    for (const auto& w : result.warnings) err << "warning: " << w << '\n';
    out << result.summary << '\n';
    return kExitOk;
  } catch (const Error& e) {
    nlohmann::ordered_json record;
    record["error"] = std::string(to_string(e.code()));
    record["message"] = e.what();
    record["exit_code"] = exit_code_for(e);
    err << record.dump() << '\n';
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (fs::is_directory(config.output_dir, ec)) {
      std::ofstream f(fs::path(config.output_dir) / "error.json");
      if (f) f << record.dump(2) << '\n';
    }
    return exit_code_for(e);
  } catch (const std::exception& e) {
    nlohmann::ordered_json record;
    record["error"] = "Internal";
    record["message"] = e.what();
    record["exit_code"] = static_cast<int>(kExitNumerical);
    err << record.dump() << '\n';
    return kExitNumerical;
  }
}

}  // namespace chemostat
