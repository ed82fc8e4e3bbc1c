#include "levynls/commands.hpp"

#include "levynls/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#ifndef LEVYNLS_VERSION
#define LEVYNLS_VERSION "0.0.0"
#endif

namespace levynls {

namespace fs = std::filesystem;
using nlohmann::json;

void apply_overrides(RunConfig& config, const Overrides& o) {
  if (o.seed) config.seed = *o.seed;
  if (o.out_dir) config.out_dir = *o.out_dir;
  if (o.trajectories) config.trajectories = *o.trajectories;
  if (o.threads) config.threads = *o.threads;
}

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  if (count <= 0) return;
  const int workers = std::max(1, std::min(threads, count));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto work = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<TrajectoryRecord> run_ensemble(const GalerkinProblem& problem,
                                           const SolverConfig& solver, int count,
                                           std::uint64_t master_seed, int threads) {
  std::vector<TrajectoryRecord> out(static_cast<std::size_t>(std::max(count, 0)));
  parallel_for(count, threads, [&](int i) {
    auto rng = make_stream(master_seed, static_cast<std::uint64_t>(i));
    out[static_cast<std::size_t>(i)] = simulate(problem, solver, rng);
  });
  return out;
}

namespace {

const char* closure_name(ClosureMode c) {
  return c == ClosureMode::AtomicExact ? "AtomicExact" : "Taylor2";
}

fs::path prepare_output(const RunConfig& config) {
  const fs::path dir(config.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory '" + config.out_dir + "'");
  }
  return dir;
}

/// Binary mode keeps LF line endings on every platform.
std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string numbered(const char* stem, int i) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04d.csv", stem, i);
  return buf;
}

std::string csv_header(const char* kind, const RunConfig& config, const std::string& extra) {
  return std::string("# schema=") + kTrajectorySchema + " file=" + kind +
         " config_hash=" + hex64(config_hash(config)) + extra + "\n";
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_output(path);
  out << j.dump(2) << "\n";
  finish(out, path);
}

json base_summary(const RunConfig& config, const char* command) {
  json j;
  j["schema"] = kSummarySchema;
  j["command"] = command;
  j["version"] = LEVYNLS_VERSION;
  j["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                       "." + std::to_string(EIGEN_MINOR_VERSION);
  j["config_hash"] = hex64(config_hash(config));
  j["master_seed"] = config.seed;
  j["domain"] = domain_name(config.domain);
  j["horizon"] = config.horizon;
  return j;
}

json problem_summary(const GalerkinProblem& p, ClosureMode closure) {
  json j;
  j["level"] = p.level.n;
  j["dim"] = p.level.dim;
  j["closure"] = closure_name(closure);
  j["sigma2_eps"] = p.moments.variance_budget;
  j["jump_rate"] = p.moments.jump_rate;
  j["epsilon"] = p.measure.epsilon;
  j["b_H"] = p.noise.b_H;
  j["b_EA"] = p.noise.b_EA;
  j["hermitian_deviation"] = p.noise.hermitian_deviation;
  return j;
}

void write_trajectory_files(const fs::path& dir, const RunConfig& config, int i, std::uint64_t seed,
                            const TrajectoryRecord& rec) {
  const std::string extra = " trajectory=" + std::to_string(i) + " seed=" + std::to_string(seed) +
                            " level=" + std::to_string(rec.level);
  {
    const fs::path path = dir / numbered("trajectory", i);
    auto out = open_output(path);
    out << csv_header("trajectory", config, extra);
    out << "t,mass,kinetic,potential,energy,norm_EA\n";
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
      const auto& d = rec.diagnostics[k];
      out << format_double(rec.times[k]) << ',' << format_double(d.mass) << ','
          << format_double(d.kinetic) << ',' << format_double(d.potential) << ','
          << format_double(d.total) << ',' << format_double(rec.norm_EA[k]) << '\n';
    }
    finish(out, path);
  }
  if (config.events) {
    const fs::path path = dir / numbered("events", i);
    auto out = open_output(path);
    out << csv_header("events", config, extra);
    out << "t,atom";
    const Eigen::Index dim = config.measure.dimension();
    for (Eigen::Index m = 0; m < dim; ++m) out << ",l" << m + 1;
    out << '\n';
    for (const auto& e : rec.jumps) {
      out << format_double(e.time) << ',' << e.atom;
      for (Eigen::Index m = 0; m < e.mark.size(); ++m) out << ',' << format_double(e.mark[m]);
      out << '\n';
    }
    finish(out, path);
  }
  if (config.snapshots) {
    const fs::path path = dir / numbered("states", i);
    auto out = open_output(path);
    out << csv_header("states", config, extra);
    out << 't';
    const Eigen::Index n = rec.states.empty() ? 0 : rec.states.front().size();
    for (Eigen::Index m = 0; m < n; ++m) out << ",re" << m << ",im" << m;
    out << '\n';
    for (std::size_t k = 0; k < rec.states.size(); ++k) {
      out << format_double(rec.times[k]);
      for (Eigen::Index m = 0; m < n; ++m) {
        out << ',' << format_double(rec.states[k][m].real()) << ','
            << format_double(rec.states[k][m].imag());
      }
      out << '\n';
    }
    finish(out, path);
  }
}

json moments_json(const std::vector<MomentEstimate>& ms) {
  json a = json::array();
  for (const auto& m : ms) {
    a.push_back({{"r", m.r}, {"mean", m.mean}, {"lower", m.lower}, {"upper", m.upper},
                 {"normalized", m.normalized}});
  }
  return a;
}

}  // namespace

int cmd_simulate(const RunConfig& config, std::ostream& log) {
  validate_config(config);
  const fs::path dir = prepare_output(config);
  const auto model = build_model(config);
  const int level = *std::max_element(config.levels.begin(), config.levels.end());
  const GalerkinProblem problem = build_problem(config, model, level);
  SolverConfig solver = config.solver;
  solver.closure = resolve_closure(problem.measure, solver.closure);
  solver.store_states = config.snapshots;

  std::vector<json> rows(static_cast<std::size_t>(config.trajectories));
  parallel_for(config.trajectories, config.threads, [&](int i) {
    const std::uint64_t seed = stream_seed(config.seed, static_cast<std::uint64_t>(i));
    auto rng = make_stream(config.seed, static_cast<std::uint64_t>(i));
    const TrajectoryRecord rec = simulate(problem, solver, rng);
    write_trajectory_files(dir, config, i, seed, rec);
    const auto& last = rec.diagnostics.back();
    rows[static_cast<std::size_t>(i)] = {{"index", i},
                                         {"seed", seed},
                                         {"file", numbered("trajectory", i)},
                                         {"jumps", rec.jumps.size()},
                                         {"steps", rec.times.size() - 1},
                                         {"step_halvings", rec.step_halvings},
                                         {"initial_mass", rec.initial_mass},
                                         {"final_mass", last.mass},
                                         {"final_energy", last.total},
                                         {"max_relative_mass_error", rec.max_relative_mass_error()}};
  });

  json j = base_summary(config, "simulate");
  j["problem"] = problem_summary(problem, solver.closure);
  j["closure"] = closure_name(solver.closure);
  j["sigma2_eps"] = problem.moments.variance_budget;
  json seeds = json::array();
  double worst = 0.0;
  for (const auto& r : rows) {
    seeds.push_back(r["seed"]);
    worst = std::max(worst, r["max_relative_mass_error"].get<double>());
  }
  j["trajectory_seeds"] = seeds;
  j["trajectories"] = rows;
  j["max_relative_mass_error"] = worst;
  write_json(dir / "summary.json", j);
  log << "simulate: " << config.trajectories << " trajectories at level " << level << " (dim "
      << problem.level.dim << "), closure " << closure_name(solver.closure)
      << ", max relative mass error " << format_double(worst) << "\n";
  return 0;
}

int cmd_converge(const RunConfig& config, std::ostream& log) {
  validate_config(config);
  const fs::path dir = prepare_output(config);
  const auto model = build_model(config);

  std::vector<int> levels = config.levels;
  std::sort(levels.begin(), levels.end());
  const int reference = levels.back();
  levels.pop_back();  // the remaining entries are compared with the reference

  std::vector<GalerkinProblem> problems;
  for (const int n : levels) problems.push_back(build_problem(config, model, n));
  const GalerkinProblem ref_problem = build_problem(config, model, reference);
  SolverConfig solver = config.solver;
  solver.closure = resolve_closure(ref_problem.measure, solver.closure);
  solver.store_states = true;

  // distances[i][row]
  std::vector<std::vector<double>> distances(static_cast<std::size_t>(config.trajectories));
  parallel_for(levels.empty() ? 0 : config.trajectories, config.threads, [&](int i) {
    auto rng = make_stream(config.seed, static_cast<std::uint64_t>(i));
    const auto events = sample_prm(ref_problem.measure, ref_problem.horizon, rng);
    const TrajectoryRecord fine = simulate_with_events(ref_problem, solver, events);
    auto& row = distances[static_cast<std::size_t>(i)];
    for (const auto& p : problems) {
      const TrajectoryRecord coarse = simulate_with_events(p, solver, events);
      double sup = 0.0;
      for (std::size_t k = 0; k < fine.states.size(); ++k) {
        sup = std::max(sup, dual_distance(*model, coarse.states[k], fine.states[k]));
      }
      row.push_back(sup);
    }
  });

  const fs::path csv_path = dir / "converge.csv";
  auto csv = open_output(csv_path);
  csv << "# schema=" << kTrajectorySchema << " file=converge config_hash=" << hex64(config_hash(config))
      << " reference_level=" << reference << "\n";
  csv << "level,dim,mean_sup_distance,max_sup_distance\n";
  json table = json::array();
  std::vector<double> means;
  for (std::size_t r = 0; r < levels.size(); ++r) {
    double sum = 0.0;
    double worst = 0.0;
    json per = json::array();
    for (const auto& row : distances) {
      sum += row[r];
      worst = std::max(worst, row[r]);
      per.push_back(row[r]);
    }
    const double mean = sum / config.trajectories;
    means.push_back(mean);
    csv << levels[r] << ',' << problems[r].level.dim << ',' << format_double(mean) << ','
        << format_double(worst) << '\n';
    table.push_back({{"level", levels[r]},
                     {"dim", problems[r].level.dim},
                     {"mean_sup_distance", mean},
                     {"max_sup_distance", worst},
                     {"per_trajectory", per}});
  }
  finish(csv, csv_path);

  // Strictly decreasing in the level among distinct coarse levels.
  bool monotone = true;
  for (std::size_t r = 1; r < levels.size(); ++r) {
    if (levels[r] != levels[r - 1] && !(means[r] < means[r - 1])) monotone = false;
  }

  json j = base_summary(config, "converge");
  j["problem"] = problem_summary(ref_problem, solver.closure);
  j["reference_level"] = reference;
  j["table"] = table;
  j["monotone_decreasing"] = monotone;
  write_json(dir / "converge.json", j);
  log << "converge: reference level " << reference << ", " << levels.size() << " rows, monotone "
      << (monotone ? "yes" : "no") << "\n";
  return 0;
}

int cmd_moments(const RunConfig& config, std::ostream& log) {
  validate_config(config);
  if (config.trajectories < 2) throw UsageError("moments needs at least two trajectories");
  const fs::path dir = prepare_output(config);
  const auto model = build_model(config);
  std::vector<int> levels = config.levels;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  const fs::path csv_path = dir / "moments.csv";
  auto csv = open_output(csv_path);
  csv << "# schema=" << kTrajectorySchema << " file=moments config_hash=" << hex64(config_hash(config))
      << "\n";
  csv << "level,quantity,r,mean,lower,upper,normalized\n";

  json per_level = json::array();
  std::vector<double> medians;
  for (const int n : levels) {
    const GalerkinProblem problem = build_problem(config, model, n);
    SolverConfig solver = config.solver;
    solver.closure = resolve_closure(problem.measure, solver.closure);
    solver.store_states = true;
    const auto records = run_ensemble(problem, solver, config.trajectories, config.seed, config.threads);
    const EnsembleSummary s = ensemble_moments(records, config.moment_orders, 1000, config.seed);
    const auto aldous = aldous_statistic(*model, records, config.aldous_thetas, config.stopping,
                                         config.aldous_eta);
    medians.push_back(s.median_sup_mass_energy);

    for (const auto& [name, ms] : {std::pair{"sup_norm_EA", &s.norm_moments},
                                   std::pair{"sup_abs_energy", &s.energy_moments}}) {
      for (const auto& m : *ms) {
        csv << n << ',' << name << ',' << format_double(m.r) << ',' << format_double(m.mean) << ','
            << format_double(m.lower) << ',' << format_double(m.upper) << ','
            << format_double(m.normalized) << '\n';
      }
    }
    json rows = json::array();
    for (const auto& a : aldous) rows.push_back({{"theta", a.theta}, {"probability", a.probability}});
    per_level.push_back({{"problem", problem_summary(problem, solver.closure)},
                         {"median_sup_mass_energy", s.median_sup_mass_energy},
                         {"median_sup_norm_EA", s.median_sup_norm_EA},
                         {"norm_moments", moments_json(s.norm_moments)},
                         {"energy_moments", moments_json(s.energy_moments)},
                         {"sup_mass_energy", s.sup_mass_energy},
                         {"aldous", rows}});
  }
  finish(csv, csv_path);

  json j = base_summary(config, "moments");
  j["levels"] = per_level;
  j["aldous_eta"] = config.aldous_eta;
  j["stopping"] = config.stopping.kind == StoppingRule::Kind::Deterministic ? "deterministic" : "first_jump";
  j["stopping_t0"] = config.stopping.t0;
  const auto [lo, hi] = std::minmax_element(medians.begin(), medians.end());
  const double ratio = *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
  j["median_ratio"] = std::isfinite(ratio) ? json(ratio) : json(nullptr);
  write_json(dir / "moments.json", j);
  log << "moments: " << levels.size() << " levels, median ratio " << format_double(ratio) << "\n";
  return 0;
}

}  // namespace levynls
