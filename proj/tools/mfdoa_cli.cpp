// SPDX-License-Identifier: Apache-2.0
//
// mfdoa - gridless multi-frequency direction-of-arrival estimation
// Copyright (C) 2026 mfdoa contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Command-line front end.
//
//   mfdoa simulate  --config c.json            dump one synthesized tensor
//   mfdoa solve     --config c.json            one trial: build + solve SDP
//   mfdoa extract   --config c.json            one trial: solve + DOA recovery
//   mfdoa sweep     --config c.json            Monte-Carlo sweep -> result table
//   mfdoa nullspec  --config c.json            null-spectrum curve of one trial
//
// Exit codes: 0 success, 2 configuration problem (bad file, bad flags, bad
// scenario), 3 solver non-convergence in the single-solve subcommands.
// Baseline columns that this build does not produce (sparse-Bayesian and
// bound curves) are emitted as explicit JSON nulls so their absence is
// visible in the output rather than silent.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mfdoa/mfdoa.hpp"

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      throw mfdoa::config_error("config: unknown key '" + item.key() + "' in " + where);
}

struct SweepSpec {
  std::string axis = "snr";
  std::vector<double> values;
};

struct LoadedConfig {
  mfdoa::Scenario scenario;
  SweepSpec sweep;
};

LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mfdoa::config_error("config: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw mfdoa::config_error("config: " + std::string(e.what()));
  }
  require_keys(j, {"id", "sensors", "freqs", "f1_hz", "speed", "thetas_deg", "powers",
                   "deterministic_amplitudes", "k_random", "random_lo_deg", "random_hi_deg",
                   "min_sep_cos", "n_snapshots", "snr_db", "mc", "estimator", "k_est",
                   "seed", "collision_tol", "report_timing", "keep_trials", "threads",
                   "solver", "extract", "sweep"},
               "scenario");
  if (!j.contains("sensors") || !j.contains("freqs"))
    throw mfdoa::config_error("config: 'sensors' and 'freqs' are required");

  LoadedConfig c;
  mfdoa::Scenario& s = c.scenario;
  try {
    s.geometry = mfdoa::GeometryConfig(j["sensors"].get<std::vector<int>>(),
                                       j["freqs"].get<std::vector<int>>(),
                                       j.value("f1_hz", 100.0), j.value("speed", 1500.0));
    s.id = j.value("id", std::string("scenario"));
    s.thetas_deg = j.value("thetas_deg", std::vector<double>{});
    s.powers = j.value("powers", std::vector<double>{});
    s.deterministic_amplitudes = j.value("deterministic_amplitudes", false);
    s.k_random = j.value("k_random", 0);
    s.random_lo_deg = j.value("random_lo_deg", 30.0);
    s.random_hi_deg = j.value("random_hi_deg", 150.0);
    s.min_sep_cos = j.value("min_sep_cos", 0.0);
    s.n_snapshots = j.value("n_snapshots", 1);
    s.snr_db = j.value("snr_db", std::vector<double>{});
    s.mc = j.value("mc", 20);
    s.estimator = mfdoa::parse_estimator(j.value("estimator", std::string("fast_primal")));
    s.k_est = j.value("k_est", 0);
    s.seed = j.value("seed", std::uint64_t{0});
    s.collision_tol = j.value("collision_tol", 0.002);
    s.report_timing = j.value("report_timing", false);
    s.keep_trials = j.value("keep_trials", false);
    s.threads = j.value("threads", 0);
    if (j.contains("solver")) {
      const json& sj = j["solver"];
      require_keys(sj, {"tol", "max_iter", "over_relaxation", "rho", "adaptive_rho",
                        "check_every"},
                   "solver");
      s.solver.tol = sj.value("tol", s.solver.tol);
      s.solver.max_iter = sj.value("max_iter", s.solver.max_iter);
      s.solver.over_relaxation = sj.value("over_relaxation", s.solver.over_relaxation);
      s.solver.rho = sj.value("rho", s.solver.rho);
      s.solver.adaptive_rho = sj.value("adaptive_rho", s.solver.adaptive_rho);
      s.solver.check_every = sj.value("check_every", s.solver.check_every);
    }
    if (j.contains("extract")) {
      const json& ej = j["extract"];
      require_keys(ej, {"grid_points", "refine_iters"}, "extract");
      s.extract.grid_points = ej.value("grid_points", s.extract.grid_points);
      s.extract.refine_iters = ej.value("refine_iters", s.extract.refine_iters);
    }
    if (j.contains("sweep")) {
      const json& wj = j["sweep"];
      require_keys(wj, {"axis", "values"}, "sweep");
      c.sweep.axis = wj.value("axis", std::string("snr"));
      c.sweep.values = wj.value("values", std::vector<double>{});
    }
  } catch (const json::exception& e) {
    throw mfdoa::config_error("config: " + std::string(e.what()));
  }
  return c;
}

// Output sink: path or stdout for "-"
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path != "-") {
      file_.open(path);
      if (!file_) throw mfdoa::config_error("cannot open '" + path + "' for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Shared single-trial front half: draw sources with the scenario seed,
// synthesize, solve the selected program.  Throws solver_stall on
// non-convergence so callers can map it to exit code 3.
struct solver_stall {
  mfdoa::SolveStatus status;
};

struct TrialRun {
  mfdoa::SourceSet sources;
  mfdoa::MeasurementTensor y;
  mfdoa::ConicSolution sol;
  mfdoa::PrimalSdpResult primal;
  mfdoa::SdpForm form;
};

TrialRun run_single(const mfdoa::Scenario& s, const mfdoa::LiftingPlan& plan) {
  mfdoa::validate_scenario(s);
  mfdoa::Rng rng(s.seed ^ mfdoa::Rng::splitmix64(1));
  mfdoa::SourceSet src;
  if (!s.thetas_deg.empty()) {
    src = mfdoa::make_sources(s.thetas_deg, s.powers);
  } else {
    src = mfdoa::random_doas(s.k_random, s.random_lo_deg, s.random_hi_deg, s.min_sep_cos, rng);
    if (!s.powers.empty()) src.powers = s.powers;
  }
  src.amp_style = s.deterministic_amplitudes ? mfdoa::AmpStyle::deterministic
                                             : mfdoa::AmpStyle::gaussian;
  const std::optional<double> snr =
      s.snr_db.empty() ? std::nullopt : std::optional<double>(s.snr_db.front());
  mfdoa::MeasurementTensor y = mfdoa::synthesize(plan.geometry, src, s.n_snapshots, snr, rng);

  const mfdoa::SdpForm form = s.estimator == mfdoa::Estimator::fast_primal
                                  ? mfdoa::SdpForm::fast
                                  : mfdoa::SdpForm::full;
  const mfdoa::ConicProblem prob = form == mfdoa::SdpForm::fast
                                       ? mfdoa::build_fast_primal(y, plan)
                                       : mfdoa::build_full_primal(y, plan);
  mfdoa::ConicSolution sol = mfdoa::solve(prob, s.solver);
  if (sol.status != mfdoa::SolveStatus::optimal) throw solver_stall{sol.status};
  mfdoa::PrimalSdpResult primal = mfdoa::extract_primal(sol, plan, form);
  return TrialRun{std::move(src), std::move(y), std::move(sol), std::move(primal), form};
}

int cmd_simulate(const mfdoa::Scenario& s, const std::string& out, const std::string& format) {
  mfdoa::validate_scenario(s);
  mfdoa::Rng rng(s.seed ^ mfdoa::Rng::splitmix64(1));
  mfdoa::SourceSet src;
  if (!s.thetas_deg.empty()) {
    src = mfdoa::make_sources(s.thetas_deg, s.powers);
  } else {
    src = mfdoa::random_doas(s.k_random, s.random_lo_deg, s.random_hi_deg, s.min_sep_cos, rng);
    if (!s.powers.empty()) src.powers = s.powers;
  }
  src.amp_style = s.deterministic_amplitudes ? mfdoa::AmpStyle::deterministic
                                             : mfdoa::AmpStyle::gaussian;
  const std::optional<double> snr =
      s.snr_db.empty() ? std::nullopt : std::optional<double>(s.snr_db.front());
  const mfdoa::MeasurementTensor y = mfdoa::synthesize(s.geometry, src, s.n_snapshots, snr, rng);

  Sink sink(out);
  std::ostream& os = sink.stream();
  if (format == "csv") {
    os << "freq_index,sensor_index,snapshot,re,im\n";
    for (int fi = 0; fi < s.geometry.n_freqs(); ++fi)
      for (int mi = 0; mi < s.geometry.n_sensors(); ++mi)
        for (int l = 0; l < s.n_snapshots; ++l)
          os << s.geometry.freqs()[fi] << ',' << s.geometry.sensors()[mi] << ',' << l << ','
             << fmt6(y.slices[fi](mi, l).real()) << ',' << fmt6(y.slices[fi](mi, l).imag())
             << '\n';
  } else {
    json slices = json::array();
    for (int fi = 0; fi < s.geometry.n_freqs(); ++fi) {
      json rows = json::array();
      for (int mi = 0; mi < s.geometry.n_sensors(); ++mi) {
        json cols = json::array();
        for (int l = 0; l < s.n_snapshots; ++l)
          cols.push_back({y.slices[fi](mi, l).real(), y.slices[fi](mi, l).imag()});
        rows.push_back(std::move(cols));
      }
      slices.push_back(std::move(rows));
    }
    os << json{{"freqs", s.geometry.freqs()},
               {"sensors", s.geometry.sensors()},
               {"truth_thetas_deg", src.thetas_deg},
               {"slices", slices}}
              .dump(2)
       << '\n';
  }
  return 0;
}

int cmd_solve(const mfdoa::Scenario& s, const std::string& out, const std::string& format) {
  const mfdoa::LiftingPlan plan(s.geometry);
  const TrialRun t = run_single(s, plan);
  Sink sink(out);
  std::ostream& os = sink.stream();
  if (format == "csv") {
    os << "field,value\n";
    os << "status," << mfdoa::to_string(t.sol.status) << '\n';
    os << "objective," << fmt6(t.primal.objective) << '\n';
    os << "iterations," << t.sol.iterations << '\n';
    os << "primal_residual," << fmt6(t.sol.primal_residual) << '\n';
    os << "dual_residual," << fmt6(t.sol.dual_residual) << '\n';
    os << "solve_ms," << fmt6(t.sol.solve_seconds * 1e3) << '\n';
    os << "offset,re,im,realized\n";
    for (std::size_t k = 0; k < t.primal.u.u.size(); ++k)
      os << k << ',' << fmt6(t.primal.u.u[k].real()) << ',' << fmt6(t.primal.u.u[k].imag())
         << ',' << int(t.primal.u.mask[k]) << '\n';
  } else {
    json u = json::array();
    for (std::size_t k = 0; k < t.primal.u.u.size(); ++k)
      u.push_back({{"offset", k},
                   {"re", t.primal.u.u[k].real()},
                   {"im", t.primal.u.u[k].imag()},
                   {"realized", bool(t.primal.u.mask[k])}});
    os << json{{"status", mfdoa::to_string(t.sol.status)},
               {"objective", t.primal.objective},
               {"iterations", t.sol.iterations},
               {"primal_residual", t.sol.primal_residual},
               {"dual_residual", t.sol.dual_residual},
               {"solve_ms", t.sol.solve_seconds * 1e3},
               {"u", u}}
              .dump(2)
       << '\n';
  }
  return 0;
}

int cmd_extract(const mfdoa::Scenario& s, const std::string& out, const std::string& format) {
  const mfdoa::LiftingPlan plan(s.geometry);
  const TrialRun t = run_single(s, plan);
  const int k_true = t.sources.k();
  const int k_eff = s.k_est > 0 ? s.k_est : k_true;
  const mfdoa::DoaEstimate est =
      mfdoa::extract_doas(mfdoa::irregular_toep(t.primal.u, plan), plan.u, k_eff, s.extract);
  const mfdoa::CollisionReport collisions =
      mfdoa::collision_scan(t.sources, plan.geometry, s.collision_tol);

  Sink sink(out);
  std::ostream& os = sink.stream();
  if (format == "csv") {
    os << "index,theta_deg,w,power,null_spectrum_min\n";
    for (int i = 0; i < est.k; ++i)
      os << i << ',' << fmt6(est.thetas_deg[i]) << ',' << fmt6(est.w_hat[i]) << ','
         << fmt6(est.powers[i]) << ',' << fmt6(est.null_spectrum_minima[i]) << '\n';
    for (const auto& p : collisions.pairs)
      std::cerr << "near_collision: sources " << p.i << "," << p.j << " at frequency index "
                << p.f << " (k=" << p.k << ", residual " << fmt6(p.residual) << ")\n";
  } else {
    json cols = json::array();
    for (const auto& p : collisions.pairs)
      cols.push_back({{"i", p.i}, {"j", p.j}, {"f", p.f}, {"k", p.k}, {"residual", p.residual}});
    os << json{{"thetas_deg", est.thetas_deg},
               {"w", est.w_hat},
               {"powers", est.powers},
               {"null_spectrum_min", est.null_spectrum_minima},
               {"near_collisions", cols},
               {"sbl_thetas_deg", nullptr}}  // baseline not built; explicit null
              .dump(2)
       << '\n';
  }
  return 0;
}

int cmd_sweep(const LoadedConfig& c, const std::string& out, const std::string& format) {
  const mfdoa::Scenario& s = c.scenario;
  mfdoa::ResultTable table;
  if (c.sweep.values.empty()) {
    table = mfdoa::run_scenario(s);
  } else {
    table = mfdoa::sweep(s, mfdoa::parse_axis(c.sweep.axis), c.sweep.values);
  }
  const mfdoa::OutputFormat fmt =
      format == "csv" ? mfdoa::OutputFormat::csv : mfdoa::OutputFormat::json;
  if (out == "-") {
    mfdoa::emit(table, fmt, std::cout);
  } else {
    mfdoa::emit(table, fmt, out);
  }
  return 0;
}

int cmd_nullspec(const mfdoa::Scenario& s, const std::string& out, const std::string& format) {
  const mfdoa::LiftingPlan plan(s.geometry);
  const TrialRun t = run_single(s, plan);
  const int k_true = t.sources.k();
  const int k_eff = s.k_est > 0 ? s.k_est : k_true;
  const mfdoa::CMat tmat = mfdoa::irregular_toep(t.primal.u, plan);

  Sink sink(out);
  std::ostream& os = sink.stream();
  const int n_points = 2048;
  if (format == "csv") {
    mfdoa::write_null_spectrum_csv(os, tmat, plan.u, k_eff, n_points);
  } else {
    const mfdoa::EigenSplit split = mfdoa::eigen_split(tmat, k_eff);
    json pts = json::array();
    for (int i = 0; i < n_points; ++i) {
      const double theta = 180.0 * i / (n_points - 1);
      const double w = std::cos(mfdoa::deg2rad(theta)) / 2.0;
      pts.push_back({theta, mfdoa::null_spectrum(split, plan.u, mfdoa::w_to_z(w))});
    }
    os << json{{"points", pts}}.dump(2) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gridless multi-frequency direction-of-arrival estimation toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_path = "-", format = "csv", estimator;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int mc = 0;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "scenario configuration file (JSON)")
        ->required();
    sub->add_option("--seed", seed, "override the scenario seed")
        ->each([&](const std::string&) { seed_set = true; });
    sub->add_option("--mc", mc, "override the Monte-Carlo trial count");
    sub->add_option("--estimator", estimator, "fast_primal or full_primal");
    sub->add_option("--out", out_path, "output path, '-' for stdout");
    sub->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  CLI::App* simulate = app.add_subcommand("simulate", "synthesize one measurement tensor");
  CLI::App* solve = app.add_subcommand("solve", "run one trial through the selected program");
  CLI::App* extract = app.add_subcommand("extract", "one trial: solve and recover directions");
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Monte-Carlo sweep; baseline columns not built here emit as JSON nulls");
  CLI::App* nullspec = app.add_subcommand("nullspec", "null-spectrum curve of one solved trial");
  for (CLI::App* sub : {simulate, solve, extract, sweep, nullspec}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    LoadedConfig cfg = load_config(config_path);
    if (seed_set) cfg.scenario.seed = seed;
    if (mc > 0) cfg.scenario.mc = mc;
    if (!estimator.empty()) cfg.scenario.estimator = mfdoa::parse_estimator(estimator);

    if (simulate->parsed()) return cmd_simulate(cfg.scenario, out_path, format);
    if (solve->parsed()) return cmd_solve(cfg.scenario, out_path, format);
    if (extract->parsed()) return cmd_extract(cfg.scenario, out_path, format);
    if (sweep->parsed()) return cmd_sweep(cfg, out_path, format);
    if (nullspec->parsed()) return cmd_nullspec(cfg.scenario, out_path, format);
    return 2;
  } catch (const solver_stall& st) {
    std::cerr << "solver did not converge (" << mfdoa::to_string(st.status) << ")\n";
    return 3;
  } catch (const mfdoa::config_error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const mfdoa::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
