// pkam: command-line front end for the invariant torus solver.

#include "pkam/pkam.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using json = nlohmann::json;
using pkam::Vec;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitNoConvergence = 2;
constexpr int kExitDegenerate = 3;

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

json mat_json(const pkam::Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Vec parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw pkam::ConfigError("bad number '" + item + "'");
    values.push_back(v);
  }
  Vec out(static_cast<int>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) out(static_cast<int>(i)) = values[i];
  return out;
}

// PKAM_THREADS caps whatever the config asks for.
void apply_threads(int configured) {
  if (configured <= 0) return;
  pkam::set_thread_count(std::min(configured, pkam::thread_count()));
}

void write_log(const std::string& path, const pkam::RunConfig& config,
               const std::vector<pkam::StepReport>& reports) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw pkam::Error("cannot write '" + path + "'");
  pkam::write_csv_log(out, pkam::echo_config(config), reports);
}

json solve_summary(const pkam::SolveResult& r) {
  return {{"lambda", to_std(r.lambda)},
          {"iterations", r.reports.size()},
          {"initial_error", r.initial_error},
          {"final_error", r.final_error},
          {"smallness_indicator", r.smallness_indicator},
          {"gamma_estimate", r.gamma_estimate},
          {"offgrid_residual", r.offgrid_residual},
          {"truncation", r.K.radius()}};
}

bool is_degeneracy(const std::exception& e) {
  return dynamic_cast<const pkam::DegenerateTorus*>(&e) != nullptr ||
         dynamic_cast<const pkam::RankDeficient*>(&e) != nullptr ||
         dynamic_cast<const pkam::SingularResponse*>(&e) != nullptr ||
         dynamic_cast<const pkam::ResonantMode*>(&e) != nullptr;
}

// ------------------------------------------------------------------ solve

int run_solve(const std::string& config_path, const std::string& out_path,
              const std::string& log_path) {
  const pkam::RunConfig config = pkam::load_run_config(config_path);
  apply_threads(config.threads);
  const pkam::MapFamily f = pkam::make_family(config.family);
  const pkam::PresymplecticStructure S = pkam::make_structure(config.structure, config.d, config.n);
  const pkam::TorusEmbedding K0 = pkam::initial_torus(config);
  try {
    const pkam::SolveResult r =
        pkam::solve(K0, config.family.lambda0, f, S, config.omega, config.solve);
    if (!out_path.empty()) pkam::save_torus(out_path, r.K);
    write_log(log_path, config, r.reports);
    json j = solve_summary(r);
    j["status"] = "converged";
    std::cout << j.dump(1) << "\n";
    return kExitOk;
  } catch (const pkam::NoConvergence& e) {
    write_log(log_path, config, e.best().reports);
    json j = solve_summary(e.best());
    j["status"] = "no_convergence";
    j["message"] = e.what();
    std::cout << j.dump(1) << "\n";
    return kExitNoConvergence;
  }
}

// --------------------------------------------------------------- continue

int run_continue(const std::string& config_path, const std::string& out_dir) {
  const pkam::RunConfig config = pkam::load_run_config(config_path);
  apply_threads(config.threads);
  if (config.schedule.empty()) throw pkam::ConfigError("continuation.values is empty");
  const pkam::PresymplecticStructure S = pkam::make_structure(config.structure, config.d, config.n);
  const pkam::TorusEmbedding K0 = pkam::initial_torus(config);
  const auto factory = [&](double v) { return pkam::family_at(config, v); };
  const pkam::ContinuationResult cr = pkam::continue_in_parameter(
      factory, config.schedule, K0, config.family.lambda0, S, config.omega, config.solve);

  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  json stages = json::array();
  for (std::size_t i = 0; i < cr.stages.size(); ++i) {
    const auto& st = cr.stages[i];
    json j = solve_summary(st.result);
    j["knob"] = st.knob;
    j["max_dk_norm"] = 0.0;
    for (const auto& rep : st.result.reports) {
      j["max_dk_norm"] = std::max(j["max_dk_norm"].get<double>(), rep.dk_norm);
    }
    if (!out_dir.empty()) {
      const std::string path = (std::filesystem::path(out_dir) /
                                ("stage_" + std::to_string(i) + ".json")).string();
      pkam::save_torus(path, st.result.K);
      j["torus"] = path;
    }
    stages.push_back(j);
  }
  json out = {{"knob", config.knob}, {"stages", stages}};
  if (cr.failed_stage >= 0) {
    out["failed_stage"] = cr.failed_stage;
    out["failed_knob"] = config.schedule[static_cast<std::size_t>(cr.failed_stage)];
    out["failure"] = cr.failure;
    json trail = json::array();
    for (const auto& rep : cr.failed_best.reports) {
      trail.push_back({{"iter", rep.iteration}, {"err_after", rep.err_after},
                       {"dk_norm", rep.dk_norm}});
    }
    out["failed_trail"] = trail;
  }
  std::cout << out.dump(1) << "\n";
  return cr.failed_stage >= 0 ? kExitNoConvergence : kExitOk;
}

// --------------------------------------------------------------- diagnose

json frequency_report(const Vec& omega, double sigma, int radius) {
  const pkam::Frequency fr = pkam::certify(omega, sigma, radius);
  return {{"gamma_L", fr.gamma_estimate},
          {"sigma", fr.sigma},
          {"L", fr.scan_radius},
          {"worst_l", fr.worst_l},
          {"rejected", fr.rejected}};
}

json torus_report(const pkam::TorusEmbedding& K, const pkam::RunConfig& config, const Vec& lambda) {
  const pkam::MapFamily f = pkam::make_family(config.family);
  const pkam::PresymplecticStructure S = pkam::make_structure(config.structure, config.d, config.n);
  const pkam::InvarianceError err = pkam::invariance_error(K, f, lambda, config.omega);
  const pkam::ReducedFrame fr = pkam::build_frame(K, f, lambda, S, config.omega);
  const pkam::FrameSummary& s = fr.summary;
  const pkam::TwistReport tw = pkam::twist_matrix(fr);
  const pkam::NondegeneracyReport nd = pkam::nondegeneracy_report(fr, S);
  const pkam::VanishingReport va =
      pkam::vanishing_average(K, f, lambda, fr, err.norm, config.family.lambda_ref);
  return {{"invariance_error", err.norm},
          {"invariance_sup", err.sup},
          {"lagrangian_norm", nd.lagrangian_norm},
          {"cond_M", s.cond_M},
          {"cond_V", s.cond_V},
          {"qm_residual", s.qm_residual},
          {"vinv_r", s.vinv_r},
          {"c_offpattern", s.c_offpattern_max()},
          {"twist", {{"avg_S", mat_json(tw.avg_S)},
                     {"determinant", tw.determinant},
                     {"condition", std::isfinite(tw.condition) ? json(tw.condition) : json(nullptr)},
                     {"singular", tw.singular}}},
          {"nondegeneracy", {{"rank_avg_lambda", nd.rank_avg_lambda},
                             {"required_rank", nd.required_rank},
                             {"sigma_min_avg_lambda", nd.sigma_min_avg_lambda},
                             {"nondegenerate", nd.nondegenerate}}},
          {"avg_lambda", mat_json(s.avg_Lambda)},
          {"avg_lambda_vq", mat_json(s.avg_Lambda_vq)},
          {"vanishing", {{"mu_bar", to_std(va.mu_bar)},
                         {"components", to_std(va.components)},
                         {"y_block", va.y_block},
                         {"tolerance", va.tolerance},
                         {"vanishes", va.vanishes}}}};
}

Vec lambda_for(const pkam::RunConfig& config, const std::string& text) {
  if (text.empty()) return config.family.lambda0;
  Vec l = parse_list(text);
  if (l.size() != config.family.lambda0.size()) {
    throw pkam::DimensionMismatch("--lambda needs " + std::to_string(config.family.lambda0.size()) +
                                  " entries");
  }
  return l;
}

int run_diagnose(const std::string& torus_path, const std::string& config_path,
                 const std::string& lambda_text, const std::string& frequency_text, double sigma,
                 int radius) {
  if (!frequency_text.empty()) {
    const Vec omega = parse_list(frequency_text);
    if (sigma <= 0.0) sigma = pkam::default_sigma(omega);
    std::cout << frequency_report(omega, sigma, radius).dump(1) << "\n";
    return kExitOk;
  }
  if (torus_path.empty() || config_path.empty()) {
    throw pkam::ConfigError("diagnose needs --frequency, or --torus with --config");
  }
  const pkam::RunConfig config = pkam::load_run_config(config_path);
  apply_threads(config.threads);
  const pkam::TorusEmbedding K = pkam::load_torus(torus_path);
  std::cout << torus_report(K, config, lambda_for(config, lambda_text)).dump(1) << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------ align

int run_align(const std::string& a_path, const std::string& b_path, double tolerance) {
  const pkam::TorusEmbedding K1 = pkam::load_torus(a_path);
  const pkam::TorusEmbedding K2 = pkam::load_torus(b_path);
  const auto S = pkam::PresymplecticStructure::standard(K1.d(), K1.n());
  const Vec omega = Vec::Zero(K1.torus_dim());
  const pkam::ReducedFrame fr = pkam::build_geometric_frame(K1, S, omega);
  pkam::AlignOptions opt;
  opt.tolerance = tolerance;
  try {
    const pkam::AlignResult r = pkam::align_phase(K1, K2, fr, opt);
    json j = {{"tau", to_std(r.tau)},
              {"residual", r.residuals.back()},
              {"residuals", r.residuals},
              {"rounds", r.rounds}};
    std::cout << j.dump(1) << "\n";
    return kExitOk;
  } catch (const pkam::NotAligned& e) {
    json j = {{"status", "not_aligned"}, {"residual", e.best_residual()}};
    std::cout << j.dump(1) << "\n";
    return kExitFailure;
  }
}

// ----------------------------------------------------------------- verify

int run_verify(const std::string& torus_path, const std::string& config_path,
               const std::string& lambda_text, int samples, int steps) {
  const pkam::RunConfig config = pkam::load_run_config(config_path);
  apply_threads(config.threads);
  const pkam::TorusEmbedding K = pkam::load_torus(torus_path);
  const Vec lambda = lambda_for(config, lambda_text);
  const pkam::MapFamily f = pkam::make_family(config.family);
  const pkam::PresymplecticStructure S = pkam::make_structure(config.structure, config.d, config.n);

  json report = torus_report(K, config, lambda);
  const double offgrid =
      pkam::offgrid_invariance_residual(K, f, lambda, config.omega, samples, config.seed);
  Vec theta0 = Vec::Constant(K.torus_dim(), 0.1);
  const double shadow = pkam::orbit_shadowing(K, f, lambda, config.omega, theta0, steps);
  const pkam::PresymplecticCheck pc = pkam::verify_presymplectic(f, lambda, S, 1000, config.seed);

  const bool inv_ok = offgrid <= 1e-10;
  const bool shadow_ok = shadow <= 1e-6;
  const bool lag_ok = report["lagrangian_norm"].get<double>() <= 1e-10;
  const bool c_ok = report["c_offpattern"].get<double>() <= 1e-9;
  const bool pre_ok = pc.residual <= 1e-11 && pc.structural_ok;
  report["offgrid_residual"] = offgrid;
  report["orbit_shadowing"] = shadow;
  report["presymplectic_residual"] = pc.residual;
  report["checks"] = {{"offgrid_invariance", inv_ok},
                      {"orbit_shadowing", shadow_ok},
                      {"lagrangian", lag_ok},
                      {"reducibility", c_ok},
                      {"presymplectic", pre_ok}};
  const bool all = inv_ok && shadow_ok && lag_ok && c_ok && pre_ok;
  report["passed"] = all;
  std::cout << report.dump(1) << "\n";
  return all ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invariant tori of presymplectic maps by a reducibility-based Newton method"};
  app.require_subcommand(1);

  std::string config, out, log, torus, lambda, frequency, a, b, out_dir;
  double sigma = 0.0;
  double tolerance = 1e-11;
  int radius = 1000;
  int samples = 1000;
  int steps = 1000;

  auto* solve = app.add_subcommand("solve", "Solve for an invariant torus");
  solve->add_option("--config", config, "Run configuration (TOML)")->required()->check(CLI::ExistingFile);
  solve->add_option("--out", out, "Write the converged torus (JSON)");
  solve->add_option("--log", log, "Write the iteration log (CSV)");

  auto* cont = app.add_subcommand("continue", "Continue a torus along a parameter schedule");
  cont->add_option("--config", config, "Run configuration with [continuation]")
      ->required()
      ->check(CLI::ExistingFile);
  cont->add_option("--out-dir", out_dir, "Directory for per-stage torus files");

  auto* diag = app.add_subcommand("diagnose", "Report diagnostics of a torus or a frequency");
  diag->add_option("--torus", torus, "Torus file")->check(CLI::ExistingFile);
  diag->add_option("--config", config, "Run configuration")->check(CLI::ExistingFile);
  diag->add_option("--lambda", lambda, "Parameter values, comma separated");
  diag->add_option("--frequency", frequency, "Frequency vector, comma separated");
  diag->add_option("--sigma", sigma, "Diophantine exponent (default d+n)");
  diag->add_option("--radius", radius, "Scan radius in |l|_1")->check(CLI::PositiveNumber);

  auto* align = app.add_subcommand("align", "Find the phase shift between two tori");
  align->add_option("--a", a, "Reference torus")->required()->check(CLI::ExistingFile);
  align->add_option("--b", b, "Shifted torus")->required()->check(CLI::ExistingFile);
  align->add_option("--tolerance", tolerance, "Residual tolerance");

  auto* verify = app.add_subcommand("verify", "Run the a-posteriori checks on a torus");
  verify->add_option("--torus", torus, "Torus file")->required()->check(CLI::ExistingFile);
  verify->add_option("--config", config, "Run configuration")->required()->check(CLI::ExistingFile);
  verify->add_option("--lambda", lambda, "Parameter values, comma separated");
  verify->add_option("--samples", samples, "Off-grid sample count")->check(CLI::PositiveNumber);
  verify->add_option("--steps", steps, "Orbit length")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return run_solve(config, out, log);
    if (*cont) return run_continue(config, out_dir);
    if (*diag) return run_diagnose(torus, config, lambda, frequency, sigma, radius);
    if (*align) return run_align(a, b, tolerance);
    if (*verify) return run_verify(torus, config, lambda, samples, steps);
  } catch (const std::exception& e) {
    std::cerr << "pkam: " << e.what() << "\n";
    return is_degeneracy(e) ? kExitDegenerate : kExitFailure;
  }
  return kExitFailure;
}
