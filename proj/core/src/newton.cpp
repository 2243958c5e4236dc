#include "pkam/newton.hpp"

#include "pkam/cohomology.hpp"
#include "pkam/diagnostics.hpp"
#include "pkam/diophantine.hpp"
#include "pkam/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace pkam {

namespace {

std::span<const double> as_span(const Vec& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

// Zero-average solution of v - v o T = h - avg h.
FourierSeries zero_average_solve(FourierSeries h, const Vec& omega, double floor) {
  h.set_average(Mat::Zero(h.rows(), h.cols()));
  if (floor > 0.0) {
    for (int c = 0; c < h.components(); ++c) {
      for (Complex& v : h.component_span(c)) {
        if (std::abs(v) < floor) v = Complex(0.0, 0.0);
      }
    }
  }
  return solve_difference(h, omega, 0.0).v;
}

constexpr double kTailNoise = 1e-15;

std::string format_error(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

void SolveConfig::validate(int m) const {
  if (!(target_error > 1e-14)) {
    throw ConfigError("target error must exceed the 1e-14 machine floor guard");
  }
  if (max_iterations < 1) throw ConfigError("max_iterations must be at least 1");
  if (max_halvings < 0) throw ConfigError("max_halvings must be nonnegative");
  if (max_radius < 1) throw ConfigError("max_radius must be at least 1");
  if (tail_factor < 0.0) throw ConfigError("tail_factor must be nonnegative");
  if (error_rho < 0.0) throw ConfigError("error_rho must be nonnegative");
  if (!(delta0 > 0.0)) throw ConfigError("delta0 must be positive");
  if (!(coefficient_floor >= 0.0)) throw ConfigError("coefficient_floor must be nonnegative");
  if (!parameter_mask.empty() && static_cast<int>(parameter_mask.size()) != m) {
    throw ConfigError("parameter mask length " + std::to_string(parameter_mask.size()) +
                      " does not match the family's " + std::to_string(m) + " parameters");
  }
}

InvarianceError invariance_error(const TorusEmbedding& K, const MapFamily& f, const Vec& lambda,
                                 const Vec& omega, double rho, const GridShape* grid) {
  if (K.d() != f.d || K.n() != f.n) throw DimensionMismatch("torus and map differ");
  if (omega.size() != K.torus_dim()) throw DimensionMismatch("frequency has wrong dimension");
  const GridShape g = grid != nullptr ? *grid : padded_grid(K.radius());
  const int d = K.d();
  const int n = K.n();
  const GridField values = K.values(g);
  const GridField next = K.shifted(as_span(omega)).values(g);
  InvarianceError out;
  out.e = GridField(g, K.phase_dim(), 1);
  parallel_for(g.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const Vec u = values.at(p).col(0);
      for (int i = 0; i < d; ++i) {
        if (!(std::abs(u(d + i)) <= f.y_bound)) {
          throw DomainEscape("torus leaves the map domain: |y" + std::to_string(i) +
                             "| = " + std::to_string(std::abs(u(d + i))) + " > " +
                             std::to_string(f.y_bound));
        }
      }
      Vec diff = f.map(u, lambda) - next.at(p).col(0);
      for (int i = 0; i < d; ++i) diff(i) -= std::nearbyint(diff(i));
      for (int j = 0; j < n; ++j) diff(2 * d + j) -= std::nearbyint(diff(2 * d + j));
      out.e.at(p) = diff;
    }
  });
  out.norm = grid_analytic_norm(out.e, rho);
  out.sup = out.e.sup_norm();
  return out;
}

LinearSolution solve_linearized(const ReducedFrame& fr, const GridField& e,
                                const std::vector<int>& radius, const SolveConfig& cfg) {
  if (!fr.has_map) throw ConfigError("linearized solve needs a frame built with the map");
  const int d = fr.d;
  const int n = fr.n;
  const int dim = fr.phase_dim();
  const int m = static_cast<int>(fr.Lambda.cols());
  const GridShape& g = fr.grid;
  if (!(e.shape() == g) || e.rows() != dim || e.cols() != 1) {
    throw ShapeMismatch("invariance error does not live on the frame grid");
  }
  cfg.validate(m);

  GridField eta = multiply(fr.M_inv_next, e);
  for (double& v : eta.data()) v = -v;

  std::vector<int> act;
  for (int j = 0; j < m; ++j) {
    if (cfg.active(j)) act.push_back(j);
  }
  const int ma = static_cast<int>(act.size());
  const int twist = cfg.use_twist ? d : 0;
  const int unknowns = ma + twist;

  GridField lam(g, dim, std::max(ma, 1));
  for (std::size_t p = 0; p < g.size(); ++p) {
    for (int j = 0; j < ma; ++j) lam.at(p).col(j) = fr.Lambda.at(p).col(act[static_cast<std::size_t>(j)]);
  }

  const FourierSeries eta_s = FourierSeries::from_grid(eta, radius);
  const FourierSeries lam_s = FourierSeries::from_grid(lam, radius);
  const Mat eta_avg = eta_s.average();
  double scale = 1.0;
  for (double v : fr.values.data()) scale = std::max(scale, std::abs(v));
  const double floor = cfg.coefficient_floor * scale;
  const Mat lam_avg = lam_s.average();

  // Linear response of xi_y to the eps-free right side and to each parameter.
  const FourierSeries L0 = zero_average_solve(eta_s.block(d, 0, d, 1), fr.omega, floor);
  std::vector<FourierSeries> Lj;
  for (int j = 0; j < ma; ++j) Lj.push_back(zero_average_solve(lam_s.block(d, j, d, 1), fr.omega, floor));

  auto avg_with = [&](const GridField& B, const FourierSeries& v) {
    return Mat(multiply(B, v.to_grid(g)).average());
  };

  Mat G = Mat::Zero(dim, unknowns);
  Vec b = Vec::Zero(dim);
  b.segment(d, d) = eta_avg.block(d, 0, d, 1);
  const Mat SL0 = avg_with(fr.S, L0);
  const Mat AL0 = n > 0 ? avg_with(fr.A, L0) : Mat(0, 1);
  b.segment(0, d) = eta_avg.block(0, 0, d, 1) - SL0;
  if (n > 0) b.segment(2 * d, n) = eta_avg.block(2 * d, 0, n, 1) - AL0;
  for (int j = 0; j < ma; ++j) {
    const auto& Lr = Lj[static_cast<std::size_t>(j)];
    G.block(d, j, d, 1) = lam_avg.block(d, j, d, 1);
    G.block(0, j, d, 1) = lam_avg.block(0, j, d, 1) - avg_with(fr.S, Lr);
    if (n > 0) G.block(2 * d, j, n, 1) = lam_avg.block(2 * d, j, n, 1) - avg_with(fr.A, Lr);
  }
  if (twist > 0) {
    G.block(0, ma, d, d) = fr.S.average();
    if (n > 0) G.block(2 * d, ma, n, d) = fr.A.average();
  }

  LinearSolution out;
  out.square = unknowns == dim;
  Vec sol = Vec::Zero(unknowns);
  if (unknowns > 0) {
    Eigen::ColPivHouseholderQR<Mat> qr(G);
    qr.setThreshold(1e-12);
    out.rank = static_cast<int>(qr.rank());
    if (out.rank < unknowns) throw RankDeficient(out.rank, unknowns);
    sol = qr.solve(b);
  }
  const Vec eps_a = sol.head(ma);
  out.eps = Vec::Zero(m);
  for (int j = 0; j < ma; ++j) out.eps(act[static_cast<std::size_t>(j)]) = eps_a(j);
  out.xi_y_average = twist > 0 ? Vec(sol.tail(d)) : Vec(Vec::Zero(d));

  FourierSeries xi_y = L0;
  for (int j = 0; j < ma; ++j) xi_y -= eps_a(j) * Lj[static_cast<std::size_t>(j)];
  xi_y.set_average(out.xi_y_average);
  const GridField xi_y_grid = xi_y.to_grid(g);

  GridField hx(g, d, 1);
  GridField hz(g, std::max(n, 1), 1);
  parallel_for(g.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const auto et = eta.at(p);
      const auto la = lam.at(p);
      const Vec yv = xi_y_grid.at(p).col(0);
      Vec lam_eps = Vec::Zero(dim);
      if (ma > 0) lam_eps = la.leftCols(ma) * eps_a;
      hx.at(p) = et.block(0, 0, d, 1) - lam_eps.segment(0, d) - fr.S.at(p) * yv;
      if (n > 0) hz.at(p) = et.block(2 * d, 0, n, 1) - lam_eps.segment(2 * d, n) - fr.A.at(p) * yv;
    }
  });
  const FourierSeries hx_s = FourierSeries::from_grid(hx, radius);
  out.avg_residual = Vec::Zero(dim);
  out.avg_residual.segment(0, d) = hx_s.average().col(0);
  Vec y_res = eta_avg.block(d, 0, d, 1);
  if (ma > 0) y_res -= lam_avg.block(d, 0, d, ma) * eps_a;
  out.avg_residual.segment(d, d) = y_res;

  FourierSeries xi(dim, 1, radius);
  xi.set_block(0, 0, zero_average_solve(hx_s, fr.omega, floor));
  xi.set_block(d, 0, xi_y);
  if (n > 0) {
    const FourierSeries hz_s = FourierSeries::from_grid(hz, radius);
    out.avg_residual.segment(2 * d, n) = hz_s.average().col(0);
    xi.set_block(2 * d, 0, zero_average_solve(hz_s, fr.omega, floor));
  }
  out.xi = std::move(xi);

  out.avg_tolerance =
      cfg.avg_tolerance < 0.0 ? 1e-10 * eta_s.analytic_norm(0.0) : cfg.avg_tolerance;
  const double worst = out.avg_residual.size() > 0 ? out.avg_residual.cwiseAbs().maxCoeff() : 0.0;
  if (out.square && worst > out.avg_tolerance) throw NonzeroAverage(worst);
  out.divisor_floor = divisor_floor(fr.omega, radius).value;
  return out;
}

StepResult kam_step(const TorusEmbedding& K, const Vec& lambda, const MapFamily& f,
                    const PresymplecticStructure& S, const Vec& omega, const SolveConfig& cfg,
                    int iteration) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate(f.m);
  const std::vector<int> radius = K.radius();
  const InvarianceError err = invariance_error(K, f, lambda, omega, cfg.error_rho);
  const ReducedFrame fr = build_frame(K, f, lambda, S, omega);
  const LinearSolution lin = solve_linearized(fr, err.e, radius, cfg);
  const FourierSeries delta =
      FourierSeries::from_grid(multiply(fr.M, lin.xi.to_grid(fr.grid)), radius);

  StepReport rep;
  rep.iteration = iteration;
  rep.err_before = err.norm;
  rep.divisor_floor = lin.divisor_floor;
  rep.cond_M = fr.summary.cond_M;
  rep.cond_V = fr.summary.cond_V;
  rep.rank_avg_lambda = fr.summary.rank_avg_Lambda;
  rep.sigma_min_avg_lambda = fr.summary.sigma_min_avg_Lambda;
  rep.lagrangian_norm = frame_lagrangian_norm(fr, S);
  rep.qm_residual = fr.summary.qm_residual;
  rep.vinv_r = fr.summary.vinv_r;
  rep.c_offpattern = fr.summary.c_offpattern_max();
  rep.dk_norm = fr.DK.sup_norm();
  rep.avg_S = fr.summary.avg_S.determinant();
  rep.avg_residual = lin.avg_residual.size() > 0 ? lin.avg_residual.cwiseAbs().maxCoeff() : 0.0;
  rep.avg_tolerance = lin.avg_tolerance;
  rep.avg_Lambda_vq = fr.summary.avg_Lambda_vq;

  StepResult out;
  double t = 1.0;
  bool accepted = false;
  for (int h = 0; h <= cfg.max_halvings; ++h) {
    TorusEmbedding trial = K;
    FourierSeries scaled = delta;
    scaled *= t;
    trial.periodic() += scaled;
    const Vec lam_t = lambda + t * lin.eps;
    double after = std::numeric_limits<double>::infinity();
    try {
      after = invariance_error(trial, f, lam_t, omega, cfg.error_rho).norm;
    } catch (const DomainEscape&) {
      if (!cfg.damping) throw;
    }
    if (!cfg.damping || after <= err.norm) {
      out.K = std::move(trial);
      out.lambda = lam_t;
      rep.err_after = after;
      rep.halvings = h;
      rep.delta_norm = scaled.analytic_norm(cfg.error_rho);
      double dd = 0.0;
      for (int a = 0; a < K.torus_dim(); ++a) {
        dd = std::max(dd, scaled.derivative(a).analytic_norm(cfg.error_rho));
      }
      rep.d_delta_norm = dd;
      rep.eps_norm = t * (lin.eps.size() > 0 ? lin.eps.cwiseAbs().maxCoeff() : 0.0);
      accepted = true;
      break;
    }
    t *= 0.5;
  }

  if (!accepted) {
    if (err.norm <= cfg.target_error) {
      // Already at the floor; keep the input.
      out.K = K;
      out.lambda = lambda;
      rep.err_after = err.norm;
      rep.halvings = cfg.max_halvings;
    } else {
      throw StepRejected("error did not decrease after " + std::to_string(cfg.max_halvings) +
                         " halvings (error " + format_error(err.norm) + ")");
    }
  }
  rep.accepted = accepted;

  // The tail is compared as an amplitude (root of the energy fraction).
  // Converged steps and roundoff-level tails never trigger growth.
  double tail = 0.0;
  std::vector<int> grown = out.K.radius();
  bool grow = false;
  const bool may_grow = cfg.grow_truncation && rep.err_after > cfg.target_error;
  for (int a = 0; a < out.K.torus_dim(); ++a) {
    const double ratio = std::sqrt(out.K.periodic().tail_energy_ratio(a));
    tail = std::max(tail, ratio);
    auto& r = grown[static_cast<std::size_t>(a)];
    if (may_grow && ratio > std::max(cfg.tail_factor * rep.err_after, kTailNoise) &&
        2 * r <= cfg.max_radius && r > 0) {
      r *= 2;
      grow = true;
    }
  }
  if (grow) out.K = out.K.with_radius(grown);
  rep.tail_ratio = tail;
  rep.radius = out.K.radius();
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.report = std::move(rep);
  return out;
}

SolveResult solve(const TorusEmbedding& K0, const Vec& lambda0, const MapFamily& f,
                  const PresymplecticStructure& S, const Vec& omega, const SolveConfig& cfg) {
  cfg.validate(f.m);
  if (lambda0.size() != f.m) throw DimensionMismatch("initial parameters have wrong length");
  const double sigma = cfg.sigma > 0.0 ? cfg.sigma : static_cast<double>(K0.torus_dim());
  int scan_radius = 0;
  for (int r : K0.radius()) scan_radius += r;
  const Frequency freq = certify(omega, sigma, std::max(scan_radius, 1));
  if (freq.rejected) throw ResonantMode(freq.worst_l, 0.0);

  SolveResult cur;
  cur.K = K0;
  cur.lambda = lambda0;
  cur.gamma_estimate = freq.gamma_estimate;
  SolveResult best = cur;
  best.final_error = std::numeric_limits<double>::infinity();

  // Names axes whose tail still calls for growth but cannot double further.
  auto capped = [&]() {
    std::string note;
    if (!cfg.grow_truncation || cur.reports.empty()) return note;
    const double err = cur.reports.back().err_after;
    for (int a = 0; a < cur.K.torus_dim(); ++a) {
      const int r = cur.K.radius()[static_cast<std::size_t>(a)];
      const double ratio = std::sqrt(cur.K.periodic().tail_energy_ratio(a));
      if (2 * r > cfg.max_radius && ratio > std::max(cfg.tail_factor * err, kTailNoise)) {
        note += "; truncation capped at " + std::to_string(r) + " on axis " + std::to_string(a) +
                " with tail " + format_error(ratio);
      }
    }
    return note;
  };
  auto fail = [&](const std::string& why) -> NoConvergence {
    return NoConvergence(why + capped(), best.reports.empty() ? cur : best);
  };

  bool converged = false;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    StepResult sr;
    try {
      sr = kam_step(cur.K, cur.lambda, f, S, omega, cfg, it);
    } catch (const StepRejected& e) {
      throw fail(std::string("step rejected: ") + e.what());
    } catch (const Error& e) {
      // Degeneracy at the initial torus is reported as such; later it means
      // the iteration wandered off.
      if (it == 1) throw;
      throw fail(std::string("iteration broke down: ") + e.what());
    }
    if (it == 1) cur.initial_error = sr.report.err_before;
    cur.reports.push_back(sr.report);
    cur.K = std::move(sr.K);
    cur.lambda = std::move(sr.lambda);
    cur.final_error = sr.report.err_after;
    if (!std::isfinite(cur.final_error)) throw fail("error norm is not finite");
    if (cur.final_error < best.final_error) best = cur;
    if (cur.final_error <= cfg.target_error) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    best.reports = cur.reports;
    throw NoConvergence("no convergence after " + std::to_string(cfg.max_iterations) +
                            " iterations (error " + format_error(cur.final_error) + ")" + capped(),
                        best);
  }
  const double q = cur.initial_error;
  cur.smallness_indicator =
      std::pow(freq.gamma_estimate, -4.0) * std::pow(cfg.delta0, -4.0 * sigma) * q;
  cur.offgrid_residual = offgrid_invariance_residual(cur.K, f, cur.lambda, omega, 1000, 1);
  return cur;
}

ContinuationResult continue_in_parameter(const FamilyFactory& family,
                                         const std::vector<double>& schedule,
                                         const TorusEmbedding& K0, const Vec& lambda0,
                                         const PresymplecticStructure& S, const Vec& omega,
                                         const SolveConfig& config) {
  ContinuationResult out;
  TorusEmbedding K = K0;
  Vec lambda = lambda0;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const MapFamily f = family(schedule[i]);
    try {
      SolveResult r = solve(K, lambda, f, S, omega, config);
      K = r.K;
      lambda = r.lambda;
      out.stages.push_back({schedule[i], std::move(r)});
    } catch (const NoConvergence& e) {
      out.failed_stage = static_cast<int>(i);
      out.failure = e.what();
      out.failed_best = e.best();
      break;
    } catch (const Error& e) {
      out.failed_stage = static_cast<int>(i);
      out.failure = e.what();
      break;
    }
  }
  return out;
}

}  // namespace pkam
