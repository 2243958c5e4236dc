#include "pkam/diagnostics.hpp"

#include "pkam/errors.hpp"
#include "pkam/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace pkam {

namespace {

std::span<const double> as_span(const Vec& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

void unwrap_angles(Vec& diff, int d, int n) {
  for (int i = 0; i < d; ++i) diff(i) -= std::nearbyint(diff(i));
  for (int j = 0; j < n; ++j) diff(2 * d + j) -= std::nearbyint(diff(2 * d + j));
}

}  // namespace

VanishingReport vanishing_average(const TorusEmbedding& K, const MapFamily& f, const Vec& lambda,
                                  const ReducedFrame& frame, double error_norm,
                                  const Vec& lambda_ref) {
  if (K.d() != f.d || K.n() != f.n || frame.d != f.d || frame.n != f.n) {
    throw DimensionMismatch("torus, map and frame must share dimensions");
  }
  const Vec ref = lambda_ref.size() == 0 ? f.zero_parameters() : lambda_ref;
  const int dim = K.phase_dim();
  const int d = K.d();
  GridField diff(frame.grid, dim, 1);
  parallel_for(frame.grid.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const Vec u = frame.values.at(p).col(0);
      diff.at(p) = f.map(u, lambda) - f.map(u, ref);
    }
  });
  VanishingReport out;
  out.mu_bar = diff.average().col(0);
  out.components = frame.M_inv.average() * out.mu_bar;
  out.y_block = out.components.segment(d, d).cwiseAbs().maxCoeff();
  out.tolerance = std::max(1e-9, 10.0 * error_norm * frame.M_inv.sup_norm());
  out.vanishes = out.y_block <= out.tolerance;
  return out;
}

TwistReport twist_matrix(const ReducedFrame& frame) {
  if (!frame.has_map) throw ConfigError("twist needs a frame built with the map");
  TwistReport out;
  out.avg_S = frame.S.average();
  out.determinant = out.avg_S.determinant();
  Eigen::JacobiSVD<Mat> svd(out.avg_S);
  const Vec sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  out.singular = !(smin > 1e-12 * std::max(1.0, smax));
  out.condition = out.singular ? std::numeric_limits<double>::infinity() : smax / smin;
  return out;
}

double frame_lagrangian_norm(const ReducedFrame& frame, const PresymplecticStructure& S) {
  const int q = frame.d + frame.n;
  GridField L(frame.grid, q, q);
  parallel_for(frame.grid.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const Mat dk = frame.DK.at(p);
      L.at(p) = dk.transpose() * S.J_tilde(frame.values.at(p).col(0)) * dk;
    }
  });
  return grid_analytic_norm(L, 0.0);
}

NondegeneracyReport nondegeneracy_report(const ReducedFrame& frame,
                                         const PresymplecticStructure& S) {
  if (!frame.has_map) throw ConfigError("nondegeneracy report needs a frame built with the map");
  NondegeneracyReport out;
  out.rank_avg_lambda = frame.summary.rank_avg_Lambda;
  out.sigma_min_avg_lambda = frame.summary.sigma_min_avg_Lambda;
  out.cond_M = frame.summary.cond_M;
  out.cond_V = frame.summary.cond_V;
  out.qm_residual = frame.summary.qm_residual;
  out.lagrangian_norm = frame_lagrangian_norm(frame, S);
  out.required_rank = std::min(frame.phase_dim(), static_cast<int>(frame.Lambda.cols()));
  out.nondegenerate = out.rank_avg_lambda == frame.phase_dim();
  return out;
}

double offgrid_invariance_residual(const TorusEmbedding& K, const MapFamily& f,
                                   const Vec& lambda, const Vec& omega, int samples,
                                   std::uint64_t seed) {
  const int q = K.torus_dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec> thetas(static_cast<std::size_t>(samples), Vec(q));
  for (auto& th : thetas) {
    for (int a = 0; a < q; ++a) th(a) = unit(rng);
  }
  std::vector<double> worst(thetas.size(), 0.0);
  parallel_for(thetas.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      const Vec& th = thetas[s];
      const Vec shifted = th + omega;
      Vec diff = f.map(K.evaluate(as_span(th)), lambda) - K.evaluate(as_span(shifted));
      unwrap_angles(diff, K.d(), K.n());
      worst[s] = diff.cwiseAbs().maxCoeff();
    }
  });
  return worst.empty() ? 0.0 : *std::max_element(worst.begin(), worst.end());
}

double orbit_shadowing(const TorusEmbedding& K, const MapFamily& f, const Vec& lambda,
                       const Vec& omega, const Vec& theta0, int steps) {
  Vec u = K.evaluate(as_span(theta0));
  double worst = 0.0;
  for (int m = 1; m <= steps; ++m) {
    u = f.map(u, lambda);
    const Vec theta = theta0 + static_cast<double>(m) * omega;
    Vec diff = u - K.evaluate(as_span(theta));
    unwrap_angles(diff, K.d(), K.n());
    worst = std::max(worst, diff.cwiseAbs().maxCoeff());
    if (!std::isfinite(worst)) break;
  }
  return worst;
}

}  // namespace pkam
