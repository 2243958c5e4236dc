#pragma once

// A-posteriori checks on a computed torus.

#include "pkam/fourier.hpp"
#include "pkam/geometry.hpp"
#include "pkam/models.hpp"
#include "pkam/reducibility.hpp"

#include <cstdint>

namespace pkam {

struct VanishingReport {
  Vec mu_bar;         ///< grid mean of (f_lambda - f_ref)(K)
  Vec components;     ///< average of M^{-1}(theta) mu_bar, frame order (x, y, z)
  double y_block = 0.0;  ///< max |component| over the y block
  double tolerance = 0.0;
  bool vanishes = false;
};

/// Frame expansion of the averaged parameter displacement. `lambda_ref`
/// selects the exact reference map (zero when empty). The y block is
/// declared vanishing below max(1e-9, 10 |e| |M^{-1}|).
VanishingReport vanishing_average(const TorusEmbedding& K, const MapFamily& f, const Vec& lambda,
                                  const ReducedFrame& frame, double error_norm = 0.0,
                                  const Vec& lambda_ref = Vec());

struct TwistReport {
  Mat avg_S;
  double determinant = 0.0;
  double condition = 0.0;  ///< 2-norm condition number, +inf when singular
  bool singular = false;
};

TwistReport twist_matrix(const ReducedFrame& frame);

struct NondegeneracyReport {
  int rank_avg_lambda = 0;
  double sigma_min_avg_lambda = 0.0;
  double cond_M = 0.0;
  double cond_V = 0.0;
  double qm_residual = 0.0;
  double lagrangian_norm = 0.0;
  int required_rank = 0;
  bool nondegenerate = false;
};

NondegeneracyReport nondegeneracy_report(const ReducedFrame& frame,
                                         const PresymplecticStructure& S);

/// |L| computed from the frame's DK and K samples.
double frame_lagrangian_norm(const ReducedFrame& frame, const PresymplecticStructure& S);

/// Max over random theta of max_i |f(K(theta)) - K(theta + omega)|_i, angle
/// components taken in the nearest lift. Uses direct Fourier summation.
double offgrid_invariance_residual(const TorusEmbedding& K, const MapFamily& f,
                                   const Vec& lambda, const Vec& omega, int samples = 1000,
                                   std::uint64_t seed = 1);

/// Max over 0 <= m <= steps of |f^m(K(theta0)) - K(theta0 + m omega)|.
double orbit_shadowing(const TorusEmbedding& K, const MapFamily& f, const Vec& lambda,
                       const Vec& omega, const Vec& theta0, int steps = 1000);

}  // namespace pkam
