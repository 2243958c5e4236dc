#pragma once

// The reducing frame M(theta) along an approximately invariant torus.
//
// M = [[X_V, J^{-1} Y, Z_V], [X_N, 0, Z_N]] with Y = X_V (X_V^T X_V)^{-1}.
// Along an invariant torus M^{-1}(theta+omega) Df(K(theta)) M(theta) has the
// block form [[I, S, 0], [0, I, 0], [0, A, I]].

#include "pkam/fourier.hpp"
#include "pkam/geometry.hpp"
#include "pkam/models.hpp"

namespace pkam {

/// Pointwise inverses above this condition number raise DegenerateTorus.
inline constexpr double kDegenerateCondition = 1e12;

struct FrameSummary {
  double cond_M = 0.0;  ///< max pointwise 1-norm condition number
  double cond_V = 0.0;
  double cond_XtX = 0.0;
  double inverse_residual = 0.0;  ///< max |M M^{-1} - I|
  double qm_residual = 0.0;       ///< weighted-l1 norm of QM - V
  double r_xx = 0.0;              ///< norm of X_V^T J X_V
  double r_xz = 0.0;              ///< norm of X_V^T J Z_V
  double vinv_r = 0.0;            ///< norm of V^{-1}(QM - V)

  /// Off-pattern blocks of C, weighted-l1 norms: C11 - I, C21, C22 - I,
  /// C31, C13, C23, C33 - I.
  double c11 = 0.0, c21 = 0.0, c22 = 0.0, c31 = 0.0, c13 = 0.0, c23 = 0.0, c33 = 0.0;
  double c_offpattern_max() const;

  Mat avg_S;
  Mat avg_A;
  Mat avg_Lambda;     ///< average of M^{-1}(theta+omega) df/dlambda(K(theta))
  Mat avg_Lambda_vq;  ///< average of V^{-1}(theta) Q(theta) df/dlambda(K(theta))
  int rank_avg_Lambda = 0;
  double sigma_min_avg_Lambda = 0.0;
};

struct ReducedFrame {
  int d = 0;
  int n = 0;
  GridShape grid;
  Vec omega;

  GridField values;   ///< K(theta)
  GridField DK;       ///< (X, Z)
  GridField N;        ///< (X_V^T X_V)^{-1}
  GridField Y;        ///< X_V N, 2d x d
  GridField M;
  GridField M_inv;
  GridField M_inv_next;  ///< M^{-1}(theta + omega)
  GridField V;
  GridField QM_minus_V;  ///< the R blocks

  // Present only when built with a map.
  bool has_map = false;
  GridField C;       ///< M^{-1}(theta+omega) Df(K) M(theta)
  GridField S;       ///< C_12, d x d
  GridField A;       ///< C_32, n x d
  GridField Lambda;  ///< (2d+n) x m

  FrameSummary summary;

  int phase_dim() const { return 2 * d + n; }
};

/// Geometric part of the frame (no map). Grid defaults to the padded grid
/// of K's truncation.
ReducedFrame build_geometric_frame(const TorusEmbedding& K, const PresymplecticStructure& S,
                                   const Vec& omega, const GridShape* grid = nullptr);

/// Full frame including C, S, A and Lambda.
ReducedFrame build_frame(const TorusEmbedding& K, const MapFamily& f, const Vec& lambda,
                         const PresymplecticStructure& S, const Vec& omega,
                         const GridShape* grid = nullptr);

struct LagrangianResidual {
  double r_xx = 0.0;    ///< X_V^T J X_V
  double r_xz = 0.0;    ///< X_V^T J Z_V
  double vinv_r = 0.0;  ///< V^{-1} R
};

LagrangianResidual lagrangian_residual_frame(const ReducedFrame& frame);

/// Pointwise 1-norm condition number from a computed inverse.
double condition_1(const Mat& a, const Mat& a_inv);

}  // namespace pkam
