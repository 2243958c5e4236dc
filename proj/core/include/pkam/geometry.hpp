#pragma once

// Exact presymplectic structure on T^d x R^d x T^n.
//
// Omega_u(xi, eta) = <xi, Jt(u) eta> with Jt = diag(J(u), 0_n); the kernel
// of Omega is the z-direction. Omega = d(alpha) for alpha = a(u) du.

#include "pkam/fourier.hpp"
#include "pkam/models.hpp"

#include <cstdint>
#include <functional>

namespace pkam {

class PresymplecticStructure {
 public:
  using MatrixField = std::function<Mat(const Vec& u)>;
  using VectorField = std::function<Vec(const Vec& u)>;

  /// J = [[0, -I], [I, 0]] with primitive alpha = sum y_i dx_i.
  static PresymplecticStructure standard(int d, int n);

  /// Constant J with a linear primitive a(u) = P u. P may only depend on
  /// the actions (angle columns zero) and must satisfy P^T - P = Jt.
  static PresymplecticStructure constant(int d, int n, const Mat& J, const Mat& P);

  /// u-dependent J. The primitive must be supplied for flux computations.
  PresymplecticStructure(int d, int n, MatrixField J, VectorField primitive);

  int d() const { return d_; }
  int n() const { return n_; }
  int phase_dim() const { return 2 * d_ + n_; }
  bool constant_J() const { return constant_; }

  Mat J(const Vec& u) const;
  Mat J_inverse(const Vec& u) const;
  /// diag(J, 0), (2d+n) x (2d+n).
  Mat J_tilde(const Vec& u) const;
  /// Coefficients a(u) of the primitive.
  Vec primitive(const Vec& u) const;

  /// Max over random points of |D a^T - D a - Jt| with D a from central
  /// differences (exterior derivative of alpha against Omega).
  double primitive_defect(int samples, std::uint64_t seed, double y_range = 1.0) const;

 private:
  PresymplecticStructure() = default;

  int d_ = 0;
  int n_ = 0;
  bool constant_ = false;
  Mat J_const_;
  Mat J_inv_const_;
  MatrixField J_;
  VectorField primitive_;
};

struct LagrangianDefect {
  GridField L;  ///< DK^T Jt(K) DK, (d+n) x (d+n)
  double norm = 0.0;  ///< weighted-l1 norm at the requested rho
  double sup = 0.0;   ///< grid sup
};

/// Matrix of the pullback K^* Omega on the padded grid of K.
LagrangianDefect lagrangian_defect(const TorusEmbedding& K, const PresymplecticStructure& S,
                                   double rho = 0.0);

/// Flux of f^* alpha - alpha over the d+n fundamental loops of `reference`,
/// averaged over the loop base points (trapezoid rule on the grid).
Vec flux(const MapFamily& f, const Vec& lambda, const PresymplecticStructure& S,
         const TorusEmbedding& reference);

/// Flux over the loops of the flat torus (theta_x, 0, theta_z).
Vec flux(const MapFamily& f, const Vec& lambda, const PresymplecticStructure& S,
         int resolution = 64);

struct PresymplecticCheck {
  double residual = 0.0;        ///< max |Df^T Jt Df - Jt|
  double structural_block = 0.0;  ///< max |d(x', y')/dz|
  bool structural_ok = true;
};

/// Samples x, z uniformly on [0,1) and y in [-y_range, y_range].
PresymplecticCheck verify_presymplectic(const MapFamily& f, const Vec& lambda,
                                        const PresymplecticStructure& S, int samples,
                                        std::uint64_t seed, double y_range = 1.0);

/// Weighted-l1 norm of a sampled field at the grid's full resolution.
double grid_analytic_norm(const GridField& field, double rho);

/// Largest truncation a grid resolves without the Nyquist mode.
std::vector<int> grid_radius(const GridShape& shape);

}  // namespace pkam
