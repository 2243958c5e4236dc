#pragma once

// Parametric families of presymplectic maps on T^d x R^d x T^n.
//
// Coordinates are ordered u = (x, y, z). Maps return lifted values: angle
// outputs are never reduced modulo 1.

#include "pkam/fourier.hpp"

#include <functional>
#include <limits>
#include <string>

namespace pkam {

using MapEvaluator = std::function<Vec(const Vec& u, const Vec& lambda)>;
using MatrixEvaluator = std::function<Mat(const Vec& u, const Vec& lambda)>;

struct MapFamily {
  std::string name;
  int d = 1;
  int n = 1;
  int m = 0;
  MapEvaluator map;
  /// Full (2d+n) x (2d+n) Jacobian in u.
  MatrixEvaluator jacobian;
  /// (2d+n) x m derivative in the parameters.
  MatrixEvaluator parameter_jacobian;
  /// f at lambda = 0 is exact presymplectic.
  bool exact_at_zero = false;
  /// Declared domain: |y_i| <= y_bound.
  double y_bound = std::numeric_limits<double>::infinity();

  int phase_dim() const { return 2 * d + n; }
  Vec zero_parameters() const { return Vec::Zero(m); }
};

/// d = n = 1 coupled standard family with translation parameters
/// lambda = (lambda_x, lambda_y, lambda_z):
///   y' = y + lambda_y - strength/(2 pi) sin(2 pi x)
///   x' = x + y' + lambda_x
///   z' = z + drift + lambda_z + coupling cos(2 pi x)
MapFamily coupled_standard_family(double strength, double coupling, double drift,
                                  double y_bound = 50.0);

/// Wraps a bare evaluator; Jacobians come from central differences with
/// step rel_step * max(1, |u_i|).
MapFamily finite_difference_family(std::string name, int d, int n, int m, MapEvaluator map,
                                   double rel_step = 1e-6);

/// outer(., lambda_outer) composed with inner(., lambda_inner), as a family
/// with no parameters.
MapFamily compose(const MapFamily& outer, const Vec& lambda_outer, const MapFamily& inner,
                  const Vec& lambda_inner);

/// The (2d+n) identity map with no parameters.
MapFamily identity_family(int d, int n);

}  // namespace pkam
