#include "pkam/models.hpp"

#include "pkam/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pkam {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

MapFamily coupled_standard_family(double strength, double coupling, double drift,
                                  double y_bound) {
  MapFamily f;
  f.name = "coupled_standard";
  f.d = 1;
  f.n = 1;
  f.m = 3;
  f.exact_at_zero = true;
  f.y_bound = y_bound;
  f.map = [=](const Vec& u, const Vec& lambda) {
    const double x = u(0);
    const double yp = u(1) + lambda(1) - strength / kTwoPi * std::sin(kTwoPi * x);
    Vec out(3);
    out(0) = x + yp + lambda(0);
    out(1) = yp;
    out(2) = u(2) + drift + lambda(2) + coupling * std::cos(kTwoPi * x);
    return out;
  };
  f.jacobian = [=](const Vec& u, const Vec&) {
    const double x = u(0);
    const double dy_dx = -strength * std::cos(kTwoPi * x);
    Mat df = Mat::Zero(3, 3);
    df(0, 0) = 1.0 + dy_dx;
    df(0, 1) = 1.0;
    df(1, 0) = dy_dx;
    df(1, 1) = 1.0;
    df(2, 0) = -kTwoPi * coupling * std::sin(kTwoPi * x);
    df(2, 2) = 1.0;
    return df;
  };
  f.parameter_jacobian = [](const Vec&, const Vec&) {
    // lambda_y enters x' through y'.
    Mat dl = Mat::Zero(3, 3);
    dl(0, 0) = 1.0;
    dl(0, 1) = 1.0;
    dl(1, 1) = 1.0;
    dl(2, 2) = 1.0;
    return dl;
  };
  return f;
}

MapFamily finite_difference_family(std::string name, int d, int n, int m, MapEvaluator map,
                                   double rel_step) {
  MapFamily f;
  f.name = std::move(name);
  f.d = d;
  f.n = n;
  f.m = m;
  f.map = map;
  const int dim = 2 * d + n;
  f.jacobian = [map, dim, rel_step](const Vec& u, const Vec& lambda) {
    Mat df(dim, dim);
    Vec probe = u;
    for (int j = 0; j < dim; ++j) {
      const double h = rel_step * std::max(1.0, std::abs(u(j)));
      probe(j) = u(j) + h;
      const Vec plus = map(probe, lambda);
      probe(j) = u(j) - h;
      const Vec minus = map(probe, lambda);
      probe(j) = u(j);
      df.col(j) = (plus - minus) / (2.0 * h);
    }
    return df;
  };
  f.parameter_jacobian = [map, dim, m, rel_step](const Vec& u, const Vec& lambda) {
    Mat dl(dim, m);
    Vec probe = lambda;
    for (int j = 0; j < m; ++j) {
      const double h = rel_step * std::max(1.0, std::abs(lambda(j)));
      probe(j) = lambda(j) + h;
      const Vec plus = map(u, probe);
      probe(j) = lambda(j) - h;
      const Vec minus = map(u, probe);
      probe(j) = lambda(j);
      dl.col(j) = (plus - minus) / (2.0 * h);
    }
    return dl;
  };
  return f;
}

MapFamily compose(const MapFamily& outer, const Vec& lambda_outer, const MapFamily& inner,
                  const Vec& lambda_inner) {
  if (outer.d != inner.d || outer.n != inner.n) {
    throw DimensionMismatch("composed maps must act on the same phase space");
  }
  MapFamily f;
  f.name = outer.name + "*" + inner.name;
  f.d = outer.d;
  f.n = outer.n;
  f.m = 0;
  f.exact_at_zero = outer.exact_at_zero && inner.exact_at_zero;
  f.y_bound = std::min(outer.y_bound, inner.y_bound);
  f.map = [=](const Vec& u, const Vec&) {
    return outer.map(inner.map(u, lambda_inner), lambda_outer);
  };
  f.jacobian = [=](const Vec& u, const Vec&) {
    const Vec mid = inner.map(u, lambda_inner);
    return Mat(outer.jacobian(mid, lambda_outer) * inner.jacobian(u, lambda_inner));
  };
  const int dim = f.phase_dim();
  f.parameter_jacobian = [dim](const Vec&, const Vec&) { return Mat(dim, 0); };
  return f;
}

MapFamily identity_family(int d, int n) {
  MapFamily f;
  f.name = "identity";
  f.d = d;
  f.n = n;
  f.m = 0;
  f.exact_at_zero = true;
  const int dim = 2 * d + n;
  f.map = [](const Vec& u, const Vec&) { return u; };
  f.jacobian = [dim](const Vec&, const Vec&) { return Mat(Mat::Identity(dim, dim)); };
  f.parameter_jacobian = [dim](const Vec&, const Vec&) { return Mat(dim, 0); };
  return f;
}

}  // namespace pkam
