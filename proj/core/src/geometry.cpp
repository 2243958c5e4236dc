#include "pkam/geometry.hpp"

#include "pkam/errors.hpp"
#include "pkam/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace pkam {

namespace {

Mat standard_J(int d) {
  Mat J = Mat::Zero(2 * d, 2 * d);
  J.block(0, d, d, d) = -Mat::Identity(d, d);
  J.block(d, 0, d, d) = Mat::Identity(d, d);
  return J;
}

double max_row_sum(const Mat& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

Vec random_point(std::mt19937_64& rng, int d, int n, double y_range) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> action(-y_range, y_range);
  Vec u(2 * d + n);
  for (int i = 0; i < d; ++i) u(i) = unit(rng);
  for (int i = 0; i < d; ++i) u(d + i) = action(rng);
  for (int j = 0; j < n; ++j) u(2 * d + j) = unit(rng);
  return u;
}

}  // namespace

PresymplecticStructure PresymplecticStructure::standard(int d, int n) {
  if (d < 1 || n < 0) throw DimensionMismatch("presymplectic structure needs d >= 1, n >= 0");
  Mat P = Mat::Zero(2 * d + n, 2 * d + n);
  for (int i = 0; i < d; ++i) P(i, d + i) = 1.0;  // a_x = y
  return constant(d, n, standard_J(d), P);
}

PresymplecticStructure PresymplecticStructure::constant(int d, int n, const Mat& J,
                                                        const Mat& P) {
  if (d < 1 || n < 0) throw DimensionMismatch("presymplectic structure needs d >= 1, n >= 0");
  const int dim = 2 * d + n;
  if (J.rows() != 2 * d || J.cols() != 2 * d) throw DimensionMismatch("J must be 2d x 2d");
  if (P.rows() != dim || P.cols() != dim) throw DimensionMismatch("primitive must be (2d+n)^2");
  const double scale = std::max(1.0, J.cwiseAbs().maxCoeff());
  if ((J + J.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale) {
    throw ConfigError("J must be skew-symmetric");
  }
  Eigen::FullPivLU<Mat> lu(J);
  if (!lu.isInvertible()) throw ConfigError("J must be invertible");
  for (int i = 0; i < d; ++i) {
    if (P.col(i).cwiseAbs().maxCoeff() > 0.0) {
      throw ConfigError("primitive may not depend on the x angles");
    }
  }
  for (int j = 0; j < n; ++j) {
    if (P.col(2 * d + j).cwiseAbs().maxCoeff() > 0.0) {
      throw ConfigError("primitive may not depend on the z angles");
    }
  }
  Mat Jt = Mat::Zero(dim, dim);
  Jt.topLeftCorner(2 * d, 2 * d) = J;
  if ((P.transpose() - P - Jt).cwiseAbs().maxCoeff() > 1e-14 * scale) {
    throw ConfigError("primitive does not satisfy d(alpha) = Omega");
  }

  PresymplecticStructure s;
  s.d_ = d;
  s.n_ = n;
  s.constant_ = true;
  s.J_const_ = J;
  s.J_inv_const_ = lu.inverse();
  s.J_ = [J](const Vec&) { return J; };
  s.primitive_ = [P](const Vec& u) { return Vec(P * u); };
  return s;
}

PresymplecticStructure::PresymplecticStructure(int d, int n, MatrixField J,
                                               VectorField primitive)
    : d_(d), n_(n), J_(std::move(J)), primitive_(std::move(primitive)) {
  if (d < 1 || n < 0) throw DimensionMismatch("presymplectic structure needs d >= 1, n >= 0");
}

Mat PresymplecticStructure::J(const Vec& u) const { return constant_ ? J_const_ : J_(u); }

Mat PresymplecticStructure::J_inverse(const Vec& u) const {
  if (constant_) return J_inv_const_;
  return J_(u).partialPivLu().inverse();
}

Mat PresymplecticStructure::J_tilde(const Vec& u) const {
  Mat Jt = Mat::Zero(phase_dim(), phase_dim());
  Jt.topLeftCorner(2 * d_, 2 * d_) = J(u);
  return Jt;
}

Vec PresymplecticStructure::primitive(const Vec& u) const {
  if (!primitive_) throw ConfigError("no primitive attached to the presymplectic structure");
  return primitive_(u);
}

double PresymplecticStructure::primitive_defect(int samples, std::uint64_t seed,
                                                double y_range) const {
  std::mt19937_64 rng(seed);
  const int dim = phase_dim();
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vec u = random_point(rng, d_, n_, y_range);
    Mat Da(dim, dim);
    Vec probe = u;
    for (int j = 0; j < dim; ++j) {
      const double h = 1e-5 * std::max(1.0, std::abs(u(j)));
      probe(j) = u(j) + h;
      const Vec plus = primitive(probe);
      probe(j) = u(j) - h;
      const Vec minus = primitive(probe);
      probe(j) = u(j);
      Da.col(j) = (plus - minus) / (2.0 * h);
    }
    worst = std::max(worst, (Da.transpose() - Da - J_tilde(u)).cwiseAbs().maxCoeff());
  }
  return worst;
}

std::vector<int> grid_radius(const GridShape& shape) {
  std::vector<int> radius;
  for (int g : shape.dims()) radius.push_back(g % 2 == 0 ? g / 2 - 1 : (g - 1) / 2);
  return radius;
}

double grid_analytic_norm(const GridField& field, double rho) {
  return FourierSeries::from_grid(field, grid_radius(field.shape())).analytic_norm(rho);
}

LagrangianDefect lagrangian_defect(const TorusEmbedding& K, const PresymplecticStructure& S,
                                   double rho) {
  if (K.d() != S.d() || K.n() != S.n()) throw DimensionMismatch("torus and structure differ");
  const GridShape grid = padded_grid(K.radius());
  const GridField values = K.values(grid);
  const GridField DK = K.jacobian(grid);
  LagrangianDefect out;
  out.L = GridField(grid, K.torus_dim(), K.torus_dim());
  parallel_for(grid.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const Vec u = values.at(p).col(0);
      const Mat dk = DK.at(p);
      out.L.at(p) = dk.transpose() * S.J_tilde(u) * dk;
    }
  });
  out.norm = grid_analytic_norm(out.L, rho);
  out.sup = out.L.sup_norm();
  return out;
}

namespace {

Vec flux_on_grid(const MapFamily& f, const Vec& lambda, const PresymplecticStructure& S,
                 const TorusEmbedding& reference, const GridShape& grid) {
  const int q = reference.torus_dim();
  const GridField values = reference.values(grid);
  const GridField DK = reference.jacobian(grid);
  // Per-point integrands, then summed in point order for reproducibility.
  GridField integrand(grid, q, 1);
  parallel_for(grid.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const Vec u = values.at(p).col(0);
      const Mat dk = DK.at(p);
      const Vec fu = f.map(u, lambda);
      const Mat df = f.jacobian(u, lambda);
      const Vec pulled = (S.primitive(fu).transpose() * df * dk).transpose();
      const Vec base = (S.primitive(u).transpose() * dk).transpose();
      integrand.at(p) = pulled - base;
    }
  });
  return integrand.average().col(0);
}

}  // namespace

Vec flux(const MapFamily& f, const Vec& lambda, const PresymplecticStructure& S,
         const TorusEmbedding& reference) {
  if (reference.d() != f.d || reference.n() != f.n) {
    throw DimensionMismatch("reference torus does not match the map");
  }
  std::vector<int> dims = padded_grid(reference.radius()).dims();
  for (int& g : dims) g = std::max(g, 64);
  return flux_on_grid(f, lambda, S, reference, GridShape(std::move(dims)));
}

Vec flux(const MapFamily& f, const Vec& lambda, const PresymplecticStructure& S,
         int resolution) {
  const std::vector<int> radius(static_cast<std::size_t>(f.d + f.n), 0);
  const TorusEmbedding flat = TorusEmbedding::flat(f.d, f.n, radius, Vec::Zero(f.d));
  const std::vector<int> dims(radius.size(), std::max(resolution, 2));
  return flux_on_grid(f, lambda, S, flat, GridShape(dims));
}

PresymplecticCheck verify_presymplectic(const MapFamily& f, const Vec& lambda,
                                        const PresymplecticStructure& S, int samples,
                                        std::uint64_t seed, double y_range) {
  if (S.d() != f.d || S.n() != f.n) throw DimensionMismatch("structure does not match the map");
  std::mt19937_64 rng(seed);
  const int d = f.d;
  const int n = f.n;
  PresymplecticCheck out;
  for (int s = 0; s < samples; ++s) {
    const Vec u = random_point(rng, d, n, y_range);
    const Mat df = f.jacobian(u, lambda);
    const Mat pulled = df.transpose() * S.J_tilde(f.map(u, lambda)) * df;
    out.residual = std::max(out.residual, max_row_sum(pulled - S.J_tilde(u)));
    if (n > 0) {
      out.structural_block =
          std::max(out.structural_block, max_row_sum(df.block(0, 2 * d, 2 * d, n)));
    }
  }
  out.structural_ok = out.structural_block <= 1e-10;
  return out;
}

}  // namespace pkam
