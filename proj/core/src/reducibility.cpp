#include "pkam/reducibility.hpp"

#include "pkam/errors.hpp"
#include "pkam/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace pkam {

namespace {

std::span<const double> as_span(const Vec& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

double norm_1(const Mat& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

[[noreturn]] void degenerate(const GridShape& grid, std::size_t p, const char* what,
                             double cond) {
  const Vec theta = grid.point(p);
  throw DegenerateTorus(std::vector<double>(theta.data(), theta.data() + theta.size()), what,
                        cond);
}

// Inverse with a 1-norm condition check.
Mat checked_inverse(const Mat& a, const GridShape& grid, std::size_t p, const char* what,
                    double& cond) {
  Eigen::PartialPivLU<Mat> lu(a);
  Mat inv = lu.inverse();
  cond = condition_1(a, inv);
  if (!std::isfinite(cond) || cond > kDegenerateCondition) degenerate(grid, p, what, cond);
  return inv;
}

struct PointFrame {
  Mat N, Y, M, M_inv, V, V_inv, Q;
  double cond_XtX = 0.0, cond_M = 0.0, cond_V = 0.0;
};

PointFrame point_frame(const Vec& u, const Mat& dk, const PresymplecticStructure& S, int d,
                       int n, const GridShape& grid, std::size_t p) {
  const int dim = 2 * d + n;
  const Mat XV = dk.block(0, 0, 2 * d, d);
  const Mat XN = dk.block(2 * d, 0, n, d);
  const Mat ZV = dk.block(0, d, 2 * d, n);
  const Mat ZN = dk.block(2 * d, d, n, n);
  const Mat J = S.J(u);
  const Mat Jinv = S.J_inverse(u);

  PointFrame out;
  out.N = checked_inverse(XV.transpose() * XV, grid, p, "X_V^T X_V", out.cond_XtX);
  out.Y = XV * out.N;
  const Mat JY = Jinv * out.Y;

  out.M = Mat::Zero(dim, dim);
  out.M.block(0, 0, 2 * d, d) = XV;
  out.M.block(0, d, 2 * d, d) = JY;
  out.M.block(0, 2 * d, 2 * d, n) = ZV;
  out.M.block(2 * d, 0, n, d) = XN;
  out.M.block(2 * d, 2 * d, n, n) = ZN;
  out.M_inv = checked_inverse(out.M, grid, p, "M", out.cond_M);

  out.Q = Mat::Zero(dim, dim);
  out.Q.block(0, 0, d, 2 * d) = XV.transpose() * J;
  out.Q.block(d, 0, d, 2 * d) = JY.transpose() * J;
  out.Q.block(2 * d, 2 * d, n, n) = Mat::Identity(n, n);

  out.V = Mat::Zero(dim, dim);
  out.V.block(0, d, d, d) = Mat::Identity(d, d);
  out.V.block(d, 0, d, d) = -Mat::Identity(d, d);
  out.V.block(d, d, d, d) = -out.Y.transpose() * Jinv * out.Y;
  out.V.block(d, 2 * d, d, n) = JY.transpose() * J * ZV;
  out.V.block(2 * d, 0, n, d) = XN;
  out.V.block(2 * d, 2 * d, n, n) = ZN;
  out.V_inv = checked_inverse(out.V, grid, p, "V", out.cond_V);
  return out;
}

// Inverse of M at the shifted torus; only the inverse is needed.
Mat next_inverse(const Vec& u, const Mat& dk, const PresymplecticStructure& S, int d, int n,
                 const GridShape& grid, std::size_t p, double& cond) {
  const int dim = 2 * d + n;
  const Mat XV = dk.block(0, 0, 2 * d, d);
  double cond_g = 0.0;
  const Mat N = checked_inverse(XV.transpose() * XV, grid, p, "X_V^T X_V", cond_g);
  Mat M = Mat::Zero(dim, dim);
  M.block(0, 0, 2 * d, d) = XV;
  M.block(0, d, 2 * d, d) = S.J_inverse(u) * XV * N;
  M.block(0, 2 * d, 2 * d, n) = dk.block(0, d, 2 * d, n);
  M.block(2 * d, 0, n, d) = dk.block(2 * d, 0, n, d);
  M.block(2 * d, 2 * d, n, n) = dk.block(2 * d, d, n, n);
  return checked_inverse(M, grid, p, "M", cond);
}

}  // namespace

double condition_1(const Mat& a, const Mat& a_inv) {
  if (!a_inv.allFinite()) return std::numeric_limits<double>::infinity();
  return norm_1(a) * norm_1(a_inv);
}

double FrameSummary::c_offpattern_max() const {
  return std::max({c11, c21, c22, c31, c13, c23, c33});
}

ReducedFrame build_geometric_frame(const TorusEmbedding& K, const PresymplecticStructure& S,
                                   const Vec& omega, const GridShape* grid) {
  if (K.d() != S.d() || K.n() != S.n()) throw DimensionMismatch("torus and structure differ");
  if (omega.size() != K.torus_dim()) throw DimensionMismatch("frequency has wrong dimension");
  const int d = K.d();
  const int n = K.n();
  const int dim = K.phase_dim();

  ReducedFrame fr;
  fr.d = d;
  fr.n = n;
  fr.omega = omega;
  fr.grid = grid != nullptr ? *grid : padded_grid(K.radius());
  const GridShape& g = fr.grid;
  fr.values = K.values(g);
  fr.DK = K.jacobian(g);
  const TorusEmbedding K_next = K.shifted(as_span(omega));
  const GridField values_next = K_next.values(g);
  const GridField DK_next = K_next.jacobian(g);

  fr.N = GridField(g, d, d);
  fr.Y = GridField(g, 2 * d, d);
  fr.M = GridField(g, dim, dim);
  fr.M_inv = GridField(g, dim, dim);
  fr.M_inv_next = GridField(g, dim, dim);
  fr.V = GridField(g, dim, dim);
  fr.QM_minus_V = GridField(g, dim, dim);
  GridField vinv_r(g, dim, dim);

  const std::size_t npts = g.size();
  std::vector<double> cond_xtx(npts), cond_m(npts), cond_v(npts), inv_res(npts);
  parallel_for(npts, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const Vec u = fr.values.at(p).col(0);
      const PointFrame pf = point_frame(u, fr.DK.at(p), S, d, n, g, p);
      fr.N.at(p) = pf.N;
      fr.Y.at(p) = pf.Y;
      fr.M.at(p) = pf.M;
      fr.M_inv.at(p) = pf.M_inv;
      fr.V.at(p) = pf.V;
      const Mat R = pf.Q * pf.M - pf.V;
      fr.QM_minus_V.at(p) = R;
      vinv_r.at(p) = pf.V_inv * R;
      double cond_next = 0.0;
      fr.M_inv_next.at(p) =
          next_inverse(values_next.at(p).col(0), DK_next.at(p), S, d, n, g, p, cond_next);
      cond_xtx[p] = pf.cond_XtX;
      cond_m[p] = std::max(pf.cond_M, cond_next);
      cond_v[p] = pf.cond_V;
      inv_res[p] = (pf.M * pf.M_inv - Mat::Identity(dim, dim)).cwiseAbs().maxCoeff();
    }
  });

  FrameSummary& s = fr.summary;
  s.cond_XtX = *std::max_element(cond_xtx.begin(), cond_xtx.end());
  s.cond_M = *std::max_element(cond_m.begin(), cond_m.end());
  s.cond_V = *std::max_element(cond_v.begin(), cond_v.end());
  s.inverse_residual = *std::max_element(inv_res.begin(), inv_res.end());

  const FourierSeries R = FourierSeries::from_grid(fr.QM_minus_V, grid_radius(g));
  s.qm_residual = R.analytic_norm(0.0);
  s.r_xx = R.block(0, 0, d, d).analytic_norm(0.0);
  s.r_xz = n > 0 ? R.block(0, 2 * d, d, n).analytic_norm(0.0) : 0.0;
  s.vinv_r = grid_analytic_norm(vinv_r, 0.0);
  return fr;
}

ReducedFrame build_frame(const TorusEmbedding& K, const MapFamily& f, const Vec& lambda,
                         const PresymplecticStructure& S, const Vec& omega,
                         const GridShape* grid) {
  if (K.d() != f.d || K.n() != f.n) throw DimensionMismatch("torus and map differ");
  if (lambda.size() != f.m) throw DimensionMismatch("parameter vector has wrong length");
  ReducedFrame fr = build_geometric_frame(K, S, omega, grid);
  const int d = fr.d;
  const int n = fr.n;
  const int dim = fr.phase_dim();
  const int m = f.m;
  const GridShape& g = fr.grid;

  fr.has_map = true;
  fr.C = GridField(g, dim, dim);
  fr.Lambda = GridField(g, dim, m);
  GridField lambda_vq(g, dim, m);
  GridField pattern_defect(g, dim, dim);
  parallel_for(g.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const Vec u = fr.values.at(p).col(0);
      const Mat df = f.jacobian(u, lambda);
      const Mat C = fr.M_inv_next.at(p) * df * fr.M.at(p);
      fr.C.at(p) = C;
      Mat defect = C - Mat::Identity(dim, dim);
      defect.block(0, d, d, d).setZero();
      defect.block(2 * d, d, n, d).setZero();
      pattern_defect.at(p) = defect;
      if (m > 0) {
        const Mat dl = f.parameter_jacobian(u, lambda);
        fr.Lambda.at(p) = fr.M_inv_next.at(p) * dl;
        // Q and V of this point, recomputed from the stored frame.
        const Mat Vp = fr.V.at(p);
        const Mat Qp = (fr.QM_minus_V.at(p) + Vp) * fr.M_inv.at(p);
        lambda_vq.at(p) = Vp.partialPivLu().solve(Qp * dl);
      }
    }
  });
  fr.S = fr.C.block(0, d, d, d);
  fr.A = fr.C.block(2 * d, d, n, d);

  FrameSummary& s = fr.summary;
  const FourierSeries D = FourierSeries::from_grid(pattern_defect, grid_radius(g));
  s.c11 = D.block(0, 0, d, d).analytic_norm(0.0);
  s.c21 = D.block(d, 0, d, d).analytic_norm(0.0);
  s.c22 = D.block(d, d, d, d).analytic_norm(0.0);
  if (n > 0) {
    s.c31 = D.block(2 * d, 0, n, d).analytic_norm(0.0);
    s.c13 = D.block(0, 2 * d, d, n).analytic_norm(0.0);
    s.c23 = D.block(d, 2 * d, d, n).analytic_norm(0.0);
    s.c33 = D.block(2 * d, 2 * d, n, n).analytic_norm(0.0);
  }
  s.avg_S = fr.S.average();
  s.avg_A = fr.A.average();
  if (m > 0) {
    s.avg_Lambda = fr.Lambda.average();
    s.avg_Lambda_vq = lambda_vq.average();
    Eigen::JacobiSVD<Mat> svd(s.avg_Lambda);
    const Vec sv = svd.singularValues();
    const double tol = 1e-10 * std::max(1.0, sv(0));
    s.rank_avg_Lambda = static_cast<int>((sv.array() > tol).count());
    s.sigma_min_avg_Lambda = sv(sv.size() - 1);
  } else {
    s.avg_Lambda = Mat(dim, 0);
    s.avg_Lambda_vq = Mat(dim, 0);
  }
  return fr;
}

LagrangianResidual lagrangian_residual_frame(const ReducedFrame& frame) {
  return {frame.summary.r_xx, frame.summary.r_xz, frame.summary.vinv_r};
}

}  // namespace pkam
