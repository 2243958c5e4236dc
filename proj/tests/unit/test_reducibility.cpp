#include "support.hpp"

#include <doctest.h>

using namespace testing;
using pkam::ReducedFrame;
using pkam::TorusEmbedding;

namespace {

const auto kStd = pkam::PresymplecticStructure::standard(1, 1);

// Frame of the flat torus at y0 under the coupled standard map.
ReducedFrame flat_frame(double ks, double eta, int radius = 4) {
  const Vec w = golden_pair();
  const TorusEmbedding K = TorusEmbedding::flat(1, 1, {radius, radius}, vec({w(0)}));
  return pkam::build_frame(K, pkam::coupled_standard_family(ks, eta, w(1)), Vec::Zero(3), kStd, w);
}

}  // namespace

TEST_CASE("integrable flat torus") {
  const ReducedFrame fr = flat_frame(0.0, 0.0);
  // X_V = e_x, N = 1, Y = e_x, J^{-1} Y = -e_y.
  Mat M(3, 3);
  M << 1, 0, 0, 0, -1, 0, 0, 0, 1;
  for (std::size_t p = 0; p < fr.grid.size(); p += 7) {
    CHECK(max_abs(fr.M.at(p) - M) == 0.0);
    CHECK(fr.N(p, 0, 0) == 1.0);
    // Df maps J^{-1} Y = -e_y to -(e_x + e_y) = -X + J^{-1} Y, so S = -1.
    CHECK(fr.S(p, 0, 0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(fr.A(p, 0, 0) == 0.0);
  }
  CHECK(fr.summary.c_offpattern_max() <= 1e-15);
  CHECK(fr.summary.qm_residual <= 1e-15);
  CHECK(fr.summary.cond_M == doctest::Approx(1.0));
}

TEST_CASE("coupling shows up in the kernel row") {
  const double eta = 0.15;
  const ReducedFrame fr = flat_frame(0.0, eta, 6);
  double worst = 0.0;
  for (std::size_t p = 0; p < fr.grid.size(); ++p) {
    const double x = fr.grid.point(p)(0);
    // dz'/dx = -2 pi eta sin(2 pi x); f3 does not see y, so A = 0.
    worst = std::max(worst, std::abs(fr.C(p, 2, 0) + kTwoPi * eta * std::sin(kTwoPi * x)));
    CHECK(std::abs(fr.A(p, 0, 0)) <= 1e-15);
  }
  CHECK(worst <= 1e-13);
  CHECK(fr.summary.c31 > 0.5);
}

TEST_CASE("translation response") {
  const ReducedFrame fr = flat_frame(0.3, 0.1, 8);
  const Mat dl = pkam::coupled_standard_family(0.3, 0.1, 0.4).parameter_jacobian(Vec::Zero(3), Vec::Zero(3));
  for (std::size_t p = 0; p < fr.grid.size(); p += 5) {
    CHECK(max_abs(fr.Lambda.at(p) - fr.M_inv_next.at(p) * dl) <= 1e-15);
  }
  Eigen::JacobiSVD<Mat> svd(fr.summary.avg_Lambda);
  CHECK(svd.singularValues()(2) > 0.1);
  CHECK(fr.summary.rank_avg_Lambda == 3);
}

TEST_CASE("pointwise inverse and QM - V on a generic torus") {
  const Vec w = golden_pair();
  const TorusEmbedding K = random_torus({6, 6}, 31, 0.05);
  const ReducedFrame fr = pkam::build_frame(K, golden_family(), Vec::Zero(3), kStd, w);
  double worst = 0.0;
  for (std::size_t p = 0; p < fr.grid.size(); ++p) {
    worst = std::max(worst, max_abs(fr.M.at(p) * fr.M_inv.at(p) - Mat::Identity(3, 3)));
  }
  CHECK(worst <= 1e-11);
  CHECK(fr.summary.inverse_residual <= 1e-11);
  // y depends on theta_z here, so X^T J Z and hence R do not vanish.
  const auto lr = pkam::lagrangian_residual_frame(fr);
  CHECK(lr.r_xx <= 1e-15);
  CHECK(lr.r_xz > 1e-3);
  const auto L = pkam::lagrangian_defect(K, kStd);
  CHECK(lr.r_xz == doctest::Approx(L.norm / 2.0).epsilon(0.5));
}

TEST_CASE("converged torus") {
  const auto& r = converged_golden();
  const Vec w = golden_pair();
  const ReducedFrame fr = pkam::build_frame(r.K, golden_family(), r.lambda, kStd, w);
  CHECK(fr.summary.c_offpattern_max() <= 1e-9);
  CHECK(fr.summary.qm_residual <= 1e-10);
  CHECK(fr.summary.vinv_r <= 1e-10);
  // Omega(X, J^{-1} Y) = 1, Omega(X, X) = 0, Omega(X, Z) = 0.
  const Mat J = kStd.J(Vec::Zero(3));
  double worst = 0.0;
  for (std::size_t p = 0; p < fr.grid.size(); ++p) {
    const Vec X = fr.DK.at(p).col(0).head(2);
    const Vec Z = fr.DK.at(p).col(1).head(2);
    const Vec jy = fr.M.at(p).col(1).head(2);
    worst = std::max(worst, std::abs(X.dot(J * jy) - 1.0));
    worst = std::max(worst, std::abs(X.dot(J * X)));
    worst = std::max(worst, std::abs(X.dot(J * Z)));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("frame covariance under grid-aligned phase shifts") {
  const Vec w = golden_pair();
  const TorusEmbedding K = random_torus({5, 5}, 41, 0.04);
  const pkam::GridShape g = pkam::padded_grid(K.radius());
  const int s0 = 3, s1 = 5;
  const Vec phi = vec({static_cast<double>(s0) / g.dim(0), static_cast<double>(s1) / g.dim(1)});
  const TorusEmbedding Ks = K.shifted({phi.data(), 2});
  const ReducedFrame a = pkam::build_frame(K, golden_family(), Vec::Zero(3), kStd, w, &g);
  const ReducedFrame b = pkam::build_frame(Ks, golden_family(), Vec::Zero(3), kStd, w, &g);
  double worst = 0.0, scale = 1.0;
  for (std::size_t p = 0; p < g.size(); ++p) scale = std::max(scale, max_abs(a.C.at(p)));
  for (int i = 0; i < g.dim(0); ++i) {
    for (int j = 0; j < g.dim(1); ++j) {
      // row-major, last axis fastest
      const auto p = static_cast<std::size_t>(i * g.dim(1) + j);
      const auto q = static_cast<std::size_t>(((i + s0) % g.dim(0)) * g.dim(1) + (j + s1) % g.dim(1));
      worst = std::max(worst, max_abs(b.M.at(p) - a.M.at(q)));
      worst = std::max(worst, max_abs(b.C.at(p) - a.C.at(q)));
    }
  }
  CHECK(worst <= 1e-13 * scale);
}

TEST_CASE("degenerate torus") {
  // x = theta_x - sin(2 pi theta_x) / (2 pi) has dx/dtheta = 0 at theta_x = 0.
  TorusEmbedding K = TorusEmbedding::flat(1, 1, {4, 4}, vec({0.6}));
  const int k[2] = {1, 0}, mk[2] = {-1, 0};
  K.periodic().coeff(0, std::span<const int>(k)) = Complex(0.0, 1.0 / (4.0 * std::numbers::pi));
  K.periodic().coeff(0, std::span<const int>(mk)) = Complex(0.0, -1.0 / (4.0 * std::numbers::pi));
  try {
    (void)pkam::build_geometric_frame(K, kStd, golden_pair());
    FAIL("expected DegenerateTorus");
  } catch (const pkam::DegenerateTorus& e) {
    CHECK(e.condition() == "X_V^T X_V");
    CHECK(std::abs(e.theta()[0]) < 1e-15);
  }
}

TEST_CASE("condition number helper") {
  Mat a(2, 2);
  a << 2.0, 0.0, 0.0, 0.5;
  CHECK(pkam::condition_1(a, a.inverse()) == doctest::Approx(4.0));
}
