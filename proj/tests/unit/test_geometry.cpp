#include "support.hpp"

#include <doctest.h>

using namespace testing;
using pkam::MapFamily;
using pkam::PresymplecticStructure;
using pkam::TorusEmbedding;

namespace {

std::span<const double> sp(const Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

// Map family from explicit closures with no parameters.
MapFamily explicit_family(std::function<Vec(const Vec&)> map, std::function<Mat(const Vec&)> jac) {
  MapFamily f;
  f.name = "explicit";
  f.d = 1;
  f.n = 1;
  f.m = 0;
  f.map = [map](const Vec& u, const Vec&) { return map(u); };
  f.jacobian = [jac](const Vec& u, const Vec&) { return jac(u); };
  f.parameter_jacobian = [](const Vec&, const Vec&) { return Mat(3, 0); };
  return f;
}

}  // namespace

TEST_CASE("standard structure") {
  const auto S = PresymplecticStructure::standard(2, 1);
  const Vec u = Vec::Zero(5);
  const Mat J = S.J(u);
  CHECK(max_abs(J + J.transpose()) == 0.0);
  CHECK(max_abs(J * S.J_inverse(u) - Mat::Identity(4, 4)) == 0.0);
  const Mat Jt = S.J_tilde(u);
  CHECK(max_abs(Jt.row(4)) == 0.0);
  CHECK(max_abs(Jt.col(4)) == 0.0);
  CHECK(max_abs(Jt.topLeftCorner(4, 4) - J) == 0.0);
  CHECK(S.primitive_defect(200, 3) <= 1e-10);
}

TEST_CASE("constant structures are validated") {
  Mat J(2, 2);
  J << 0.0, -2.0, 2.0, 0.0;
  Mat P = Mat::Zero(3, 3);
  P(0, 1) = 2.0;  // a = (2y, 0, 0): da = 2 dy^dx -> P^T - P has (1,0) = 2, (0,1) = -2
  const auto S = PresymplecticStructure::constant(1, 1, J, P);
  CHECK(S.primitive_defect(100, 1) <= 1e-10);

  Mat bad = Mat::Zero(3, 3);
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(PresymplecticStructure::constant(1, 1, J, bad), pkam::ConfigError);
  Mat sym(2, 2);
  sym << 0.0, 1.0, 1.0, 0.0;
  CHECK_THROWS_AS(PresymplecticStructure::constant(1, 1, sym, P), pkam::ConfigError);
  Mat angled = P;
  angled(1, 0) = 0.5;  // depends on x
  CHECK_THROWS_AS(PresymplecticStructure::constant(1, 1, J, angled), pkam::ConfigError);
}

TEST_CASE("Lagrangian defect") {
  const auto S = PresymplecticStructure::standard(1, 1);
  SUBCASE("flat torus") {
    const TorusEmbedding K = TorusEmbedding::flat(1, 1, {6, 6}, vec({0.3}));
    const auto L = pkam::lagrangian_defect(K, S);
    CHECK(L.norm == 0.0);
    CHECK(L.sup == 0.0);
  }
  SUBCASE("graph over x") {
    TorusEmbedding K = TorusEmbedding::flat(1, 1, {6, 6}, vec({0.3}));
    const int k[2] = {1, 0}, mk[2] = {-1, 0};
    K.periodic().coeff(1, std::span<const int>(k)) = Complex(0.0, -0.05);
    K.periodic().coeff(1, std::span<const int>(mk)) = Complex(0.0, 0.05);
    CHECK(pkam::lagrangian_defect(K, S).sup <= 1e-15);
  }
  SUBCASE("generic torus matches a finite-difference pullback") {
    const TorusEmbedding K = random_torus({5, 5}, 17, 0.05);
    const auto L = pkam::lagrangian_defect(K, S);
    CHECK(L.sup > 1e-3);
    const pkam::GridShape& g = L.L.shape();
    const double h = 1e-6;
    double worst = 0.0;
    for (std::size_t p = 0; p < g.size(); p += g.size() / 37) {
      const Vec t = g.point(p);
      Vec cols[2];
      for (int a = 0; a < 2; ++a) {
        Vec tp = t, tm = t;
        tp(a) += h;
        tm(a) -= h;
        cols[a] = (K.evaluate(sp(tp)) - K.evaluate(sp(tm))) / (2.0 * h);
      }
      // X^T J Z with J = [[0, -1], [1, 0]]: X_y Z_x - X_x Z_y
      const double lxz = cols[0](1) * cols[1](0) - cols[0](0) * cols[1](1);
      worst = std::max(worst, std::abs(L.L(p, 0, 1) - lxz));
      CHECK(std::abs(L.L(p, 0, 0)) <= 1e-14);
      CHECK(std::abs(L.L(p, 1, 1)) <= 1e-14);
      CHECK(std::abs(L.L(p, 1, 0) + L.L(p, 0, 1)) <= 1e-14);
    }
    CHECK(worst <= 1e-7);
  }
}

TEST_CASE("presymplectic verification") {
  const auto S = PresymplecticStructure::standard(1, 1);
  SUBCASE("builtin family") {
    for (double ks : {0.0, 0.3, 1.2}) {
      const MapFamily f = pkam::coupled_standard_family(ks, 0.1, 0.4);
      const auto chk = pkam::verify_presymplectic(f, vec({0.01, -0.02, 0.3}), S, 1000, 7);
      CHECK(chk.residual <= 1e-12);
      CHECK(chk.structural_ok);
    }
  }
  SUBCASE("a map whose (x, y) part sees z") {
    const MapFamily f = explicit_family(
        [](const Vec& u) { return vec({u(0) + 0.1 * std::sin(kTwoPi * u(2)), u(1), u(2)}); },
        [](const Vec& u) {
          Mat m = Mat::Identity(3, 3);
          m(0, 2) = 0.1 * kTwoPi * std::cos(kTwoPi * u(2));
          return m;
        });
    const auto chk = pkam::verify_presymplectic(f, Vec(), S, 100, 1);
    CHECK_FALSE(chk.structural_ok);
    CHECK(chk.structural_block > 0.1);
  }
  SUBCASE("linear symplectic block times identity") {
    Mat A = Mat::Identity(3, 3);
    A.topLeftCorner(2, 2) << 2.0, 1.0, 1.0, 1.0;
    const MapFamily f = explicit_family([A](const Vec& u) { return Vec(A * u); },
                                        [A](const Vec&) { return A; });
    const auto chk = pkam::verify_presymplectic(f, Vec(), S, 100, 1);
    CHECK(chk.residual == 0.0);
    CHECK(chk.structural_ok);
  }
  SUBCASE("area change is detected") {
    Mat A = Mat::Identity(3, 3);
    A(1, 1) = 1.01;
    const MapFamily f = explicit_family([A](const Vec& u) { return Vec(A * u); },
                                        [A](const Vec&) { return A; });
    CHECK(pkam::verify_presymplectic(f, Vec(), S, 10, 1).residual >= 0.01 - 1e-15);
  }
}

TEST_CASE("flux") {
  const auto S = PresymplecticStructure::standard(1, 1);
  SUBCASE("identity map") {
    const Vec fl = pkam::flux(pkam::identity_family(1, 1), Vec(), S);
    CHECK(max_abs(fl) <= 1e-15);
  }
  SUBCASE("exact at zero parameters") {
    const MapFamily f = pkam::coupled_standard_family(0.7, 0.2, 0.3);
    CHECK(max_abs(pkam::flux(f, Vec::Zero(3), S)) <= 1e-10);
  }
  SUBCASE("y translation shows up on the x loop") {
    // Along the x loop at y = 0: int (ly - k/2pi sin)(1 - k cos) dx = ly.
    const MapFamily f = pkam::coupled_standard_family(0.7, 0.2, 0.3);
    for (double ly : {0.01, -0.03}) {
      const Vec fl = pkam::flux(f, vec({0.02, ly, 0.05}), S);
      CHECK(std::abs(fl(0) - ly) <= 1e-8);
      CHECK(std::abs(fl(1)) <= 1e-12);
    }
  }
  SUBCASE("composition of exact maps stays exact") {
    const MapFamily a = pkam::coupled_standard_family(0.5, 0.1, 0.2);
    const MapFamily b = pkam::coupled_standard_family(0.9, -0.3, 0.7);
    const MapFamily c = pkam::compose(a, Vec::Zero(3), b, Vec::Zero(3));
    CHECK(max_abs(pkam::flux(c, Vec(), S)) <= 1e-10);
  }
  SUBCASE("flux over a curved reference torus") {
    const MapFamily f = pkam::coupled_standard_family(0.4, 0.1, 0.3);
    const TorusEmbedding K = random_torus({4, 4}, 5, 0.03);
    const Vec fl = pkam::flux(f, vec({0.0, 0.02, 0.0}), S, K);
    CHECK(std::abs(fl(0) - 0.02) <= 1e-8);
  }
}

TEST_CASE("grid radius drops the Nyquist mode") {
  const auto r = pkam::grid_radius(pkam::GridShape({16, 10}));
  CHECK(r == std::vector<int>{7, 4});
}
