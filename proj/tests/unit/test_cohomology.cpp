#include "support.hpp"

#include <doctest.h>

using namespace testing;
using pkam::FourierSeries;

namespace {

FourierSeries zero_mean(FourierSeries h) {
  h.set_average(Mat::Zero(h.rows(), h.cols()));
  return h;
}

// Max over nonzero modes of |v_k (1 - e(k.w)) - h_k|, divisors from the oracle.
double mode_residual(const FourierSeries& v, const FourierSeries& h, const Vec& w) {
  double worst = 0.0;
  for (int c = 0; c < h.components(); ++c) {
    for (std::size_t i = 0; i < h.mode_count(); ++i) {
      if (i == h.zero_index()) continue;
      worst = std::max(worst, std::abs(v.coeff(c, i) * divisor(h.mode(i), w) - h.coeff(c, i)));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("zero right-hand side") {
  const FourierSeries h(2, 1, {8, 8});
  const auto sol = pkam::solve_difference(h, golden_pair());
  CHECK(sol.v.analytic_norm(0.0) == 0.0);
  CHECK(sol.residual == 0.0);
}

TEST_CASE("single mode") {
  FourierSeries h(1, 1, {4, 4});
  const int k[2] = {2, -3}, mk[2] = {-2, 3};
  const Complex c(0.3, 0.7);
  h.coeff(0, std::span<const int>(k)) = c;
  h.coeff(0, std::span<const int>(mk)) = std::conj(c);
  const Vec w = golden_pair();
  const auto sol = pkam::solve_difference(h, w);
  const Complex expect = c / divisor({2, -3}, w);
  CHECK(std::abs(sol.v.coeff(0, std::span<const int>(k)) - expect) <= 1e-15 * std::abs(expect));
}

TEST_CASE("random band-limited right-hand sides") {
  const Vec w = golden_pair();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const FourierSeries h = zero_mean(random_series(1, 1, {64, 64}, seed, 0.05));
    const auto sol = pkam::solve_difference(h, w);
    CHECK(mode_residual(sol.v, h, w) <= 1e-12);
    CHECK(sol.residual <= 1e-12);
    CHECK(sol.v.hermitian_defect() <= 1e-15);
    CHECK(sol.v.average()(0, 0) == 0.0);
    // the library's own difference operator inverts the solve
    const FourierSeries back = pkam::difference_operator(sol.v, w);
    CHECK((back - h).analytic_norm(0.0) <= 1e-12 * h.analytic_norm(0.0) * 64);
  }
}

TEST_CASE("small-divisor estimate constant stays bounded across strip losses") {
  // |v|_{rho - delta} <= c gamma^-1 delta^-sigma |h|_rho
  const Vec w = golden_pair();
  const double rho = 0.25;
  const double gamma = pkam::scan_divisors(w, 2.0, 128).gamma_estimate;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const FourierSeries h = zero_mean(random_series(1, 1, {64, 64}, seed, 2.0));
    const auto sol = pkam::solve_difference(h, w);
    std::vector<double> cs;
    for (double delta : {0.05, 0.1, 0.2}) {
      cs.push_back(sol.v.analytic_norm(rho - delta) * gamma * delta * delta / h.analytic_norm(rho));
    }
    const double lo = *std::min_element(cs.begin(), cs.end());
    const double hi = *std::max_element(cs.begin(), cs.end());
    CHECK(hi <= 1.0);
    CHECK(hi / lo <= 20.0);
  }
}

TEST_CASE("errors") {
  SUBCASE("nonzero average") {
    FourierSeries h = random_series(1, 1, {4, 4}, 3);
    h.set_average(Mat::Constant(1, 1, 0.1));
    CHECK_THROWS_AS(pkam::solve_difference(h, golden_pair()), pkam::NonzeroAverage);
    // an explicit tolerance lets it through and the average is ignored
    const auto sol = pkam::solve_difference(h, golden_pair(), 0.2);
    CHECK(sol.v.average()(0, 0) == 0.0);
  }
  SUBCASE("exact resonance") {
    const FourierSeries h = zero_mean(random_series(1, 1, {3, 3}, 4));
    try {
      (void)pkam::solve_difference(h, vec({0.5, 0.25}));
      FAIL("expected ResonantMode");
    } catch (const pkam::ResonantMode& e) {
      const auto& k = e.mode();
      const double x = 0.5 * k[0] + 0.25 * k[1];
      CHECK(x == std::round(x));
      CHECK(e.divisor() < pkam::kResonanceFloor);
    }
  }
}

TEST_CASE("linearity and uniqueness up to constants") {
  const Vec w = golden_pair();
  const FourierSeries h1 = zero_mean(random_series(2, 1, {20, 20}, 7, 0.2));
  const FourierSeries h2 = zero_mean(random_series(2, 1, {20, 20}, 8, 0.2));
  const double a = 0.7, b = -1.3;
  const FourierSeries lhs = pkam::solve_difference(a * h1 + b * h2, w).v;
  const FourierSeries rhs = a * pkam::solve_difference(h1, w).v + b * pkam::solve_difference(h2, w).v;
  CHECK((lhs - rhs).analytic_norm(0.0) <= 1e-13 * lhs.analytic_norm(0.0));

  // v + const solves the same equation; the solver returns the zero-mean one.
  FourierSeries shifted = lhs;
  shifted.set_average(Mat::Constant(2, 1, 0.4));
  const FourierSeries again = pkam::difference_operator(shifted, w);
  CHECK(((pkam::solve_difference(again, w).v) - lhs).analytic_norm(0.0) <=
        1e-13 * lhs.analytic_norm(0.0));
}

TEST_CASE("remove_average") {
  SUBCASE("constant field") {
    FourierSeries h(2, 1, {3, 3});
    h.set_average(vec({0.4, -0.1}));
    const auto [rest, avg] = pkam::remove_average(h);
    CHECK(rest.analytic_norm(0.0) == 0.0);
    CHECK(max_abs(avg - vec({0.4, -0.1})) == 0.0);
  }
  SUBCASE("zero-mean field") {
    const FourierSeries h = zero_mean(random_series(1, 1, {5, 5}, 2));
    const auto [rest, avg] = pkam::remove_average(h);
    CHECK((rest - h).analytic_norm(0.0) == 0.0);
    CHECK(max_abs(avg) == 0.0);
  }
  SUBCASE("random field, grid quadrature of the remainder") {
    const FourierSeries h = random_series(1, 1, {6, 6}, 3);
    const auto [rest, avg] = pkam::remove_average(h);
    const pkam::GridField g = rest.to_grid(pkam::base_grid(rest.radius()));
    double sum = 0.0;
    for (double x : g.data()) sum += x;
    CHECK(std::abs(sum / static_cast<double>(g.points())) <= 1e-15);
    CHECK(avg(0, 0) == h.average()(0, 0));
  }
}
