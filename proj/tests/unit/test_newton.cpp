#include "support.hpp"

#include <doctest.h>

using namespace testing;
using pkam::SolveConfig;
using pkam::TorusEmbedding;

namespace {

const auto kStd = pkam::PresymplecticStructure::standard(1, 1);

TorusEmbedding flat(int radius) {
  return TorusEmbedding::flat(1, 1, {radius, radius}, vec({golden_pair()(0)}));
}

// max over the grid of |Df(K) M xi - M(. + w) xi(. + w) + df/dlambda eps + e|
double linear_residual(const pkam::ReducedFrame& fr, const pkam::MapFamily& f, const Vec& lambda,
                       const pkam::GridField& e, const pkam::LinearSolution& sol) {
  const pkam::GridField xi = sol.xi.to_grid(fr.grid);
  const Vec w = fr.omega;
  const pkam::GridField xi_next =
      sol.xi.shifted({w.data(), static_cast<std::size_t>(w.size())}).to_grid(fr.grid);
  double worst = 0.0;
  for (std::size_t p = 0; p < fr.grid.size(); ++p) {
    const Vec u = fr.values.at(p).transpose();
    Vec xp = xi.at(p);
    Vec xn = xi_next.at(p);
    xp(1) += sol.xi_y_average(0);
    xn(1) += sol.xi_y_average(0);
    const Mat M = fr.M.at(p);
    const Mat M_next = Mat(fr.M_inv_next.at(p)).inverse();
    const Vec r = f.jacobian(u, lambda) * M * xp - M_next * xn +
                  f.parameter_jacobian(u, lambda) * sol.eps + Vec(e.at(p));
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

pkam::GridField random_error(const pkam::GridShape& g, int radius, std::uint64_t seed) {
  return random_series(3, 1, {radius, radius}, seed, 0.3).to_grid(g);
}

}  // namespace

TEST_CASE("invariance error") {
  const Vec w = golden_pair();
  const auto f = pkam::coupled_standard_family(0.0, 0.0, w(1));
  SUBCASE("invariant flat torus") {
    const auto e = pkam::invariance_error(flat(8), f, Vec::Zero(3), w);
    CHECK(e.sup <= 1e-14);
    CHECK(e.norm <= 1e-14);
  }
  SUBCASE("y translation") {
    // y' = y + 1e-3 and x' = x + y', so both components move by 1e-3.
    const auto e = pkam::invariance_error(flat(8), f, vec({0.0, 1e-3, 0.0}), w);
    CHECK(e.sup == doctest::Approx(1e-3).epsilon(1e-9));
    CHECK(e.e.average()(0, 0) == doctest::Approx(1e-3).epsilon(1e-9));
    CHECK(e.e.average()(1, 0) == doctest::Approx(1e-3).epsilon(1e-9));
    CHECK(std::abs(e.e.average()(2, 0)) <= 1e-15);
  }
  SUBCASE("domain escape") {
    auto g = f;
    g.y_bound = 0.1;
    CHECK_THROWS_AS(pkam::invariance_error(flat(4), g, Vec::Zero(3), w), pkam::DomainEscape);
  }
}

TEST_CASE("linearized solve") {
  const Vec w = golden_pair();
  SolveConfig cfg;
  const int r = 8;
  SUBCASE("zero error") {
    const auto f = golden_family();
    const auto fr = pkam::build_frame(flat(r), f, Vec::Zero(3), kStd, w);
    const pkam::GridField e(fr.grid, 3, 1);
    const auto sol = pkam::solve_linearized(fr, e, {r, r}, cfg);
    CHECK(sol.xi.analytic_norm(0.0) == 0.0);
    CHECK(max_abs(sol.eps) == 0.0);
  }
  SUBCASE("integrable frame solves the full linear equation") {
    const auto f = pkam::coupled_standard_family(0.0, 0.0, w(1));
    const auto fr = pkam::build_frame(flat(r), f, Vec::Zero(3), kStd, w);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const pkam::GridField e = random_error(fr.grid, r, seed);
      const auto sol = pkam::solve_linearized(fr, e, {r, r}, cfg);
      CHECK(linear_residual(fr, f, Vec::Zero(3), e, sol) <= 1e-11);
      CHECK(sol.square);
      CHECK(sol.rank == 3);
      // gauge: the x and z frame components carry no average
      CHECK(std::abs(sol.xi.average()(0, 0)) == 0.0);
      CHECK(std::abs(sol.xi.average()(2, 0)) == 0.0);
      CHECK(sol.avg_residual.cwiseAbs().maxCoeff() <= 1e-13);
    }
  }
  SUBCASE("constant error is absorbed by the parameters") {
    const auto f = pkam::coupled_standard_family(0.0, 0.0, w(1));
    const auto fr = pkam::build_frame(flat(r), f, Vec::Zero(3), kStd, w);
    pkam::GridField e(fr.grid, 3, 1);
    for (std::size_t p = 0; p < fr.grid.size(); ++p) e.at(p) = vec({1e-3, -2e-3, 5e-4});
    const auto sol = pkam::solve_linearized(fr, e, {r, r}, cfg);
    CHECK(sol.xi.analytic_norm(0.0) <= 1e-15);
    // df/dlambda eps = -e
    Mat P(3, 3);
    P << 1, 1, 0, 0, 1, 0, 0, 0, 1;
    CHECK(max_abs(P * sol.eps + vec({1e-3, -2e-3, 5e-4})) <= 1e-17);
  }
  SUBCASE("converged torus") {
    const auto& res = converged_golden();
    const auto f = golden_family();
    const auto fr = pkam::build_frame(res.K, f, res.lambda, kStd, w);
    const pkam::GridField e = random_error(fr.grid, 6, 9);
    const auto sol = pkam::solve_linearized(fr, e, res.K.radius(), cfg);
    // the dropped terms are of the size of the invariance error times xi
    CHECK(linear_residual(fr, f, res.lambda, e, sol) <= 1e-9);
  }
}

TEST_CASE("step on an invariant torus is a fixed point") {
  const Vec w = golden_pair();
  const auto f = pkam::coupled_standard_family(0.0, 0.0, w(1));
  const auto st = pkam::kam_step(flat(8), Vec::Zero(3), f, kStd, w, SolveConfig{});
  CHECK(st.report.err_before <= 1e-15);
  CHECK(st.report.err_after <= 1e-15);
  CHECK(st.report.delta_norm <= 1e-15);
  CHECK(max_abs(st.lambda) <= 1e-15);
}

TEST_CASE("converged run") {
  const auto& res = converged_golden();
  REQUIRE(res.reports.size() >= 2);
  CHECK(res.final_error <= 1e-12);
  CHECK(res.offgrid_residual <= 1e-10);
  CHECK(res.gamma_estimate > 0.0);
  CHECK(res.smallness_indicator > 0.0);
  SUBCASE("error decreases monotonically") {
    for (const auto& s : res.reports) {
      CHECK(s.accepted);
      CHECK(s.err_after < s.err_before);
    }
  }
  SUBCASE("quadratic convergence") {
    // log e_{m+1} / log e_m over steps that stay above roundoff
    for (std::size_t i = 0; i + 1 < res.reports.size(); ++i) {
      const double a = res.reports[i].err_after, b = res.reports[i + 1].err_after;
      if (b <= 1e-12 || i == 0) continue;
      CHECK(std::log(b) / std::log(a) >= 1.7);
    }
    const double e0 = res.reports[0].err_before, e1 = res.reports[0].err_after;
    CHECK(e1 <= 10.0 * e0 * e0 / 1e-2);
  }
  SUBCASE("flux of the converged map vanishes") {
    // lambda_y measures the flux, which must be zero on an invariant torus.
    CHECK(std::abs(res.lambda(1)) <= 1e-10);
  }
  SUBCASE("phase-shifted solution is also a solution") {
    const Vec tau = vec({0.123, -0.04});
    const TorusEmbedding Ks = res.K.shifted({tau.data(), 2});
    const auto e = pkam::invariance_error(Ks, golden_family(), res.lambda, golden_pair());
    CHECK(e.norm <= 1e-11);
  }
}

TEST_CASE("masked parameters") {
  const Vec w = golden_pair();
  SolveConfig cfg;
  cfg.parameter_mask = {true, false, true};
  cfg.grow_truncation = false;
  cfg.avg_tolerance = 1e-12;
  const auto res = pkam::solve(flat(20), Vec::Zero(3), golden_family(), kStd, w, cfg);
  CHECK(res.final_error <= 1e-12);
  CHECK(res.lambda(1) == 0.0);
  CHECK(res.reports.back().avg_residual <= 1e-12);
}

TEST_CASE("twist run") {
  const Vec w = golden_pair();
  SolveConfig cfg;
  cfg.use_twist = true;
  cfg.parameter_mask = {false, true, true};
  cfg.grow_truncation = false;
  const auto res = pkam::solve(flat(20), Vec::Zero(3), golden_family(), kStd, w, cfg);
  CHECK(res.final_error <= 1e-12);
  CHECK(res.lambda(0) == 0.0);
  CHECK(std::abs(res.lambda(1)) <= 1e-10);
}

TEST_CASE("truncation growth") {
  const Vec w = golden_pair();
  SolveConfig cfg;
  cfg.max_radius = 64;
  const auto res = pkam::solve(flat(8), Vec::Zero(3), golden_family(0.6), kStd, w, cfg);
  CHECK(res.final_error <= 1e-12);
  CHECK(res.K.radius()[0] > 8);
  CHECK(res.K.radius()[0] <= 64);
}

TEST_CASE("continuation") {
  const Vec w = golden_pair();
  SolveConfig cfg;
  cfg.grow_truncation = false;
  const auto factory = [&](double k) { return golden_family(k); };
  const auto cr = pkam::continue_in_parameter(factory, {0.0, 0.1, 0.2}, flat(16), Vec::Zero(3),
                                              kStd, w, cfg);
  CHECK(cr.failed_stage == -1);
  REQUIRE(cr.stages.size() == 3);
  for (const auto& st : cr.stages) CHECK(st.result.final_error <= 1e-12);
  CHECK(cr.stages[2].knob == 0.2);
  // seeding from the previous stage needs few steps
  CHECK(cr.stages[2].result.reports.size() <= 5);
}

TEST_CASE("breakdown") {
  const Vec w = golden_pair();
  SolveConfig cfg;
  cfg.grow_truncation = false;
  cfg.max_iterations = 6;
  try {
    (void)pkam::solve(flat(16), Vec::Zero(3), golden_family(1.2), kStd, w, cfg);
    FAIL("expected NoConvergence");
  } catch (const pkam::NoConvergence& e) {
    CHECK(!e.best().reports.empty());
    CHECK(e.best().final_error > 1e-12);
  }
}

TEST_CASE("config validation") {
  SolveConfig cfg;
  CHECK_NOTHROW(cfg.validate(3));
  SUBCASE("iterations") {
    cfg.max_iterations = 0;
    CHECK_THROWS_AS(cfg.validate(3), pkam::ConfigError);
  }
  SUBCASE("mask length") {
    cfg.parameter_mask = {true, true};
    CHECK_THROWS_AS(cfg.validate(3), pkam::ConfigError);
  }
  SUBCASE("coefficient floor") {
    cfg.coefficient_floor = -1.0;
    CHECK_THROWS_AS(cfg.validate(3), pkam::ConfigError);
  }
  SUBCASE("target") {
    cfg.target_error = 0.0;
    CHECK_THROWS_AS(cfg.validate(3), pkam::ConfigError);
  }
}
