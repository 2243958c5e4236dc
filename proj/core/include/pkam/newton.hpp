#pragma once

// Quasi-Newton iteration for the invariance equation f_lambda(K(theta)) = K(theta + omega).

#include "pkam/errors.hpp"
#include "pkam/fourier.hpp"
#include "pkam/geometry.hpp"
#include "pkam/models.hpp"
#include "pkam/reducibility.hpp"

#include <functional>
#include <string>
#include <vector>

namespace pkam {

struct SolveConfig {
  int max_iterations = 20;
  /// Stop once the invariance error norm is at or below this.
  double target_error = 1e-12;
  /// Strip width of the error norm.
  double error_rho = 0.0;

  bool grow_truncation = true;
  /// Grow an axis when the root of its outer-band energy fraction exceeds
  /// tail_factor * error and the step has not reached the target.
  double tail_factor = 1e-3;
  int max_radius = 512;

  /// false is the undamped mode: every step is accepted as computed.
  bool damping = true;
  int max_halvings = 5;

  /// Active parameter components; empty means all active.
  std::vector<bool> parameter_mask;
  /// Use avg(S) to fix the average of xi_y instead of d parameters.
  bool use_twist = false;
  /// Tolerance on the averaged residuals; negative selects 1e-10 |eta|.
  double avg_tolerance = -1.0;
  /// Fourier coefficients below this times max(1, sup|K|) are zeroed before
  /// division by small divisors; 0 disables.
  double coefficient_floor = 1e-16;

  /// Strip-loss scale of the smallness indicator.
  double delta0 = 0.05;
  /// Diophantine exponent for the indicator; 0 selects d+n.
  double sigma = 0.0;

  /// Throws ConfigError on inconsistent values.
  void validate(int m) const;
  bool active(int j) const {
    return parameter_mask.empty() || parameter_mask[static_cast<std::size_t>(j)];
  }
};

struct InvarianceError {
  GridField e;        ///< f(K(theta)) - K(theta+omega), angles unwrapped
  double norm = 0.0;  ///< weighted-l1 norm
  double sup = 0.0;   ///< grid sup
};

/// Evaluated on `grid` (default: padded grid of K). Throws DomainEscape
/// when a grid image of K leaves |y| <= f.y_bound.
InvarianceError invariance_error(const TorusEmbedding& K, const MapFamily& f, const Vec& lambda,
                                 const Vec& omega, double rho = 0.0,
                                 const GridShape* grid = nullptr);

struct LinearSolution {
  FourierSeries xi;   ///< frame coordinates (x, y, z), zero x and z averages
  Vec eps;            ///< full-length parameter correction (inactive entries 0)
  Vec xi_y_average;   ///< free average of xi_y (nonzero only with use_twist)
  Vec avg_residual;   ///< averages of the three right-hand sides after solving
  double avg_tolerance = 0.0;
  bool square = true;
  int rank = 0;
  double divisor_floor = 0.0;
};

/// Solves the triangular system in the frame for xi and the parameter
/// correction. `e` lives on the frame grid.
LinearSolution solve_linearized(const ReducedFrame& frame, const GridField& e,
                                const std::vector<int>& radius, const SolveConfig& config);

struct StepReport {
  int iteration = 0;
  double err_before = 0.0;
  double err_after = 0.0;
  double delta_norm = 0.0;
  double d_delta_norm = 0.0;
  double eps_norm = 0.0;
  double divisor_floor = 0.0;
  double cond_M = 0.0;
  double cond_V = 0.0;
  int rank_avg_lambda = 0;
  double sigma_min_avg_lambda = 0.0;
  double tail_ratio = 0.0;  ///< largest root outer-band energy fraction
  bool accepted = false;
  int halvings = 0;
  double wall_seconds = 0.0;

  double lagrangian_norm = 0.0;  ///< |L| of the torus entering the step
  double qm_residual = 0.0;
  double vinv_r = 0.0;
  double c_offpattern = 0.0;
  double dk_norm = 0.0;
  double avg_S = 0.0;  ///< determinant of avg S
  double avg_residual = 0.0;
  double avg_tolerance = 0.0;
  std::vector<int> radius;
  Mat avg_Lambda_vq;
};

struct StepResult {
  TorusEmbedding K;
  Vec lambda;
  StepReport report;
};

StepResult kam_step(const TorusEmbedding& K, const Vec& lambda, const MapFamily& f,
                    const PresymplecticStructure& S, const Vec& omega, const SolveConfig& config,
                    int iteration = 0);

struct SolveResult {
  TorusEmbedding K;
  Vec lambda;
  std::vector<StepReport> reports;
  double final_error = 0.0;
  double initial_error = 0.0;
  /// gamma^-4 delta0^(-4 sigma) |e0|, with gamma from a finite scan.
  double smallness_indicator = 0.0;
  double gamma_estimate = 0.0;
  /// Invariance residual at 1000 random off-grid points.
  double offgrid_residual = 0.0;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, SolveResult best)
      : Error(what), best_(std::move(best)) {}
  const SolveResult& best() const { return best_; }

 private:
  SolveResult best_;
};

SolveResult solve(const TorusEmbedding& K0, const Vec& lambda0, const MapFamily& f,
                  const PresymplecticStructure& S, const Vec& omega, const SolveConfig& config);

struct ContinuationStage {
  double knob = 0.0;
  SolveResult result;
};

struct ContinuationResult {
  std::vector<ContinuationStage> stages;
  /// Index of the schedule entry that failed, -1 when all converged.
  int failed_stage = -1;
  std::string failure;
  SolveResult failed_best;
};

using FamilyFactory = std::function<MapFamily(double knob)>;

/// Solves along the schedule, seeding each stage with the previous torus.
ContinuationResult continue_in_parameter(const FamilyFactory& family,
                                         const std::vector<double>& schedule,
                                         const TorusEmbedding& K0, const Vec& lambda0,
                                         const PresymplecticStructure& S, const Vec& omega,
                                         const SolveConfig& config);

}  // namespace pkam
