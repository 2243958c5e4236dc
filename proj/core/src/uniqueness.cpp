#include "pkam/uniqueness.hpp"

#include "pkam/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pkam {

namespace {

std::span<const double> as_span(const Vec& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

std::vector<int> common_radius(const TorusEmbedding& a, const TorusEmbedding& b) {
  std::vector<int> r = a.radius();
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::max(r[i], b.radius()[i]);
  return r;
}

// Rows T1 and T3 of M^{-1}: the x and z frame components.
Mat tangent_rows(const Mat& m_inv, int d, int n) {
  Mat t(d + n, m_inv.cols());
  t.topRows(d) = m_inv.topRows(d);
  t.bottomRows(n) = m_inv.bottomRows(n);
  return t;
}

}  // namespace

AlignResult align_phase(const TorusEmbedding& K1, const TorusEmbedding& K2,
                        const ReducedFrame& frame, const AlignOptions& options) {
  if (K1.d() != K2.d() || K1.n() != K2.n() || frame.d != K1.d() || frame.n != K1.n()) {
    throw DimensionMismatch("tori and frame must share dimensions");
  }
  const int d = K1.d();
  const int n = K1.n();
  const int q = d + n;
  const GridShape& g = frame.grid;
  const std::vector<int> radius = common_radius(K1, K2);
  const FourierSeries p1 = K1.periodic().resized(radius);

  AlignResult out;
  if (frame.has_map) {
    Mat theta(q, d);
    theta.topRows(d) = frame.S.average();
    theta.bottomRows(n) = frame.A.average();
    Eigen::JacobiSVD<Mat> svd(theta);
    const Vec sv = svd.singularValues();
    out.theta_rank = static_cast<int>((sv.array() > 1e-10 * std::max(1.0, sv(0))).count());
  }

  auto residual_at = [&](const Vec& sigma) {
    return K2.shifted(as_span(sigma)).periodic().resized(radius) - p1;
  };

  Vec sigma = Vec::Zero(q);
  FourierSeries diff = residual_at(sigma);
  double res = diff.analytic_norm(0.0);
  out.residuals.push_back(res);
  if (res > options.closeness) throw NotAligned(res);

  for (int round = 0; round < options.max_rounds && res > options.tolerance; ++round) {
    const TorusEmbedding K2s = K2.shifted(as_span(sigma));
    const GridField D = diff.to_grid(g);
    const GridField DK2 = K2s.jacobian(g);
    Vec gvec = Vec::Zero(q);
    Mat jac = Mat::Zero(q, q);
    for (std::size_t p = 0; p < g.size(); ++p) {
      const Mat t = tangent_rows(frame.M_inv.at(p), d, n);
      gvec += t * D.at(p).col(0);
      jac += t * DK2.at(p);
    }
    gvec /= static_cast<double>(g.size());
    jac /= static_cast<double>(g.size());
    Eigen::FullPivLU<Mat> lu(jac);
    const double cond = condition_1(jac, lu.inverse());
    if (!lu.isInvertible() || !(cond < kDegenerateCondition)) {
      throw SingularResponse("averaged phase Jacobian is singular (condition " +
                             std::to_string(cond) + ")");
    }
    const Vec trial = sigma - lu.solve(gvec);
    FourierSeries trial_diff = residual_at(trial);
    const double trial_res = trial_diff.analytic_norm(0.0);
    if (!(trial_res < res)) break;  // stalled
    sigma = trial;
    diff = std::move(trial_diff);
    res = trial_res;
    out.residuals.push_back(res);
    out.rounds = round + 1;
  }
  if (res > options.tolerance) throw NotAligned(res);
  out.tau = -sigma;
  return out;
}

}  // namespace pkam
