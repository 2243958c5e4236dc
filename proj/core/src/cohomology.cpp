#include "pkam/cohomology.hpp"

#include "pkam/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pkam {

namespace {

// 1 - exp(2 pi i k.omega) for every mode of the box. The phase is reduced mod 1
// in extended precision and the divisor is formed as -2i sin(pi x) e(x / 2), so
// near-resonant modes keep full relative accuracy.
std::vector<Complex> divisors(const std::vector<int>& radius, const Vec& omega) {
  const FourierSeries box(1, 1, radius);
  std::vector<Complex> out(box.mode_count());
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    const auto k = box.mode(idx);
    long double x = 0.0L;
    for (std::size_t a = 0; a < k.size(); ++a) {
      x += static_cast<long double>(k[a]) * static_cast<long double>(omega(static_cast<Eigen::Index>(a)));
    }
    x -= std::round(x);
    const double t = std::numbers::pi * static_cast<double>(x);
    const double s = std::sin(t);
    out[idx] = Complex(2.0 * s * s, -2.0 * s * std::cos(t));
  }
  return out;
}

}  // namespace

std::pair<FourierSeries, Mat> remove_average(const FourierSeries& h) {
  FourierSeries out = h;
  const Mat avg = h.average();
  out.set_average(Mat::Zero(h.rows(), h.cols()));
  return {std::move(out), avg};
}

FourierSeries difference_operator(const FourierSeries& v, const Vec& omega) {
  if (omega.size() != v.rank()) throw DimensionMismatch("frequency does not match series rank");
  const auto div = divisors(v.radius(), omega);
  FourierSeries out = v;
  for (int c = 0; c < v.components(); ++c) {
    auto dst = out.component_span(c);
    for (std::size_t idx = 0; idx < dst.size(); ++idx) dst[idx] *= div[idx];
  }
  return out;
}

DifferenceSolution solve_difference(const FourierSeries& h, const Vec& omega,
                                    double avg_tolerance) {
  if (omega.size() != h.rank()) throw DimensionMismatch("frequency does not match series rank");
  if (avg_tolerance < 0.0) avg_tolerance = 1e-10 * h.analytic_norm(0.0);
  const Mat avg = h.average();
  const double avg_mag = avg.size() == 0 ? 0.0 : avg.cwiseAbs().maxCoeff();
  if (avg_mag > avg_tolerance) throw NonzeroAverage(avg_mag);

  const auto div = divisors(h.radius(), omega);
  const std::size_t zero = h.zero_index();
  for (std::size_t idx = 0; idx < div.size(); ++idx) {
    if (idx != zero && std::abs(div[idx]) < kResonanceFloor) {
      throw ResonantMode(h.mode(idx), std::abs(div[idx]));
    }
  }

  DifferenceSolution out{FourierSeries(h.rows(), h.cols(), h.radius()), 0.0};
  for (int c = 0; c < h.components(); ++c) {
    auto src = h.component_span(c);
    auto dst = out.v.component_span(c);
    for (std::size_t idx = 0; idx < div.size(); ++idx) {
      if (idx == zero) continue;
      dst[idx] = src[idx] / div[idx];
      out.residual = std::max(out.residual, std::abs(dst[idx] * div[idx] - src[idx]));
    }
  }
  return out;
}

}  // namespace pkam
