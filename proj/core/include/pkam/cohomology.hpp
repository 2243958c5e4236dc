#pragma once

// The small-divisor difference equation v(theta) - v(theta + omega) = h(theta).

#include "pkam/fourier.hpp"

#include <utility>

namespace pkam {

/// Divisors below this are treated as exact resonances.
inline constexpr double kResonanceFloor = 1e-14;

struct DifferenceSolution {
  FourierSeries v;
  /// Max over nonzero modes of |v_k - v_k exp(2 pi i k.omega) - h_k|.
  double residual = 0.0;
};

/// Zero-average solution. Throws NonzeroAverage when |avg h| exceeds
/// avg_tolerance (negative selects 1e-10 |h|) and ResonantMode when a
/// divisor falls below the resonance floor. The average of h is ignored
/// once it passes the check.
DifferenceSolution solve_difference(const FourierSeries& h, const Vec& omega,
                                    double avg_tolerance = -1.0);

/// Returns (h - avg h, avg h).
std::pair<FourierSeries, Mat> remove_average(const FourierSeries& h);

/// (id - shift_omega) applied coefficientwise: v_k (1 - exp(2 pi i k.omega)).
FourierSeries difference_operator(const FourierSeries& v, const Vec& omega);

}  // namespace pkam
