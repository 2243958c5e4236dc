#pragma once

// Small-divisor statistics of a frequency vector over finite lattices.

#include "pkam/fourier.hpp"

#include <limits>
#include <vector>

namespace pkam {

struct LatticeDivisor {
  std::vector<int> l;
  long long m = 0;        ///< nearest integer to l.omega
  double distance = 0.0;  ///< |l.omega - m|
  double divisor = 0.0;   ///< |1 - exp(2 pi i l.omega)|
};

struct DivisorScan {
  double gamma_estimate = 0.0;  ///< min |l.omega - m| |l|_1^sigma
  LatticeDivisor worst;         ///< minimizer of the above
  /// Successive best approximations: each entry has a smaller distance
  /// than every lattice vector of smaller |l|_1.
  std::vector<LatticeDivisor> records;
  /// The smallest divisors found, ascending.
  std::vector<LatticeDivisor> smallest;
  bool rejected = false;  ///< some scanned l.omega is an integer
  std::vector<int> resonant_l;
};

struct Frequency {
  Vec omega;
  double sigma = 0.0;
  double gamma_estimate = 0.0;
  int scan_radius = 0;
  std::vector<int> worst_l;
  bool rejected = false;

  int dim() const { return static_cast<int>(omega.size()); }
};

/// Exhaustive scan over 0 < |l|_1 <= radius (one representative of each
/// +-l pair), `keep` smallest divisors retained.
DivisorScan scan_divisors(const Vec& omega, double sigma, int radius, int keep = 16);

struct DivisorFloor {
  double value = std::numeric_limits<double>::infinity();
  std::vector<int> mode;  ///< empty when the box has no nonzero mode
};

/// Smallest |1 - exp(2 pi i k.omega)| over 0 != k with |k_i| <= truncation_i.
DivisorFloor divisor_floor(const Vec& omega, const std::vector<int>& truncation);

/// Scans and packages a frequency. Throws ConfigError when sigma < dim.
Frequency certify(const Vec& omega, double sigma, int radius);

/// Default exponent: the torus dimension.
inline double default_sigma(const Vec& omega) { return static_cast<double>(omega.size()); }

}  // namespace pkam
