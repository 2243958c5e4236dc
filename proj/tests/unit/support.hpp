#pragma once

// Shared fixtures and brute-force oracles for the unit tests.

#include "pkam/pkam.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <vector>

namespace testing {

using pkam::Complex;
using pkam::Mat;
using pkam::Vec;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline Vec golden_pair() {
  Vec w(2);
  w << (std::sqrt(5.0) - 1.0) / 2.0, std::sqrt(2.0) - 1.0;
  return w;
}

inline Vec vec(std::initializer_list<double> values) {
  Vec v(static_cast<int>(values.size()));
  int i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

/// Random Hermitian series with coefficients ~ exp(-decay |k|_1).
inline pkam::FourierSeries random_series(int rows, int cols, std::vector<int> radius,
                                         std::uint64_t seed, double decay = 0.3) {
  pkam::FourierSeries s(rows, cols, radius);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  for (int c = 0; c < s.components(); ++c) {
    for (std::size_t i = 0; i < s.mode_count(); ++i) {
      int l1 = 0;
      for (int k : s.mode(i)) l1 += std::abs(k);
      s.coeff(c, i) = Complex(g(rng), g(rng)) * std::exp(-decay * l1);
    }
  }
  s.symmetrize();
  return s;
}

/// Random torus with identity winding, y near y0 and a small periodic part.
inline pkam::TorusEmbedding random_torus(std::vector<int> radius, std::uint64_t seed,
                                         double amplitude = 0.02) {
  pkam::FourierSeries u = random_series(3, 1, radius, seed, 0.5);
  u *= amplitude;
  Mat avg = u.average();
  avg(1, 0) += 0.6;
  u.set_average(avg);
  return pkam::TorusEmbedding(1, 1, u);
}

/// Direct summation of a series at theta: entry (r, c).
inline double direct_sum(const pkam::FourierSeries& s, int component, const Vec& theta) {
  Complex acc(0.0, 0.0);
  for (std::size_t i = 0; i < s.mode_count(); ++i) {
    const auto k = s.mode(i);
    double phase = 0.0;
    for (std::size_t a = 0; a < k.size(); ++a) phase += k[a] * theta(static_cast<int>(a));
    acc += s.coeff(component, i) * std::polar(1.0, kTwoPi * phase);
  }
  return acc.real();
}

/// Divisor 1 - exp(2 pi i k.omega), computed independently of the library.
inline Complex divisor(const std::vector<int>& k, const Vec& omega) {
  long double phase = 0.0L;
  for (std::size_t a = 0; a < k.size(); ++a) phase += k[a] * static_cast<long double>(omega(static_cast<int>(a)));
  phase -= std::round(phase);
  const long double a = 2.0L * std::numbers::pi_v<long double> * phase;
  return Complex(static_cast<double>(1.0L - std::cos(a)), static_cast<double>(-std::sin(a)));
}

inline Vec random_point(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec t(dim);
  for (int i = 0; i < dim; ++i) t(i) = u(rng);
  return t;
}

inline double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// Coupled standard family at strength 0.3, coupling 0.1, drift omega_z.
inline pkam::MapFamily golden_family(double strength = 0.3) {
  return pkam::coupled_standard_family(strength, 0.1, golden_pair()(1));
}

/// Converged golden-pair torus of golden_family(), computed once per radius.
inline const pkam::SolveResult& converged_golden(int radius = 24) {
  static std::map<int, pkam::SolveResult> cache;
  auto it = cache.find(radius);
  if (it == cache.end()) {
    const Vec w = golden_pair();
    const auto K0 = pkam::TorusEmbedding::flat(1, 1, {radius, radius}, vec({w(0)}));
    pkam::SolveConfig cfg;
    cfg.grow_truncation = false;
    it = cache.emplace(radius, pkam::solve(K0, Vec::Zero(3), golden_family(),
                                           pkam::PresymplecticStructure::standard(1, 1), w, cfg))
             .first;
  }
  return it->second;
}

}  // namespace testing
