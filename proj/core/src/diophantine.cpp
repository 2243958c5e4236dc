#include "pkam/diophantine.hpp"

#include "pkam/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace pkam {

namespace {

bool lex_positive(const std::vector<int>& l) {
  for (int v : l) {
    if (v != 0) return v > 0;
  }
  return false;
}

// Calls visit(l) for every l in Z^q with |l|_1 == shell.
void for_each_in_shell(int q, int shell, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> l(static_cast<std::size_t>(q), 0);
  std::function<void(int, int)> rec = [&](int axis, int remaining) {
    if (axis == q - 1) {
      l[static_cast<std::size_t>(axis)] = remaining;
      visit(l);
      if (remaining != 0) {
        l[static_cast<std::size_t>(axis)] = -remaining;
        visit(l);
      }
      return;
    }
    for (int v = -remaining; v <= remaining; ++v) {
      l[static_cast<std::size_t>(axis)] = v;
      rec(axis + 1, remaining - std::abs(v));
    }
  };
  rec(0, shell);
}

LatticeDivisor measure(const std::vector<int>& l, const Vec& omega) {
  LatticeDivisor out;
  out.l = l;
  double dot = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) dot += l[i] * omega(static_cast<Eigen::Index>(i));
  const double m = std::nearbyint(dot);
  out.m = static_cast<long long>(m);
  out.distance = std::abs(dot - m);
  out.divisor = 2.0 * std::abs(std::sin(std::numbers::pi * out.distance));
  return out;
}

// Rounding error bound on l.omega - m.
double resonance_threshold(const std::vector<int>& l, const Vec& omega) {
  double mag = 1.0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    mag += std::abs(l[i]) * std::abs(omega(static_cast<Eigen::Index>(i)));
  }
  return 8.0 * std::numeric_limits<double>::epsilon() * mag;
}

bool divisor_less(const LatticeDivisor& a, const LatticeDivisor& b) {
  if (a.divisor != b.divisor) return a.divisor < b.divisor;
  return a.l < b.l;
}

}  // namespace

DivisorScan scan_divisors(const Vec& omega, double sigma, int radius, int keep) {
  if (radius < 1) throw ConfigError("scan radius must be at least 1");
  if (omega.size() < 1) throw DimensionMismatch("frequency must be nonempty");
  const int q = static_cast<int>(omega.size());
  DivisorScan out;
  out.gamma_estimate = std::numeric_limits<double>::infinity();
  double best_distance = std::numeric_limits<double>::infinity();
  const auto keep_n = static_cast<std::size_t>(std::max(keep, 0));

  for (int shell = 1; shell <= radius; ++shell) {
    LatticeDivisor shell_best;
    shell_best.distance = std::numeric_limits<double>::infinity();
    const double weight = std::pow(static_cast<double>(shell), sigma);
    for_each_in_shell(q, shell, [&](const std::vector<int>& l) {
      if (!lex_positive(l)) return;
      LatticeDivisor entry = measure(l, omega);
      if (entry.distance <= resonance_threshold(l, omega)) {
        if (!out.rejected) {
          out.rejected = true;
          out.resonant_l = l;
        }
        entry.distance = 0.0;
        entry.divisor = 0.0;
      }
      const double g = entry.distance * weight;
      if (g < out.gamma_estimate) {
        out.gamma_estimate = g;
        out.worst = entry;
      }
      if (entry.distance < shell_best.distance) shell_best = entry;
      if (keep_n > 0) {
        if (out.smallest.size() < keep_n) {
          out.smallest.push_back(entry);
          std::push_heap(out.smallest.begin(), out.smallest.end(), divisor_less);
        } else if (divisor_less(entry, out.smallest.front())) {
          std::pop_heap(out.smallest.begin(), out.smallest.end(), divisor_less);
          out.smallest.back() = entry;
          std::push_heap(out.smallest.begin(), out.smallest.end(), divisor_less);
        }
      }
    });
    if (shell_best.distance < best_distance) {
      best_distance = shell_best.distance;
      out.records.push_back(shell_best);
    }
  }
  std::sort_heap(out.smallest.begin(), out.smallest.end(), divisor_less);
  if (out.rejected) out.gamma_estimate = 0.0;
  return out;
}

DivisorFloor divisor_floor(const Vec& omega, const std::vector<int>& truncation) {
  if (static_cast<int>(truncation.size()) != omega.size()) {
    throw DimensionMismatch("truncation and frequency dimensions differ");
  }
  DivisorFloor out;
  const FourierSeries box(1, 1, truncation);
  for (std::size_t idx = 0; idx < box.mode_count(); ++idx) {
    if (idx == box.zero_index()) continue;
    const auto k = box.mode(idx);
    if (!lex_positive(k)) continue;
    const LatticeDivisor entry = measure(k, omega);
    if (entry.divisor < out.value) {
      out.value = entry.divisor;
      out.mode = k;
    }
  }
  return out;
}

Frequency certify(const Vec& omega, double sigma, int radius) {
  const double q = static_cast<double>(omega.size());
  if (sigma < q) {
    throw ConfigError("Diophantine exponent sigma = " + std::to_string(sigma) +
                      " is not admissible: need sigma >= d+n = " + std::to_string(q));
  }
  const DivisorScan scan = scan_divisors(omega, sigma, radius, 0);
  Frequency f;
  f.omega = omega;
  f.sigma = sigma;
  f.gamma_estimate = scan.gamma_estimate;
  f.scan_radius = radius;
  f.worst_l = scan.rejected ? scan.resonant_l : scan.worst.l;
  f.rejected = scan.rejected;
  return f;
}

}  // namespace pkam
