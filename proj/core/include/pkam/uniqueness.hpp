#pragma once

// Phase alignment of two tori of the same map: find tau with K1 o T_tau = K2.

#include "pkam/fourier.hpp"
#include "pkam/reducibility.hpp"

#include <limits>
#include <vector>

namespace pkam {

struct AlignOptions {
  double tolerance = 1e-11;  ///< weighted-l1 norm of K2 o T_sigma - K1
  int max_rounds = 30;
  /// Refuse to start when |K2 - K1| exceeds this.
  double closeness = std::numeric_limits<double>::infinity();
};

struct AlignResult {
  Vec tau;  ///< K1(theta + tau) = K2(theta)
  /// |K2 o T_{-tau} - K1| before the first round and after each round.
  std::vector<double> residuals;
  int rounds = 0;
  /// Rank of avg([S; A]), -1 when the frame carries no map data.
  int theta_rank = -1;
};

/// `frame` is the (geometric or full) frame of K1. Each round kills the
/// averaged x and z frame components of the difference. Throws NotAligned
/// when the residual stalls above tolerance and SingularResponse when the
/// averaged phase Jacobian is singular.
AlignResult align_phase(const TorusEmbedding& K1, const TorusEmbedding& K2,
                        const ReducedFrame& frame, const AlignOptions& options = {});

}  // namespace pkam
