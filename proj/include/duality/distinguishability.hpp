#pragma once

#include <vector>

#include "duality/measures.hpp"
#include "duality/qcore.hpp"

namespace duality {

/// Two-outcome observable on a 2-dimensional detector, fixed by the axis
/// m(beta, gamma) = (sin beta cos gamma, sin beta sin gamma, cos beta).
struct TwoOutcomeObservable {
  double beta = 0.0;   ///< polar angle, [0, pi]
  double gamma = 0.0;  ///< azimuth, [0, 2*pi)

  BlochVector axis() const noexcept;
};

/// Wraps gamma into [0, 2*pi) and clamps beta into [0, pi].
TwoOutcomeObservable canonical_observable(double beta, double gamma);

enum class OptimizationMethod { grid, refined };

struct OptimizationResult {
  double best_knowledge = 0.0;
  TwoOutcomeObservable best_observable;
  OptimizationMethod method = OptimizationMethod::grid;
  int grid_resolution = 0;
  /// Observables whose knowledge lies within the tie tolerance of the best,
  /// ordered lexicographically by (beta, gamma).
  std::vector<TwoOutcomeObservable> tie_set;
  bool converged = true;
  int cycles = 0;
};

/// Projectors (1 +- m.sigma)/2 labelled "+" and "-".
Measurement observable_to_measurement(const TwoOutcomeObservable& obs);

/// Which-way knowledge delivered by the observable; detector dimension must be 2.
double knowledge_of(const BeamDetectorConfig& cfg, const TwoOutcomeObservable& obs);

/// Exhaustive scan over a (beta, gamma) grid: beta in [0, pi] inclusive,
/// gamma in [0, 2*pi) exclusive, `resolution` points per axis (minimum 16).
OptimizationResult optimize_grid(const BeamDetectorConfig& cfg, int resolution);

/// Grid seed (resolution 64) followed by alternating golden-section line
/// searches in beta and gamma until one full cycle improves by less than tol
/// (minimum 1e-12), capped at 200 cycles per candidate.
OptimizationResult optimize_refined(const BeamDetectorConfig& cfg, double tol = 1e-12);

}  // namespace duality
