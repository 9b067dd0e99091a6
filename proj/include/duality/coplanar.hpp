#pragma once

#include <numbers>
#include <vector>

#include "duality/distinguishability.hpp"
#include "duality/qcore.hpp"

namespace duality::coplanar {

/// theta where the optimal observable family switches and the optimum is degenerate.
inline constexpr double crossover_theta = 2.0 * std::numbers::pi / 3.0;

/// Half-width of the band around crossover_theta tagged as the crossover.
inline constexpr double crossover_band = 1e-9;

enum class Branch { sigma_x, sigma_z, crossover };

enum class Direction { co_decrease, co_increase };

/// Three equally populated beams tagged by coplanar detector states:
/// n0 = (0,0,1), n± = (±sin theta, 0, cos theta).
class CoplanarFamily {
 public:
  explicit CoplanarFamily(double theta);

  double theta() const noexcept { return theta_; }
  BlochVector n0() const noexcept { return {0.0, 0.0, 1.0}; }
  BlochVector n_plus() const noexcept;
  BlochVector n_minus() const noexcept;

 private:
  double theta_;
};

struct ClosedDistinguishability {
  double value = 0.0;
  Branch branch = Branch::sigma_x;
};

struct OptimalObservable {
  TwoOutcomeObservable observable;
  Branch branch = Branch::sigma_x;
  bool degenerate = false;
};

struct SweepRow {
  double theta = 0.0;
  double visibility = 0.0;
  double distinguishability = 0.0;
  double sum_sq = 0.0;
  Branch branch = Branch::sigma_x;
  double beta_opt = 0.0;
  double gamma_opt = 0.0;
};

struct SweepOptions {
  bool validate_numeric = false;  ///< cross-check each row against optimize_refined
  double validation_tol = 1e-8;
  int threads = 0;                ///< thread count for validated sweeps; 0 = automatic
};

struct AnomalyInterval {
  double theta_lo = 0.0;
  double theta_hi = 0.0;
  Direction direction = Direction::co_increase;
};

/// The family as a BeamDetectorConfig (uniform populations).
BeamDetectorConfig make_config(double theta);

/// V(theta) = sqrt((1 + cos theta + cos^2 theta) / 3).
double closed_visibility(double theta);

/// K^2(theta, beta, gamma) =
///   (4/9) [cos^2 beta sin^2(theta/2) + 3 sin^2 beta cos^2 gamma cos^2(theta/2)] sin^2(theta/2).
double closed_knowledge_sq(double theta, double beta, double gamma);

/// Piecewise optimum: sin(theta)/sqrt(3) below the crossover,
/// (2/3) sin^2(theta/2) above it; both give 1/2 at the crossover.
ClosedDistinguishability closed_distinguishability(double theta);

/// (pi/2, 0) below the crossover, (0, 0) above it; at the crossover the
/// optimum is degenerate and (0, 0) is the tie representative.
OptimalObservable optimal_observable(double theta);

/// Uniform theta grid inclusive of both ends.
std::vector<SweepRow> sweep(double theta_min, double theta_max, int steps,
                            const SweepOptions& options = {});

/// Maximal intervals where V and D move in the same direction, from
/// forward differences with a 1e-12 dead-band. Needs at least 16 rows on a
/// strictly increasing theta grid.
std::vector<AnomalyInterval> detect_anomaly(const std::vector<SweepRow>& rows);

}  // namespace duality::coplanar
