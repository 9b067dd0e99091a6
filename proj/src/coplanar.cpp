#include "duality/coplanar.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>

#include "duality/measures.hpp"
#include "duality/tolerances.hpp"

namespace duality::coplanar {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double range_slack = 1e-12;

void check_theta(double theta, const char* who) {
  if (!(theta >= -range_slack && theta <= pi + range_slack)) {
    throw std::invalid_argument(std::string(who) + ": theta must lie in [0, pi], got " +
                                std::to_string(theta));
  }
}

}  // namespace

CoplanarFamily::CoplanarFamily(double theta) : theta_(theta) {
  check_theta(theta, "CoplanarFamily");
  theta_ = std::clamp(theta, 0.0, pi);
}

BlochVector CoplanarFamily::n_plus() const noexcept {
  return {std::sin(theta_), 0.0, std::cos(theta_)};
}

BlochVector CoplanarFamily::n_minus() const noexcept {
  return {-std::sin(theta_), 0.0, std::cos(theta_)};
}

BeamDetectorConfig make_config(double theta) {
  const CoplanarFamily family(theta);
  std::vector<DetectorState> states;
  states.reserve(3);
  states.push_back(bloch_to_state(family.n0()));
  states.push_back(bloch_to_state(family.n_plus()));
  states.push_back(bloch_to_state(family.n_minus()));
  return BeamDetectorConfig(PopulationVector::uniform(3), std::move(states));
}

double closed_visibility(double theta) {
  check_theta(theta, "closed_visibility");
  const double c = std::cos(theta);
  return std::sqrt((1.0 + c + c * c) / 3.0);
}

double closed_knowledge_sq(double theta, double beta, double gamma) {
  check_theta(theta, "closed_knowledge_sq");
  const double sh = std::sin(theta / 2.0);
  const double ch = std::cos(theta / 2.0);
  const double cb = std::cos(beta);
  const double sb = std::sin(beta);
  const double cg = std::cos(gamma);
  return (4.0 / 9.0) * (cb * cb * sh * sh + 3.0 * sb * sb * cg * cg * ch * ch) * sh * sh;
}

ClosedDistinguishability closed_distinguishability(double theta) {
  check_theta(theta, "closed_distinguishability");
  if (std::abs(theta - crossover_theta) <= crossover_band) {
    return {std::sin(theta) / std::sqrt(3.0), Branch::crossover};
  }
  if (theta < crossover_theta) {
    return {std::sin(theta) / std::sqrt(3.0), Branch::sigma_x};
  }
  const double sh = std::sin(theta / 2.0);
  return {(2.0 / 3.0) * sh * sh, Branch::sigma_z};
}

OptimalObservable optimal_observable(double theta) {
  check_theta(theta, "optimal_observable");
  if (std::abs(theta - crossover_theta) <= crossover_band) {
    return {TwoOutcomeObservable{0.0, 0.0}, Branch::crossover, true};
  }
  if (theta < crossover_theta) {
    return {TwoOutcomeObservable{pi / 2.0, 0.0}, Branch::sigma_x, false};
  }
  return {TwoOutcomeObservable{0.0, 0.0}, Branch::sigma_z, false};
}

std::vector<SweepRow> sweep(double theta_min, double theta_max, int steps,
                            const SweepOptions& options) {
  if (!(theta_min >= -range_slack && theta_max <= pi + range_slack && theta_min < theta_max)) {
    throw std::invalid_argument("sweep: range must satisfy 0 <= min < max <= pi");
  }
  if (steps < 2) {
    throw std::invalid_argument("sweep: needs at least 2 steps");
  }

  std::vector<SweepRow> rows(static_cast<std::size_t>(steps));
  const double span = theta_max - theta_min;
  auto fill_row = [&](int k) {
    double theta = (k == steps - 1)
                       ? theta_max
                       : theta_min + static_cast<double>(k) * span / (steps - 1);
    theta = std::clamp(theta, 0.0, pi);
    SweepRow& row = rows[static_cast<std::size_t>(k)];
    row.theta = theta;
    row.visibility = closed_visibility(theta);
    const ClosedDistinguishability d = closed_distinguishability(theta);
    row.distinguishability = d.value;
    row.branch = d.branch;
    const OptimalObservable obs = optimal_observable(theta);
    row.beta_opt = obs.observable.beta;
    row.gamma_opt = obs.observable.gamma;
    row.sum_sq = row.visibility * row.visibility +
                 row.distinguishability * row.distinguishability;
    if (options.validate_numeric) {
      const OptimizationResult numeric = optimize_refined(make_config(theta));
      if (std::abs(numeric.best_knowledge - row.distinguishability) > options.validation_tol) {
        throw std::runtime_error("sweep: optimizer disagrees with closed form at theta = " +
                                 std::to_string(theta));
      }
    }
  };

  unsigned threads = options.threads > 0 ? static_cast<unsigned>(options.threads)
                                         : std::thread::hardware_concurrency();
  if (threads == 0) threads = 1;
  threads = std::min(threads, static_cast<unsigned>(steps));
  if (!options.validate_numeric || threads <= 1) {
    for (int k = 0; k < steps; ++k) fill_row(k);
    return rows;
  }

  // Rows are independent, so any interleaving gives bit-identical output.
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      try {
        for (int k = static_cast<int>(t); k < steps; k += static_cast<int>(threads)) {
          fill_row(k);
        }
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (std::thread& th : pool) th.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

std::vector<AnomalyInterval> detect_anomaly(const std::vector<SweepRow>& rows) {
  if (rows.size() < 16) {
    throw std::invalid_argument("detect_anomaly: needs at least 16 rows");
  }
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    if (!(rows[k + 1].theta > rows[k].theta)) {
      throw std::invalid_argument("detect_anomaly: theta grid must be strictly increasing");
    }
  }
  auto sign = [](double x) { return x > tol::algebraic ? 1 : (x < -tol::algebraic ? -1 : 0); };

  std::vector<int> comove(rows.size() - 1, 0);
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    const int sv = sign(rows[k + 1].visibility - rows[k].visibility);
    const int sd = sign(rows[k + 1].distinguishability - rows[k].distinguishability);
    comove[k] = (sv != 0 && sv == sd) ? sv : 0;
  }

  std::vector<AnomalyInterval> intervals;
  std::size_t k = 0;
  while (k < comove.size()) {
    if (comove[k] == 0) {
      ++k;
      continue;
    }
    const int dir = comove[k];
    std::size_t end = k;
    while (end + 1 < comove.size() && comove[end + 1] == dir) ++end;
    intervals.push_back({rows[k].theta, rows[end + 1].theta,
                         dir < 0 ? Direction::co_decrease : Direction::co_increase});
    k = end + 1;
  }
  return intervals;
}

}  // namespace duality::coplanar
