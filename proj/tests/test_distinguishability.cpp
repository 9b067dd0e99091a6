#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "duality/coplanar.hpp"
#include "duality/distinguishability.hpp"
#include "duality/measures.hpp"
#include "duality/properties.hpp"
#include "duality/qcore.hpp"

using namespace duality;

namespace {
constexpr double pi = std::numbers::pi;

BeamDetectorConfig coplanar_config(double theta) { return coplanar::make_config(theta); }
}  // namespace

TEST_CASE("canonical_observable folds angles into the standard ranges") {
  const TwoOutcomeObservable a = canonical_observable(-0.5, -pi / 2.0);
  CHECK(a.beta == 0.0);
  CHECK(std::abs(a.gamma - 1.5 * pi) <= 1e-12);

  const TwoOutcomeObservable b = canonical_observable(4.0, 9.0);
  CHECK(b.beta == pi);
  CHECK(std::abs(b.gamma - (9.0 - 2.0 * pi)) <= 1e-12);

  const TwoOutcomeObservable c = canonical_observable(1.0, 2.0 * pi);
  CHECK(c.gamma == 0.0);
}

TEST_CASE("observable axis and projectors") {
  SUBCASE("equatorial x direction") {
    const Measurement m = observable_to_measurement(canonical_observable(pi / 2.0, 0.0));
    Eigen::MatrixXcd px(2, 2);
    px << 0.5, 0.5, 0.5, 0.5;
    CHECK((m.projector(0) - px).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((m.projector(1) - (Eigen::MatrixXcd::Identity(2, 2) - px)).cwiseAbs().maxCoeff() <=
          1e-12);
    CHECK(m.label(0) == "+");
    CHECK(m.label(1) == "-");
  }
  SUBCASE("polar direction is exact for any gamma") {
    const Measurement m = observable_to_measurement(canonical_observable(0.0, 1.7));
    Eigen::MatrixXcd pz = Eigen::MatrixXcd::Zero(2, 2);
    pz(0, 0) = 1.0;
    CHECK((m.projector(0) - pz).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("knowledge of landmark observables on the three-beam family") {
  // Equatorial measurement at tilt pi/2 extracts K = 1/sqrt(3).
  CHECK(std::abs(knowledge_of(coplanar_config(pi / 2.0),
                              canonical_observable(pi / 2.0, 0.0)) -
                 1.0 / std::sqrt(3.0)) <= 1e-12);
  // Polar measurement at tilt pi separates beam 0 from the other two.
  CHECK(std::abs(knowledge_of(coplanar_config(pi), canonical_observable(0.0, 0.0)) -
                 2.0 / 3.0) <= 1e-12);
}

TEST_CASE("two-outcome optimization requires qubit detector states") {
  props::Rng rng(5150);
  const BeamDetectorConfig cfg = props::random_config(rng, 3, 3);
  CHECK_THROWS_AS(knowledge_of(cfg, canonical_observable(1.0, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(optimize_grid(cfg, 32), std::invalid_argument);
  CHECK_THROWS_AS(optimize_refined(cfg), std::invalid_argument);
}

TEST_CASE("grid search finds the equatorial optimum at tilt pi/3") {
  const BeamDetectorConfig cfg = coplanar_config(pi / 3.0);
  const OptimizationResult res = optimize_grid(cfg, 256);
  CHECK(res.method == OptimizationMethod::grid);
  CHECK(res.grid_resolution == 256);
  CHECK(res.converged);
  CHECK(res.cycles == 0);
  // Closed-form optimum is 0.5; a 256^2 grid lands within its spacing-squared.
  CHECK(std::abs(res.best_knowledge - 0.5) <= 2e-4);
  CHECK(std::abs(res.best_observable.beta - pi / 2.0) <= 0.02);
  const double g = res.best_observable.gamma;
  CHECK((std::abs(g) <= 1e-12 || std::abs(g - pi) <= 1e-12));
}

TEST_CASE("grid search settles on the polar plateau at tilt pi") {
  const BeamDetectorConfig cfg = coplanar_config(pi);
  const OptimizationResult res = optimize_grid(cfg, 64);
  // The beta = 0 row evaluates bitwise-identically for every gamma, so the
  // scan keeps the first point.
  CHECK(res.best_observable.beta == 0.0);
  CHECK(res.best_observable.gamma == 0.0);
  CHECK(std::abs(res.best_knowledge - 2.0 / 3.0) <= 1e-4);
  CHECK(res.tie_set.size() >= 64);
  for (const TwoOutcomeObservable& o : res.tie_set) {
    // Both poles measure along z (with swapped outcome labels), so ties may
    // sit at beta = 0 and beta = pi but nowhere in between.
    CHECK((o.beta <= 1e-12 || o.beta >= pi - 1e-12));
  }
}

TEST_CASE("grid search rejects tiny resolutions") {
  const BeamDetectorConfig cfg = coplanar_config(1.0);
  CHECK_THROWS_AS(optimize_grid(cfg, 15), std::invalid_argument);
  CHECK_NOTHROW(optimize_grid(cfg, 16));
}

TEST_CASE("identical detector states admit no which-way knowledge") {
  const DetectorState chi = bloch_to_state({0.6, 0.0, 0.8});
  const BeamDetectorConfig cfg(PopulationVector::uniform(3), {chi, chi, chi});
  const OptimizationResult res = optimize_grid(cfg, 16);
  CHECK(res.best_knowledge <= 1e-12);
  // Every observable is equally (un)informative, so the whole grid ties.
  CHECK(res.tie_set.size() == 16 * 16);
  const OptimizationResult ref = optimize_refined(cfg);
  CHECK(ref.best_knowledge <= 1e-12);
}

TEST_CASE("refined optimization reaches closed-form optima") {
  SUBCASE("equatorial branch") {
    const OptimizationResult res = optimize_refined(coplanar_config(pi / 2.0));
    CHECK(res.method == OptimizationMethod::refined);
    CHECK(std::abs(res.best_knowledge - 1.0 / std::sqrt(3.0)) <= 1e-9);
    CHECK(std::abs(res.best_observable.beta - pi / 2.0) <= 1e-4);
    CHECK(res.converged);
    CHECK(res.cycles >= 1);
  }
  SUBCASE("polar branch") {
    const double theta = 5.0 * pi / 6.0;
    const double expected = (2.0 / 3.0) * std::pow(std::sin(theta / 2.0), 2);
    const OptimizationResult res = optimize_refined(coplanar_config(theta));
    CHECK(std::abs(res.best_knowledge - expected) <= 1e-9);
    CHECK(res.best_observable.beta <= 1e-3);
  }
  SUBCASE("branch crossover is degenerate") {
    const OptimizationResult res = optimize_refined(coplanar_config(2.0 * pi / 3.0));
    CHECK(std::abs(res.best_knowledge - 0.5) <= 1e-9);
    CHECK(res.tie_set.size() >= 2);
  }
}

TEST_CASE("refined search dominates grid searches and matches a dense grid") {
  for (double theta : {1.0, 2.5}) {
    const BeamDetectorConfig cfg = coplanar_config(theta);
    const OptimizationResult refined = optimize_refined(cfg);
    for (std::size_t res : {std::size_t{16}, std::size_t{64}, std::size_t{128}}) {
      CHECK(refined.best_knowledge >= optimize_grid(cfg, res).best_knowledge - 1e-12);
    }
    const OptimizationResult dense = optimize_grid(cfg, 1024);
    CHECK(std::abs(refined.best_knowledge - dense.best_knowledge) <= 1e-6);
    CHECK(refined.best_knowledge >= dense.best_knowledge - 1e-12);
  }
}

TEST_CASE("refined search dominates the grid on random configurations") {
  props::Rng rng(909090);
  for (int t = 0; t < 25; ++t) {
    const std::size_t n = rng.uniform_int(2, 4);
    const BeamDetectorConfig cfg = props::random_config(rng, n, 2);
    const OptimizationResult refined = optimize_refined(cfg);
    const OptimizationResult grid = optimize_grid(cfg, 48);
    CHECK(refined.best_knowledge >= grid.best_knowledge - 1e-12);
    CHECK(refined.best_knowledge <= 1.0 + 1e-12);
  }
}

TEST_CASE("refined search agrees with the closed form across tilt angles") {
  for (int k = 0; k < 64; ++k) {
    const double theta = (k + 0.5) * pi / 64.0;
    const OptimizationResult res = optimize_refined(coplanar_config(theta));
    const double closed = coplanar::closed_distinguishability(theta).value;
    CHECK(std::abs(res.best_knowledge - closed) <= 1e-8);
  }
}

TEST_CASE("refined search validates its tolerance") {
  const BeamDetectorConfig cfg = coplanar_config(1.0);
  CHECK_THROWS_AS(optimize_refined(cfg, 1e-13), std::invalid_argument);
  CHECK_NOTHROW(optimize_refined(cfg, 1e-12));
}

TEST_CASE("knowledge is invariant under antipodal observable swap") {
  props::Rng rng(31337);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = rng.uniform_int(2, 4);
    const BeamDetectorConfig cfg = props::random_config(rng, n, 2);
    const double beta = rng.uniform(0.0, pi);
    const double gamma = rng.uniform(0.0, 2.0 * pi);
    const double k1 = knowledge_of(cfg, canonical_observable(beta, gamma));
    const double k2 = knowledge_of(cfg, canonical_observable(pi - beta, gamma + pi));
    CHECK(std::abs(k1 - k2) <= 1e-12);
  }
}
