#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "duality/measures.hpp"
#include "duality/qcore.hpp"

namespace duality::props {

/// Deterministic random source. Draws are derived from raw mt19937_64 words
/// so a seed reproduces the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();  ///< [0, 1)
  double uniform(double lo, double hi);
  double normal();
  int uniform_int(int lo, int hi);  ///< inclusive bounds

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

BlochVector random_bloch(Rng& rng);
DetectorState random_state(Rng& rng, Eigen::Index dim);
PopulationVector random_simplex(Rng& rng, std::size_t n);
BeamDetectorConfig random_config(Rng& rng, std::size_t n, Eigen::Index dim,
                                 bool equal_populations = false);
/// Random projective measurement with 2..dim outcomes.
Measurement random_projective_measurement(Rng& rng, Eigen::Index dim);

struct PropertyResult {
  std::string name;
  int trials = 0;
  int failures = 0;
  std::vector<std::string> failure_details;  ///< up to three reproduction records
};

struct SuiteReport {
  std::uint64_t seed = 0;
  int trials = 0;
  std::vector<PropertyResult> properties;

  bool all_passed() const;
};

/// Runs every randomized invariant suite with `trials` trials per property.
SuiteReport run_property_suite(std::uint64_t seed, int trials);

}  // namespace duality::props
