#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace duality {

/// Unit three-vector labelling a ray of a two-dimensional detector space.
struct BlochVector {
  double nx = 0.0;
  double ny = 0.0;
  double nz = 1.0;

  double dot(const BlochVector& other) const noexcept {
    return nx * other.nx + ny * other.ny + nz * other.nz;
  }
  double norm() const noexcept;
};

/// Normalized detector state; amplitudes are validated to unit norm.
class DetectorState {
 public:
  explicit DetectorState(Eigen::VectorXcd amplitudes);

  const Eigen::VectorXcd& amplitudes() const noexcept { return amplitudes_; }
  Eigen::Index dim() const noexcept { return amplitudes_.size(); }

 private:
  Eigen::VectorXcd amplitudes_;
};

/// Beam populations: a probability simplex over the beams.
class PopulationVector {
 public:
  explicit PopulationVector(std::vector<double> zeta);
  static PopulationVector uniform(std::size_t n);

  std::size_t size() const noexcept { return zeta_.size(); }
  double operator[](std::size_t i) const { return zeta_[i]; }
  const std::vector<double>& values() const noexcept { return zeta_; }
  auto begin() const noexcept { return zeta_.begin(); }
  auto end() const noexcept { return zeta_.end(); }

 private:
  std::vector<double> zeta_;
};

/// Beam populations plus the detector state tagging each beam.
class BeamDetectorConfig {
 public:
  BeamDetectorConfig(PopulationVector populations, std::vector<DetectorState> detector_states);

  std::size_t beam_count() const noexcept { return populations_.size(); }
  Eigen::Index detector_dim() const noexcept { return detector_states_.front().dim(); }
  const PopulationVector& populations() const noexcept { return populations_; }
  const std::vector<DetectorState>& detector_states() const noexcept { return detector_states_; }

 private:
  PopulationVector populations_;
  std::vector<DetectorState> detector_states_;
};

/// Pure state of the ray (1 + v.sigma)/2 = |chi><chi|.
/// The first nonzero amplitude of the result is real and non-negative.
DetectorState bloch_to_state(const BlochVector& v);

/// Inverse Bloch map; defined for 2-dimensional states only.
BlochVector state_to_bloch(const DetectorState& s);

/// Squared overlap |<a|b>|^2.
double overlap_sq(const DetectorState& a, const DetectorState& b);

/// Beam density matrix after tracing out the detector:
/// rho(i,j) = sqrt(zeta_i * zeta_j) * <chi_j|chi_i>.
Eigen::MatrixXcd reduced_beam_density(const BeamDetectorConfig& cfg);

}  // namespace duality
