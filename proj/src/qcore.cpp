#include "duality/qcore.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

#include "duality/tolerances.hpp"

namespace duality {

double BlochVector::norm() const noexcept {
  return std::sqrt(nx * nx + ny * ny + nz * nz);
}

DetectorState::DetectorState(Eigen::VectorXcd amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() < 1) {
    throw std::invalid_argument("DetectorState: needs at least one amplitude");
  }
  const double norm = amplitudes_.norm();
  if (std::abs(norm - 1.0) > tol::validation) {
    throw std::invalid_argument("DetectorState: amplitudes must have unit norm, got " +
                                std::to_string(norm));
  }
}

PopulationVector::PopulationVector(std::vector<double> zeta) : zeta_(std::move(zeta)) {
  if (zeta_.empty()) {
    throw std::invalid_argument("PopulationVector: needs at least one entry");
  }
  double sum = 0.0;
  for (double z : zeta_) {
    if (!(z >= -tol::validation && z <= 1.0 + tol::validation)) {
      throw std::invalid_argument("PopulationVector: entries must lie in [0, 1]");
    }
    sum += z;
  }
  if (std::abs(sum - 1.0) > tol::validation) {
    throw std::invalid_argument("PopulationVector: entries must sum to 1, got " +
                                std::to_string(sum));
  }
}

PopulationVector PopulationVector::uniform(std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("PopulationVector: needs at least one entry");
  }
  return PopulationVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

BeamDetectorConfig::BeamDetectorConfig(PopulationVector populations,
                                       std::vector<DetectorState> detector_states)
    : populations_(std::move(populations)), detector_states_(std::move(detector_states)) {
  if (detector_states_.size() != populations_.size()) {
    throw std::invalid_argument("BeamDetectorConfig: one detector state per beam required");
  }
  const Eigen::Index d = detector_states_.front().dim();
  for (const DetectorState& s : detector_states_) {
    if (s.dim() != d) {
      throw std::invalid_argument("BeamDetectorConfig: detector states must share one dimension");
    }
  }
}

DetectorState bloch_to_state(const BlochVector& v) {
  if (std::abs(v.norm() - 1.0) > tol::validation) {
    throw std::invalid_argument("bloch_to_state: Bloch vector must have unit length, got " +
                                std::to_string(v.norm()));
  }
  // Half-angle amplitudes; max() absorbs fp spill just outside [-1, 1].
  const double c = std::sqrt(std::max(0.0, (1.0 + v.nz) / 2.0));
  const double s = std::sqrt(std::max(0.0, (1.0 - v.nz) / 2.0));
  Eigen::VectorXcd amps(2);
  if (c == 0.0) {
    // Lone amplitude carries an arbitrary global phase; pin it real positive.
    amps << std::complex<double>(0.0, 0.0), std::complex<double>(s, 0.0);
  } else {
    const double phi = std::atan2(v.ny, v.nx);
    amps << std::complex<double>(c, 0.0), std::polar(s, phi);
  }
  return DetectorState(std::move(amps));
}

BlochVector state_to_bloch(const DetectorState& s) {
  if (s.dim() != 2) {
    throw std::invalid_argument("state_to_bloch: requires a 2-dimensional state");
  }
  const auto& a = s.amplitudes();
  const std::complex<double> cross = std::conj(a(0)) * a(1);
  return BlochVector{2.0 * cross.real(), 2.0 * cross.imag(), std::norm(a(0)) - std::norm(a(1))};
}

double overlap_sq(const DetectorState& a, const DetectorState& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("overlap_sq: states must share one dimension");
  }
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

Eigen::MatrixXcd reduced_beam_density(const BeamDetectorConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(cfg.beam_count());
  const PopulationVector& zeta = cfg.populations();
  const std::vector<DetectorState>& chi = cfg.detector_states();
  Eigen::MatrixXcd rho(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    rho(i, i) = zeta[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double w = std::sqrt(zeta[static_cast<std::size_t>(i)] *
                                 zeta[static_cast<std::size_t>(j)]);
      // <chi_j|chi_i> is the detector trace of |chi_i><chi_j|.
      const std::complex<double> ov =
          chi[static_cast<std::size_t>(j)].amplitudes().dot(chi[static_cast<std::size_t>(i)].amplitudes());
      rho(i, j) = w * ov;
      rho(j, i) = std::conj(rho(i, j));
    }
  }
  return rho;
}

}  // namespace duality
