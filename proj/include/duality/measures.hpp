#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "duality/qcore.hpp"

namespace duality {

/// Projective measurement: Hermitian, idempotent, mutually orthogonal, complete.
class Measurement {
 public:
  explicit Measurement(std::vector<Eigen::MatrixXcd> projectors,
                       std::vector<std::string> labels = {});

  std::size_t outcome_count() const noexcept { return projectors_.size(); }
  Eigen::Index dim() const noexcept { return projectors_.front().rows(); }
  const Eigen::MatrixXcd& projector(std::size_t l) const { return projectors_.at(l); }
  const std::string& label(std::size_t l) const { return labels_.at(l); }

 private:
  std::vector<Eigen::MatrixXcd> projectors_;
  std::vector<std::string> labels_;
};

/// Outcome probabilities and per-outcome posteriors from Bayes sorting.
/// Outcomes below the probability floor carry no posterior and are listed
/// separately in dropped_outcomes.
struct BayesResult {
  std::vector<double> outcome_probs;
  std::vector<PopulationVector> posteriors;
  std::vector<std::size_t> outcome_indices;
  std::vector<std::size_t> dropped_outcomes;
};

/// Which-way knowledge with its per-outcome decomposition.
struct KnowledgeReport {
  std::vector<double> outcome_probs;
  std::vector<PopulationVector> posteriors;
  std::vector<double> partial_knowledges;
  std::vector<std::size_t> outcome_indices;
  std::vector<std::size_t> dropped_outcomes;
  double total = 0.0;
};

/// Summary of the duality measures for one configuration.
struct DualityReport {
  double visibility = 0.0;
  double predictability = 0.0;
  std::optional<double> distinguishability;
  std::optional<double> sum_sq;  ///< D^2 + V^2, present when D is known
};

/// Builds a DualityReport and enforces range and trade-off bounds.
DualityReport make_duality_report(double visibility, double predictability,
                                  std::optional<double> distinguishability = std::nullopt);

/// Generalized fringe visibility of the reduced beam density.
double visibility(const BeamDetectorConfig& cfg);

/// A priori which-way predictability of the populations.
double predictability(const PopulationVector& populations);

/// q(i,l) = <chi_i| Pi_l |chi_i>: outcome likelihood per beam. Rows are
/// clipped to [0,1] to absorb floating-point spill.
Eigen::MatrixXd outcome_likelihoods(const BeamDetectorConfig& cfg, const Measurement& meas);

/// Bayes posteriors p(i|l) = zeta_i q(i,l) / p_l for outcomes with p_l above
/// the floor.
BayesResult bayes_posteriors(const PopulationVector& populations, const Eigen::MatrixXd& q);

/// Knowledge extracted by a single outcome; same form as predictability,
/// applied to the posterior.
double partial_knowledge(const PopulationVector& posterior);

/// Outcome-averaged which-way knowledge K = sum_l p_l K_l.
KnowledgeReport which_way_knowledge(const BeamDetectorConfig& cfg, const Measurement& meas);

/// Visibility recomputed from interference fringes on a uniform product grid
/// of beam phases (first phase pinned to zero). Cross-check for visibility().
double fringe_visibility_check(const BeamDetectorConfig& cfg, int phase_grid_size);

}  // namespace duality
