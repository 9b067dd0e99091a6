#include "duality/measures.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "duality/tolerances.hpp"

namespace duality {

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

Measurement::Measurement(std::vector<Eigen::MatrixXcd> projectors, std::vector<std::string> labels)
    : projectors_(std::move(projectors)), labels_(std::move(labels)) {
  if (projectors_.empty()) {
    throw std::invalid_argument("Measurement: needs at least one projector");
  }
  const Eigen::Index d = projectors_.front().rows();
  if (d < 1) {
    throw std::invalid_argument("Measurement: projectors must be non-empty square matrices");
  }
  for (const Eigen::MatrixXcd& p : projectors_) {
    if (p.rows() != d || p.cols() != d) {
      throw std::invalid_argument("Measurement: projectors must be square and share one dimension");
    }
    if (max_abs(p - p.adjoint()) > tol::validation) {
      throw std::invalid_argument("Measurement: projectors must be Hermitian");
    }
    if (max_abs(p * p - p) > tol::validation) {
      throw std::invalid_argument("Measurement: projectors must be idempotent");
    }
  }
  for (std::size_t l = 0; l < projectors_.size(); ++l) {
    for (std::size_t k = l + 1; k < projectors_.size(); ++k) {
      if (max_abs(projectors_[l] * projectors_[k]) > tol::validation) {
        throw std::invalid_argument("Measurement: projectors must be mutually orthogonal");
      }
    }
  }
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(d, d);
  for (const Eigen::MatrixXcd& p : projectors_) sum += p;
  if (max_abs(sum - Eigen::MatrixXcd::Identity(d, d)) > tol::validation) {
    throw std::invalid_argument("Measurement: projectors must sum to the identity");
  }
  if (labels_.empty()) {
    labels_.reserve(projectors_.size());
    for (std::size_t l = 0; l < projectors_.size(); ++l) labels_.push_back(std::to_string(l));
  } else if (labels_.size() != projectors_.size()) {
    throw std::invalid_argument("Measurement: one label per projector required");
  }
}

DualityReport make_duality_report(double visibility, double predictability,
                                  std::optional<double> distinguishability) {
  auto in_unit = [](double x) { return x >= -tol::validation && x <= 1.0 + tol::validation; };
  if (!in_unit(visibility) || !in_unit(predictability)) {
    throw std::invalid_argument("make_duality_report: V and P must lie in [0, 1]");
  }
  if (predictability * predictability + visibility * visibility > 1.0 + tol::validation) {
    throw std::invalid_argument("make_duality_report: P^2 + V^2 exceeds 1");
  }
  DualityReport rep;
  rep.visibility = visibility;
  rep.predictability = predictability;
  if (distinguishability) {
    if (!in_unit(*distinguishability)) {
      throw std::invalid_argument("make_duality_report: D must lie in [0, 1]");
    }
    const double sum = *distinguishability * *distinguishability + visibility * visibility;
    if (sum > 1.0 + tol::validation) {
      throw std::invalid_argument("make_duality_report: D^2 + V^2 exceeds 1");
    }
    rep.distinguishability = distinguishability;
    rep.sum_sq = sum;
  }
  return rep;
}

double visibility(const BeamDetectorConfig& cfg) {
  const std::size_t n = cfg.beam_count();
  if (n < 2) {
    throw std::domain_error("visibility: needs at least two beams");
  }
  const Eigen::MatrixXcd rho = reduced_beam_density(cfg);
  double off = 0.0;
  for (Eigen::Index i = 0; i < rho.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < rho.cols(); ++j) {
      off += std::norm(rho(i, j));
    }
  }
  const double v2 = static_cast<double>(n) / (static_cast<double>(n) - 1.0) * 2.0 * off;
  return std::sqrt(v2);
}

double predictability(const PopulationVector& populations) {
  const std::size_t n = populations.size();
  if (n < 2) {
    throw std::domain_error("predictability: needs at least two beams");
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  double dev = 0.0;
  for (double z : populations) {
    dev += (z - inv_n) * (z - inv_n);
  }
  return std::sqrt(static_cast<double>(n) / (static_cast<double>(n) - 1.0) * dev);
}

Eigen::MatrixXd outcome_likelihoods(const BeamDetectorConfig& cfg, const Measurement& meas) {
  if (meas.dim() != cfg.detector_dim()) {
    throw std::invalid_argument("outcome_likelihoods: measurement and detector dimensions differ");
  }
  const auto n = static_cast<Eigen::Index>(cfg.beam_count());
  const auto m = static_cast<Eigen::Index>(meas.outcome_count());
  Eigen::MatrixXd q(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXcd& a = cfg.detector_states()[static_cast<std::size_t>(i)].amplitudes();
    for (Eigen::Index l = 0; l < m; ++l) {
      const double v = a.dot(meas.projector(static_cast<std::size_t>(l)) * a).real();
      q(i, l) = std::clamp(v, 0.0, 1.0);
    }
  }
  return q;
}

BayesResult bayes_posteriors(const PopulationVector& populations, const Eigen::MatrixXd& q) {
  const auto n = static_cast<Eigen::Index>(populations.size());
  if (q.rows() != n) {
    throw std::invalid_argument("bayes_posteriors: q needs one row per beam");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Eigen::Index l = 0; l < q.cols(); ++l) {
      if (!(q(i, l) >= -tol::validation && q(i, l) <= 1.0 + tol::validation)) {
        throw std::invalid_argument("bayes_posteriors: likelihoods must lie in [0, 1]");
      }
      row += q(i, l);
    }
    if (std::abs(row - 1.0) > tol::validation) {
      throw std::invalid_argument("bayes_posteriors: likelihood rows must sum to 1");
    }
  }
  BayesResult out;
  for (Eigen::Index l = 0; l < q.cols(); ++l) {
    double p = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      p += populations[static_cast<std::size_t>(i)] * q(i, l);
    }
    if (p < tol::outcome_floor) {
      out.dropped_outcomes.push_back(static_cast<std::size_t>(l));
      continue;
    }
    std::vector<double> post(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      post[static_cast<std::size_t>(i)] =
          std::max(0.0, populations[static_cast<std::size_t>(i)] * q(i, l) / p);
    }
    out.outcome_probs.push_back(p);
    out.posteriors.emplace_back(std::move(post));
    out.outcome_indices.push_back(static_cast<std::size_t>(l));
  }
  return out;
}

double partial_knowledge(const PopulationVector& posterior) {
  return predictability(posterior);
}

KnowledgeReport which_way_knowledge(const BeamDetectorConfig& cfg, const Measurement& meas) {
  const Eigen::MatrixXd q = outcome_likelihoods(cfg, meas);
  BayesResult bayes = bayes_posteriors(cfg.populations(), q);
  KnowledgeReport rep;
  rep.outcome_probs = std::move(bayes.outcome_probs);
  rep.posteriors = std::move(bayes.posteriors);
  rep.outcome_indices = std::move(bayes.outcome_indices);
  rep.dropped_outcomes = std::move(bayes.dropped_outcomes);
  rep.partial_knowledges.reserve(rep.posteriors.size());
  double total = 0.0;
  for (std::size_t l = 0; l < rep.posteriors.size(); ++l) {
    const double kl = partial_knowledge(rep.posteriors[l]);
    rep.partial_knowledges.push_back(kl);
    total += rep.outcome_probs[l] * kl;
  }
  rep.total = total;
  return rep;
}

double fringe_visibility_check(const BeamDetectorConfig& cfg, int phase_grid_size) {
  if (phase_grid_size < 8) {
    throw std::invalid_argument("fringe_visibility_check: phase grid needs at least 8 points");
  }
  const std::size_t n = cfg.beam_count();
  if (n < 2) {
    throw std::domain_error("fringe_visibility_check: needs at least two beams");
  }
  const Eigen::MatrixXcd rho = reduced_beam_density(cfg);
  const int grid = phase_grid_size;
  std::vector<std::complex<double>> unit(static_cast<std::size_t>(grid));
  for (int g = 0; g < grid; ++g) {
    const double phi = 2.0 * std::numbers::pi * g / grid;
    unit[static_cast<std::size_t>(g)] = std::polar(1.0, phi);
  }

  double diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) diag += rho(static_cast<Eigen::Index>(i),
                                                  static_cast<Eigen::Index>(i)).real();

  // Odometer over the n-1 free phases; the first beam phase is pinned to 0.
  std::vector<int> digits(n - 1, 0);
  std::vector<std::complex<double>> w(n, std::complex<double>(1.0, 0.0));
  long double sum = 0.0L;
  long double sum_sq = 0.0L;
  std::size_t count = 0;
  bool done = false;
  while (!done) {
    for (std::size_t k = 0; k + 1 < n; ++k) {
      w[k + 1] = unit[static_cast<std::size_t>(digits[k])];
    }
    double intensity = diag;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const std::complex<double> term =
            rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * w[i] * std::conj(w[j]);
        intensity += 2.0 * term.real();
      }
    }
    sum += intensity;
    sum_sq += static_cast<long double>(intensity) * intensity;
    ++count;

    std::size_t pos = 0;
    while (pos < digits.size()) {
      if (++digits[pos] < grid) break;
      digits[pos] = 0;
      ++pos;
    }
    done = (pos == digits.size());
  }

  const long double mean = sum / static_cast<long double>(count);
  long double var = sum_sq / static_cast<long double>(count) - mean * mean;
  if (var < 0.0L) var = 0.0L;
  const double rms = std::sqrt(static_cast<double>(var));
  const double scale =
      std::sqrt(static_cast<double>(n) / (static_cast<double>(n) - 1.0));
  return scale * rms / static_cast<double>(mean);
}

}  // namespace duality
