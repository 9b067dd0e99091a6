#include "duality/properties.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "duality/distinguishability.hpp"
#include "duality/io.hpp"
#include "duality/measures.hpp"
#include "duality/tolerances.hpp"

namespace duality::props {

// Rng deliberately avoids std::uniform_real_distribution and
// std::normal_distribution: their output sequences differ across standard
// library implementations, and the check suite must reproduce failures from a
// seed on any platform.

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]; keeps the log argument positive
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

int Rng::uniform_int(int lo, int hi) {
  if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(engine_() % span);
}

BlochVector random_bloch(Rng& rng) {
  while (true) {
    const BlochVector v{rng.normal(), rng.normal(), rng.normal()};
    const double r = v.norm();
    if (r > 1e-12) {
      return {v.nx / r, v.ny / r, v.nz / r};
    }
  }
}

DetectorState random_state(Rng& rng, Eigen::Index dim) {
  while (true) {
    Eigen::VectorXcd a(dim);
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      a(k) = std::complex<double>(rng.normal(), rng.normal());
    }
    const double r = a.norm();
    if (r > 1e-12) {
      return DetectorState(a / r);
    }
  }
}

PopulationVector random_simplex(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  double total = 0.0;
  for (double& x : w) {
    x = -std::log(1.0 - rng.uniform());
    total += x;
  }
  for (double& x : w) x /= total;
  return PopulationVector(std::move(w));
}

BeamDetectorConfig random_config(Rng& rng, std::size_t n, Eigen::Index dim,
                                 bool equal_populations) {
  std::vector<DetectorState> states;
  states.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    states.push_back(random_state(rng, dim));
  }
  PopulationVector pops =
      equal_populations ? PopulationVector::uniform(n) : random_simplex(rng, n);
  return BeamDetectorConfig(std::move(pops), std::move(states));
}

Measurement random_projective_measurement(Rng& rng, Eigen::Index dim) {
  // Random unitary via QR of a complex Gaussian matrix, columns grouped into
  // rank >= 1 projectors.
  Eigen::MatrixXcd g(dim, dim);
  for (Eigen::Index r = 0; r < g.rows(); ++r) {
    for (Eigen::Index c = 0; c < g.cols(); ++c) {
      g(r, c) = std::complex<double>(rng.normal(), rng.normal());
    }
  }
  const Eigen::MatrixXcd q = Eigen::HouseholderQR<Eigen::MatrixXcd>(g).householderQ();

  const int outcomes = rng.uniform_int(2, static_cast<int>(dim));
  std::vector<int> group(static_cast<std::size_t>(dim));
  while (true) {
    std::vector<bool> used(static_cast<std::size_t>(outcomes), false);
    for (int& g_of_col : group) {
      g_of_col = rng.uniform_int(0, outcomes - 1);
      used[static_cast<std::size_t>(g_of_col)] = true;
    }
    if (std::all_of(used.begin(), used.end(), [](bool b) { return b; })) break;
  }

  std::vector<Eigen::MatrixXcd> projectors(static_cast<std::size_t>(outcomes),
                                           Eigen::MatrixXcd::Zero(dim, dim));
  for (Eigen::Index c = 0; c < dim; ++c) {
    const Eigen::VectorXcd col = q.col(c);
    projectors[static_cast<std::size_t>(group[static_cast<std::size_t>(c)])] +=
        col * col.adjoint();
  }
  return Measurement(std::move(projectors));
}

namespace {

using Property = void (*)(Rng&, std::string& detail);

/// Throws std::runtime_error with a short description when a trial fails.
struct NamedProperty {
  const char* name;
  Property body;
};

[[noreturn]] void fail(const std::string& what) { throw std::runtime_error(what); }

void check_close(double a, double b, double tol, const char* what) {
  if (!(std::abs(a - b) <= tol)) {
    fail(std::string(what) + ": |" + io::format_value(a) + " - " + io::format_value(b) +
         "| > " + io::format_value(tol));
  }
}

void check_le(double a, double b, const char* what) {
  if (!(a <= b)) {
    fail(std::string(what) + ": " + io::format_value(a) + " > " + io::format_value(b));
  }
}

void prop_bloch_round_trip(Rng& rng, std::string& detail) {
  const BlochVector n = random_bloch(rng);
  detail = "n = (" + io::format_value(n.nx) + ", " + io::format_value(n.ny) + ", " +
           io::format_value(n.nz) + ")";
  const DetectorState chi = bloch_to_state(n);
  const BlochVector back = state_to_bloch(chi);
  check_close(back.nx, n.nx, 1e-12, "nx");
  check_close(back.ny, n.ny, 1e-12, "ny");
  check_close(back.nz, n.nz, 1e-12, "nz");

  // The reverse loop compares rays, not amplitude vectors: a global phase is
  // not observable.
  const DetectorState psi = random_state(rng, 2);
  const DetectorState again = bloch_to_state(state_to_bloch(psi));
  check_close(overlap_sq(psi, again), 1.0, 1e-12, "ray overlap");
}

void prop_overlap_bloch_identity(Rng& rng, std::string& detail) {
  const BlochVector a = random_bloch(rng);
  const BlochVector b = random_bloch(rng);
  detail = "a.b = " + io::format_value(a.dot(b));
  const double lhs = overlap_sq(bloch_to_state(a), bloch_to_state(b));
  const double rhs = 0.5 * (1.0 + a.dot(b));
  check_close(lhs, rhs, 1e-12, "overlap identity");
}

void prop_density_validity(Rng& rng, std::string& detail) {
  const std::size_t n = rng.uniform_int(2, 5);
  const std::size_t d = rng.uniform_int(2, 3);
  const BeamDetectorConfig cfg = random_config(rng, n, d);
  detail = io::config_to_json(cfg);
  const Eigen::MatrixXcd rho = reduced_beam_density(cfg);
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  check_le(herm, 1e-14, "hermiticity defect");
  check_close(rho.trace().real(), 1.0, 1e-12, "trace");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  check_le(-es.eigenvalues().minCoeff(), 1e-9, "negative eigenvalue");
}

void prop_p2v2_inequality(Rng& rng, std::string& detail) {
  const bool equal = rng.uniform() < 0.5;  // exercise both the P = 0 and P > 0 regimes
  const std::size_t n = rng.uniform_int(2, 5);
  const std::size_t d = rng.uniform_int(2, 4);
  const BeamDetectorConfig cfg = random_config(rng, n, d, equal);
  detail = io::config_to_json(cfg);
  const double v = visibility(cfg);
  const double p = predictability(cfg.populations());
  check_le(p * p + v * v, 1.0 + 1e-9, "P^2 + V^2");
}

void prop_pure_beam_equality(Rng& rng, std::string& detail) {
  const std::size_t n = rng.uniform_int(2, 5);
  const std::size_t d = rng.uniform_int(2, 3);
  const DetectorState shared = random_state(rng, d);
  std::vector<DetectorState> states(n, shared);
  const BeamDetectorConfig cfg(random_simplex(rng, n), std::move(states));
  detail = io::config_to_json(cfg);
  const double v = visibility(cfg);
  const double p = predictability(cfg.populations());
  // Identical detector states leave the marker uncoupled, so the beam state
  // stays pure and the bound is saturated.
  check_close(p * p + v * v, 1.0, 1e-9, "P^2 + V^2 at purity");
}

void prop_d2v2_inequality(Rng& rng, std::string& detail) {
  const std::size_t n = rng.uniform_int(2, 4);
  const BeamDetectorConfig cfg = random_config(rng, n, 2);
  detail = io::config_to_json(cfg);
  const double v = visibility(cfg);
  const OptimizationResult opt = optimize_refined(cfg);
  check_le(opt.best_knowledge * opt.best_knowledge + v * v, 1.0 + 1e-9, "D^2 + V^2");
}

void prop_knowledge_vs_predictability(Rng& rng, std::string& detail) {
  const std::size_t d = rng.uniform_int(2, 3);
  const std::size_t n = rng.uniform_int(2, 4);
  const BeamDetectorConfig cfg = random_config(rng, n, d);
  detail = io::config_to_json(cfg);
  const Measurement meas = random_projective_measurement(rng, d);
  const KnowledgeReport rep = which_way_knowledge(cfg, meas);
  const double p = predictability(cfg.populations());
  check_le(p - 1e-9, rep.total, "K >= P");
  check_le(rep.total, 1.0 + 1e-12, "K <= 1");
  for (double k : rep.partial_knowledges) {
    check_le(k, 1.0 + 1e-12, "K_l <= 1");
    check_le(-k, 1e-12, "K_l >= 0");
  }
}

void prop_bayes_consistency(Rng& rng, std::string& detail) {
  const std::size_t d = rng.uniform_int(2, 3);
  const std::size_t n = rng.uniform_int(2, 4);
  const BeamDetectorConfig cfg = random_config(rng, n, d);
  detail = io::config_to_json(cfg);
  const Measurement meas = random_projective_measurement(rng, d);
  const BayesResult bayes = bayes_posteriors(cfg.populations(), outcome_likelihoods(cfg, meas));
  // Averaging the posteriors over outcomes must recover the prior.
  for (std::size_t i = 0; i < n; ++i) {
    double mix = 0.0;
    for (std::size_t l = 0; l < bayes.outcome_probs.size(); ++l) {
      mix += bayes.outcome_probs[l] * bayes.posteriors[l][i];
    }
    check_close(mix, cfg.populations()[i], 1e-9, "posterior average");
  }
}

void prop_closed_numeric_agreement(Rng& rng, std::string& detail) {
  const double theta = rng.uniform(0.0, std::numbers::pi);
  detail = "theta = " + io::format_value(theta);
  const BeamDetectorConfig cfg = coplanar::make_config(theta);
  check_close(coplanar::closed_visibility(theta), visibility(cfg), 1e-12, "V closed vs numeric");
  const OptimizationResult opt = optimize_refined(cfg);
  check_close(coplanar::closed_distinguishability(theta).value, opt.best_knowledge, 1e-8,
              "D closed vs refined");
}

void prop_antipodal_symmetry(Rng& rng, std::string& detail) {
  const std::size_t n = rng.uniform_int(2, 4);
  const BeamDetectorConfig cfg = random_config(rng, n, 2);
  const double beta = rng.uniform(0.0, std::numbers::pi);
  const double gamma = rng.uniform(0.0, 2.0 * std::numbers::pi);
  detail = io::config_to_json(cfg) + "; beta = " + io::format_value(beta) +
           ", gamma = " + io::format_value(gamma);
  // Swapping the outcome labels of a two-outcome measurement cannot change
  // what the observer learns.
  const double k1 = knowledge_of(cfg, canonical_observable(beta, gamma));
  const double k2 =
      knowledge_of(cfg, canonical_observable(std::numbers::pi - beta,
                                             gamma + std::numbers::pi));
  check_close(k1, k2, 1e-12, "antipodal symmetry");
}

constexpr NamedProperty properties[] = {
    {"bloch_round_trip", prop_bloch_round_trip},
    {"overlap_bloch_identity", prop_overlap_bloch_identity},
    {"density_validity", prop_density_validity},
    {"p2v2_inequality", prop_p2v2_inequality},
    {"pure_beam_equality", prop_pure_beam_equality},
    {"d2v2_inequality", prop_d2v2_inequality},
    {"knowledge_vs_predictability", prop_knowledge_vs_predictability},
    {"bayes_consistency", prop_bayes_consistency},
    {"closed_numeric_agreement", prop_closed_numeric_agreement},
    {"antipodal_symmetry", prop_antipodal_symmetry},
};

}  // namespace

SuiteReport run_property_suite(std::uint64_t seed, int trials) {
  if (trials < 1) throw std::invalid_argument("run_property_suite: trials must be >= 1");
  SuiteReport report;
  report.seed = seed;
  report.trials = trials;
  for (const NamedProperty& prop : properties) {
    PropertyResult result;
    result.name = prop.name;
    result.trials = trials;
    // Each property gets its own deterministic stream so adding or reordering
    // properties does not disturb the others.
    Rng rng(seed ^ io::fnv1a64(prop.name));
    for (int t = 0; t < trials; ++t) {
      std::string detail;
      try {
        prop.body(rng, detail);
      } catch (const std::exception& e) {
        ++result.failures;
        if (result.failure_details.size() < 3) {
          result.failure_details.push_back("trial " + std::to_string(t) + ": " + e.what() +
                                           (detail.empty() ? "" : " [" + detail + "]"));
        }
      }
    }
    report.properties.push_back(std::move(result));
  }
  return report;
}

bool SuiteReport::all_passed() const {
  return std::all_of(properties.begin(), properties.end(),
                     [](const PropertyResult& p) { return p.failures == 0; });
}

}  // namespace duality::props
