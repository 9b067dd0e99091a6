#include "duality/distinguishability.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "duality/tolerances.hpp"

namespace duality {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr int refine_seed_resolution = 64;
constexpr int refine_max_cycles = 200;
constexpr int refine_max_candidates = 8;

struct Probe {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section maximization on [lo, hi]; returns the best point among all
/// probes and the incumbent, so the result never falls below the start value.
template <typename F>
Probe golden_max(F&& f, double lo, double hi, Probe incumbent) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  auto consider = [&incumbent](double x, double v) {
    if (v > incumbent.value) incumbent = {x, v};
  };
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  consider(x1, f1);
  consider(x2, f2);
  for (int it = 0; it < 100 && (b - a) > 1e-13; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
      consider(x2, f2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
      consider(x1, f1);
    }
  }
  return incumbent;
}

struct GridScan {
  int resolution = 0;
  std::vector<double> values;  // row-major over (beta index, gamma index)

  double beta_at(int i) const { return static_cast<double>(i) * pi / (resolution - 1); }
  double gamma_at(int j) const { return static_cast<double>(j) * two_pi / resolution; }
  double value(int i, int j) const {
    return values[static_cast<std::size_t>(i) * static_cast<std::size_t>(resolution) +
                  static_cast<std::size_t>(j)];
  }
};

GridScan scan_observable_grid(const BeamDetectorConfig& cfg, int resolution) {
  GridScan scan;
  scan.resolution = resolution;
  scan.values.resize(static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution));
  for (int i = 0; i < resolution; ++i) {
    const double beta = scan.beta_at(i);
    for (int j = 0; j < resolution; ++j) {
      scan.values[static_cast<std::size_t>(i) * static_cast<std::size_t>(resolution) +
                  static_cast<std::size_t>(j)] =
          knowledge_of(cfg, TwoOutcomeObservable{beta, scan.gamma_at(j)});
    }
  }
  return scan;
}

struct RefineOutcome {
  double beta = 0.0;
  double gamma = 0.0;
  double value = 0.0;
  bool converged = false;
  int cycles = 0;
};

RefineOutcome coordinate_refine(const BeamDetectorConfig& cfg, double beta0, double gamma0,
                                double dbeta, double dgamma, double tolerance) {
  auto eval = [&cfg](double b, double g) {
    return knowledge_of(cfg, TwoOutcomeObservable{b, g});
  };
  double b = beta0;
  double g = gamma0;
  double best = eval(b, g);
  bool converged = false;
  int cycles = 0;
  while (cycles < refine_max_cycles) {
    ++cycles;
    const double before = best;
    const Probe pb = golden_max([&](double x) { return eval(x, g); },
                                std::max(0.0, b - dbeta), std::min(pi, b + dbeta), Probe{b, best});
    b = pb.x;
    best = pb.value;
    const Probe pg = golden_max([&](double x) { return eval(b, x); }, g - dgamma, g + dgamma,
                                Probe{g, best});
    g = pg.x;
    best = pg.value;
    if (best - before < tolerance) {
      converged = true;
      break;
    }
  }
  return {b, g, best, converged, cycles};
}

/// Grid local maxima (gamma wraps, beta clamps), strongest first; candidates
/// closer than two cells to an already selected one are skipped.
std::vector<std::pair<int, int>> select_candidates(const GridScan& scan, int max_candidates) {
  const int res = scan.resolution;
  std::vector<std::pair<int, int>> maxima;
  for (int i = 0; i < res; ++i) {
    for (int j = 0; j < res; ++j) {
      const double v = scan.value(i, j);
      bool is_max = true;
      if (i > 0 && scan.value(i - 1, j) > v) is_max = false;
      if (is_max && i + 1 < res && scan.value(i + 1, j) > v) is_max = false;
      if (is_max && scan.value(i, (j + 1) % res) > v) is_max = false;
      if (is_max && scan.value(i, (j + res - 1) % res) > v) is_max = false;
      if (is_max) maxima.emplace_back(i, j);
    }
  }
  std::stable_sort(maxima.begin(), maxima.end(),
                   [&scan](const std::pair<int, int>& a, const std::pair<int, int>& b) {
                     return scan.value(a.first, a.second) > scan.value(b.first, b.second);
                   });
  std::vector<std::pair<int, int>> picked;
  for (const auto& cand : maxima) {
    bool close = false;
    for (const auto& sel : picked) {
      const int di = std::abs(cand.first - sel.first);
      int dj = std::abs(cand.second - sel.second);
      dj = std::min(dj, res - dj);
      if (std::max(di, dj) <= 2) {
        close = true;
        break;
      }
    }
    if (!close) picked.push_back(cand);
    if (static_cast<int>(picked.size()) >= max_candidates) break;
  }
  return picked;
}

bool lex_less(const TwoOutcomeObservable& a, const TwoOutcomeObservable& b) {
  if (a.beta != b.beta) return a.beta < b.beta;
  return a.gamma < b.gamma;
}

}  // namespace

BlochVector TwoOutcomeObservable::axis() const noexcept {
  const double sb = std::sin(beta);
  return {sb * std::cos(gamma), sb * std::sin(gamma), std::cos(beta)};
}

TwoOutcomeObservable canonical_observable(double beta, double gamma) {
  double b = std::clamp(beta, 0.0, pi);
  double g = std::fmod(gamma, two_pi);
  if (g < 0.0) g += two_pi;
  if (g >= two_pi) g = 0.0;
  return {b, g};
}

Measurement observable_to_measurement(const TwoOutcomeObservable& obs) {
  const BlochVector m = obs.axis();
  Eigen::MatrixXcd dot(2, 2);
  dot << std::complex<double>(m.nz, 0.0), std::complex<double>(m.nx, -m.ny),
      std::complex<double>(m.nx, m.ny), std::complex<double>(-m.nz, 0.0);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(2, 2);
  return Measurement({0.5 * (id + dot), 0.5 * (id - dot)}, {"+", "-"});
}

double knowledge_of(const BeamDetectorConfig& cfg, const TwoOutcomeObservable& obs) {
  if (cfg.detector_dim() != 2) {
    throw std::invalid_argument("knowledge_of: detector dimension must be 2");
  }
  return which_way_knowledge(cfg, observable_to_measurement(obs)).total;
}

OptimizationResult optimize_grid(const BeamDetectorConfig& cfg, int resolution) {
  if (resolution < 16) {
    throw std::invalid_argument("optimize_grid: resolution must be at least 16");
  }
  if (cfg.detector_dim() != 2) {
    throw std::invalid_argument("optimize_grid: detector dimension must be 2");
  }
  const GridScan scan = scan_observable_grid(cfg, resolution);

  double best = scan.values.front();
  int best_i = 0;
  int best_j = 0;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      if (scan.value(i, j) > best) {
        best = scan.value(i, j);
        best_i = i;
        best_j = j;
      }
    }
  }

  OptimizationResult result;
  result.best_knowledge = best;
  result.best_observable = {scan.beta_at(best_i), scan.gamma_at(best_j)};
  result.method = OptimizationMethod::grid;
  result.grid_resolution = resolution;
  result.converged = true;
  result.cycles = 0;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      if (scan.value(i, j) >= best - tol::tie) {
        result.tie_set.push_back({scan.beta_at(i), scan.gamma_at(j)});
      }
    }
  }
  return result;
}

OptimizationResult optimize_refined(const BeamDetectorConfig& cfg, double tolerance) {
  if (tolerance < 1e-12) {
    throw std::invalid_argument("optimize_refined: tol must be at least 1e-12");
  }
  if (cfg.detector_dim() != 2) {
    throw std::invalid_argument("optimize_refined: detector dimension must be 2");
  }
  const GridScan scan = scan_observable_grid(cfg, refine_seed_resolution);
  const double dbeta = pi / (refine_seed_resolution - 1);
  const double dgamma = two_pi / refine_seed_resolution;

  std::vector<RefineOutcome> refined;
  for (const auto& [i, j] : select_candidates(scan, refine_max_candidates)) {
    refined.push_back(
        coordinate_refine(cfg, scan.beta_at(i), scan.gamma_at(j), dbeta, dgamma, tolerance));
  }

  std::size_t best_idx = 0;
  for (std::size_t k = 1; k < refined.size(); ++k) {
    if (refined[k].value > refined[best_idx].value) best_idx = k;
  }
  const double best = refined[best_idx].value;

  std::vector<TwoOutcomeObservable> ties;
  for (const RefineOutcome& r : refined) {
    if (r.value >= best - tol::tie) {
      ties.push_back(canonical_observable(r.beta, r.gamma));
    }
  }
  std::sort(ties.begin(), ties.end(), lex_less);
  std::vector<TwoOutcomeObservable> deduped;
  for (const TwoOutcomeObservable& t : ties) {
    bool dup = false;
    for (const TwoOutcomeObservable& kept : deduped) {
      double dg = std::abs(t.gamma - kept.gamma);
      dg = std::min(dg, two_pi - dg);
      if (std::abs(t.beta - kept.beta) < 1e-7 && dg < 1e-7) {
        dup = true;
        break;
      }
    }
    if (!dup) deduped.push_back(t);
  }

  OptimizationResult result;
  result.best_knowledge = best;
  result.best_observable = deduped.front();
  result.method = OptimizationMethod::refined;
  result.grid_resolution = refine_seed_resolution;
  result.tie_set = std::move(deduped);
  result.converged = refined[best_idx].converged;
  result.cycles = refined[best_idx].cycles;
  return result;
}

}  // namespace duality
