#pragma once

namespace duality::tol {

/// Validation of externally supplied data: norms, simplex sums, projector algebra.
inline constexpr double validation = 1e-9;

/// Algebraic identities evaluated in double precision.
inline constexpr double algebraic = 1e-12;

/// Outcomes with total probability below this floor are dropped from Bayes sorting.
inline constexpr double outcome_floor = 1e-12;

/// Observables whose knowledge lies within this of the optimum count as ties.
inline constexpr double tie = 1e-6;

}  // namespace duality::tol
