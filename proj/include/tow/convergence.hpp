#pragma once

#include <string>
#include <vector>

#include "tow/problem.hpp"

namespace tow {

struct ConvergenceLevel {
    double epsilon = 0.0;
    double h = 0.0;
    double sup_diff_to_previous = 0.0; // NaN at level 0
    double exact_error = 0.0;          // NaN when no exact solution is given
    long iterations = 0;
    double eps_lipschitz = 0.0; // sup |u(x)-u(y)| over one-ball pairs
    double wall_time = 0.0;     // seconds; kept out of serialized reports
    bool failed = false;
    std::string failure;
};

struct ConvergenceReport {
    std::vector<ConvergenceLevel> levels;
    HypothesisReport hypothesis; // strict when it holds, flat-ok otherwise
};

/// Solves at epsilon_k = epsilon * 2^-k with h_k = epsilon_k / 4 for
/// k = 0..n_levels-1. sup_diff_to_previous interpolates the coarser field
/// onto the finer grid, skipping nodes inside the coarser grid's boundary
/// band. A solver failure marks that level and stops; earlier levels stay
/// in the report.
ConvergenceReport run_convergence(const ProblemFile& p, int n_levels,
                                  const expr::Expr* exact);

} // namespace tow
