#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tow/expr.hpp"
#include "tow/geometry.hpp"
#include "tow/solver.hpp"

namespace tow {

/// phi(x) = a|x-z|^2 + b|x-z| + c.
struct QuadraticDistanceFn {
    Vec z{0, 0};
    double a = 0, b = 0, c = 0;

    double radius(Vec x) const { return dist(x, z); }
    double eval(Vec x) const {
        double r = radius(x);
        return a * r * r + b * r + c;
    }
    double q_prime(double r) const { return 2 * a * r + b; }
};

struct FdProbe {
    Vec gradient{0, 0};
    double lap_inf = 0.0;    // certified second derivative along the gradient
    bool degenerate = false; // |gradient| below the floor
    double axis_mean = 0.0;  // mean of axis second differences (degenerate diagnostic)
    double axis_spread = 0.0; // max - min of axis second differences
};

/// Central finite differences with spacing delta (a multiple of h, so every
/// stencil point is a lattice node). The infinity Laplacian is
/// <D2u g, g>/|g|^2 from the finite-difference Hessian and gradient; below
/// gradient_floor the axis second-difference mean and spread are reported
/// instead. Throws TooCloseToBoundary when the stencil leaves the interior.
FdProbe grad_and_infinity_laplacian_fd(const ValueField& u, int node, double delta,
                                       double gradient_floor);

struct ResidualReport {
    double interior_linf_residual = 0.0;
    int interior_worst_node = -1;
    long interior_nodes_checked = 0;
    long skipped_small_gradient = 0;
    long skipped_near_boundary = 0;
    double max_axis_spread = 0.0; // over small-gradient nodes, no pass/fail weight

    double neumann_linf_residual = 0.0;
    int neumann_worst_node = -1;
    long neumann_checked = 0;
    long neumann_skipped = 0;

    double dirichlet_linf_error = 0.0;

    double delta = 0.0;
    double gradient_floor = 0.0;
};

/// Interior |lap_inf| over checkable interior nodes, one-sided normal
/// difference |u(x*) - u(x* - 2h n)| / 2h over neumann nodes, and the exact
/// dirichlet mismatch max |u - F|.
ResidualReport residual_report(const ValueField& u, const expr::Expr& F, double delta,
                               double gradient_floor);

enum class Side : std::uint8_t { Above, Below };

struct ComparisonResult {
    bool passes = false;
    int witness = -1;  // first violating node, -1 when passing
    double margin = 0.0; // min over V of phi-u (above) or u-phi (below)
};

/// Nodes of V whose eps-ball (non-exterior members) contains a node outside
/// V. This is the game-resolution inner boundary: interior nodes keep their
/// whole ball inside V, so the fixed-point equation confines them. Balls
/// clipped at the neumann boundary need no domination there, matching the
/// reflecting role of that part of the boundary.
std::vector<int> relative_boundary(const GridDomain& g, std::span<const int> V, double eps);

/// Comparison with a quadratic distance function on the node set V.
/// Preconditions (throw PreconditionViolated): V avoids dirichlet and
/// exterior nodes; phi is *-increasing on V with a <= 0 for side above
/// (mirrored below); phi dominates u (resp. is dominated) on the relative
/// boundary of V within 1e-9.
ComparisonResult check_comparison(const ValueField& u, Side side, std::span<const int> V,
                                  const QuadraticDistanceFn& phi);

struct SweepFailure {
    long trial = 0;
    int node = -1;
    double margin = 0.0;
};

struct SweepResult {
    Side side = Side::Above;
    long trials = 0;
    long passes = 0;
    long precondition_rejects = 0;
    std::vector<SweepFailure> failures;
};

/// Randomized comparison trials: V is a grid ball (random center off the
/// dirichlet set, radius in [2h, diam/3]), z a random node projected onto
/// the closed domain, coefficients drawn with the side's signs, and c set
/// for exact boundary domination (margin 0). Draws that violate
/// *-monotonicity count as precondition_rejects.
SweepResult comparison_sweep(const ValueField& u, Side side, long n_trials,
                             std::uint64_t seed);

} // namespace tow
