#include "tow/convergence.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <memory>

namespace tow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double one_ball_lipschitz(const ValueField& u) {
    const GridDomain& g = *u.grid;
    NeighborTable nt(g, u.epsilon);
    double sup = 0.0;
    for (int node = 0; node < g.size(); ++node) {
        NodeClass c = g.cls[static_cast<std::size_t>(node)];
        if (c != NodeClass::Interior && c != NodeClass::Neumann) continue;
        double uc = u.values[static_cast<std::size_t>(node)];
        for (int m : nt.members(node))
            sup = std::max(sup, std::fabs(uc - u.values[static_cast<std::size_t>(m)]));
    }
    return sup;
}

// Sup over fine non-exterior nodes outside the coarse boundary band of
// |fine - interp(coarse)|; nodes where coarse interpolation is impossible
// are skipped.
double cross_grid_sup_diff(const ValueField& coarse, const ValueField& fine) {
    const GridDomain& gf = *fine.grid;
    double band = coarse.grid->h / 2;
    double sup = 0.0;
    for (int node = 0; node < gf.size(); ++node) {
        if (!gf.non_exterior(node)) continue;
        Vec p = gf.pos(node);
        if (gf.spec.shape.signed_distance(p) > -band) continue;
        double v;
        try {
            v = interpolate(coarse, p);
        } catch (const TooCloseToBoundary&) {
            continue;
        }
        sup = std::max(sup, std::fabs(fine.values[static_cast<std::size_t>(node)] - v));
    }
    return sup;
}

} // namespace

ConvergenceReport run_convergence(const ProblemFile& p, int n_levels,
                                  const expr::Expr* exact) {
    if (n_levels < 2) throw PreconditionViolated("run_convergence requires n_levels >= 2");

    ConvergenceReport rep;
    std::unique_ptr<GridDomain> prev_grid;
    ValueField prev;

    for (int k = 0; k < n_levels; ++k) {
        ConvergenceLevel lvl;
        lvl.epsilon = p.epsilon * std::pow(2.0, -k);
        lvl.h = lvl.epsilon / 4;
        lvl.sup_diff_to_previous = kNaN;
        lvl.exact_error = kNaN;

        auto t0 = std::chrono::steady_clock::now();
        auto grid = std::make_unique<GridDomain>(discretize(p.domain, lvl.h, lvl.epsilon));
        if (k == 0) {
            GridDomain plain = discretize(p.domain, lvl.h);
            rep.hypothesis = check_domain_hypothesis(plain, HypothesisMode::Strict);
            if (!rep.hypothesis.holds)
                rep.hypothesis = check_domain_hypothesis(plain, HypothesisMode::FlatOk);
        }

        SolverConfig cfg = p.solver;
        cfg.epsilon = lvl.epsilon;
        ValueField u;
        try {
            u = solve_dpp(*grid, p.payoff, cfg);
        } catch (const Error& e) {
            lvl.failed = true;
            lvl.failure = e.what();
            rep.levels.push_back(std::move(lvl));
            return rep;
        }
        lvl.wall_time =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        lvl.iterations = u.iterations;
        lvl.eps_lipschitz = one_ball_lipschitz(u);

        if (exact) {
            // collar nodes lie outside the closed domain; exclude them
            double band = lvl.h / 2 + 1e-12;
            double sup = 0.0;
            for (int node = 0; node < grid->size(); ++node) {
                if (!grid->non_exterior(node)) continue;
                Vec q = grid->pos(node);
                if (grid->spec.shape.signed_distance(q) > band) continue;
                sup = std::max(sup,
                               std::fabs(u.values[static_cast<std::size_t>(node)] - exact->eval(q)));
            }
            lvl.exact_error = sup;
        }
        if (k > 0) lvl.sup_diff_to_previous = cross_grid_sup_diff(prev, u);

        rep.levels.push_back(lvl);
        prev_grid = std::move(grid);
        prev = std::move(u);
        prev.grid = prev_grid.get();
    }
    return rep;
}

} // namespace tow
