// Acceptance gate: one line per criterion, nonzero exit when any fails.
// Usage: acceptance <tow-cli> <problems-dir> <scratch-dir>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "tow/convergence.hpp"
#include "tow/game.hpp"
#include "tow/problem.hpp"
#include "tow/rng.hpp"
#include "tow/verify.hpp"

namespace fs = std::filesystem;
using namespace tow;

namespace {

std::string g_cli, g_problems, g_scratch;

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point t0 = clock::now();
    return std::chrono::duration<double>(clock::now() - t0).count();
}

ProblemFile problem(const std::string& name) {
    return load_problem(g_problems + "/" + name);
}

struct Solved {
    GridDomain grid;
    ValueField field;
};

Solved solve(const ProblemFile& p) {
    Solved s{discretize(p.domain, p.h, p.epsilon), {}};
    s.field = solve_dpp(s.grid, p.payoff, p.solver);
    return s;
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

// --- criterion 1: exact fixed point on the square -------------------------

Check criterion1() {
    Check c;
    double t0 = now_seconds();
    ProblemFile p = problem("square.json");
    Solved s = solve(p);
    c.require(s.field.final_residual <= 2e-10,
              "residual " + fmt(s.field.final_residual) + " > 2e-10");
    double sup = 0;
    for (int n = 0; n < s.grid.size(); ++n)
        if (s.grid.non_exterior(n))
            sup = std::max(sup, std::fabs(s.field.values[static_cast<std::size_t>(n)] -
                                          s.grid.pos(n)[0]));
    c.require(sup <= 1e-9, "sup |u - x| = " + fmt(sup) + " > 1e-9");
    double elapsed = now_seconds() - t0;
    c.require(elapsed < 5.0, "took " + fmt(elapsed) + "s >= 5s");
    if (c.ok) c.detail = "sup_err " + fmt(sup) + ", " + fmt(elapsed) + "s";
    return c;
}

// --- criterion 2: brute-force oracle on tiny instances --------------------

// plain Jacobi value iteration with its own ball scan, no shared solver code
std::vector<double> oracle_solve(const GridDomain& g, const expr::Expr& F, double eps,
                                 long* iters_out) {
    std::vector<double> u(static_cast<std::size_t>(g.size()), 0.0);
    std::vector<int> unknown;
    for (int n = 0; n < g.size(); ++n) {
        NodeClass cl = g.cls[static_cast<std::size_t>(n)];
        if (cl == NodeClass::Dirichlet) u[static_cast<std::size_t>(n)] = F.eval(g.pos(n));
        if (cl == NodeClass::Interior || cl == NodeClass::Neumann) unknown.push_back(n);
    }
    std::vector<std::vector<int>> balls;
    for (int n : unknown) {
        std::vector<int> b;
        for (int m = 0; m < g.size(); ++m)
            if (g.non_exterior(m) && norm2(g.pos(m) - g.pos(n)) <= eps * eps * (1 + 1e-12))
                b.push_back(m);
        balls.push_back(std::move(b));
    }
    long it = 0;
    for (; it < 2000000; ++it) {
        std::vector<double> next = u;
        double change = 0;
        for (std::size_t k = 0; k < unknown.size(); ++k) {
            double mx = -std::numeric_limits<double>::infinity(), mn = -mx;
            for (int m : balls[k]) {
                mx = std::max(mx, u[static_cast<std::size_t>(m)]);
                mn = std::min(mn, u[static_cast<std::size_t>(m)]);
            }
            double v = 0.5 * (mx + mn);
            change = std::max(change,
                              std::fabs(v - u[static_cast<std::size_t>(unknown[k])]));
            next[static_cast<std::size_t>(unknown[k])] = v;
        }
        u.swap(next);
        if (change <= 1e-14) break;
    }
    if (iters_out) *iters_out = it;
    return u;
}

Check criterion2() {
    Check c;
    const char* payoffs[] = {"x", "x*y + 1", "abs(x - 0.3)", "y + 0.5",
                             "max(x, 2*y)", "1 - x*x"};
    double worst = 0;
    for (int inst = 0; inst < 20; ++inst) {
        CounterRng rng(static_cast<std::uint64_t>(inst), 99);
        DomainSpec spec;
        if (rng.draw(0) % 2 == 0) {
            spec.shape = Shape::interval(0, 1);
            if (rng.draw(1) % 2 == 0) {
                spec.rules.push_back({expr::Expr::parse("1"), BoundaryKind::Dirichlet});
            } else {
                spec.rules.push_back(
                    {expr::Expr::parse("x*1000 - 999"), BoundaryKind::Dirichlet});
                spec.rules.push_back({expr::Expr::parse("1"), BoundaryKind::Neumann});
            }
        } else {
            spec.shape = Shape::rectangle({0, 0}, {0.75, 0.5});
            spec.rules.push_back({expr::Expr::parse("1 - x*1000"), BoundaryKind::Dirichlet});
            spec.rules.push_back({expr::Expr::parse("1"), BoundaryKind::Neumann});
        }
        double h = 0.25;
        double eps = (rng.draw(2) % 2 == 0 ? 2 : 3) * h;
        expr::Expr F = expr::Expr::parse(payoffs[rng.draw(3) % 6]);

        GridDomain g = discretize(spec, h, eps);
        long non_dirichlet = 0;
        for (int n = 0; n < g.size(); ++n) {
            NodeClass cl = g.cls[static_cast<std::size_t>(n)];
            non_dirichlet += cl == NodeClass::Interior || cl == NodeClass::Neumann;
        }
        c.require(non_dirichlet <= 12,
                  "instance " + std::to_string(inst) + " too large");

        SolverConfig cfg;
        cfg.epsilon = eps;
        cfg.tol = 1e-13;
        ValueField u = solve_dpp(g, F, cfg);
        std::vector<double> ref = oracle_solve(g, F, eps, nullptr);
        for (int n = 0; n < g.size(); ++n)
            if (g.non_exterior(n))
                worst = std::max(worst, std::fabs(u.values[static_cast<std::size_t>(n)] -
                                                  ref[static_cast<std::size_t>(n)]));
    }
    c.require(worst <= 1e-9, "sup |solver - oracle| = " + fmt(worst) + " > 1e-9");
    if (c.ok) c.detail = "20 instances, worst diff " + fmt(worst);
    return c;
}

// --- criterion 3: Monte Carlo value matches the fixed point ---------------

Check criterion3() {
    Check c;
    double t0 = now_seconds();

    ProblemFile sq = problem("square.json");
    Solved s = solve(sq);
    GameEngine eng(s.grid, sq.payoff, sq.epsilon);
    int x0 = s.grid.nearest_node({0.5, 0.5});
    ValueEstimate est =
        eng.estimate_value(x0, Strategy::greedy_max(s.field), Strategy::greedy_min(s.field),
                           100000, 100000, sq.seed);
    c.require(est.truncated_fraction == 0.0, "square: truncated episodes");
    double dpp = s.field.values[static_cast<std::size_t>(x0)];
    c.require(std::fabs(est.mean - dpp) <= 4 * est.std_error,
              "square: |mean - dpp| = " + fmt(std::fabs(est.mean - dpp)) + " > 4se = " +
                  fmt(4 * est.std_error));

    ProblemFile line = problem("neumann_1d.json");
    Solved l = solve(line);
    GameEngine leng(l.grid, line.payoff, line.epsilon);
    for (int n = 0; n < l.grid.size(); ++n) {
        if (!l.grid.non_exterior(n)) continue;
        ValueEstimate e =
            leng.estimate_value(n, Strategy::greedy_max(l.field),
                                Strategy::greedy_min(l.field), 100000, 100000, line.seed);
        c.require(e.truncated_fraction == 0.0, "line: truncated episodes");
        double v = l.field.values[static_cast<std::size_t>(n)];
        c.require(std::fabs(e.mean - v) <= 4 * e.std_error,
                  "line node " + std::to_string(n) + ": off by " +
                      fmt(std::fabs(e.mean - v)));
    }
    double elapsed = now_seconds() - t0;
    c.require(elapsed < 60.0, "took " + fmt(elapsed) + "s >= 60s");
    if (c.ok)
        c.detail = "square mean " + fmt(est.mean) + " vs " + fmt(dpp) + ", " +
                   fmt(elapsed) + "s";
    return c;
}

// --- criterion 4: uniform play is strictly worse --------------------------

Check criterion4() {
    Check c;
    ProblemFile sq = problem("square.json");
    Solved s = solve(sq);
    GameEngine eng(s.grid, sq.payoff, sq.epsilon);
    int x0 = s.grid.nearest_node({0.5, 0.5});
    Strategy gmax = Strategy::greedy_max(s.field);
    Strategy gmin = Strategy::greedy_min(s.field);
    Strategy uni = Strategy::uniform_random();

    ValueEstimate gg = eng.estimate_value(x0, gmax, gmin, 100000, 100000, sq.seed);
    ValueEstimate ug = eng.estimate_value(x0, uni, gmin, 100000, 100000, sq.seed);
    ValueEstimate gu = eng.estimate_value(x0, gmax, uni, 100000, 100000, sq.seed);

    double se_i = std::sqrt(gg.std_error * gg.std_error + ug.std_error * ug.std_error);
    c.require(gg.mean - ug.mean > 4 * se_i,
              "uniform Player I did not lower the mean: " + fmt(ug.mean) + " vs " +
                  fmt(gg.mean));
    double se_ii = std::sqrt(gg.std_error * gg.std_error + gu.std_error * gu.std_error);
    c.require(gu.mean - gg.mean > 4 * se_ii,
              "uniform Player II did not raise the mean: " + fmt(gu.mean) + " vs " +
                  fmt(gg.mean));
    if (c.ok)
        c.detail = "means " + fmt(ug.mean) + " < " + fmt(gg.mean) + " < " + fmt(gu.mean);
    return c;
}

// --- criterion 5: residual reports across scales --------------------------

Check criterion5() {
    Check c;
    ProblemFile sq = problem("square.json");
    for (double eps : {0.25, 0.125, 0.0625}) {
        double h = eps / 4;
        GridDomain g = discretize(sq.domain, h, eps);
        SolverConfig cfg = sq.solver;
        cfg.epsilon = eps;
        ValueField u = solve_dpp(g, sq.payoff, cfg);
        ResidualReport r = residual_report(u, sq.payoff, 2 * h, 1e-6);
        c.require(r.interior_linf_residual <= 1e-6,
                  "eps " + fmt(eps) + ": interior " + fmt(r.interior_linf_residual));
        c.require(r.neumann_linf_residual <= 1e-6,
                  "eps " + fmt(eps) + ": neumann " + fmt(r.neumann_linf_residual));
        c.require(r.dirichlet_linf_error == 0.0,
                  "eps " + fmt(eps) + ": dirichlet " + fmt(r.dirichlet_linf_error));
    }

    // sampled separable solution, probed at shrinking FD spacing
    DomainSpec patch;
    patch.shape = Shape::rectangle({1, 1}, {2, 2});
    patch.rules.push_back({expr::Expr::parse("1"), BoundaryKind::Dirichlet});
    double h = 1.0 / 256.0;
    GridDomain g = discretize(patch, h);
    expr::Expr aron = expr::Expr::parse("x^(4/3) - y^(4/3)");
    ValueField u;
    u.grid = &g;
    u.epsilon = 0.25;
    u.values.assign(static_cast<std::size_t>(g.size()),
                    std::numeric_limits<double>::quiet_NaN());
    for (int n = 0; n < g.size(); ++n)
        if (g.non_exterior(n)) u.values[static_cast<std::size_t>(n)] = aron.eval(g.pos(n));

    double res[3];
    double deltas[3] = {1.0 / 16, 1.0 / 32, 1.0 / 64};
    for (int k = 0; k < 3; ++k)
        res[k] = residual_report(u, aron, deltas[k], 1e-6).interior_linf_residual;
    for (int k = 0; k + 1 < 3; ++k)
        c.require(res[k] >= 1.8 * res[k + 1],
                  "decay " + fmt(res[k]) + " -> " + fmt(res[k + 1]) + " below 1.8x");
    if (c.ok)
        c.detail = "patch residuals " + fmt(res[0]) + " / " + fmt(res[1]) + " / " +
                   fmt(res[2]);
    return c;
}

// --- criterion 6: comparison sweeps -------------------------------------

Check criterion6() {
    Check c;
    for (const char* name : {"square.json", "neumann_1d.json"}) {
        ProblemFile p = problem(name);
        Solved s = solve(p);
        for (Side side : {Side::Above, Side::Below}) {
            SweepResult r = comparison_sweep(s.field, side, 500, p.seed);
            c.require(r.failures.empty(), std::string(name) + ": " +
                                              std::to_string(r.failures.size()) +
                                              " sweep failures");
        }
    }

    ProblemFile sq = problem("square.json");
    Solved s = solve(sq);
    int m = s.grid.nearest_node({0.5, 0.5});
    s.field.values[static_cast<std::size_t>(m)] += 0.1;
    SweepResult bad = comparison_sweep(s.field, Side::Above, 500, sq.seed);
    c.require(!bad.failures.empty(), "corrupted field produced no sweep failure");
    for (const SweepFailure& f : bad.failures)
        c.require(dist(s.grid.pos(f.node), s.grid.pos(m)) <= 1.5 * s.grid.h,
                  "witness not within one cell of the corruption");
    if (c.ok)
        c.detail = "clean sweeps pass, " + std::to_string(bad.failures.size()) +
                   " witnesses at the corrupted node";
    return c;
}

// --- criterion 7: epsilon refinement ------------------------------------

Check criterion7() {
    Check c;
    ProblemFile sq = problem("square.json");
    expr::Expr exact = expr::Expr::parse("x");
    ConvergenceReport rep = run_convergence(sq, 3, &exact);
    c.require(rep.levels.size() == 3, "expected 3 levels");
    for (const ConvergenceLevel& lvl : rep.levels) {
        c.require(!lvl.failed, "level failed: " + lvl.failure);
        c.require(lvl.exact_error <= lvl.epsilon,
                  "exact_error " + fmt(lvl.exact_error) + " > eps " + fmt(lvl.epsilon));
    }
    for (std::size_t k = 2; k < rep.levels.size(); ++k)
        c.require(rep.levels[k].sup_diff_to_previous <=
                      rep.levels[k - 1].sup_diff_to_previous + 1e-15,
                  "sup_diff increased across levels");
    if (c.ok && rep.levels.size() == 3)
        c.detail = "exact errors " + fmt(rep.levels[0].exact_error) + " / " +
                   fmt(rep.levels[1].exact_error) + " / " + fmt(rep.levels[2].exact_error);
    return c;
}

// --- criterion 8: boundary geometry check --------------------------------

Check criterion8() {
    Check c;
    {
        ProblemFile p = problem("disk.json");
        GridDomain g = discretize(p.domain, p.h);
        HypothesisReport r = check_domain_hypothesis(g, HypothesisMode::Strict);
        c.require(r.holds, "strict mode failed on the disk");
    }
    {
        ProblemFile p = problem("lshape.json");
        GridDomain g = discretize(p.domain, p.h);
        HypothesisReport r = check_domain_hypothesis(g, HypothesisMode::Strict);
        c.require(!r.holds && r.worst_inner_product < 0,
                  "strict mode did not fail on the L-shape, worst " +
                      fmt(r.worst_inner_product));
    }
    {
        ProblemFile p = problem("flat_square.json");
        GridDomain g = discretize(p.domain, p.h);
        HypothesisReport r = check_domain_hypothesis(g, HypothesisMode::FlatOk);
        c.require(r.holds && r.direction_found, "flat-ok mode failed on the square");
        if (c.ok)
            c.detail = "direction (" + fmt(r.direction[0]) + ", " + fmt(r.direction[1]) + ")";
    }
    return c;
}

// --- criterion 9: byte-identical reruns ----------------------------------

int run_cli(const std::string& args) {
    std::string cmd = g_cli + " " + args + " 2>/dev/null";
    int rc = std::system(cmd.c_str());
    return rc;
}

bool same_bytes(const fs::path& a, const fs::path& b, std::string* why) {
    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    if (!fa || !fb) {
        *why = "missing output " + a.string() + " or " + b.string();
        return false;
    }
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    if (sa.str() != sb.str()) {
        *why = "outputs differ: " + a.filename().string();
        return false;
    }
    if (sa.str().empty()) {
        *why = "empty output: " + a.filename().string();
        return false;
    }
    return true;
}

Check criterion9() {
    Check c;
    fs::path scratch(g_scratch);
    fs::remove_all(scratch);
    for (const char* rep : {"rep1", "rep2"}) {
        fs::path d = scratch / rep;
        fs::create_directories(d);
        std::string dir = d.string();
        std::string sq = g_problems + "/square.json";
        int rc = 0;
        rc |= run_cli("solve " + sq + " -o " + dir + "/solve_out");
        rc |= run_cli("simulate " + sq + " --at 0.5 0.5 --episodes 2000 --strategy-i uniform"
                      " -o " + dir + "/simulate.json --dump-episode " + dir + "/episode.csv");
        rc |= run_cli("verify " + g_problems + "/neumann_1d.json --trials 200 -o " + dir +
                      "/verify.json");
        rc |= run_cli("converge " + sq + " --levels 3 --exact x -o " + dir +
                      "/converge.json");
        rc |= run_cli("hypothesis " + g_problems + "/disk.json -o " + dir +
                      "/hypothesis.json");
        c.require(rc == 0, "a CLI invocation exited nonzero");
    }
    for (const char* f : {"solve_out/field.csv", "solve_out/solve.json", "simulate.json",
                          "episode.csv", "verify.json", "converge.json",
                          "hypothesis.json"}) {
        std::string why;
        if (!same_bytes(scratch / "rep1" / f, scratch / "rep2" / f, &why))
            c.require(false, why);
    }
    if (c.ok) c.detail = "7 artifacts byte-identical across reruns";
    return c;
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 4) {
        std::cerr << "usage: acceptance <tow-cli> <problems-dir> <scratch-dir>\n";
        return 2;
    }
    g_cli = argv[1];
    g_problems = argv[2];
    g_scratch = argv[3];

    struct Criterion {
        const char* name;
        std::function<Check()> fn;
    };
    const Criterion criteria[] = {
        {"1 exact square fixed point", criterion1},
        {"2 brute-force oracle equivalence", criterion2},
        {"3 game value cross-validation", criterion3},
        {"4 sub-optimality ordering", criterion4},
        {"5 residual reports and decay", criterion5},
        {"6 comparison sweeps", criterion6},
        {"7 refinement study", criterion7},
        {"8 boundary geometry modes", criterion8},
        {"9 reproducible outputs", criterion9},
    };

    int failures = 0;
    for (const Criterion& cr : criteria) {
        Check c;
        try {
            c = cr.fn();
        } catch (const std::exception& e) {
            c.ok = false;
            c.detail = std::string("exception: ") + e.what();
        }
        std::cout << (c.ok ? "[PASS] " : "[FAIL] ") << cr.name;
        if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
        std::cout << "\n";
        failures += !c.ok;
    }
    return failures == 0 ? 0 : 1;
}
