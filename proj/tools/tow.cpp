// Command-line surface: solve, simulate, verify, converge, hypothesis.
// Exit codes: 0 ok, 1 usage, 2 validation/schema, 3 no convergence,
// 4 verification threshold exceeded. Codes depend on report contents only.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tow/convergence.hpp"
#include "tow/game.hpp"
#include "tow/problem.hpp"
#include "tow/verify.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json vec_json(tow::Vec v, int dim) {
    json a = json::array();
    a.push_back(v[0]);
    if (dim == 2) a.push_back(v[1]);
    return a;
}

json hypothesis_json(const tow::HypothesisReport& r, const tow::GridDomain& g) {
    json j;
    j["mode"] = r.mode == tow::HypothesisMode::Strict ? "strict" : "flat-ok";
    j["holds"] = r.holds;
    j["worst_inner_product"] = r.worst_inner_product;
    j["worst_z"] = r.worst_z >= 0 ? vec_json(g.pos(r.worst_z), g.dim) : json(nullptr);
    j["worst_xstar"] = r.worst_xstar >= 0 ? vec_json(g.pos(r.worst_xstar), g.dim) : json(nullptr);
    j["flat_pairs"] = r.flat_pairs;
    j["direction_found"] = r.direction_found;
    j["direction"] = r.direction_found ? vec_json(r.direction, g.dim) : json(nullptr);
    return j;
}

json residuals_json(const tow::ResidualReport& r) {
    json j;
    j["interior_linf_residual"] = r.interior_linf_residual;
    j["interior_worst_node"] = r.interior_worst_node;
    j["interior_nodes_checked"] = r.interior_nodes_checked;
    j["skipped_small_gradient"] = r.skipped_small_gradient;
    j["skipped_near_boundary"] = r.skipped_near_boundary;
    j["max_axis_spread"] = r.max_axis_spread;
    j["neumann_linf_residual"] = r.neumann_linf_residual;
    j["neumann_worst_node"] = r.neumann_worst_node;
    j["neumann_checked"] = r.neumann_checked;
    j["neumann_skipped"] = r.neumann_skipped;
    j["dirichlet_linf_error"] = r.dirichlet_linf_error;
    j["delta"] = r.delta;
    j["gradient_floor"] = r.gradient_floor;
    return j;
}

json sweep_json(const tow::SweepResult& s) {
    json j;
    j["side"] = s.side == tow::Side::Above ? "above" : "below";
    j["trials"] = s.trials;
    j["passes"] = s.passes;
    j["precondition_rejects"] = s.precondition_rejects;
    json fails = json::array();
    for (const auto& f : s.failures)
        fails.push_back({{"trial", f.trial}, {"node", f.node}, {"margin", f.margin}});
    j["failures"] = fails;
    return j;
}

void emit(const json& j, const std::string& out_path) {
    std::string text = j.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream os(out_path, std::ios::binary);
        if (!os) throw tow::Error("cannot write " + out_path);
        os << text;
    }
}

double default_gradient_floor(const tow::ProblemFile& p, const tow::GridDomain& g) {
    std::vector<tow::Vec> qs;
    for (int d : g.dirichlet) qs.push_back(g.pos(d));
    double L = qs.size() >= 2 ? tow::expr::lipschitz_on(p.payoff, qs) : 0.0;
    return L > 0 ? 1e-6 * L : 1e-6;
}

struct SolveOutput {
    tow::GridDomain grid;
    tow::ValueField field;
};

SolveOutput solve_problem(const tow::ProblemFile& p) {
    SolveOutput out{tow::discretize(p.domain, p.h, p.epsilon), {}};
    out.field = tow::solve_dpp(out.grid, p.payoff, p.solver);
    return out;
}

int cmd_solve(const std::string& path, const std::string& out_dir) {
    tow::ProblemFile p = tow::load_problem(path);
    SolveOutput s = solve_problem(p);

    fs::create_directories(out_dir);
    {
        std::ofstream csv(fs::path(out_dir) / "field.csv", std::ios::binary);
        if (!csv) throw tow::Error("cannot write field.csv in " + out_dir);
        tow::write_field_csv(s.field, csv);
    }
    json j;
    j["epsilon"] = p.epsilon;
    j["h"] = p.h;
    j["iterations"] = s.field.iterations;
    j["final_residual"] = s.field.final_residual;
    j["nodes"] = s.grid.non_exterior_count();
    j["dirichlet_nodes"] = static_cast<long>(s.grid.dirichlet.size());
    j["tol"] = p.solver.tol;
    j["sweep"] = p.solver.sweep == tow::Sweep::Jacobi ? "jacobi" : "gauss-seidel";
    j["init"] = p.solver.init == tow::Init::Zero ? "zero" : "mcshane";
    emit(j, (fs::path(out_dir) / "solve.json").string());
    return 0;
}

tow::Strategy make_strategy(const std::string& name, bool player_one,
                            const tow::ValueField& u) {
    if (name == "greedy")
        return player_one ? tow::Strategy::greedy_max(u) : tow::Strategy::greedy_min(u);
    if (name == "uniform") return tow::Strategy::uniform_random();
    throw CLI::ValidationError("strategy must be greedy or uniform");
}

int cmd_simulate(const std::string& path, std::vector<double> at, long episodes, long cap,
                 const std::string& strat_i, const std::string& strat_ii,
                 const std::string& out_path, const std::string& episode_csv) {
    tow::ProblemFile p = tow::load_problem(path);
    SolveOutput s = solve_problem(p);

    tow::Vec q{at[0], s.grid.dim == 2 ? at.at(1) : 0.0};
    int x0 = s.grid.nearest_node(q);

    tow::GameEngine eng(s.grid, p.payoff, p.epsilon);
    tow::Strategy si = make_strategy(strat_i, true, s.field);
    tow::Strategy sii = make_strategy(strat_ii, false, s.field);

    tow::ValueEstimate est = eng.estimate_value(x0, si, sii, cap, episodes, p.seed);

    if (!episode_csv.empty()) {
        tow::Episode ep = eng.simulate(x0, si, sii, cap, p.seed);
        std::ofstream os(episode_csv, std::ios::binary);
        if (!os) throw tow::Error("cannot write " + episode_csv);
        tow::write_episode_csv(ep, s.grid, &s.field, os);
    }

    json j;
    j["at"] = vec_json(s.grid.pos(x0), s.grid.dim);
    j["node"] = x0;
    j["mean"] = est.mean;
    j["std_error"] = est.std_error;
    j["n_episodes"] = est.n_episodes;
    j["truncated_fraction"] = est.truncated_fraction;
    j["step_cap"] = est.step_cap;
    j["seed"] = est.seed;
    j["dpp_value"] = s.field.values[static_cast<std::size_t>(x0)];
    j["strategy_i"] = strat_i;
    j["strategy_ii"] = strat_ii;
    emit(j, out_path);
    return 0;
}

int cmd_verify(const std::string& path, double delta_opt, double floor_opt, long trials,
               const std::vector<std::string>& fail_on, const std::string& out_path) {
    tow::ProblemFile p = tow::load_problem(path);
    SolveOutput s = solve_problem(p);

    double delta = delta_opt > 0 ? delta_opt : 2 * p.h;
    double floor = floor_opt > 0 ? floor_opt : default_gradient_floor(p, s.grid);

    tow::ResidualReport rr = tow::residual_report(s.field, p.payoff, delta, floor);
    tow::SweepResult above = tow::comparison_sweep(s.field, tow::Side::Above, trials, p.seed);
    tow::SweepResult below = tow::comparison_sweep(s.field, tow::Side::Below, trials, p.seed);

    json j;
    j["residuals"] = residuals_json(rr);
    j["comparison"] = {{"above", sweep_json(above)}, {"below", sweep_json(below)}};
    j["solver"] = {{"iterations", s.field.iterations},
                   {"final_residual", s.field.final_residual}};
    emit(j, out_path);

    long comparison_failures =
        static_cast<long>(above.failures.size() + below.failures.size());
    std::map<std::string, double> actual{
        {"interior", rr.interior_linf_residual},
        {"neumann", rr.neumann_linf_residual},
        {"dirichlet", rr.dirichlet_linf_error},
        {"comparison_failures", static_cast<double>(comparison_failures)},
    };
    for (const std::string& spec : fail_on) {
        auto eq = spec.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--fail-on expects key=threshold");
        std::string key = spec.substr(0, eq);
        auto it = actual.find(key);
        if (it == actual.end()) throw CLI::ValidationError("unknown --fail-on key: " + key);
        double threshold = std::stod(spec.substr(eq + 1));
        if (it->second > threshold) {
            std::cerr << "fail-on: " << key << " = " << it->second << " exceeds " << threshold
                      << "\n";
            return 4;
        }
    }
    return 0;
}

int cmd_converge(const std::string& path, int levels, const std::string& exact_text,
                 const std::string& out_path) {
    tow::ProblemFile p = tow::load_problem(path);
    std::optional<tow::expr::Expr> exact;
    if (!exact_text.empty()) exact = tow::expr::Expr::parse(exact_text);

    tow::ConvergenceReport rep =
        tow::run_convergence(p, levels, exact ? &*exact : nullptr);

    json lv = json::array();
    for (const auto& l : rep.levels) {
        json e;
        e["epsilon"] = l.epsilon;
        e["h"] = l.h;
        e["sup_diff_to_previous"] = std::isnan(l.sup_diff_to_previous)
                                        ? json(nullptr)
                                        : json(l.sup_diff_to_previous);
        e["exact_error"] = std::isnan(l.exact_error) ? json(nullptr) : json(l.exact_error);
        e["iterations"] = l.iterations;
        e["eps_lipschitz"] = l.eps_lipschitz;
        e["failed"] = l.failed;
        if (l.failed) e["failure"] = l.failure;
        lv.push_back(e);
        std::cerr << "level eps=" << l.epsilon << " wall_time=" << l.wall_time << "s\n";
    }
    tow::GridDomain g0 = tow::discretize(p.domain, p.epsilon / 4);
    json j;
    j["levels"] = lv;
    j["hypothesis"] = hypothesis_json(rep.hypothesis, g0);
    emit(j, out_path);
    for (const auto& l : rep.levels)
        if (l.failed) return 3;
    return 0;
}

int cmd_hypothesis(const std::string& path, const std::string& mode_name,
                   const std::string& out_path) {
    tow::ProblemFile p = tow::load_problem(path);
    tow::GridDomain g = tow::discretize(p.domain, p.h);
    tow::HypothesisMode mode =
        mode_name == "strict" ? tow::HypothesisMode::Strict : tow::HypothesisMode::FlatOk;
    tow::HypothesisReport r = tow::check_domain_hypothesis(g, mode);
    emit(hypothesis_json(r, g), out_path);
    if (!r.holds) return 4;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mixed dirichlet/neumann infinity-laplacian solver and verifier"};
    app.require_subcommand(1);

    std::string problem_path, out_path, out_dir = "out";
    std::vector<double> at;
    long episodes = 100000, cap = 100000, trials = 500;
    std::string strat_i = "greedy", strat_ii = "greedy", episode_csv;
    double delta = 0, gradient_floor = 0;
    std::vector<std::string> fail_on;
    int levels = 3;
    std::string exact_text, mode_name = "strict";

    auto* solve = app.add_subcommand("solve", "solve the DPP fixed point, write field + report");
    solve->add_option("problem", problem_path)->required();
    solve->add_option("-o,--out", out_dir, "output directory");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo game value at a point");
    simulate->add_option("problem", problem_path)->required();
    simulate->add_option("--at", at, "start coordinates")->required()->expected(1, 2);
    simulate->add_option("--episodes", episodes);
    simulate->add_option("--cap", cap, "step cap per episode");
    simulate->add_option("--strategy-i", strat_i, "greedy|uniform");
    simulate->add_option("--strategy-ii", strat_ii, "greedy|uniform");
    simulate->add_option("--dump-episode", episode_csv, "write one trajectory CSV");
    simulate->add_option("-o,--out", out_path, "report path (stdout when omitted)");

    auto* verify = app.add_subcommand("verify", "residual report + comparison sweep");
    verify->add_option("problem", problem_path)->required();
    verify->add_option("--delta", delta, "FD spacing, multiple of h (default 2h)");
    verify->add_option("--gradient-floor", gradient_floor);
    verify->add_option("--trials", trials, "comparison trials per side");
    verify->add_option("--fail-on", fail_on,
                       "key=threshold, keys: interior neumann dirichlet comparison_failures");
    verify->add_option("-o,--out", out_path, "report path (stdout when omitted)");

    auto* converge = app.add_subcommand("converge", "epsilon-refinement study");
    converge->add_option("problem", problem_path)->required();
    converge->add_option("--levels", levels)->check(CLI::Range(2, 16));
    converge->add_option("--exact", exact_text, "exact solution expression");
    converge->add_option("-o,--out", out_path, "report path (stdout when omitted)");

    auto* hypothesis = app.add_subcommand("hypothesis", "boundary geometry check");
    hypothesis->add_option("problem", problem_path)->required();
    hypothesis->add_option("--mode", mode_name)->check(CLI::IsMember({"strict", "flat-ok"}));
    hypothesis->add_option("-o,--out", out_path, "report path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (solve->parsed()) return cmd_solve(problem_path, out_dir);
        if (simulate->parsed())
            return cmd_simulate(problem_path, at, episodes, cap, strat_i, strat_ii, out_path,
                                episode_csv);
        if (verify->parsed())
            return cmd_verify(problem_path, delta, gradient_floor, trials, fail_on, out_path);
        if (converge->parsed()) return cmd_converge(problem_path, levels, exact_text, out_path);
        if (hypothesis->parsed()) return cmd_hypothesis(problem_path, mode_name, out_path);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const tow::NoConvergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const tow::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
