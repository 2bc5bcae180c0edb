#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "tow/expr.hpp"
#include "tow/geometry.hpp"
#include "tow/rng.hpp"
#include "tow/solver.hpp"

namespace tow {

enum class Player : std::uint8_t { I, II };

enum class StrategyKind : std::uint8_t { GreedyMax, GreedyMin, FixedDirection, UniformRandom };

struct Strategy {
    StrategyKind kind = StrategyKind::UniformRandom;
    const ValueField* field = nullptr; // greedy kinds
    Vec direction{0, 0};               // fixed-direction, unit

    static Strategy greedy_max(const ValueField& f) { return {StrategyKind::GreedyMax, &f, {0, 0}}; }
    static Strategy greedy_min(const ValueField& f) { return {StrategyKind::GreedyMin, &f, {0, 0}}; }
    static Strategy fixed_direction(Vec v) { return {StrategyKind::FixedDirection, nullptr, v}; }
    static Strategy uniform_random() { return {StrategyKind::UniformRandom, nullptr, {0, 0}}; }
};

struct Episode {
    int start = -1;
    std::vector<int> states;          // x_0 ... x_tau (or truncated)
    std::vector<std::uint8_t> tosses; // 1 = Player I moved
    bool absorbed = false;
    double payoff = 0.0; // F at the absorbing node
    long steps = 0;
};

struct ValueEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long n_episodes = 0;
    double truncated_fraction = 0.0;
    long step_cap = 0;
    std::uint64_t seed = 0;
};

/// Simulates the epsilon-Tug-of-War game on a grid: fair coin per turn, the
/// winner moves the token within the eps-ball, absorption on dirichlet nodes
/// with payoff F. All randomness comes from a counter-based generator keyed
/// by (seed, start node), two draws per step.
class GameEngine {
public:
    GameEngine(const GridDomain& g, const expr::Expr& F, double eps);

    /// The mover's choice from the eps-ball around x. Greedy tie-breaking:
    /// smallest distance to the dirichlet set, then lowest node id.
    int step(int x, Player mover, const Strategy& s_I, const Strategy& s_II,
             std::uint64_t move_draw) const;

    Episode simulate(int x0, const Strategy& s_I, const Strategy& s_II, long step_cap,
                     std::uint64_t seed) const;

    ValueEstimate estimate_value(int x0, const Strategy& s_I, const Strategy& s_II,
                                 long step_cap, long n_episodes, std::uint64_t seed) const;

    const GridDomain& grid() const { return *g_; }
    double epsilon() const { return eps_; }

private:
    int choose(int x, const Strategy& s, std::uint64_t draw) const;
    // absorbed flag + payoff; optionally records the trajectory
    std::pair<bool, double> run(int x0, const Strategy& s_I, const Strategy& s_II,
                                long step_cap, std::uint64_t seed, Episode* rec) const;

    const GridDomain* g_;
    const expr::Expr* F_;
    double eps_;
    NeighborTable table_;
    std::vector<double> dist_to_dirichlet_;
};

/// CSV: step,toss,x,y,value. `ref` supplies the value column (NaN if null);
/// the toss column is -1 on the final row.
void write_episode_csv(const Episode& ep, const GridDomain& g, const ValueField* ref,
                       std::ostream& os);

} // namespace tow
