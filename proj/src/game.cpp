#include "tow/game.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace tow {

GameEngine::GameEngine(const GridDomain& g, const expr::Expr& F, double eps)
    : g_(&g), F_(&F), eps_(eps), table_(g, eps) {
    dist_to_dirichlet_.assign(static_cast<std::size_t>(g.size()),
                              std::numeric_limits<double>::infinity());
    for (int node = 0; node < g.size(); ++node) {
        if (!g.non_exterior(node)) continue;
        Vec p = g.pos(node);
        double best = std::numeric_limits<double>::infinity();
        for (int d : g.dirichlet) best = std::min(best, dist(p, g.pos(d)));
        dist_to_dirichlet_[static_cast<std::size_t>(node)] = best;
    }
}

int GameEngine::choose(int x, const Strategy& s, std::uint64_t draw) const {
    auto members = table_.members(x);
    if (members.empty()) throw IllegalState("no legal moves from node");

    switch (s.kind) {
    case StrategyKind::UniformRandom:
        return members[draw % members.size()];
    case StrategyKind::FixedDirection: {
        Vec p = g_->pos(x);
        int best = members[0];
        double bv = dot(g_->pos(best) - p, s.direction);
        for (int m : members) {
            double v = dot(g_->pos(m) - p, s.direction);
            if (v > bv) {
                bv = v;
                best = m;
            }
        }
        return best;
    }
    case StrategyKind::GreedyMax:
    case StrategyKind::GreedyMin: {
        bool want_max = s.kind == StrategyKind::GreedyMax;
        const std::vector<double>& u = s.field->values;
        int best = members[0];
        double bv = u[static_cast<std::size_t>(best)];
        for (int m : members) {
            double v = u[static_cast<std::size_t>(m)];
            bool better = want_max ? v > bv : v < bv;
            // value ties: head toward the dirichlet set, then lowest id
            if (!better && v == bv)
                better = dist_to_dirichlet_[static_cast<std::size_t>(m)] <
                         dist_to_dirichlet_[static_cast<std::size_t>(best)];
            if (better) {
                bv = v;
                best = m;
            }
        }
        return best;
    }
    }
    throw IllegalState("unknown strategy kind");
}

int GameEngine::step(int x, Player mover, const Strategy& s_I, const Strategy& s_II,
                     std::uint64_t move_draw) const {
    if (x < 0 || x >= g_->size() || !g_->non_exterior(x) ||
        g_->cls[static_cast<std::size_t>(x)] == NodeClass::Dirichlet)
        throw IllegalState("step requires a non-exterior, non-dirichlet state");
    return choose(x, mover == Player::I ? s_I : s_II, move_draw);
}

std::pair<bool, double> GameEngine::run(int x0, const Strategy& s_I, const Strategy& s_II,
                                        long step_cap, std::uint64_t seed, Episode* rec) const {
    if (x0 < 0 || x0 >= g_->size() || !g_->non_exterior(x0))
        throw IllegalState("episode start must be a non-exterior node");

    if (rec) {
        rec->start = x0;
        rec->states = {x0};
        rec->tosses.clear();
        rec->steps = 0;
    }
    if (g_->cls[static_cast<std::size_t>(x0)] == NodeClass::Dirichlet) {
        double payoff = F_->eval(g_->pos(x0));
        if (rec) {
            rec->absorbed = true;
            rec->payoff = payoff;
        }
        return {true, payoff};
    }

    CounterRng rng(seed, static_cast<std::uint64_t>(x0));
    int x = x0;
    double legal = eps_ * (1 + 1e-12) + 1e-12;
    for (long k = 0; k < step_cap; ++k) {
        auto ctr = static_cast<std::uint64_t>(2 * k);
        bool toss = rng.coin(ctr); // 1: Player I moves
        const Strategy& s = toss ? s_I : s_II;
        int y = choose(x, s, rng.draw(ctr + 1));
        if (dist(g_->pos(x), g_->pos(y)) > legal)
            throw IllegalState("strategy produced an illegal move");
        if (rec) {
            rec->states.push_back(y);
            rec->tosses.push_back(toss ? 1 : 0);
            rec->steps = k + 1;
        }
        x = y;
        if (g_->cls[static_cast<std::size_t>(x)] == NodeClass::Dirichlet) {
            double payoff = F_->eval(g_->pos(x));
            if (rec) {
                rec->absorbed = true;
                rec->payoff = payoff;
            }
            return {true, payoff};
        }
    }
    if (rec) {
        rec->absorbed = false;
        rec->payoff = 0.0;
    }
    return {false, 0.0};
}

Episode GameEngine::simulate(int x0, const Strategy& s_I, const Strategy& s_II, long step_cap,
                             std::uint64_t seed) const {
    Episode ep;
    run(x0, s_I, s_II, step_cap, seed, &ep);
    return ep;
}

ValueEstimate GameEngine::estimate_value(int x0, const Strategy& s_I, const Strategy& s_II,
                                         long step_cap, long n_episodes,
                                         std::uint64_t seed) const {
    if (n_episodes < 1) throw PreconditionViolated("estimate_value requires n_episodes >= 1");

    long absorbed = 0, truncated = 0;
    double mean = 0.0, m2 = 0.0; // Welford over absorbed payoffs, episode order
    for (long e = 0; e < n_episodes; ++e) {
        auto [ok, payoff] = run(x0, s_I, s_II, step_cap, seed + static_cast<std::uint64_t>(e),
                                nullptr);
        if (!ok) {
            ++truncated;
            continue;
        }
        ++absorbed;
        double d = payoff - mean;
        mean += d / static_cast<double>(absorbed);
        m2 += d * (payoff - mean);
    }
    if (absorbed == 0) throw AllTruncated("every episode hit the step cap");

    ValueEstimate est;
    est.mean = mean;
    est.std_error = absorbed > 1
                        ? std::sqrt(m2 / static_cast<double>(absorbed - 1)) /
                              std::sqrt(static_cast<double>(absorbed))
                        : 0.0;
    est.n_episodes = n_episodes;
    est.truncated_fraction = static_cast<double>(truncated) / static_cast<double>(n_episodes);
    est.step_cap = step_cap;
    est.seed = seed;
    return est;
}

void write_episode_csv(const Episode& ep, const GridDomain& g, const ValueField* ref,
                       std::ostream& os) {
    os << "step,toss,x,y,value\n";
    char buf[128];
    for (std::size_t k = 0; k < ep.states.size(); ++k) {
        Vec p = g.pos(ep.states[k]);
        double v = ref ? ref->values[static_cast<std::size_t>(ep.states[k])]
                       : std::numeric_limits<double>::quiet_NaN();
        int toss = k < ep.tosses.size() ? ep.tosses[k] : -1;
        std::snprintf(buf, sizeof buf, "%zu,%d,%.17g,%.17g,%.17g\n", k, toss, p[0], p[1], v);
        os << buf;
    }
}

} // namespace tow
