#include "tow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace tow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_unknown(const GridDomain& g, int node) {
    NodeClass c = g.cls[static_cast<std::size_t>(node)];
    return c == NodeClass::Interior || c == NodeClass::Neumann;
}

double dpp_value(const NeighborTable& nt, const std::vector<double>& u, int node) {
    double mx = -std::numeric_limits<double>::infinity();
    double mn = std::numeric_limits<double>::infinity();
    for (int m : nt.members(node)) {
        double v = u[static_cast<std::size_t>(m)];
        mx = std::max(mx, v);
        mn = std::min(mn, v);
    }
    return 0.5 * (mx + mn);
}

} // namespace

NeighborTable::NeighborTable(const GridDomain& g, double eps) : grid_(&g), eps_(eps) {
    range_.assign(static_cast<std::size_t>(g.size()), {0, 0});
    std::vector<int> buf;
    for (int node = 0; node < g.size(); ++node) {
        if (!is_unknown(g, node)) continue;
        neighborhood_into(g, node, eps, buf);
        range_[static_cast<std::size_t>(node)] = {flat_.size(), static_cast<int>(buf.size())};
        flat_.insert(flat_.end(), buf.begin(), buf.end());
    }
}

std::vector<double> dpp_apply(const NeighborTable& nt, const std::vector<double>& u) {
    const GridDomain& g = nt.grid();
    std::vector<double> out = u;
    for (int node = 0; node < g.size(); ++node)
        if (is_unknown(g, node)) out[static_cast<std::size_t>(node)] = dpp_value(nt, u, node);
    return out;
}

namespace {

double jacobi_residual(const NeighborTable& nt, const std::vector<double>& u) {
    const GridDomain& g = nt.grid();
    double sup = 0.0;
    for (int node = 0; node < g.size(); ++node) {
        if (!is_unknown(g, node)) continue;
        double r = 2 * u[static_cast<std::size_t>(node)] - 2 * dpp_value(nt, u, node);
        sup = std::max(sup, std::fabs(r));
    }
    return sup;
}

} // namespace

ValueField solve_dpp(const GridDomain& g, const expr::Expr& F, const SolverConfig& cfg) {
    if (g.dirichlet.empty()) throw EmptyDirichlet("solve_dpp requires dirichlet nodes");
    if (!(cfg.tol > 0) || cfg.max_iters < 1)
        throw PreconditionViolated("solver config requires tol > 0 and max_iters >= 1");

    NeighborTable nt(g, cfg.epsilon);

    ValueField u;
    u.grid = &g;
    u.epsilon = cfg.epsilon;
    u.values.assign(static_cast<std::size_t>(g.size()), kNaN);

    std::vector<double> fdir(g.dirichlet.size());
    for (std::size_t k = 0; k < g.dirichlet.size(); ++k)
        fdir[k] = F.eval(g.pos(g.dirichlet[k]));

    // Dirichlet data is written once and never touched again.
    for (std::size_t k = 0; k < g.dirichlet.size(); ++k)
        u.values[static_cast<std::size_t>(g.dirichlet[k])] = fdir[k];

    if (cfg.init == Init::Zero) {
        for (int node = 0; node < g.size(); ++node)
            if (is_unknown(g, node)) u.values[static_cast<std::size_t>(node)] = 0.0;
    } else {
        // McShane extension of the dirichlet data: min_q F(q) + L|x - q|
        std::vector<Vec> qs(g.dirichlet.size());
        for (std::size_t k = 0; k < g.dirichlet.size(); ++k) qs[k] = g.pos(g.dirichlet[k]);
        double L = qs.size() >= 2 ? expr::lipschitz_on(F, qs) : 0.0;
        for (int node = 0; node < g.size(); ++node) {
            if (!is_unknown(g, node)) continue;
            Vec p = g.pos(node);
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < qs.size(); ++k)
                best = std::min(best, fdir[k] + L * dist(p, qs[k]));
            u.values[static_cast<std::size_t>(node)] = best;
        }
    }

    long sweeps = 0;
    for (;;) {
        double res = jacobi_residual(nt, u.values);
        if (res <= 2 * cfg.tol) {
            u.iterations = sweeps;
            u.final_residual = res;
            return u;
        }
        if (sweeps >= cfg.max_iters) throw NoConvergence(res, sweeps);
        if (cfg.sweep == Sweep::Jacobi) {
            u.values = dpp_apply(nt, u.values);
        } else {
            for (int node = 0; node < g.size(); ++node)
                if (is_unknown(g, node))
                    u.values[static_cast<std::size_t>(node)] = dpp_value(nt, u.values, node);
        }
        ++sweeps;
    }
}

std::vector<double> dpp_residual_field(const ValueField& u) {
    const GridDomain& g = *u.grid;
    NeighborTable nt(g, u.epsilon);
    std::vector<double> r(static_cast<std::size_t>(g.size()), 0.0);
    for (int node = 0; node < g.size(); ++node)
        if (is_unknown(g, node))
            r[static_cast<std::size_t>(node)] =
                2 * u.values[static_cast<std::size_t>(node)] - 2 * dpp_value(nt, u.values, node);
    return r;
}

double dpp_residual_sup(const ValueField& u) {
    double sup = 0.0;
    for (double r : dpp_residual_field(u)) sup = std::max(sup, std::fabs(r));
    return sup;
}

double interpolate(const ValueField& u, Vec p) {
    const GridDomain& g = *u.grid;

    int idx[2][2];   // per axis: the one or two lattice indices involved
    double w[2][2];  // matching weights
    int counts[2];
    int axes = g.dim;
    for (int a = 0; a < axes; ++a) {
        auto ax = static_cast<std::size_t>(a);
        double t = (p[ax] - g.origin[ax]) / g.h;
        double fl = std::floor(t);
        double f = t - fl;
        int i0 = static_cast<int>(fl);
        int lim = a == 0 ? g.nx : g.ny;
        if (f < 1e-9) {
            idx[a][0] = i0;
            w[a][0] = 1.0;
            counts[a] = 1;
        } else if (f > 1 - 1e-9) {
            idx[a][0] = i0 + 1;
            w[a][0] = 1.0;
            counts[a] = 1;
        } else {
            idx[a][0] = i0;
            idx[a][1] = i0 + 1;
            w[a][0] = 1 - f;
            w[a][1] = f;
            counts[a] = 2;
        }
        for (int k = 0; k < counts[a]; ++k)
            if (idx[a][k] < 0 || idx[a][k] >= lim)
                throw TooCloseToBoundary("interpolation point outside the lattice");
    }
    if (axes == 1) {
        counts[1] = 1;
        idx[1][0] = 0;
        w[1][0] = 1.0;
    }

    double acc = 0.0;
    for (int kj = 0; kj < counts[1]; ++kj) {
        for (int ki = 0; ki < counts[0]; ++ki) {
            int node = g.id(idx[0][ki], idx[1][kj]);
            if (!g.non_exterior(node))
                throw TooCloseToBoundary("interpolation cell touches an exterior node");
            acc += w[0][ki] * w[1][kj] * u.values[static_cast<std::size_t>(node)];
        }
    }
    return acc;
}

void write_field_csv(const ValueField& u, std::ostream& os) {
    const GridDomain& g = *u.grid;
    os << "x,y,class,value\n";
    char buf[128];
    for (int node = 0; node < g.size(); ++node) {
        if (!g.non_exterior(node)) continue;
        Vec p = g.pos(node);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s,%.17g\n", p[0], p[1],
                      to_string(g.cls[static_cast<std::size_t>(node)]),
                      u.values[static_cast<std::size_t>(node)]);
        os << buf;
    }
}

ValueField read_field_csv(const GridDomain& g, std::istream& is, double epsilon) {
    ValueField u;
    u.grid = &g;
    u.epsilon = epsilon;
    u.values.assign(static_cast<std::size_t>(g.size()), kNaN);

    std::string line;
    if (!std::getline(is, line) || line.rfind("x,y,class,value", 0) != 0)
        throw Error("field CSV: missing header");
    for (int node = 0; node < g.size(); ++node) {
        if (!g.non_exterior(node)) continue;
        if (!std::getline(is, line)) throw Error("field CSV: too few rows");
        std::size_t last = line.rfind(',');
        if (last == std::string::npos) throw Error("field CSV: malformed row");
        u.values[static_cast<std::size_t>(node)] = std::stod(line.substr(last + 1));
    }
    u.final_residual = dpp_residual_sup(u);
    return u;
}

} // namespace tow
