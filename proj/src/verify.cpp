#include "tow/verify.hpp"

#include <algorithm>
#include <cmath>

#include "tow/rng.hpp"
#include <limits>
#include <unordered_set>

namespace tow {

namespace {

double val(const ValueField& u, int node) {
    return u.values[static_cast<std::size_t>(node)];
}

// Lattice id of (i+di, j+dj), requiring an interior node.
int interior_offset(const GridDomain& g, int node, int di, int dj) {
    int i = node % g.nx + di;
    int j = node / g.nx + dj;
    if (!g.in_lattice(i, j)) throw TooCloseToBoundary("stencil leaves the lattice");
    int m = g.id(i, j);
    if (g.cls[static_cast<std::size_t>(m)] != NodeClass::Interior)
        throw TooCloseToBoundary("stencil touches a boundary node");
    return m;
}

} // namespace

FdProbe grad_and_infinity_laplacian_fd(const ValueField& u, int node, double delta,
                                       double gradient_floor) {
    const GridDomain& g = *u.grid;
    if (g.cls[static_cast<std::size_t>(node)] != NodeClass::Interior)
        throw PreconditionViolated("finite-difference probe requires an interior node");
    int k = static_cast<int>(std::llround(delta / g.h));
    if (k < 1 || std::fabs(k * g.h - delta) > 1e-9 * g.h)
        throw PreconditionViolated("delta must be a positive multiple of h");
    if (!(gradient_floor > 0)) throw PreconditionViolated("gradient_floor must be positive");

    double u0 = val(u, node);
    double uxp = val(u, interior_offset(g, node, k, 0));
    double uxm = val(u, interior_offset(g, node, -k, 0));

    FdProbe p;
    double d2 = delta * delta;
    double dxx = (uxp - 2 * u0 + uxm) / d2;
    p.gradient[0] = (uxp - uxm) / (2 * delta);

    if (g.dim == 1) {
        p.axis_mean = dxx;
        p.axis_spread = 0.0;
        if (std::fabs(p.gradient[0]) < gradient_floor) {
            p.degenerate = true;
            p.lap_inf = dxx;
        } else {
            p.lap_inf = dxx;
        }
        return p;
    }

    double uyp = val(u, interior_offset(g, node, 0, k));
    double uym = val(u, interior_offset(g, node, 0, -k));
    double upp = val(u, interior_offset(g, node, k, k));
    double upm = val(u, interior_offset(g, node, k, -k));
    double ump = val(u, interior_offset(g, node, -k, k));
    double umm = val(u, interior_offset(g, node, -k, -k));

    double dyy = (uyp - 2 * u0 + uym) / d2;
    double dxy = (upp - upm - ump + umm) / (4 * d2);
    p.gradient[1] = (uyp - uym) / (2 * delta);
    p.axis_mean = 0.5 * (dxx + dyy);
    p.axis_spread = std::fabs(dxx - dyy);

    double g2 = dot(p.gradient, p.gradient);
    if (std::sqrt(g2) < gradient_floor) {
        p.degenerate = true;
        p.lap_inf = p.axis_mean;
    } else {
        double gx = p.gradient[0], gy = p.gradient[1];
        p.lap_inf = (gx * gx * dxx + 2 * gx * gy * dxy + gy * gy * dyy) / g2;
    }
    return p;
}

ResidualReport residual_report(const ValueField& u, const expr::Expr& F, double delta,
                               double gradient_floor) {
    const GridDomain& g = *u.grid;
    ResidualReport r;
    r.delta = delta;
    r.gradient_floor = gradient_floor;

    for (int node = 0; node < g.size(); ++node) {
        switch (g.cls[static_cast<std::size_t>(node)]) {
        case NodeClass::Interior: {
            FdProbe p;
            try {
                p = grad_and_infinity_laplacian_fd(u, node, delta, gradient_floor);
            } catch (const TooCloseToBoundary&) {
                ++r.skipped_near_boundary;
                break;
            }
            if (p.degenerate) {
                ++r.skipped_small_gradient;
                r.max_axis_spread = std::max(r.max_axis_spread, p.axis_spread);
                break;
            }
            ++r.interior_nodes_checked;
            if (std::fabs(p.lap_inf) > r.interior_linf_residual) {
                r.interior_linf_residual = std::fabs(p.lap_inf);
                r.interior_worst_node = node;
            }
            break;
        }
        case NodeClass::Neumann: {
            double s = 2 * g.h;
            Vec n = g.normals[static_cast<std::size_t>(node)];
            Vec q = g.pos(node) - s * n;
            double inward;
            try {
                inward = interpolate(u, q);
            } catch (const TooCloseToBoundary&) {
                ++r.neumann_skipped;
                break;
            }
            ++r.neumann_checked;
            double res = std::fabs(val(u, node) - inward) / s;
            if (res > r.neumann_linf_residual) {
                r.neumann_linf_residual = res;
                r.neumann_worst_node = node;
            }
            break;
        }
        case NodeClass::Dirichlet:
            r.dirichlet_linf_error = std::max(
                r.dirichlet_linf_error, std::fabs(val(u, node) - F.eval(g.pos(node))));
            break;
        case NodeClass::Exterior:
            break;
        }
    }
    return r;
}

std::vector<int> relative_boundary(const GridDomain& g, std::span<const int> V, double eps) {
    std::unordered_set<int> in_v(V.begin(), V.end());
    std::vector<int> out;
    std::vector<int> ball;
    for (int node : V) {
        neighborhood_into(g, node, eps, ball);
        for (int m : ball) {
            if (!in_v.contains(m)) {
                out.push_back(node);
                break;
            }
        }
    }
    return out;
}

namespace {

// Throws PreconditionViolated unless phi is *-increasing on V for side above
// (a <= 0, Q' > 0 over the radii of V) or the mirror image for side below.
// The vertex z counts as inside V when its nearest non-exterior node is a
// member of V; near the vertex Q' says nothing, so such trials need the
// paraboloid form (b = 0 with the opposite sign of a) and are rejected here.
void require_star_monotone(const GridDomain& g, Side side, std::span<const int> V,
                           const QuadraticDistanceFn& phi) {
    int nearest = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int n = 0; n < g.size(); ++n) {
        if (!g.non_exterior(n)) continue;
        double d = dist(g.pos(n), phi.z);
        if (d < best) {
            best = d;
            nearest = n;
        }
    }
    bool z_in_v = std::find(V.begin(), V.end(), nearest) != V.end();

    if (side == Side::Above) {
        if (phi.a > 0) throw PreconditionViolated("side above requires a <= 0");
        if (z_in_v)
            throw PreconditionViolated("z in V needs b = 0 and a > 0, impossible with a <= 0");
        for (int v : V)
            if (phi.q_prime(phi.radius(g.pos(v))) <= 0)
                throw PreconditionViolated("Q' must be positive on V");
    } else {
        if (phi.a < 0) throw PreconditionViolated("side below requires a >= 0");
        if (z_in_v)
            throw PreconditionViolated("z in V needs b = 0 and a < 0, impossible with a >= 0");
        for (int v : V)
            if (phi.q_prime(phi.radius(g.pos(v))) >= 0)
                throw PreconditionViolated("Q' must be negative on V");
    }
}

} // namespace

ComparisonResult check_comparison(const ValueField& u, Side side, std::span<const int> V,
                                  const QuadraticDistanceFn& phi) {
    const GridDomain& g = *u.grid;
    if (V.empty()) throw PreconditionViolated("comparison set V is empty");
    for (int v : V) {
        if (v < 0 || v >= g.size() || !g.non_exterior(v) ||
            g.cls[static_cast<std::size_t>(v)] == NodeClass::Dirichlet)
            throw PreconditionViolated("V must avoid exterior and dirichlet nodes");
    }
    require_star_monotone(g, side, V, phi);

    std::vector<int> layer = relative_boundary(g, V, u.epsilon);
    if (layer.empty()) throw PreconditionViolated("relative boundary of V is empty");
    for (int v : layer) {
        double gap = phi.eval(g.pos(v)) - val(u, v);
        if (side == Side::Below) gap = -gap;
        if (gap < -1e-9)
            throw PreconditionViolated("phi does not dominate u on the relative boundary");
    }

    ComparisonResult res;
    res.passes = true;
    res.margin = std::numeric_limits<double>::infinity();
    for (int v : V) {
        double gap = phi.eval(g.pos(v)) - val(u, v);
        if (side == Side::Below) gap = -gap;
        res.margin = std::min(res.margin, gap);
        if (gap < -1e-9 && res.passes) {
            res.passes = false;
            res.witness = v;
        }
    }
    return res;
}

SweepResult comparison_sweep(const ValueField& u, Side side, long n_trials,
                             std::uint64_t seed) {
    const GridDomain& g = *u.grid;
    if (n_trials < 1) throw PreconditionViolated("comparison_sweep requires n_trials >= 1");

    std::vector<int> centers, zs;
    for (int node = 0; node < g.size(); ++node) {
        if (!g.non_exterior(node)) continue;
        zs.push_back(node);
        if (g.cls[static_cast<std::size_t>(node)] != NodeClass::Dirichlet)
            centers.push_back(node);
    }
    if (centers.empty()) throw PreconditionViolated("no admissible trial centers");

    auto [lo, hi] = g.spec.shape.bounding_box();
    double diam = norm(hi - lo);
    double r_lo = 2 * g.h;
    double r_hi = std::max(r_lo, diam / 3);

    // slope scale of the field at ball resolution, for tight-cone draws
    double slope = 0.0;
    {
        std::vector<int> ball;
        for (int node : centers) {
            neighborhood_into(g, node, u.epsilon, ball);
            for (int m : ball)
                slope = std::max(slope, std::fabs(val(u, node) - val(u, m)) / u.epsilon);
        }
    }

    SweepResult out;
    out.side = side;
    out.trials = n_trials;
    std::vector<int> ball;
    for (long t = 0; t < n_trials; ++t) {
        CounterRng rng(seed, static_cast<std::uint64_t>(t));
        int center = centers[rng.draw(0) % centers.size()];

        // half the draws sit just above the ball radius, where V keeps a
        // thin interior and margin-0 domination leaves the least slack
        double radius;
        if (rng.draw(6) % 2 == 0 && u.epsilon + g.h <= r_hi)
            radius = u.epsilon + g.h +
                     rng.uniform01(1) * std::min(2 * g.h, r_hi - u.epsilon - g.h);
        else
            radius = r_lo + rng.uniform01(1) * (r_hi - r_lo);

        std::vector<int> V;
        Vec cp = g.pos(center);
        for (int node : centers)
            if (dist(g.pos(node), cp) <= radius) V.push_back(node);

        QuadraticDistanceFn phi;
        // z: random domain node, or a point along the field's local
        // ascent/descent line so the cone slope nearly cancels the field's
        bool aligned_z = rng.draw(8) % 2 == 0;
        if (aligned_z) {
            neighborhood_into(g, center, u.epsilon, ball);
            int extreme = center;
            for (int m : ball)
                if (val(u, m) > val(u, extreme)) extreme = m;
            Vec dir = g.pos(extreme) - cp;
            if (norm(dir) > 1e-12) {
                double s = 0.5 + rng.uniform01(9) * diam;
                Vec step = (s / norm(dir)) * dir;
                phi.z = g.spec.shape.project(side == Side::Above ? cp - step : cp + step);
            } else {
                aligned_z = false;
            }
        }
        if (!aligned_z) phi.z = g.spec.shape.project(g.pos(zs[rng.draw(2) % zs.size()]));

        double amag = rng.uniform01(3);
        if (rng.draw(4) % 4 == 0) amag = 0.0;
        double bmag;
        if (rng.draw(7) % 2 == 0 && slope > 0)
            bmag = std::min(2.0, slope * (0.6 + 0.8 * rng.uniform01(5)));
        else
            bmag = 2 * rng.uniform01(5);
        phi.a = side == Side::Above ? -amag : amag;
        phi.b = side == Side::Above ? bmag : -bmag;

        std::vector<int> layer = relative_boundary(g, V, u.epsilon);
        if (V.empty() || layer.empty()) {
            ++out.precondition_rejects;
            continue;
        }
        try {
            require_star_monotone(g, side, V, phi);
        } catch (const PreconditionViolated&) {
            ++out.precondition_rejects;
            continue;
        }

        // Tightest c that still dominates on the relative boundary.
        double c = side == Side::Above ? -std::numeric_limits<double>::infinity()
                                       : std::numeric_limits<double>::infinity();
        for (int v : layer) {
            double need = val(u, v) - (phi.eval(g.pos(v)) - phi.c);
            c = side == Side::Above ? std::max(c, need) : std::min(c, need);
        }
        phi.c = c;

        ComparisonResult r;
        try {
            r = check_comparison(u, side, V, phi);
        } catch (const PreconditionViolated&) {
            ++out.precondition_rejects;
            continue;
        }
        if (r.passes) {
            ++out.passes;
        } else {
            out.failures.push_back({t, r.witness, r.margin});
        }
    }
    return out;
}

} // namespace tow
