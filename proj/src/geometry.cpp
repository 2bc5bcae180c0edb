#include "tow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tow {

namespace {

constexpr double kOnBoundary = 1e-9;

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

Vec closest_on_segment(Vec p, Vec a, Vec b) {
    Vec d = b - a;
    double len2 = norm2(d);
    double t = len2 > 0 ? clamp(dot(p - a, d) / len2, 0.0, 1.0) : 0.0;
    return a + t * d;
}

// Even-odd crossing test; only consulted away from the boundary band.
bool point_in_polygon(Vec p, const std::vector<Vec>& v) {
    bool inside = false;
    std::size_t n = v.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        bool crosses = (v[i][1] > p[1]) != (v[j][1] > p[1]);
        if (crosses) {
            double xint = v[j][0] + (v[i][0] - v[j][0]) * (p[1] - v[j][1]) / (v[i][1] - v[j][1]);
            if (p[0] < xint) inside = !inside;
        }
    }
    return inside;
}

double polygon_signed_area(const std::vector<Vec>& v) {
    double a = 0.0;
    for (std::size_t i = 0, n = v.size(); i < n; ++i) {
        const Vec& p = v[i];
        const Vec& q = v[(i + 1) % n];
        a += p[0] * q[1] - q[0] * p[1];
    }
    return 0.5 * a;
}

Vec edge_outward_normal(Vec a, Vec b) {
    // counterclockwise polygon: outward is the right-hand side of a->b
    Vec d = b - a;
    return normalized(Vec{d[1], -d[0]});
}

} // namespace

const char* to_string(NodeClass c) {
    switch (c) {
    case NodeClass::Interior: return "interior";
    case NodeClass::Dirichlet: return "dirichlet";
    case NodeClass::Neumann: return "neumann";
    case NodeClass::Exterior: return "exterior";
    }
    return "?";
}

Shape Shape::rectangle(Vec lo, Vec hi) {
    Shape s;
    s.kind = Kind::Rectangle;
    s.dim = 2;
    s.lo = lo;
    s.hi = hi;
    return s;
}

Shape Shape::interval(double lo, double hi) {
    Shape s;
    s.kind = Kind::Rectangle;
    s.dim = 1;
    s.lo = {lo, 0};
    s.hi = {hi, 0};
    return s;
}

Shape Shape::disk(Vec center, double radius) {
    Shape s;
    s.kind = Kind::Disk;
    s.dim = 2;
    s.center = center;
    s.radius = radius;
    return s;
}

Shape Shape::polygon(std::vector<Vec> vertices) {
    Shape s;
    s.kind = Kind::Polygon;
    s.dim = 2;
    s.vertices = std::move(vertices);
    return s;
}

void Shape::validate() const {
    switch (kind) {
    case Kind::Rectangle:
        for (int a = 0; a < dim; ++a)
            if (!(lo[static_cast<std::size_t>(a)] < hi[static_cast<std::size_t>(a)]))
                throw DegenerateShape("rectangle requires lo < hi componentwise");
        break;
    case Kind::Disk:
        if (!(radius > 0)) throw DegenerateShape("disk requires radius > 0");
        break;
    case Kind::Polygon: {
        if (vertices.size() < 3) throw DegenerateShape("polygon requires >= 3 vertices");
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            const Vec& p = vertices[i];
            const Vec& q = vertices[(i + 1) % vertices.size()];
            if (dist(p, q) < 1e-12) throw DegenerateShape("polygon has repeated vertices");
        }
        if (!(polygon_signed_area(vertices) > 0))
            throw DegenerateShape("polygon vertices must be counterclockwise with positive area");
        break;
    }
    }
}

double Shape::signed_distance(Vec p) const {
    switch (kind) {
    case Kind::Rectangle: {
        if (dim == 1) return std::max(lo[0] - p[0], p[0] - hi[0]);
        double qx = std::max(lo[0] - p[0], p[0] - hi[0]);
        double qy = std::max(lo[1] - p[1], p[1] - hi[1]);
        double ox = std::max(qx, 0.0), oy = std::max(qy, 0.0);
        return std::hypot(ox, oy) + std::min(std::max(qx, qy), 0.0);
    }
    case Kind::Disk:
        return dist(p, center) - radius;
    case Kind::Polygon: {
        double d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0, n = vertices.size(); i < n; ++i)
            d = std::min(d, dist(p, closest_on_segment(p, vertices[i], vertices[(i + 1) % n])));
        return point_in_polygon(p, vertices) ? -d : d;
    }
    }
    return 0.0;
}

Vec Shape::closest_boundary_point(Vec p) const {
    switch (kind) {
    case Kind::Rectangle: {
        if (dim == 1)
            return (p[0] - lo[0] <= hi[0] - p[0]) ? Vec{lo[0], 0} : Vec{hi[0], 0};
        Vec c{clamp(p[0], lo[0], hi[0]), clamp(p[1], lo[1], hi[1])};
        if (c != p) return c; // outside: clamping lands on the boundary
        // inside: project to the nearest face, x faces first on ties
        double m[4] = {p[0] - lo[0], hi[0] - p[0], p[1] - lo[1], hi[1] - p[1]};
        int best = 0;
        for (int k = 1; k < 4; ++k)
            if (m[k] < m[best]) best = k;
        switch (best) {
        case 0: return {lo[0], p[1]};
        case 1: return {hi[0], p[1]};
        case 2: return {p[0], lo[1]};
        default: return {p[0], hi[1]};
        }
    }
    case Kind::Disk: {
        Vec r = p - center;
        double n = norm(r);
        if (n < 1e-15) return center + Vec{radius, 0};
        return center + (radius / n) * r;
    }
    case Kind::Polygon: {
        double best = std::numeric_limits<double>::infinity();
        Vec bp = vertices[0];
        for (std::size_t i = 0, n = vertices.size(); i < n; ++i) {
            Vec c = closest_on_segment(p, vertices[i], vertices[(i + 1) % n]);
            double d = dist(p, c);
            if (d < best) {
                best = d;
                bp = c;
            }
        }
        return bp;
    }
    }
    return p;
}

Vec Shape::outward_normal(Vec p) const {
    if (kind == Kind::Disk) {
        Vec r = p - center;
        double n = norm(r);
        return n < 1e-15 ? Vec{1, 0} : (1.0 / n) * r;
    }
    if (kind == Kind::Rectangle && dim == 1)
        return (p[0] - lo[0] <= hi[0] - p[0]) ? Vec{-1, 0} : Vec{1, 0};

    double sd = signed_distance(p);
    Vec bp = closest_boundary_point(p);
    double d = dist(p, bp);
    if (d > kOnBoundary)
        return sd > 0 ? (1.0 / d) * (p - bp) : (1.0 / d) * (bp - p);

    // p lies on the boundary: use the normal of its face or edge
    if (kind == Kind::Rectangle) {
        double m[4] = {p[0] - lo[0], hi[0] - p[0], p[1] - lo[1], hi[1] - p[1]};
        static const Vec normals[4] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
        // corners lie on two faces: average their normals
        Vec acc{0, 0};
        int on = 0;
        for (int k = 0; k < 4; ++k)
            if (std::fabs(m[k]) <= kOnBoundary) {
                acc = acc + normals[k];
                ++on;
            }
        if (on >= 2) return normalized(acc);
        int best = 0;
        for (int k = 1; k < 4; ++k)
            if (std::fabs(m[k]) < std::fabs(m[best])) best = k;
        return normals[best];
    }
    // polygon: nearest edge, or adjacent-normal average at a vertex
    std::size_t n = vertices.size();
    double best = std::numeric_limits<double>::infinity();
    std::size_t be = 0;
    Vec bc = vertices[0];
    for (std::size_t i = 0; i < n; ++i) {
        Vec c = closest_on_segment(p, vertices[i], vertices[(i + 1) % n]);
        double dd = dist(p, c);
        if (dd < best) {
            best = dd;
            be = i;
            bc = c;
        }
    }
    Vec a = vertices[be], b = vertices[(be + 1) % n];
    if (dist(bc, a) > kOnBoundary && dist(bc, b) > kOnBoundary)
        return edge_outward_normal(a, b);
    // at a vertex
    std::size_t v = dist(bc, a) <= kOnBoundary ? be : (be + 1) % n;
    Vec n1 = edge_outward_normal(vertices[(v + n - 1) % n], vertices[v]);
    Vec n2 = edge_outward_normal(vertices[v], vertices[(v + 1) % n]);
    Vec s = n1 + n2;
    return norm(s) > 1e-12 ? normalized(s) : n1;
}

Vec Shape::project(Vec p) const {
    return signed_distance(p) > 0 ? closest_boundary_point(p) : p;
}

std::pair<Vec, Vec> Shape::bounding_box() const {
    switch (kind) {
    case Kind::Rectangle:
        return {lo, hi};
    case Kind::Disk:
        return {center - Vec{radius, radius}, center + Vec{radius, radius}};
    case Kind::Polygon: {
        Vec mn = vertices[0], mx = vertices[0];
        for (const Vec& v : vertices) {
            mn[0] = std::min(mn[0], v[0]);
            mn[1] = std::min(mn[1], v[1]);
            mx[0] = std::max(mx[0], v[0]);
            mx[1] = std::max(mx[1], v[1]);
        }
        return {mn, mx};
    }
    }
    return {lo, hi};
}

BoundaryKind DomainSpec::classify_boundary_point(Vec p) const {
    double y = shape.dim == 2 ? p[1] : 0.0;
    for (const BoundaryRule& r : rules)
        if (r.where.eval(p[0], y) > 0.5) return r.kind;
    throw Error("no boundary rule matched; a catch-all rule is required");
}

GridDomain discretize(const DomainSpec& spec, double h, double dirichlet_collar) {
    if (!(h > 0)) throw DegenerateShape("grid spacing h must be positive");
    if (dirichlet_collar < 0) throw DegenerateShape("dirichlet collar must be nonnegative");
    spec.shape.validate();

    auto [blo, bhi] = spec.shape.bounding_box();
    GridDomain g;
    g.spec = spec;
    g.h = h;
    g.dirichlet_collar = dirichlet_collar;
    g.dim = spec.shape.dim;

    // lattice padding in whole steps, wide enough to hold the collar
    int pad = 1 + static_cast<int>(std::ceil(dirichlet_collar / h - 1e-9));
    int counts[2] = {1, 1};
    for (int a = 0; a < g.dim; ++a) {
        double extent = bhi[static_cast<std::size_t>(a)] - blo[static_cast<std::size_t>(a)];
        if (extent < 2 * h)
            throw DegenerateShape("bounding box extent must be at least 2h per axis");
        counts[a] = static_cast<int>(std::ceil(extent / h - 1e-9)) + 1 + 2 * pad;
    }
    g.origin = {blo[0] - pad * h, g.dim == 2 ? blo[1] - pad * h : 0.0};
    g.nx = counts[0];
    g.ny = counts[1];

    std::size_t total = static_cast<std::size_t>(g.size());
    g.cls.assign(total, NodeClass::Exterior);
    g.normals.assign(total, Vec{0, 0});

    double band = h / 2 + 1e-12 * std::max(1.0, std::max(std::fabs(bhi[0]), std::fabs(bhi[1])));
    for (int node = 0; node < g.size(); ++node) {
        Vec p = g.pos(node);
        double sd = spec.shape.signed_distance(p);
        auto idx = static_cast<std::size_t>(node);
        if (sd > band) {
            // absorbing collar beyond the dirichlet part of the boundary
            if (dirichlet_collar > 0 && sd <= dirichlet_collar + band &&
                spec.classify_boundary_point(spec.shape.closest_boundary_point(p)) ==
                    BoundaryKind::Dirichlet) {
                g.cls[idx] = NodeClass::Dirichlet;
                g.dirichlet.push_back(node);
            }
            continue;
        }
        if (sd >= -band) {
            Vec bp = spec.shape.closest_boundary_point(p);
            BoundaryKind k = spec.classify_boundary_point(bp);
            if (k == BoundaryKind::Dirichlet) {
                g.cls[idx] = NodeClass::Dirichlet;
                g.dirichlet.push_back(node);
            } else {
                g.cls[idx] = NodeClass::Neumann;
                g.normals[idx] = spec.shape.outward_normal(p);
            }
        } else {
            g.cls[idx] = NodeClass::Interior;
        }
    }
    if (g.dirichlet.empty())
        throw EmptyDirichlet("no node classified dirichlet; the game could not end");
    return g;
}

int GridDomain::non_exterior_count() const {
    int n = 0;
    for (NodeClass c : cls)
        if (c != NodeClass::Exterior) ++n;
    return n;
}

int GridDomain::nearest_node(Vec p) const {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (int node = 0; node < size(); ++node) {
        if (!non_exterior(node)) continue;
        double d = dist(pos(node), p);
        if (d < bd) {
            bd = d;
            best = node;
        }
    }
    if (best < 0) throw Error("grid has no non-exterior nodes");
    return best;
}

void neighborhood_into(const GridDomain& g, int node, double eps, std::vector<int>& out) {
    out.clear();
    if (node < 0 || node >= g.size() || !g.non_exterior(node))
        throw IllegalState("neighborhood center must be a non-exterior node");
    if (eps < 2 * g.h - 1e-12) throw EpsTooSmall(eps, 2 * g.h);

    int ci = node % g.nx, cj = node / g.nx;
    int k = static_cast<int>(std::floor(eps / g.h + 1e-9));
    Vec c = g.pos(node);
    double lim = eps * eps * (1 + 1e-12) + 1e-300;
    for (int j = std::max(cj - k, 0); j <= std::min(cj + k, g.ny - 1); ++j) {
        for (int i = std::max(ci - k, 0); i <= std::min(ci + k, g.nx - 1); ++i) {
            int m = g.id(i, j);
            if (!g.non_exterior(m)) continue;
            if (norm2(g.pos(m) - c) <= lim) out.push_back(m);
        }
    }
}

Neighborhood neighborhood(const GridDomain& g, int node, double eps) {
    Neighborhood n;
    n.center = node;
    n.epsilon = eps;
    neighborhood_into(g, node, eps, n.members);
    return n;
}

HypothesisReport check_domain_hypothesis(const GridDomain& g, HypothesisMode mode) {
    std::vector<int> neumann;
    for (int node = 0; node < g.size(); ++node)
        if (g.cls[static_cast<std::size_t>(node)] == NodeClass::Neumann) neumann.push_back(node);
    if (neumann.empty())
        throw PreconditionViolated("hypothesis check requires at least one neumann node");

    struct Star {
        int node;
        Vec bp;
        Vec n;
    };
    std::vector<Star> stars;
    stars.reserve(neumann.size());
    for (int node : neumann) {
        Vec bp = g.spec.shape.closest_boundary_point(g.pos(node));
        stars.push_back({node, bp, g.spec.shape.outward_normal(bp)});
    }

    HypothesisReport rep;
    rep.mode = mode;
    rep.worst_inner_product = std::numeric_limits<double>::infinity();

    constexpr double eq_tol = 1e-9;
    std::vector<bool> attains_eq(stars.size(), false);

    for (int z = 0; z < g.size(); ++z) {
        if (!g.non_exterior(z)) continue;
        Vec zp = g.spec.shape.project(g.pos(z));
        for (std::size_t s = 0; s < stars.size(); ++s) {
            Vec d = stars[s].bp - zp;
            double len = norm(d);
            if (len < 1e-9) continue; // z and x* coincide after projection
            double ip = dot((1.0 / len) * d, stars[s].n);
            if (ip < rep.worst_inner_product) {
                rep.worst_inner_product = ip;
                rep.worst_z = z;
                rep.worst_xstar = stars[s].node;
            }
            if (std::fabs(ip) <= eq_tol) {
                if (!attains_eq[s]) ++rep.flat_pairs; // count attaining x*, not raw pairs
                attains_eq[s] = true;
            }
        }
    }

    if (mode == HypothesisMode::Strict) {
        rep.holds = rep.worst_inner_product > 1e-12;
        return rep;
    }

    // flat-ok: nonnegative everywhere, plus a direction p with <p, n(x*)> > 0
    // over the equality-attaining x*
    bool nonneg = rep.worst_inner_product >= -1e-12;
    if (rep.flat_pairs == 0) {
        rep.holds = nonneg;
        return rep;
    }
    std::vector<Vec> candidates;
    Vec mean{0, 0};
    for (std::size_t s = 0; s < stars.size(); ++s)
        if (attains_eq[s]) mean = mean + stars[s].n;
    if (norm(mean) > 1e-12) candidates.push_back(normalized(mean));
    candidates.push_back({1, 0});
    candidates.push_back({-1, 0});
    if (g.dim == 2) {
        candidates.push_back({0, 1});
        candidates.push_back({0, -1});
    }
    for (const Vec& p : candidates) {
        bool ok = true;
        for (std::size_t s = 0; s < stars.size() && ok; ++s)
            if (attains_eq[s] && dot(p, stars[s].n) <= 1e-12) ok = false;
        if (ok) {
            rep.direction_found = true;
            rep.direction = p;
            break;
        }
    }
    rep.holds = nonneg && rep.direction_found;
    return rep;
}

} // namespace tow
