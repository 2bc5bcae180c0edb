#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tow/errors.hpp"
#include "tow/expr.hpp"
#include "tow/vec.hpp"

namespace tow {

enum class NodeClass : std::uint8_t { Interior, Dirichlet, Neumann, Exterior };
enum class BoundaryKind : std::uint8_t { Dirichlet, Neumann };

const char* to_string(NodeClass c);

/// Continuous domain shape with an exact signed distance function.
struct Shape {
    enum class Kind : std::uint8_t { Rectangle, Disk, Polygon };

    Kind kind = Kind::Rectangle;
    int dim = 2;
    Vec lo{0, 0}, hi{0, 0};       // rectangle
    Vec center{0, 0};             // disk
    double radius = 0.0;          // disk
    std::vector<Vec> vertices;    // polygon, counterclockwise

    static Shape rectangle(Vec lo, Vec hi);
    static Shape interval(double lo, double hi);
    static Shape disk(Vec center, double radius);
    static Shape polygon(std::vector<Vec> vertices);

    /// Throws DegenerateShape on invalid geometry.
    void validate() const;

    /// Negative inside, zero on the boundary, positive outside.
    double signed_distance(Vec p) const;

    Vec closest_boundary_point(Vec p) const;

    /// Unit outward normal of the boundary as seen from p (the gradient of
    /// the signed distance). For p on the boundary, the normal of the face
    /// or edge p lies on.
    Vec outward_normal(Vec p) const;

    /// Projection onto the closed domain.
    Vec project(Vec p) const;

    std::pair<Vec, Vec> bounding_box() const;
};

struct BoundaryRule {
    expr::Expr where; // match when value > 0.5 at the boundary point
    BoundaryKind kind;
};

struct DomainSpec {
    Shape shape;
    std::vector<BoundaryRule> rules; // ordered, first match wins

    BoundaryKind classify_boundary_point(Vec p) const;
};

/// Uniform-grid discretization of a DomainSpec. Node ids run row-major over
/// the inflated bounding-box lattice (x fastest), so ids ascend with position.
struct GridDomain {
    DomainSpec spec;
    double h = 0.0;
    double dirichlet_collar = 0.0;
    int dim = 2;
    Vec origin{0, 0};
    int nx = 0, ny = 1;

    std::vector<NodeClass> cls;  // per lattice node
    std::vector<Vec> normals;    // unit outward normal at neumann nodes, else {0,0}
    std::vector<int> dirichlet;  // ascending node ids

    int size() const { return nx * ny; }
    int id(int i, int j) const { return j * nx + i; }
    Vec pos(int node) const {
        int i = node % nx, j = node / nx;
        return {origin[0] + i * h, origin[1] + j * h};
    }
    bool non_exterior(int node) const {
        return cls[static_cast<std::size_t>(node)] != NodeClass::Exterior;
    }
    bool in_lattice(int i, int j) const { return i >= 0 && i < nx && j >= 0 && j < ny; }

    int non_exterior_count() const;

    /// Nearest non-exterior node to p.
    int nearest_node(Vec p) const;
};

/// Classification rule: exterior when sdf > h/2, boundary when |sdf| <= h/2
/// (kind from the boundary rules at the closest boundary point), else interior.
///
/// dirichlet_collar > 0 additionally keeps outside nodes with
/// sdf <= collar + h/2 whose closest boundary point is dirichlet, classified
/// dirichlet with the payoff evaluated at node coordinates. Solving uses
/// collar = epsilon so the ball never pokes past the absorbing boundary;
/// the game treats landing there as exiting through the dirichlet part.
GridDomain discretize(const DomainSpec& spec, double h, double dirichlet_collar = 0.0);

struct Neighborhood {
    int center;
    std::vector<int> members; // ascending ids, non-exterior, within epsilon
    double epsilon;
};

Neighborhood neighborhood(const GridDomain& g, int node, double eps);

/// Allocation-free variant for hot loops; `out` is cleared and refilled.
void neighborhood_into(const GridDomain& g, int node, double eps, std::vector<int>& out);

enum class HypothesisMode { Strict, FlatOk };

struct HypothesisReport {
    HypothesisMode mode;
    bool holds = false;
    double worst_inner_product = 0.0;
    int worst_z = -1;      // node id
    int worst_xstar = -1;  // node id
    long flat_pairs = 0;   // pairs attaining equality (flat-ok mode)
    bool direction_found = false;
    Vec direction{0, 0};
};

/// Evaluates <(x*-z)/|x*-z|, n(x*)> over pairs of a non-exterior node z and a
/// neumann node x*, with both projected onto the continuous closed domain and
/// the normal taken at the projected boundary point.
HypothesisReport check_domain_hypothesis(const GridDomain& g, HypothesisMode mode);

} // namespace tow
