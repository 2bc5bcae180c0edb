#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "tow/expr.hpp"
#include "tow/geometry.hpp"

namespace tow {

/// Scalar field on the non-exterior nodes of a grid; exterior entries are NaN.
struct ValueField {
    const GridDomain* grid = nullptr;
    std::vector<double> values; // indexed by node id over the full lattice
    double epsilon = 0.0;
    long iterations = 0;
    double final_residual = 0.0;
};

enum class Sweep { Jacobi, GaussSeidel };
enum class Init { Zero, McShane };

struct SolverConfig {
    double epsilon = 0.0;
    double tol = 1e-10;       // certified residual threshold is 2*tol
    long max_iters = 200000;
    Sweep sweep = Sweep::GaussSeidel;
    Init init = Init::McShane;
};

/// Cached epsilon-balls for every non-dirichlet, non-exterior node.
class NeighborTable {
public:
    NeighborTable(const GridDomain& g, double eps);

    std::span<const int> members(int node) const {
        auto [off, len] = range_[static_cast<std::size_t>(node)];
        return {flat_.data() + off, static_cast<std::size_t>(len)};
    }

    const GridDomain& grid() const { return *grid_; }
    double epsilon() const { return eps_; }

private:
    const GridDomain* grid_;
    double eps_;
    std::vector<int> flat_;
    std::vector<std::pair<std::size_t, int>> range_;
};

/// Fixed point of 2u(x) = max over the eps-ball of u + min over the eps-ball
/// of u at non-dirichlet nodes, with u = F clamped on dirichlet nodes.
/// The convergence certificate is always a simultaneous (Jacobi) residual,
/// regardless of sweep mode. Throws NoConvergence, EmptyDirichlet.
ValueField solve_dpp(const GridDomain& g, const expr::Expr& F, const SolverConfig& cfg);

/// One simultaneous DPP application; dirichlet and exterior entries pass through.
std::vector<double> dpp_apply(const NeighborTable& nt, const std::vector<double>& u);

/// Signed residual 2u - max - min per node; zero at dirichlet and exterior nodes.
std::vector<double> dpp_residual_field(const ValueField& u);

double dpp_residual_sup(const ValueField& u);

/// Bilinear (linear in 1D) interpolation of the field at p. Throws
/// TooCloseToBoundary when a required cell corner is exterior or off-lattice.
double interpolate(const ValueField& u, Vec p);

/// CSV: header x,y,class,value; one row per non-exterior node in ascending
/// id order; 17 significant digits.
void write_field_csv(const ValueField& u, std::ostream& os);
ValueField read_field_csv(const GridDomain& g, std::istream& is, double epsilon);

} // namespace tow
