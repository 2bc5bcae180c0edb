#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tow/expr.hpp"
#include "tow/geometry.hpp"
#include "tow/solver.hpp"

namespace tow {

/// A fully validated problem file: domain with ordered boundary rules,
/// payoff on the dirichlet set, grid and ball scales, solver overrides.
struct ProblemFile {
    DomainSpec domain;
    std::vector<std::string> rule_texts; // original "where" sources, rule order
    std::string payoff_text;
    expr::Expr payoff;
    double epsilon = 0.0;
    double h = 0.0;
    SolverConfig solver; // epsilon mirrored from the file
    std::uint64_t seed = 0;
};

/// Throws SchemaError for structural problems and forwards expression
/// SyntaxError unchanged. Validation: epsilon >= 2h, the last boundary rule
/// is a constant catch-all, rectangle/disk/polygon geometry keys present
/// and well formed.
ProblemFile load_problem(const std::string& path);
ProblemFile parse_problem(const std::string& text);

/// Canonical JSON (sorted keys, expression texts as given). Round-trips
/// through parse_problem.
std::string problem_to_json(const ProblemFile& p);
void write_problem(const ProblemFile& p, std::ostream& os);

} // namespace tow
