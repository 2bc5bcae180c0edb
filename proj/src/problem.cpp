#include "tow/problem.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace tow {

namespace {

using nlohmann::json;

const json& require(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw SchemaError(where, "missing key");
    return *it;
}

double require_number(const json& j, const char* key, const std::string& where) {
    const json& v = require(j, key, where);
    if (!v.is_number()) throw SchemaError(where, "must be a number");
    return v.get<double>();
}

Vec read_point(const json& j, const std::string& where, int dim) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
        throw SchemaError(where, "must be an array of " + std::to_string(dim) + " numbers");
    Vec p{0, 0};
    for (int a = 0; a < dim; ++a) {
        if (!j[static_cast<std::size_t>(a)].is_number())
            throw SchemaError(where, "must be an array of numbers");
        p[static_cast<std::size_t>(a)] = j[static_cast<std::size_t>(a)].get<double>();
    }
    return p;
}

Shape read_shape(const json& d) {
    const json& sh = require(d, "shape", "domain.shape");
    if (!sh.is_string()) throw SchemaError("domain.shape", "must be a string");
    std::string kind = sh.get<std::string>();

    if (kind == "rectangle") {
        const json& lo = require(d, "lo", "domain.lo");
        const json& hi = require(d, "hi", "domain.hi");
        if (!lo.is_array() || (lo.size() != 1 && lo.size() != 2))
            throw SchemaError("domain.lo", "must be an array of 1 or 2 numbers");
        int dim = static_cast<int>(lo.size());
        if (dim == 1)
            return Shape::interval(read_point(lo, "domain.lo", 1)[0],
                                   read_point(hi, "domain.hi", 1)[0]);
        return Shape::rectangle(read_point(lo, "domain.lo", 2), read_point(hi, "domain.hi", 2));
    }
    if (kind == "disk") {
        Vec c = read_point(require(d, "center", "domain.center"), "domain.center", 2);
        return Shape::disk(c, require_number(d, "radius", "domain.radius"));
    }
    if (kind == "polygon") {
        const json& vs = require(d, "vertices", "domain.vertices");
        if (!vs.is_array()) throw SchemaError("domain.vertices", "must be an array of points");
        std::vector<Vec> pts;
        for (const json& v : vs) pts.push_back(read_point(v, "domain.vertices", 2));
        return Shape::polygon(std::move(pts));
    }
    throw SchemaError("domain.shape", "must be rectangle, disk, or polygon");
}

} // namespace

ProblemFile parse_problem(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError("(document)", e.what());
    }
    if (!j.is_object()) throw SchemaError("(document)", "must be a JSON object");

    ProblemFile p;

    const json& dom = require(j, "domain", "domain");
    if (!dom.is_object()) throw SchemaError("domain", "must be an object");
    p.domain.shape = read_shape(dom);
    try {
        p.domain.shape.validate();
    } catch (const DegenerateShape& e) {
        throw SchemaError("domain", e.what());
    }

    const json& rules = require(j, "boundary", "boundary");
    if (!rules.is_array() || rules.empty())
        throw SchemaError("boundary", "must be a non-empty array of rules");
    for (std::size_t k = 0; k < rules.size(); ++k) {
        std::string where = "boundary[" + std::to_string(k) + "]";
        const json& r = rules[k];
        if (!r.is_object()) throw SchemaError(where, "must be an object");
        const json& w = require(r, "where", where + ".where");
        if (!w.is_string()) throw SchemaError(where + ".where", "must be an expression string");
        const json& kd = require(r, "kind", where + ".kind");
        BoundaryKind bk;
        if (kd == "dirichlet") bk = BoundaryKind::Dirichlet;
        else if (kd == "neumann") bk = BoundaryKind::Neumann;
        else throw SchemaError(where + ".kind", "must be dirichlet or neumann");
        p.rule_texts.push_back(w.get<std::string>());
        p.domain.rules.push_back({expr::Expr::parse(p.rule_texts.back()), bk});
    }
    const BoundaryRule& last = p.domain.rules.back();
    if (!last.where.is_constant() || !(last.where.eval(0, 0) > 0.5))
        throw SchemaError("boundary", "last rule must be a constant catch-all matching everywhere");

    const json& payoff = require(j, "payoff", "payoff");
    if (!payoff.is_string()) throw SchemaError("payoff", "must be an expression string");
    p.payoff_text = payoff.get<std::string>();
    p.payoff = expr::Expr::parse(p.payoff_text);

    p.epsilon = require_number(j, "epsilon", "epsilon");
    p.h = require_number(j, "h", "h");
    if (!(p.h > 0)) throw SchemaError("h", "must be positive");
    if (!(p.epsilon >= 2 * p.h)) throw SchemaError("epsilon", "must be ≥ 2h");

    p.solver.epsilon = p.epsilon;
    if (auto it = j.find("solver"); it != j.end()) {
        const json& s = *it;
        if (!s.is_object()) throw SchemaError("solver", "must be an object");
        if (s.contains("tol")) {
            p.solver.tol = require_number(s, "tol", "solver.tol");
            if (!(p.solver.tol > 0)) throw SchemaError("solver.tol", "must be positive");
        }
        if (s.contains("max_iters")) {
            if (!s["max_iters"].is_number_integer())
                throw SchemaError("solver.max_iters", "must be an integer");
            p.solver.max_iters = s["max_iters"].get<long>();
            if (p.solver.max_iters < 1) throw SchemaError("solver.max_iters", "must be >= 1");
        }
        if (s.contains("sweep")) {
            if (s["sweep"] == "jacobi") p.solver.sweep = Sweep::Jacobi;
            else if (s["sweep"] == "gauss-seidel") p.solver.sweep = Sweep::GaussSeidel;
            else throw SchemaError("solver.sweep", "must be jacobi or gauss-seidel");
        }
        if (s.contains("init")) {
            if (s["init"] == "zero") p.solver.init = Init::Zero;
            else if (s["init"] == "mcshane") p.solver.init = Init::McShane;
            else throw SchemaError("solver.init", "must be zero or mcshane");
        }
    }

    if (auto it = j.find("seed"); it != j.end()) {
        if (!it->is_number_integer()) throw SchemaError("seed", "must be an integer");
        p.seed = it->get<std::uint64_t>();
    }

    return p;
}

ProblemFile load_problem(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("(file)", "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str());
}

std::string problem_to_json(const ProblemFile& p) {
    json j;

    json dom;
    const Shape& s = p.domain.shape;
    switch (s.kind) {
    case Shape::Kind::Rectangle:
        dom["shape"] = "rectangle";
        if (s.dim == 1) {
            dom["lo"] = {s.lo[0]};
            dom["hi"] = {s.hi[0]};
        } else {
            dom["lo"] = {s.lo[0], s.lo[1]};
            dom["hi"] = {s.hi[0], s.hi[1]};
        }
        break;
    case Shape::Kind::Disk:
        dom["shape"] = "disk";
        dom["center"] = {s.center[0], s.center[1]};
        dom["radius"] = s.radius;
        break;
    case Shape::Kind::Polygon: {
        dom["shape"] = "polygon";
        json vs = json::array();
        for (Vec v : s.vertices) vs.push_back({v[0], v[1]});
        dom["vertices"] = vs;
        break;
    }
    }
    j["domain"] = dom;

    json rules = json::array();
    for (std::size_t k = 0; k < p.domain.rules.size(); ++k) {
        json r;
        r["where"] = p.rule_texts[k];
        r["kind"] = p.domain.rules[k].kind == BoundaryKind::Dirichlet ? "dirichlet" : "neumann";
        rules.push_back(r);
    }
    j["boundary"] = rules;

    j["payoff"] = p.payoff_text;
    j["epsilon"] = p.epsilon;
    j["h"] = p.h;
    j["solver"] = {
        {"tol", p.solver.tol},
        {"max_iters", p.solver.max_iters},
        {"sweep", p.solver.sweep == Sweep::Jacobi ? "jacobi" : "gauss-seidel"},
        {"init", p.solver.init == Init::Zero ? "zero" : "mcshane"},
    };
    j["seed"] = p.seed;

    return j.dump(2);
}

void write_problem(const ProblemFile& p, std::ostream& os) {
    os << problem_to_json(p) << "\n";
}

} // namespace tow
