#pragma once

#include <stdexcept>
#include <string>

namespace tow {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateShape : Error {
    using Error::Error;
};

struct EmptyDirichlet : Error {
    using Error::Error;
};

struct EpsTooSmall : Error {
    EpsTooSmall(double eps_, double min_eps_)
        : Error("epsilon " + std::to_string(eps_) + " below minimum " + std::to_string(min_eps_)),
          eps(eps_), min_eps(min_eps_) {}
    double eps;
    double min_eps;
};

struct NoConvergence : Error {
    NoConvergence(double residual, long iters)
        : Error("DPP iteration did not converge: residual " + std::to_string(residual) +
                " after " + std::to_string(iters) + " sweeps"),
          final_residual(residual), iterations(iters) {}
    double final_residual;
    long iterations;
};

struct IllegalState : Error {
    using Error::Error;
};

struct AllTruncated : Error {
    using Error::Error;
};

struct TooCloseToBoundary : Error {
    using Error::Error;
};

struct PreconditionViolated : Error {
    using Error::Error;
};

struct TooFewNodes : Error {
    using Error::Error;
};

struct SchemaError : Error {
    SchemaError(std::string field_, std::string reason_)
        : Error("schema error at '" + field_ + "': " + reason_),
          field(std::move(field_)), reason(std::move(reason_)) {}
    std::string field;
    std::string reason;
};

} // namespace tow
