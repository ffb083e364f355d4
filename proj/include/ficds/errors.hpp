#pragma once

#include <stdexcept>
#include <string>

namespace ficds {

/// Error categories, used by the CLI to map failures onto exit codes.
enum class Errc {
    invalid_argument,    // bad value passed to a library function
    invalid_parameters,  // physical parameter violates its invariant
    config,              // config document malformed or schema-invalid
    path,                // unresolvable parameter path
    delay_not_expanded,  // operation requires a rationalized delay
    division_by_zero,    // zero denominator / inversion of zero
    pole_hit,            // frequency response evaluated exactly at a pole
    no_convergence,      // iterative solver failed
    topology_mismatch,   // inverter modes do not fit the requested composition
    no_boundary,         // bisection endpoints carry the same verdict
    ambiguous_endpoint,  // bisection endpoint is marginal
    insufficient_data,   // trace too short to classify
    io,                  // file read/write failure
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    [[nodiscard]] Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

} // namespace ficds
