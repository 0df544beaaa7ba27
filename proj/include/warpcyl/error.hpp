#pragma once

#include <stdexcept>
#include <string>

namespace warpcyl {

/// Failure categories shared by every module. The CLI maps these onto exit codes.
enum class ErrorKind {
    Domain,         // argument outside the admissible interval
    InvalidProfile, // warp data violating positivity / sampling rules
    Lattice,        // Fourier label not on the chosen lattice
    LiftAbsent,     // 2A not an integer, no reflection lift
    Unsupported,    // operation not defined for this APS case
    BlowUp,         // non-finite integrator state
    Mismatch,       // paired spectra of different cardinality
    Precondition,   // documented precondition violated
    Transversality, // holonomy crossing with vanishing derivative
    Endpoint,       // non-invertible endpoint of a holonomy path
    Refinement,     // branch tracking could not resolve an s-interval
    Config,         // CLI configuration problems
    Internal        // bug guard
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Domain: return "domain";
        case ErrorKind::InvalidProfile: return "invalid-profile";
        case ErrorKind::Lattice: return "lattice";
        case ErrorKind::LiftAbsent: return "lift-absent";
        case ErrorKind::Unsupported: return "unsupported";
        case ErrorKind::BlowUp: return "blow-up";
        case ErrorKind::Mismatch: return "mismatch";
        case ErrorKind::Precondition: return "precondition";
        case ErrorKind::Transversality: return "transversality";
        case ErrorKind::Endpoint: return "endpoint";
        case ErrorKind::Refinement: return "refinement";
        case ErrorKind::Config: return "config";
        case ErrorKind::Internal: return "internal";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

} // namespace warpcyl
