#pragma once

#include <stdexcept>
#include <string>

namespace tdnn {

// Mesh file could not be parsed; message carries the line number.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Element indices out of range, non-positive areas, inconsistent adjacency.
struct TopologyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-triangle mesh handed to a triangles-only path.
struct UnsupportedElement : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Degenerate (zero-area) element encountered during assembly.
struct InvalidElement : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Diffusivity tensor numerically singular at an evaluation point.
struct SingularDiffusivity : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A matrix expected to be symmetric positive definite failed to factorize.
struct NotSpd : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Iteration cap exceeded (unreachable for SPD problems in exact arithmetic).
struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tdnn
