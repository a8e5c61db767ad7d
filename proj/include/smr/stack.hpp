#ifndef SMR_STACK_HPP
#define SMR_STACK_HPP

#include "smr/material.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace smr {

/// One layer of a resonator stack.
struct Layer {
    Material material;
    double thickness = 0.0; // m
};

/// Top-surface termination of a stack.
enum class TopBoundary {
    free_surface, // vacuum, Z = 0
    loaded        // semi-infinite medium of top_load
};

/// A solidly mounted resonator stack, listed top to bottom, terminated by a
/// semi-infinite substrate. Exactly one layer is the piezoelectric.
/// Immutable value object after construction.
struct Stack {
    std::vector<Layer> layers;     // index 0 = topmost layer
    std::size_t piezo_index = 0;   // index into layers
    double area = 0.0;             // electrode area, m^2
    Material substrate;            // semi-infinite termination below
    TopBoundary top_boundary = TopBoundary::free_surface;
    std::optional<Material> top_load; // present iff top_boundary == loaded

    const Layer& piezo() const { return layers.at(piezo_index); }
};

/// One structural or physical problem found in a stack.
struct StackViolation {
    std::string where;   // "layer 3", "geometry", ...
    std::string message;
    bool warning = false; // warnings do not invalidate the stack
};

/// Report-style validation: returns every violation found (empty = valid).
/// Checks positive dimensions, piezo constants, piezo uniqueness by
/// construction, and impedance contrast between adjacent mirror layers.
std::vector<StackViolation> validate_stack(const Stack& s);

/// Throws std::invalid_argument when validate_stack reports any
/// non-warning violation.
void require_valid(const Stack& s);

/// Mirror pair count: alternating dielectric layers below the bottom
/// electrode, divided by two. 8 full pairs plus a terminating layer
/// reports 8.5.
double mirror_pairs(const Stack& s);

} // namespace smr

#endif // SMR_STACK_HPP
