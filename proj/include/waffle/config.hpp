#pragma once

#include <cstddef>

namespace waffle {

// Central tolerance/limit record. Every numeric threshold used anywhere in the
// library lives here so that reports can echo one configuration block.
struct Tolerances {
    // Mobius matrices
    double det_tol = 1e-12;              // |det - 1| allowed after normalization
    double hyperbolic_margin = 1e-9;     // hyperbolic iff |trace| > 2 + margin

    // geodesics and boundary points
    double shared_endpoint_tol = 1e-12;  // boundary angle gap treated as coincident
    double endpoint_dedupe = 1e-9;       // pattern deduplication on endpoint pairs
    double point_on_geodesic = 1e-9;     // o-shadow guard distance

    // visual metric
    double delta = 1.1;                  // hyperbolicity constant fed to the admissibility bound
    double epsilon = 0.3;                // default visual-metric exponent
    int boundary_samples = 4096;         // chain-infimum grid size

    // quadrature / metric identities
    double quadrature_tol = 1e-8;
    double metric_tol = 1e-9;

    // arrangements
    double tangency_angle = 1e-6;        // reject crossings flatter than this
    double vertex_merge = 1e-12;         // arrangement vertices closer than this are degenerate
    double filling_margin = 1.0;         // interior safety margin for filling checks

    // coarse intersections
    int coarse_grid = 201;               // samples per axis in the window disc

    // cubulation
    std::size_t vertex_cap = 1000000;    // flip-closure size limit
    std::size_t automorphism_cap = 5000; // brute-force search size limit

    // strands
    double shortening_tol = 1e-9;        // stop when a sweep shrinks less than this
    std::size_t shortening_max_iter = 100000;

    // clutching
    double tau_equal_rel = 1e-12;        // Euclidean-strip branch threshold
    double ratio_match_rel = 1e-9;       // clutching ratio comparison
};

inline const Tolerances& default_tolerances() {
    static const Tolerances t{};
    return t;
}

} // namespace waffle
