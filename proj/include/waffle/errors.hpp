#pragma once

#include <stdexcept>
#include <string>

namespace waffle {

enum class errc {
    // hyperbolic kernel
    not_hyperbolic,
    shared_endpoint,
    degenerate_pair,
    point_on_geodesic,
    non_positive_length,
    invalid_point,
    // line patterns
    unsupported_genus,
    non_hyperbolic_curve,
    near_tangency,
    degenerate_arrangement,
    window_too_small,
    // cubulation
    consistency_overflow,
    unknown_wall,
    cap_exceeded,
    // combinatorialization
    order_violation,
    not_consistent,
    // strands
    not_translating,
    no_convergence,
    not_stabilizing,
    // groupings
    index_out_of_range,
    not_divisible,
    not_a_tree,
    no_solution,
    disconnected,
    arity_mismatch,
    // cli
    schema_error,
    bipartite_violation,
    orientation_violation,
    io_error,
};

inline const char* errc_name(errc c) {
    switch (c) {
    case errc::not_hyperbolic: return "NotHyperbolic";
    case errc::shared_endpoint: return "SharedEndpoint";
    case errc::degenerate_pair: return "DegeneratePair";
    case errc::point_on_geodesic: return "PointOnGeodesic";
    case errc::non_positive_length: return "NonPositiveLength";
    case errc::invalid_point: return "InvalidPoint";
    case errc::unsupported_genus: return "UnsupportedGenus";
    case errc::non_hyperbolic_curve: return "NonHyperbolicCurve";
    case errc::near_tangency: return "NearTangency";
    case errc::degenerate_arrangement: return "DegenerateArrangement";
    case errc::window_too_small: return "WindowTooSmall";
    case errc::consistency_overflow: return "ConsistencyOverflow";
    case errc::unknown_wall: return "UnknownWall";
    case errc::cap_exceeded: return "CapExceeded";
    case errc::order_violation: return "OrderViolation";
    case errc::not_consistent: return "NotConsistent";
    case errc::not_translating: return "NotTranslating";
    case errc::no_convergence: return "NoConvergence";
    case errc::not_stabilizing: return "NotStabilizing";
    case errc::index_out_of_range: return "IndexOutOfRange";
    case errc::not_divisible: return "NotDivisible";
    case errc::not_a_tree: return "NotATree";
    case errc::no_solution: return "NoSolution";
    case errc::disconnected: return "Disconnected";
    case errc::arity_mismatch: return "ArityMismatch";
    case errc::schema_error: return "SchemaError";
    case errc::bipartite_violation: return "BipartiteViolation";
    case errc::orientation_violation: return "OrientationViolation";
    case errc::io_error: return "IoError";
    }
    return "UnknownError";
}

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

inline void require(bool cond, errc code, const std::string& what) {
    if (!cond) fail(code, what);
}

} // namespace waffle
