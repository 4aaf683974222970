#include "geoxray/geodesics.hpp"

#include <algorithm>

namespace geoxray {

InfluxGrid::InfluxGrid(std::size_t n) : n_(n) {
    if (n < 8) {
        throw std::invalid_argument("influx grid requires n >= 8");
    }
}

InfluxGrid make_influx_grid(std::size_t n) { return InfluxGrid(n); }

GeodesicPath trace_forward(const MetricModel& m, Point2 x0, double theta0, double dt,
                           std::size_t max_steps) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("trace_forward requires dt > 0");
    }
    GeodesicPath path;
    path.dt = dt;
    const RayExit e = march_geodesic(m, {x0.x, x0.y, theta0}, dt, max_steps,
                                     [&](std::size_t, const PhaseState& s) {
                                         path.states.push_back(s);
                                     });
    path.trapped = e.trapped;
    path.exit_index = e.last_interior;
    path.exit_time = e.exit_time;
    path.exit_state = e.exit_state;
    path.exit_boundary_point = reversed_influx_coordinates(e.exit_state);
    return path;
}

std::optional<FanBeamPoint> try_trace_backward_to_influx(const MetricModel& m, Point2 x,
                                                         double theta, double dt,
                                                         std::size_t max_steps) {
    const double back = theta + std::numbers::pi;
    if (m.is_euclidean() && x.x * x.x + x.y * x.y < 1.0) {
        // Straight lines: the crossing is exact, no marching needed.
        const double c = std::cos(back);
        const double s = std::sin(back);
        const double b = x.x * c + x.y * s;
        const double t = -b + std::sqrt(b * b + 1.0 - x.x * x.x - x.y * x.y);
        return reversed_influx_coordinates({x.x + t * c, x.y + t * s, back});
    }
    const RayExit e = march_geodesic(m, {x.x, x.y, back}, dt, max_steps,
                                     [](std::size_t, const PhaseState&) {});
    if (e.trapped) {
        return std::nullopt;
    }
    return reversed_influx_coordinates(e.exit_state);
}

FanBeamPoint trace_backward_to_influx(const MetricModel& m, Point2 x, double theta, double dt,
                                      std::size_t max_steps) {
    auto result = try_trace_backward_to_influx(m, x, theta, dt, max_steps);
    if (!result) {
        throw TrappedRay();
    }
    return *result;
}

}  // namespace geoxray
