#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "geoxray/metrics.hpp"

namespace geoxray {

/// Phase-space point (x, y, theta) of the unit circle bundle.
struct PhaseState {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    Point2 position() const { return {x, y}; }
};

/// Fan-beam coordinates of a boundary point: position angle beta, shot angle
/// alpha measured from the inner normal.
struct FanBeamPoint {
    double beta = 0.0;
    double alpha = 0.0;
};

class TrappedRay : public std::runtime_error {
public:
    TrappedRay() : std::runtime_error("geodesic did not exit the disc within max_steps") {}
};

/// Discretization of the influx boundary: 2n positions, n interior shot angles.
class InfluxGrid {
public:
    InfluxGrid() = default;
    /// Throws std::invalid_argument for n < 8.
    explicit InfluxGrid(std::size_t n);

    std::size_t n() const { return n_; }
    std::size_t num_betas() const { return 2 * n_; }
    std::size_t num_alphas() const { return n_; }
    std::size_t size() const { return 2 * n_ * n_; }

    double beta(std::size_t i) const { return static_cast<double>(i) * beta_step(); }
    double alpha(std::size_t j) const {
        return -0.5 * std::numbers::pi + (static_cast<double>(j) + 0.5) * alpha_step();
    }
    double beta_step() const { return std::numbers::pi / static_cast<double>(n_); }
    double alpha_step() const { return std::numbers::pi / static_cast<double>(n_); }

    bool operator==(const InfluxGrid& other) const { return n_ == other.n_; }

private:
    std::size_t n_ = 0;
};

InfluxGrid make_influx_grid(std::size_t n);

/// Launch state of the geodesic entering at fan-beam point (beta, alpha).
inline PhaseState influx_state(double beta, double alpha) {
    return {std::cos(beta), std::sin(beta), beta + std::numbers::pi + alpha};
}

/// Default integration step: half the Cartesian spacing of an n x n grid.
inline double default_dt(std::size_t n) { return 1.0 / static_cast<double>(n); }

/// Default step budget, a generous multiple of the disc diameter.
inline std::size_t default_max_steps(double dt) {
    return static_cast<std::size_t>(std::ceil(20.0 / dt));
}

/// Right-hand side of the geodesic system in isothermal coordinates.
inline PhaseState geodesic_rhs(const MetricModel& m, const PhaseState& s) {
    const FlowSample ms = m.flow(s.position());
    const double speed = ms.speed;
    const double c = std::cos(s.theta);
    const double sn = std::sin(s.theta);
    return {speed * c, speed * sn, speed * (-sn * ms.dlambda_dx + c * ms.dlambda_dy)};
}

/// One classical fourth-order Runge-Kutta step.
inline PhaseState rk4_step(const MetricModel& m, const PhaseState& s, double dt) {
    const PhaseState k1 = geodesic_rhs(m, s);
    const PhaseState k2 = geodesic_rhs(
        m, {s.x + 0.5 * dt * k1.x, s.y + 0.5 * dt * k1.y, s.theta + 0.5 * dt * k1.theta});
    const PhaseState k3 = geodesic_rhs(
        m, {s.x + 0.5 * dt * k2.x, s.y + 0.5 * dt * k2.y, s.theta + 0.5 * dt * k2.theta});
    const PhaseState k4 =
        geodesic_rhs(m, {s.x + dt * k3.x, s.y + dt * k3.y, s.theta + dt * k3.theta});
    const double w = dt / 6.0;
    return {s.x + w * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
            s.y + w * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
            s.theta + w * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta)};
}

/// Outcome of marching one geodesic until it leaves the closed unit disc.
struct RayExit {
    bool trapped = false;
    /// Index of the last sample strictly inside the disc.
    std::size_t last_interior = 0;
    /// Fraction of the final step [last_interior, last_interior + 1] spent inside.
    double fraction = 0.0;
    double exit_time = 0.0;
    /// Boundary crossing, linearly interpolated between the bracketing samples.
    PhaseState exit_state;
};

/// Quadrature weight of sample p for integrals over [0, exit_time] using the
/// left-endpoint rule, the last cell truncated at the refined exit time.
inline double left_endpoint_weight(const RayExit& e, std::size_t p, double dt) {
    return p < e.last_interior ? dt : e.fraction * dt;
}

namespace detail {

inline double crossing_fraction(const PhaseState& in, const PhaseState& out) {
    // Solve |in + s (out - in)| = 1 for s in [0, 1].
    const double dx = out.x - in.x;
    const double dy = out.y - in.y;
    const double a = dx * dx + dy * dy;
    const double b = 2.0 * (in.x * dx + in.y * dy);
    const double c = in.x * in.x + in.y * in.y - 1.0;
    if (a <= 0.0) {
        return 0.0;
    }
    const double disc = std::max(b * b - 4.0 * a * c, 0.0);
    const double s = (-b + std::sqrt(disc)) / (2.0 * a);
    return std::clamp(s, 0.0, 1.0);
}

}  // namespace detail

/// Marches the geodesic from `start` with RK4 until x^2 + y^2 >= 1.
///
/// `visit(p, state)` is called for every sample before the exit, starting with
/// p = 0 at `start`. The start itself is never tested against the boundary.
template <class Visitor>
RayExit march_geodesic(const MetricModel& m, PhaseState start, double dt,
                       std::size_t max_steps, Visitor&& visit) {
    RayExit result;
    PhaseState current = start;
    visit(std::size_t{0}, current);
    for (std::size_t p = 1; p <= max_steps; ++p) {
        const PhaseState next = rk4_step(m, current, dt);
        if (next.x * next.x + next.y * next.y >= 1.0) {
            const double s = detail::crossing_fraction(current, next);
            result.last_interior = p - 1;
            result.fraction = s;
            result.exit_time = (static_cast<double>(p - 1) + s) * dt;
            result.exit_state = {current.x + s * (next.x - current.x),
                                 current.y + s * (next.y - current.y),
                                 current.theta + s * (next.theta - current.theta)};
            return result;
        }
        visit(p, next);
        current = next;
    }
    result.trapped = true;
    result.last_interior = max_steps;
    result.exit_time = static_cast<double>(max_steps) * dt;
    result.exit_state = current;
    return result;
}

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    a = std::remainder(a, two_pi);
    return a <= -std::numbers::pi ? a + two_pi : a;
}

/// Wraps an angle to [0, 2 pi).
inline double wrap_positive(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    return a < 0.0 ? a + two_pi : a;
}

/// Fan-beam coordinates of the geodesic entering the disc backwards along an
/// exit crossing: beta is the exit position, alpha the outgoing direction
/// measured from the outer normal (equal to the influx alpha of the reversed ray).
inline FanBeamPoint reversed_influx_coordinates(const PhaseState& exit_state) {
    const double beta = wrap_positive(std::atan2(exit_state.y, exit_state.x));
    return {beta, wrap_angle(exit_state.theta - beta)};
}

/// Time-sampled unit-speed geodesic.
struct GeodesicPath {
    double dt = 0.0;
    std::vector<PhaseState> states;
    std::size_t exit_index = 0;
    double exit_time = 0.0;
    PhaseState exit_state;
    /// Exit crossing in fan-beam form; alpha is taken from the outer normal.
    FanBeamPoint exit_boundary_point;
    bool trapped = false;
};

/// Traces the geodesic from (x0, theta0). A trapped ray is reported through
/// GeodesicPath::trapped rather than thrown.
GeodesicPath trace_forward(const MetricModel& m, Point2 x0, double theta0, double dt,
                           std::size_t max_steps);

/// Influx fan-beam coordinates of the geodesic through (x, theta), or nullopt if
/// the backward trace does not exit.
std::optional<FanBeamPoint> try_trace_backward_to_influx(const MetricModel& m, Point2 x,
                                                         double theta, double dt,
                                                         std::size_t max_steps);

/// As above; throws TrappedRay.
FanBeamPoint trace_backward_to_influx(const MetricModel& m, Point2 x, double theta, double dt,
                                      std::size_t max_steps);

}  // namespace geoxray
