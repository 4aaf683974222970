#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "geoxray/geodesics.hpp"

using namespace geoxray;

namespace {

constexpr double kPi = std::numbers::pi;

double angle_gap(double a, double b) { return std::abs(wrap_angle(a - b)); }

// Straight-line influx coordinates of the chord through (x, theta).
FanBeamPoint chord_influx(Point2 x, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    const double b = x.x * c + x.y * s;
    const double t = -b - std::sqrt(b * b + 1.0 - (x.x * x.x + x.y * x.y));
    const Point2 entry{x.x + t * c, x.y + t * s};
    const double beta = wrap_positive(std::atan2(entry.y, entry.x));
    return {beta, wrap_angle(theta - beta - kPi)};
}

}  // namespace

TEST(Geodesics, EuclideanDiameter) {
    const double dt = 1e-2;
    const auto path = trace_forward(MetricModel::euclidean(), {1.0, 0.0}, kPi, dt,
                                    default_max_steps(dt));
    ASSERT_FALSE(path.trapped);
    EXPECT_NEAR(path.exit_time, 2.0, 1e-12);
    EXPECT_NEAR(path.exit_state.x, -1.0, 1e-12);
    EXPECT_NEAR(path.exit_state.y, 0.0, 1e-12);
    for (const auto& s : path.states) {
        EXPECT_EQ(s.theta, kPi);
    }
}

TEST(Geodesics, TangentShotHasVanishingExitTime) {
    const double dt = 1e-3;
    const auto m = MetricModel::euclidean();
    double previous = 3.0;
    for (double gap : {0.2, 0.05, 0.01, 0.002}) {
        const auto s = influx_state(0.8, kPi / 2.0 - gap);
        const auto path = trace_forward(m, s.position(), s.theta, dt, default_max_steps(dt));
        EXPECT_LT(path.exit_time, previous);
        EXPECT_NEAR(path.exit_time, 2.0 * std::cos(kPi / 2.0 - gap), 1e-9);
        previous = path.exit_time;
    }
}

TEST(Geodesics, StrongLensFanExits) {
    const double dt = 1.0 / 64.0;
    const auto m = MetricModel::lens(1.2);
    const InfluxGrid g(16);
    int exited = 0;
    for (std::size_t j = 0; j < g.num_alphas(); ++j) {
        // beta = pi aims the fan at the bump centred at (0.2, 0).
        const auto s = influx_state(kPi, g.alpha(j));
        const auto path = trace_forward(m, s.position(), s.theta, dt, default_max_steps(dt));
        if (path.trapped) continue;
        ++exited;
        EXPECT_NEAR(std::hypot(path.exit_state.x, path.exit_state.y), 1.0, 1e-9);
        for (std::size_t p = 1; p < path.states.size(); ++p) {
            const auto& q = path.states[p];
            EXPECT_LT(q.x * q.x + q.y * q.y, 1.0);
        }
    }
    EXPECT_EQ(exited, static_cast<int>(g.num_alphas()));
}

TEST(Geodesics, LensBendsRays) {
    const double dt = 1e-3;
    const auto s = influx_state(kPi, 0.1);
    const auto straight = trace_forward(MetricModel::euclidean(), s.position(), s.theta, dt,
                                        default_max_steps(dt));
    const auto bent = trace_forward(MetricModel::lens(1.2), s.position(), s.theta, dt,
                                    default_max_steps(dt));
    EXPECT_GT(angle_gap(bent.exit_state.theta, straight.exit_state.theta), 0.05);
}

TEST(Geodesics, BackwardExamples) {
    const double dt = 1e-2;
    const auto m = MetricModel::euclidean();
    const auto a = trace_backward_to_influx(m, {0.0, 0.0}, 0.0, dt, default_max_steps(dt));
    EXPECT_NEAR(angle_gap(a.beta, kPi), 0.0, 1e-12);
    EXPECT_NEAR(a.alpha, 0.0, 1e-12);
    const auto b = trace_backward_to_influx(m, {0.0, 0.0}, kPi / 2.0, dt, default_max_steps(dt));
    EXPECT_NEAR(angle_gap(b.beta, 1.5 * kPi), 0.0, 1e-12);
    EXPECT_NEAR(b.alpha, 0.0, 1e-12);
}

TEST(Geodesics, RadialGeodesicsOfNegativeCurvatureAreStraight) {
    const double dt = 1e-2;
    const auto m = MetricModel::constant_negative(2.0);
    for (double theta : {0.0, 0.7, 2.0, 4.4}) {
        const auto bp = trace_backward_to_influx(m, {0.0, 0.0}, theta, dt, default_max_steps(dt));
        EXPECT_NEAR(bp.alpha, 0.0, 1e-9);
        EXPECT_NEAR(angle_gap(bp.beta, theta + kPi), 0.0, 1e-9);
    }
}

TEST(Geodesics, InfluxGridLayout) {
    const auto g8 = make_influx_grid(8);
    EXPECT_EQ(g8.num_betas(), 16u);
    EXPECT_EQ(g8.num_alphas(), 8u);
    EXPECT_NEAR(g8.alpha(0), -kPi / 2.0 + kPi / 16.0, 1e-15);
    EXPECT_NEAR(g8.alpha(7), kPi / 2.0 - kPi / 16.0, 1e-15);
    EXPECT_NEAR(g8.beta(15) + g8.beta_step(), 2.0 * kPi, 1e-14);
    const auto g128 = make_influx_grid(128);
    EXPECT_EQ(g128.num_betas(), 256u);
    EXPECT_EQ(g128.num_alphas(), 128u);
    EXPECT_EQ(g128.size(), 256u * 128u);
    EXPECT_THROW(make_influx_grid(7), std::invalid_argument);
}

TEST(Geodesics, LaunchStateConvention) {
    const auto s = influx_state(1.0, 0.3);
    EXPECT_NEAR(std::hypot(s.x, s.y), 1.0, 1e-15);
    EXPECT_NEAR(s.theta, 1.0 + kPi + 0.3, 1e-15);
}

TEST(Geodesics, EuclideanRoundTrip) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto m = MetricModel::euclidean();
    for (double dt : {1e-2, 1e-3}) {
        for (int i = 0; i < 50; ++i) {
            const double r = 0.9 * std::sqrt(u(rng));
            const double phi = 2.0 * kPi * u(rng);
            const double theta = 2.0 * kPi * u(rng);
            const Point2 x{r * std::cos(phi), r * std::sin(phi)};
            const auto got = trace_backward_to_influx(m, x, theta, dt, default_max_steps(dt));
            const auto want = chord_influx(x, theta);
            EXPECT_LT(angle_gap(got.beta, want.beta), 10.0 * dt);
            EXPECT_LT(angle_gap(got.alpha, want.alpha), 10.0 * dt);
        }
    }
}

TEST(Geodesics, UnitSpeed) {
    const double dt = 1e-2;
    for (const auto& m : {MetricModel::constant_positive(1.2), MetricModel::constant_negative(1.2),
                          MetricModel::lens(1.2)}) {
        const auto s = influx_state(0.4, -0.3);
        const auto path = trace_forward(m, s.position(), s.theta, dt, default_max_steps(dt));
        double worst = 0.0;
        for (std::size_t p = 1; p < path.states.size(); ++p) {
            const auto& a = path.states[p - 1];
            const auto& b = path.states[p];
            // Metric length of one step, by Simpson's rule on the conformal factor.
            const Point2 mid{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
            const double scale = (std::exp(m.lambda(a.position())) + 4.0 * std::exp(m.lambda(mid)) +
                                  std::exp(m.lambda(b.position()))) / 6.0;
            const double len = scale * std::hypot(b.x - a.x, b.y - a.y);
            worst = std::max(worst, std::abs(len / dt - 1.0));
        }
        EXPECT_LT(worst, 1e-5) << m.to_string();
    }
}

TEST(Geodesics, Reversibility) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double dt = 1e-3;
    for (const auto& m : {MetricModel::constant_positive(1.6), MetricModel::constant_negative(1.6),
                          MetricModel::lens(0.6)}) {
        for (int i = 0; i < 10; ++i) {
            const double r = 0.8 * std::sqrt(u(rng));
            const double phi = 2.0 * kPi * u(rng);
            const double theta = 2.0 * kPi * u(rng);
            const Point2 x{r * std::cos(phi), r * std::sin(phi)};
            const auto bp = trace_backward_to_influx(m, x, theta, dt, default_max_steps(dt));
            const auto s = influx_state(bp.beta, bp.alpha);
            double best = 1e9;
            march_geodesic(m, s, dt, default_max_steps(dt), [&](std::size_t, const PhaseState& q) {
                const double d = std::hypot(q.x - x.x, q.y - x.y) + angle_gap(q.theta, theta);
                best = std::min(best, d);
            });
            EXPECT_LT(best, 5.0 * dt) << m.to_string();
        }
    }
}

TEST(Geodesics, EuclideanExitTimeIsChordLength) {
    const auto m = MetricModel::euclidean();
    for (double dt : {1e-2, 1e-3}) {
        for (double alpha : {-1.2, -0.5, 0.0, 0.3, 1.1}) {
            const auto s = influx_state(2.0, alpha);
            const auto path = trace_forward(m, s.position(), s.theta, dt, default_max_steps(dt));
            EXPECT_NEAR(path.exit_time, 2.0 * std::cos(alpha), dt);
            // The reversed chord enters at the exit point with the mirrored shot angle.
            EXPECT_NEAR(path.exit_boundary_point.alpha, -alpha, 1e-9);
            EXPECT_NEAR(angle_gap(path.exit_boundary_point.beta, 2.0 + kPi + 2.0 * alpha), 0.0, 1e-9);
        }
    }
}

TEST(Geodesics, TrappedWithinStepBudget) {
    const double dt = 1e-2;
    const auto path = trace_forward(MetricModel::euclidean(), {0.0, 0.0}, 0.0, dt, 10);
    EXPECT_TRUE(path.trapped);
    EXPECT_FALSE(try_trace_backward_to_influx(MetricModel::lens(0.3), {0.0, 0.0}, 0.0, dt, 10));
    EXPECT_THROW(trace_backward_to_influx(MetricModel::lens(0.3), {0.0, 0.0}, 0.0, dt, 10),
                 TrappedRay);
    EXPECT_THROW(trace_forward(MetricModel::euclidean(), {0.0, 0.0}, 0.0, 0.0, 10),
                 std::invalid_argument);
}
