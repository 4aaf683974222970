#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "geoxray/grid.hpp"
#include "geoxray/metrics.hpp"

using namespace geoxray;

namespace {

std::vector<MetricModel> all_families() {
    return {MetricModel::euclidean(),         MetricModel::constant_positive(2.0),
            MetricModel::constant_positive(1.2), MetricModel::constant_negative(2.0),
            MetricModel::constant_negative(1.2), MetricModel::lens(0.3),
            MetricModel::lens(1.2)};
}

// Interior points on a polar lattice, more than 100 of them.
std::vector<Point2> interior_points() {
    std::vector<Point2> pts;
    for (int i = 1; i <= 9; ++i) {
        for (int j = 0; j < 13; ++j) {
            const double r = 0.1 * i;
            const double phi = 2.0 * std::numbers::pi * j / 13.0 + 0.1 * i;
            pts.push_back({r * std::cos(phi), r * std::sin(phi)});
        }
    }
    return pts;
}

double fd_curvature(const MetricModel& m, Point2 p, double h) {
    const double c = m.lambda(p);
    const double lap = (m.lambda({p.x + h, p.y}) + m.lambda({p.x - h, p.y}) +
                        m.lambda({p.x, p.y + h}) + m.lambda({p.x, p.y - h}) - 4.0 * c) /
                       (h * h);
    return -std::exp(-2.0 * c) * lap;
}

}  // namespace

TEST(Metrics, LambdaExamples) {
    EXPECT_EQ(MetricModel::euclidean().lambda({0.3, -0.4}), 0.0);
    EXPECT_NEAR(MetricModel::constant_positive(2.0).lambda({0.0, 0.0}), 0.5 * std::log(4.0), 1e-15);
    EXPECT_EQ(MetricModel::lens(0.0).lambda({0.2, 0.1}), 0.0);
    // The free functions agree with the members.
    const auto m = MetricModel::lens(0.9);
    EXPECT_EQ(lambda_at(m, {0.1, 0.2}), m.lambda({0.1, 0.2}));
}

TEST(Metrics, GradientExamples) {
    const Point2 g0 = MetricModel::euclidean().grad_lambda({0.5, 0.1});
    EXPECT_EQ(g0.x, 0.0);
    EXPECT_EQ(g0.y, 0.0);
    const Point2 g1 = MetricModel::constant_positive(1.6).grad_lambda({0.0, 0.0});
    EXPECT_NEAR(g1.x, 0.0, 1e-15);
    EXPECT_NEAR(g1.y, 0.0, 1e-15);
    const Point2 g2 = MetricModel::lens(1.2).grad_lambda({0.2, 0.0});
    EXPECT_NEAR(g2.x, 0.0, 1e-15);
    EXPECT_NEAR(g2.y, 0.0, 1e-15);
}

TEST(Metrics, CurvatureExamples) {
    EXPECT_NEAR(MetricModel::constant_positive(2.0).curvature({0.3, 0.1}), 0.25, 1e-14);
    EXPECT_NEAR(MetricModel::constant_negative(1.2).curvature({-0.2, 0.5}), -1.0 / 1.44, 1e-14);
    EXPECT_EQ(MetricModel::euclidean().curvature({0.1, 0.1}), 0.0);
}

TEST(Metrics, ConstantCurvatureIsConstant) {
    for (const auto& m : {MetricModel::constant_positive(1.6), MetricModel::constant_negative(1.6)}) {
        const double k0 = m.curvature({0.0, 0.0});
        for (const auto& p : interior_points()) {
            EXPECT_NEAR(m.curvature(p), k0, 1e-13);
        }
    }
}

TEST(Metrics, FlowSampleMatchesSample) {
    for (const auto& m : all_families()) {
        for (const auto& p : interior_points()) {
            const auto s = m.sample(p);
            const auto f = m.flow(p);
            EXPECT_NEAR(f.speed, std::exp(-s.lambda), 1e-14);
            EXPECT_NEAR(f.dlambda_dx, s.dlambda_dx, 1e-14);
            EXPECT_NEAR(f.dlambda_dy, s.dlambda_dy, 1e-14);
        }
    }
}

TEST(Metrics, GradientMatchesCentredDifferencesAtSecondOrder) {
    for (const auto& m : all_families()) {
        if (m.is_euclidean()) continue;
        double err[2] = {0.0, 0.0};
        for (int level = 0; level < 2; ++level) {
            const double h = level == 0 ? 1e-2 : 5e-3;
            for (const auto& p : interior_points()) {
                const Point2 g = m.grad_lambda(p);
                const double gx = (m.lambda({p.x + h, p.y}) - m.lambda({p.x - h, p.y})) / (2.0 * h);
                const double gy = (m.lambda({p.x, p.y + h}) - m.lambda({p.x, p.y - h})) / (2.0 * h);
                err[level] = std::max({err[level], std::abs(gx - g.x), std::abs(gy - g.y)});
            }
        }
        EXPECT_LT(err[1], 1e-3) << m.to_string();
        EXPECT_NEAR(err[0] / err[1], 4.0, 0.5) << m.to_string();
    }
}

TEST(Metrics, CurvatureMatchesFivePointLaplacianAtSecondOrder) {
    for (const auto& m : all_families()) {
        if (m.is_euclidean()) continue;
        double err[2] = {0.0, 0.0};
        for (int level = 0; level < 2; ++level) {
            const double h = level == 0 ? 1e-2 : 5e-3;
            for (const auto& p : interior_points()) {
                err[level] = std::max(err[level], std::abs(m.curvature(p) - fd_curvature(m, p, h)));
            }
        }
        EXPECT_LT(err[1], 1e-2) << m.to_string();
        EXPECT_NEAR(err[0] / err[1], 4.0, 0.5) << m.to_string();
    }
}

TEST(Metrics, ParseSelections) {
    EXPECT_TRUE(parse_metric("euclidean").is_euclidean());
    EXPECT_EQ(parse_metric("cpc:2").to_string(), MetricModel::constant_positive(2.0).to_string());
    EXPECT_NEAR(parse_metric("cnc:1.2").curvature({0.0, 0.0}), -1.0 / 1.44, 1e-14);
    const auto lens = parse_metric("lens:0.9", {0.3, 0.1, -0.1});
    const auto& params = std::get<Lens>(lens.family());
    EXPECT_EQ(params.ell, 0.9);
    EXPECT_EQ(params.sigma, 0.3);
    EXPECT_EQ(params.center.x, 0.1);
    EXPECT_EQ(params.center.y, -0.1);
    EXPECT_EQ(parse_metric(MetricModel::lens(0.6).to_string()).to_string(),
              MetricModel::lens(0.6).to_string());
}

TEST(Metrics, RejectsInvalidSelections) {
    EXPECT_THROW(parse_metric("sphere:2"), std::invalid_argument);
    EXPECT_THROW(parse_metric("cpc:"), std::invalid_argument);
    EXPECT_THROW(parse_metric("cpc:2x"), std::invalid_argument);
    EXPECT_THROW(parse_metric("cpc:1.0"), std::invalid_argument);
    EXPECT_THROW(MetricModel::constant_negative(0.5), std::invalid_argument);
    EXPECT_THROW(MetricModel::lens(-0.1), std::invalid_argument);
    EXPECT_THROW(MetricModel::lens(0.3, 0.0), std::invalid_argument);
}

TEST(Metrics, XPerpIsTheBracketOfXAndV) {
    // For u = f(x) e^{il theta}, [X, V] u = X(il u) - V(X u). Compare against
    // the closed-form X_perp applied to the same jet.
    const auto m = MetricModel::lens(0.9);
    const Point2 p{0.3, -0.2};
    const int l = 3;
    const double fx = 0.7, fy = -1.1, f0 = 0.4;
    for (double theta : {0.0, 0.9, 2.5, 4.0}) {
        const Complex e = std::polar(1.0, l * theta);
        const FiberJet u{f0 * e, fx * e, fy * e, Complex(0.0, l) * f0 * e};
        // X u as a function of theta: e^{-lambda}(cos fx + sin fy + (-sin lx + cos ly) il f0) e^{il theta}.
        const auto s = m.sample(p);
        const auto xu_theta = [&](double t) {
            return std::exp(-s.lambda) *
                   (std::cos(t) * fx + std::sin(t) * fy +
                    (-std::sin(t) * s.dlambda_dx + std::cos(t) * s.dlambda_dy) * Complex(0.0, l) * f0) *
                   std::polar(1.0, l * t);
        };
        const double h = 1e-5;
        const Complex v_xu = (xu_theta(theta + h) - xu_theta(theta - h)) / (2.0 * h);
        const FiberJet ilu{Complex(0.0, l) * u.value, Complex(0.0, l) * u.d_dx,
                           Complex(0.0, l) * u.d_dy, Complex(0.0, l) * u.d_dtheta};
        const Complex bracket = apply_X(m, p, theta, ilu) - v_xu;
        EXPECT_NEAR(std::abs(bracket - apply_X_perp(m, p, theta, u)), 0.0, 1e-8);
    }
}
