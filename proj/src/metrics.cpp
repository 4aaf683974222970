#include "geoxray/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace geoxray {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double parse_positive(const std::string& text, const std::string& what) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("metric: cannot parse " + what + " from '" + text + "'");
    }
    if (used != text.size()) {
        throw std::invalid_argument("metric: trailing characters in '" + text + "'");
    }
    return value;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

MetricModel::MetricModel(MetricFamily family) : family_(std::move(family)) {
    std::visit(Overloaded{
                   [](const Euclidean&) {},
                   [](const ConstCurvPos& c) {
                       if (!(c.radius > 1.0)) {
                           throw std::invalid_argument("cpc metric requires R > 1");
                       }
                   },
                   [](const ConstCurvNeg& c) {
                       if (!(c.radius > 1.0)) {
                           throw std::invalid_argument("cnc metric requires R > 1");
                       }
                   },
                   [](const Lens& l) {
                       if (!(l.ell >= 0.0) || !(l.sigma > 0.0)) {
                           throw std::invalid_argument("lens metric requires ell >= 0, sigma > 0");
                       }
                   },
               },
               family_);
}

MetricModel MetricModel::constant_positive(double radius) {
    return MetricModel(ConstCurvPos{radius});
}

MetricModel MetricModel::constant_negative(double radius) {
    return MetricModel(ConstCurvNeg{radius});
}

MetricModel MetricModel::lens(double ell, double sigma, Point2 center) {
    return MetricModel(Lens{ell, sigma, center});
}

MetricSample MetricModel::sample(Point2 p) const {
    return std::visit(
        Overloaded{
            [](const Euclidean&) { return MetricSample{}; },
            [p](const ConstCurvPos& c) {
                const double r2 = c.radius * c.radius;
                const double s = p.x * p.x + p.y * p.y + r2;
                return MetricSample{std::log(2.0 * r2 / s), -2.0 * p.x / s, -2.0 * p.y / s};
            },
            [p](const ConstCurvNeg& c) {
                const double r2 = c.radius * c.radius;
                const double s = r2 - p.x * p.x - p.y * p.y;
                return MetricSample{std::log(2.0 * r2 / s), 2.0 * p.x / s, 2.0 * p.y / s};
            },
            [p](const Lens& l) {
                const double dx = p.x - l.center.x;
                const double dy = p.y - l.center.y;
                const double inv_s2 = 1.0 / (l.sigma * l.sigma);
                const double lam = 0.5 * l.ell * std::exp(-0.5 * (dx * dx + dy * dy) * inv_s2);
                return MetricSample{lam, -lam * dx * inv_s2, -lam * dy * inv_s2};
            },
        },
        family_);
}

FlowSample MetricModel::flow(Point2 p) const {
    return std::visit(
        Overloaded{
            [](const Euclidean&) { return FlowSample{}; },
            [p](const ConstCurvPos& c) {
                const double r2 = c.radius * c.radius;
                const double s = p.x * p.x + p.y * p.y + r2;
                return FlowSample{s / (2.0 * r2), -2.0 * p.x / s, -2.0 * p.y / s};
            },
            [p](const ConstCurvNeg& c) {
                const double r2 = c.radius * c.radius;
                const double s = r2 - p.x * p.x - p.y * p.y;
                return FlowSample{s / (2.0 * r2), 2.0 * p.x / s, 2.0 * p.y / s};
            },
            [p](const Lens& l) {
                const double dx = p.x - l.center.x;
                const double dy = p.y - l.center.y;
                const double inv_s2 = 1.0 / (l.sigma * l.sigma);
                const double lam = 0.5 * l.ell * std::exp(-0.5 * (dx * dx + dy * dy) * inv_s2);
                return FlowSample{std::exp(-lam), -lam * dx * inv_s2, -lam * dy * inv_s2};
            },
        },
        family_);
}

double MetricModel::lambda(Point2 p) const { return sample(p).lambda; }

Point2 MetricModel::grad_lambda(Point2 p) const {
    const auto s = sample(p);
    return {s.dlambda_dx, s.dlambda_dy};
}

double MetricModel::curvature(Point2 p) const {
    return std::visit(
        Overloaded{
            [](const Euclidean&) { return 0.0; },
            [](const ConstCurvPos& c) { return 1.0 / (c.radius * c.radius); },
            [](const ConstCurvNeg& c) { return -1.0 / (c.radius * c.radius); },
            [p](const Lens& l) {
                const double dx = p.x - l.center.x;
                const double dy = p.y - l.center.y;
                const double inv_s2 = 1.0 / (l.sigma * l.sigma);
                const double d2 = dx * dx + dy * dy;
                const double lam = 0.5 * l.ell * std::exp(-0.5 * d2 * inv_s2);
                // Laplacian of (ell/2) G with G a Gaussian of width sigma.
                const double laplacian = lam * (d2 * inv_s2 * inv_s2 - 2.0 * inv_s2);
                return -std::exp(-2.0 * lam) * laplacian;
            },
        },
        family_);
}

std::string MetricModel::to_string() const {
    return std::visit(Overloaded{
                          [](const Euclidean&) { return std::string("euclidean"); },
                          [](const ConstCurvPos& c) { return "cpc:" + format_number(c.radius); },
                          [](const ConstCurvNeg& c) { return "cnc:" + format_number(c.radius); },
                          [](const Lens& l) { return "lens:" + format_number(l.ell); },
                      },
                      family_);
}

double lambda_at(const MetricModel& m, Point2 p) { return m.lambda(p); }
Point2 grad_lambda_at(const MetricModel& m, Point2 p) { return m.grad_lambda(p); }
double curvature_at(const MetricModel& m, Point2 p) { return m.curvature(p); }

MetricModel parse_metric(const std::string& text, const LensOverrides& lens) {
    if (text == "euclidean") {
        return MetricModel::euclidean();
    }
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw std::invalid_argument("metric: unknown selection '" + text + "'");
    }
    const std::string kind = text.substr(0, colon);
    const std::string arg = text.substr(colon + 1);
    if (kind == "cpc") {
        return MetricModel::constant_positive(parse_positive(arg, "R"));
    }
    if (kind == "cnc") {
        return MetricModel::constant_negative(parse_positive(arg, "R"));
    }
    if (kind == "lens") {
        return MetricModel::lens(parse_positive(arg, "ell"), lens.sigma, {lens.cx, lens.cy});
    }
    throw std::invalid_argument("metric: unknown family '" + kind + "'");
}

std::complex<double> apply_X(const MetricModel& m, Point2 p, double theta, const FiberJet& u) {
    const auto s = m.sample(p);
    const double c = std::cos(theta);
    const double sn = std::sin(theta);
    return std::exp(-s.lambda) *
           (c * u.d_dx + sn * u.d_dy + (-sn * s.dlambda_dx + c * s.dlambda_dy) * u.d_dtheta);
}

std::complex<double> apply_X_perp(const MetricModel& m, Point2 p, double theta,
                                  const FiberJet& u) {
    const auto s = m.sample(p);
    const double c = std::cos(theta);
    const double sn = std::sin(theta);
    return -std::exp(-s.lambda) *
           (-sn * u.d_dx + c * u.d_dy - (c * s.dlambda_dx + sn * s.dlambda_dy) * u.d_dtheta);
}

}  // namespace geoxray
