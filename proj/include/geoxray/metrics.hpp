#pragma once

#include <complex>
#include <string>
#include <variant>

namespace geoxray {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }

/// Conformal factor and its gradient at one point: g = e^{2 lambda} (dx^2 + dy^2).
struct MetricSample {
    double lambda = 0.0;
    double dlambda_dx = 0.0;
    double dlambda_dy = 0.0;
};

/// e^{-lambda} and grad lambda, the quantities the geodesic flow needs.
struct FlowSample {
    double speed = 1.0;
    double dlambda_dx = 0.0;
    double dlambda_dy = 0.0;
};

struct Euclidean {};

/// g = 4R^4 / (r^2 + R^2)^2, curvature +1/R^2.
struct ConstCurvPos {
    double radius = 2.0;
};

/// g = 4R^4 / (r^2 - R^2)^2, curvature -1/R^2.
struct ConstCurvNeg {
    double radius = 2.0;
};

/// g = exp(ell * exp(-|x - c|^2 / (2 sigma^2))).
struct Lens {
    double ell = 0.0;
    double sigma = 0.25;
    Point2 center{0.2, 0.0};
};

using MetricFamily = std::variant<Euclidean, ConstCurvPos, ConstCurvNeg, Lens>;

/// Closed-form isothermal metric on the unit disc.
///
/// All quantities are analytic. Points slightly outside the disc evaluate the
/// same expressions so integrators may overshoot the boundary by a step.
class MetricModel {
public:
    MetricModel() = default;
    explicit MetricModel(MetricFamily family);

    static MetricModel euclidean() { return MetricModel(Euclidean{}); }
    static MetricModel constant_positive(double radius);
    static MetricModel constant_negative(double radius);
    static MetricModel lens(double ell, double sigma = 0.25, Point2 center = {0.2, 0.0});

    const MetricFamily& family() const { return family_; }

    MetricSample sample(Point2 p) const;
    /// Same derivatives as sample(), with e^{-lambda} in place of lambda.
    FlowSample flow(Point2 p) const;
    double lambda(Point2 p) const;
    Point2 grad_lambda(Point2 p) const;
    /// Gaussian curvature -e^{-2 lambda} Laplacian(lambda).
    double curvature(Point2 p) const;

    bool is_euclidean() const { return std::holds_alternative<Euclidean>(family_); }
    /// Canonical selection string ("euclidean", "cpc:R", "cnc:R", "lens:ell").
    std::string to_string() const;

private:
    MetricFamily family_ = Euclidean{};
};

double lambda_at(const MetricModel& m, Point2 p);
Point2 grad_lambda_at(const MetricModel& m, Point2 p);
double curvature_at(const MetricModel& m, Point2 p);

/// Lens parameters that can be overridden from a config file.
struct LensOverrides {
    double sigma = 0.25;
    double cx = 0.2;
    double cy = 0.0;
};

/// Parses "euclidean", "cpc:R", "cnc:R" or "lens:ell". Throws std::invalid_argument.
MetricModel parse_metric(const std::string& text, const LensOverrides& lens = {});

/// A function on SM together with its first derivatives at one phase point.
struct FiberJet {
    std::complex<double> value;
    std::complex<double> d_dx;
    std::complex<double> d_dy;
    std::complex<double> d_dtheta;
};

/// Geodesic vector field X applied to a jet at (p, theta).
std::complex<double> apply_X(const MetricModel& m, Point2 p, double theta, const FiberJet& u);

/// Transverse field X_perp = [X, V] applied to a jet at (p, theta).
std::complex<double> apply_X_perp(const MetricModel& m, Point2 p, double theta,
                                  const FiberJet& u);

}  // namespace geoxray
