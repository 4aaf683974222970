#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "geoxray/geodesics.hpp"
#include "geoxray/grid.hpp"

namespace geoxray {

/// Transverse Jacobi fields along one geodesic, sampled at the path's steps.
///
/// a(0) = 1, a'(0) = 0 and b(0) = 0, b'(0) = 1; both solve y'' + kappa y = 0.
struct JacobiPair {
    double dt = 0.0;
    std::vector<double> a;
    std::vector<double> a_dot;
    std::vector<double> b;
    std::vector<double> b_dot;

    std::size_t size() const { return a.size(); }
    double time(std::size_t i) const { return static_cast<double>(i) * dt; }
    double wronskian(std::size_t i) const { return a[i] * b_dot[i] - b[i] * a_dot[i]; }
};

class SingularB : public std::runtime_error {
public:
    SingularB() : std::runtime_error("Jacobi field b vanished away from t = 0 (conjugate point)") {}
};

/// Integrates the Jacobi equations jointly with the geodesic, using the same
/// RK4 scheme, start state and step as `path`. Throws std::invalid_argument on
/// an empty path.
JacobiPair jacobi_fields(const MetricModel& m, const GeodesicPath& path);

/// Jacobi fields of a surface of constant curvature kappa, normalised so that
/// b'(0) = 1: (cos pt, sin(pt)/p) for kappa = p^2, (cosh pt, sinh(pt)/p) for
/// kappa = -p^2, (1, t) for kappa = 0.
struct ConstCurvatureAB {
    double a = 1.0;
    double b = 0.0;
};
ConstCurvatureAB const_curvature_ab(double kappa, double t);

/// Samples of q_k / b along one geodesic.
struct KernelSamples {
    /// Times t_i = i dt, starting at dt.
    std::vector<double> t;
    std::vector<Complex> q_over_b;
    /// q_k itself (q_over_b times b).
    std::vector<Complex> q;
};

/// q_k / b along `path` for its launch state, with d/dtheta (a / b) taken by
/// central differences over launches at theta +- dtheta. The t = 0 sample is
/// dropped. Throws SingularB if |b| < 1e-12 at some t >= dt.
KernelSamples kernel_qk(const MetricModel& m, const GeodesicPath& path, const JacobiPair& jp,
                        int k, double dtheta);

/// Convenience overload tracing the path from (x, theta) first.
KernelSamples kernel_qk(const MetricModel& m, Point2 x, double theta, int k, double dt,
                        double dtheta);

/// Closed-form q_k / b on constant curvature with the b'(0) = 1 normalisation:
/// -ik p^2 / (1 + cos pt) for kappa = p^2, ik p^2 / (1 + cosh pt) for
/// kappa = -p^2, 0 for kappa = 0; the factor e^{ik(alpha - theta)} excluded.
Complex const_curvature_kernel(double kappa, int k, double t);

/// (W~_k f)(x) from the kernel: -(1/2 pi) sum over n_theta directions of
/// int q_k f(gamma) dt. The minus sign converts the a(0) = 1 Jacobi field,
/// which follows -X_perp, to the X_perp = [X, V] used by apply_Wk_transport.
/// f is sampled bilinearly from the grid. Throws SingularB.
Complex apply_Wk_kernel(const MetricModel& m, const ScalarGrid& f, int k, Point2 x,
                        std::size_t n_theta, double dt, double dtheta = 1e-4);

/// Grid parameters of the transport-based error operators.
struct TransportParams {
    std::size_t n_theta = 0;  ///< 0 selects 2n
    double dt = 0.0;          ///< 0 selects 1/n
};

/// W_k f = (X_perp u^f)_k on the cells of `f`'s grid inside the unit disc, where
/// u^f(x, theta) = int f(gamma(t)) e^{ik alpha(t)} dt. Returns the coefficient of
/// e^{ik theta}; cells outside the unit disc are zero.
ScalarGrid apply_Wk_transport(const MetricModel& m, const ScalarGrid& f, int k,
                              const TransportParams& params = {});

/// W_k^* h = (u^{X_perp h})_k with X_perp (h e^{ik theta}) from centred grid
/// differences of h. Intended for h vanishing near the boundary.
ScalarGrid apply_Wk_adjoint_transport(const MetricModel& m, const ScalarGrid& h, int k,
                                      const TransportParams& params = {});

/// <f, h> = sum f conj(h) e^{2 lambda} h^2 over the cells of f's mask.
Complex weighted_inner(const MetricModel& m, const ScalarGrid& f, const ScalarGrid& h);
/// sqrt(<f, f>) in the same weighted product.
double weighted_norm(const MetricModel& m, const ScalarGrid& f);

/// Power-iteration estimate of ||P W_k P||, P the restriction to the mask of
/// `start` (W_k^* W_k iterated from `start`, masked after every application).
double estimate_Wk_norm(const MetricModel& m, const ScalarGrid& start, int k,
                        std::size_t iterations, const TransportParams& params = {});

/// int int f(gamma_{x,theta}(t)) b(t) dt dtheta over n_theta directions.
double geodesic_polar_integral(const MetricModel& m, const std::function<double(Point2)>& f,
                               Point2 x, std::size_t n_theta, double dt);

/// sum f e^{2 lambda} h^2 over cell centres of an n x n grid inside the unit disc.
double cartesian_volume_integral(const MetricModel& m, const std::function<double(Point2)>& f,
                                 std::size_t n);

/// d/dt (lambda o gamma) at every sample of `path`.
std::vector<double> lambda_rate(const MetricModel& m, const GeodesicPath& path);

/// X_perp alpha and d/dtheta alpha from the Jacobi fields: a' - a (lambda o gamma)'
/// and b' - b (lambda o gamma)'.
struct AlphaDerivatives {
    std::vector<double> x_perp_alpha;
    std::vector<double> d_theta_alpha;
};
AlphaDerivatives alpha_derivatives_jacobi(const MetricModel& m, const GeodesicPath& path,
                                          const JacobiPair& jp);

/// The same derivatives by central differences of the direction angle along
/// geodesics launched from states shifted by +-shift along d/dtheta and along
/// the transverse field of the a(0) = 1 Jacobi field, which is -X_perp.
AlphaDerivatives alpha_derivatives_shifted(const MetricModel& m, Point2 x, double theta,
                                           double dt, std::size_t samples, double shift);

}  // namespace geoxray
