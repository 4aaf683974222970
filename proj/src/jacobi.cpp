#include "geoxray/jacobi.hpp"

#include <cmath>
#include <numbers>

#include "fft.hpp"

namespace geoxray {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct JacobiState {
    PhaseState g;
    double a;
    double a_dot;
    double b;
    double b_dot;
};

JacobiState jacobi_rhs(const MetricModel& m, const JacobiState& s) {
    const double kappa = m.curvature(s.g.position());
    return {geodesic_rhs(m, s.g), s.a_dot, -kappa * s.a, s.b_dot, -kappa * s.b};
}

JacobiState axpy(const JacobiState& s, double h, const JacobiState& d) {
    return {{s.g.x + h * d.g.x, s.g.y + h * d.g.y, s.g.theta + h * d.g.theta},
            s.a + h * d.a,
            s.a_dot + h * d.a_dot,
            s.b + h * d.b,
            s.b_dot + h * d.b_dot};
}

JacobiState jacobi_step(const MetricModel& m, const JacobiState& s, double dt) {
    const JacobiState k1 = jacobi_rhs(m, s);
    const JacobiState k2 = jacobi_rhs(m, axpy(s, 0.5 * dt, k1));
    const JacobiState k3 = jacobi_rhs(m, axpy(s, 0.5 * dt, k2));
    const JacobiState k4 = jacobi_rhs(m, axpy(s, dt, k3));
    JacobiState out = axpy(s, dt / 6.0, k1);
    out = axpy(out, dt / 3.0, k2);
    out = axpy(out, dt / 3.0, k3);
    return axpy(out, dt / 6.0, k4);
}

/// Trapezoid weights over [0, exit_time] for the samples of `path`.
double trapezoid_weight(const GeodesicPath& path, std::size_t i) {
    const std::size_t last = path.states.size() - 1;
    const double dt = path.dt;
    if (last == 0) {
        return path.exit_time;
    }
    const double tail = path.exit_time - static_cast<double>(last) * dt;
    if (i == 0) {
        return 0.5 * dt;
    }
    if (i == last) {
        return 0.5 * dt + tail;
    }
    return dt;
}

/// Cells of an n x n grid with centre radius < 1 and the inverse lookup.
struct DiscCells {
    explicit DiscCells(std::size_t n) : layout(n, 1.0), slot(n * n, npos) {
        for (std::size_t iy = 0; iy < n; ++iy) {
            for (std::size_t ix = 0; ix < n; ++ix) {
                if (layout.in_mask(ix, iy)) {
                    slot[layout.index(ix, iy)] = cells.size();
                    cells.push_back(layout.index(ix, iy));
                }
            }
        }
    }

    std::size_t lookup(std::ptrdiff_t ix, std::ptrdiff_t iy) const {
        const auto n = static_cast<std::ptrdiff_t>(layout.n());
        if (ix < 0 || iy < 0 || ix >= n || iy >= n) {
            return npos;
        }
        return slot[layout.index(static_cast<std::size_t>(ix), static_cast<std::size_t>(iy))];
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    ScalarGrid layout;
    std::vector<std::size_t> cells;
    std::vector<std::size_t> slot;
};

TransportParams resolve(const TransportParams& p, std::size_t n) {
    TransportParams out = p;
    if (out.n_theta == 0) {
        out.n_theta = 2 * n;
    }
    if (out.dt <= 0.0) {
        out.dt = 1.0 / static_cast<double>(n);
    }
    return out;
}

/// u(x, theta_j) = int g(gamma(t), alpha(t)) dt for every disc cell and fiber
/// angle, trapezoid rule with the last cell truncated at the exit.
template <class Integrand>
std::vector<Complex> transport_table(const MetricModel& m, const DiscCells& disc,
                                     const TransportParams& p, Integrand&& g) {
    const std::size_t nt = p.n_theta;
    const std::size_t n = disc.layout.n();
    std::vector<Complex> u(disc.cells.size() * nt);
    const std::size_t max_steps = default_max_steps(p.dt);
    const auto count = static_cast<std::ptrdiff_t>(disc.cells.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t sc = 0; sc < count; ++sc) {
        const auto s = static_cast<std::size_t>(sc);
        const Point2 x = disc.layout.center(disc.cells[s] % n, disc.cells[s] / n);
        for (std::size_t j = 0; j < nt; ++j) {
            const double theta = kTwoPi * static_cast<double>(j) / static_cast<double>(nt);
            Complex sum{};
            Complex first{};
            Complex last{};
            const RayExit e = march_geodesic(m, {x.x, x.y, theta}, p.dt, max_steps,
                                             [&](std::size_t q, const PhaseState& st) {
                                                 last = g(st);
                                                 if (q == 0) {
                                                     first = last;
                                                 }
                                                 sum += last;
                                             });
            if (e.trapped) {
                continue;
            }
            // Trapezoid on [0, t_L], then the last sample held over the partial cell.
            u[s * nt + j] = p.dt * (sum - 0.5 * first - 0.5 * last) + e.fraction * p.dt * last;
        }
    }
    return u;
}

Complex kth_coefficient(const Complex* samples, std::size_t nt, int k) {
    Complex sum{};
    for (std::size_t j = 0; j < nt; ++j) {
        const double theta = kTwoPi * static_cast<double>(j) / static_cast<double>(nt);
        sum += samples[j] * std::polar(1.0, -static_cast<double>(k) * theta);
    }
    return sum / static_cast<double>(nt);
}

}  // namespace

JacobiPair jacobi_fields(const MetricModel& m, const GeodesicPath& path) {
    if (path.states.empty()) {
        throw std::invalid_argument("jacobi_fields: empty path");
    }
    const std::size_t count = path.states.size();
    JacobiPair jp;
    jp.dt = path.dt;
    jp.a.reserve(count);
    jp.a_dot.reserve(count);
    jp.b.reserve(count);
    jp.b_dot.reserve(count);
    JacobiState s{path.states.front(), 1.0, 0.0, 0.0, 1.0};
    for (std::size_t i = 0; i < count; ++i) {
        if (i > 0) {
            s = jacobi_step(m, s, path.dt);
        }
        jp.a.push_back(s.a);
        jp.a_dot.push_back(s.a_dot);
        jp.b.push_back(s.b);
        jp.b_dot.push_back(s.b_dot);
    }
    return jp;
}

ConstCurvatureAB const_curvature_ab(double kappa, double t) {
    if (kappa > 0.0) {
        const double p = std::sqrt(kappa);
        return {std::cos(p * t), std::sin(p * t) / p};
    }
    if (kappa < 0.0) {
        const double p = std::sqrt(-kappa);
        return {std::cosh(p * t), std::sinh(p * t) / p};
    }
    return {1.0, t};
}

Complex const_curvature_kernel(double kappa, int k, double t) {
    const Complex ik(0.0, static_cast<double>(k));
    if (kappa > 0.0) {
        return -ik * kappa / (1.0 + std::cos(std::sqrt(kappa) * t));
    }
    if (kappa < 0.0) {
        return ik * (-kappa) / (1.0 + std::cosh(std::sqrt(-kappa) * t));
    }
    return {};
}

KernelSamples kernel_qk(const MetricModel& m, const GeodesicPath& path, const JacobiPair& jp,
                        int k, double dtheta) {
    if (path.states.empty() || jp.size() != path.states.size()) {
        throw std::invalid_argument("kernel_qk: path and Jacobi fields do not match");
    }
    const PhaseState& start = path.states.front();
    const std::size_t max_steps = path.states.size() + 8;
    const GeodesicPath plus = trace_forward(m, start.position(), start.theta + dtheta, path.dt, max_steps);
    const GeodesicPath minus = trace_forward(m, start.position(), start.theta - dtheta, path.dt, max_steps);
    const JacobiPair jp_plus = jacobi_fields(m, plus);
    const JacobiPair jp_minus = jacobi_fields(m, minus);
    const std::size_t count = std::min({jp.size(), jp_plus.size(), jp_minus.size()});

    const Complex ik(0.0, static_cast<double>(k));
    KernelSamples out;
    for (std::size_t i = 1; i < count; ++i) {
        const double b = jp.b[i];
        if (std::abs(b) < 1e-12 || std::abs(jp_plus.b[i]) < 1e-12 || std::abs(jp_minus.b[i]) < 1e-12) {
            throw SingularB();
        }
        const double d_ratio =
            (jp_plus.a[i] / jp_plus.b[i] - jp_minus.a[i] / jp_minus.b[i]) / (2.0 * dtheta);
        const Complex phase = std::polar(1.0, static_cast<double>(k) * (path.states[i].theta - start.theta));
        const Complex q = (-d_ratio + ik * (jp.a[i] - 1.0) / b) * phase;
        out.t.push_back(jp.time(i));
        out.q.push_back(q);
        out.q_over_b.push_back(q / b);
    }
    return out;
}

KernelSamples kernel_qk(const MetricModel& m, Point2 x, double theta, int k, double dt,
                        double dtheta) {
    const GeodesicPath path = trace_forward(m, x, theta, dt, default_max_steps(dt));
    if (path.trapped) {
        throw TrappedRay();
    }
    return kernel_qk(m, path, jacobi_fields(m, path), k, dtheta);
}

Complex apply_Wk_kernel(const MetricModel& m, const ScalarGrid& f, int k, Point2 x,
                        std::size_t n_theta, double dt, double dtheta) {
    Complex total{};
    const double step = kTwoPi / static_cast<double>(n_theta);
    for (std::size_t j = 0; j < n_theta; ++j) {
        const GeodesicPath path = trace_forward(m, x, step * static_cast<double>(j), dt, default_max_steps(dt));
        if (path.trapped) {
            throw TrappedRay();
        }
        const KernelSamples ks = kernel_qk(m, path, jacobi_fields(m, path), k, dtheta);
        // q vanishes at t = 0, so the dropped sample carries no weight.
        for (std::size_t i = 0; i < ks.q.size(); ++i) {
            const std::size_t sample = i + 1;
            total += trapezoid_weight(path, sample) * ks.q[i] * f.sample(path.states[sample].position());
        }
    }
    // a(0) = 1 describes the shift along -X_perp (X_perp = [X, V] moves the
    // basepoint along -gamma'^perp), so q_k integrates to -W_k.
    return -total * step / kTwoPi;
}

ScalarGrid apply_Wk_transport(const MetricModel& m, const ScalarGrid& f, int k,
                              const TransportParams& params) {
    const std::size_t n = f.n();
    const TransportParams p = resolve(params, n);
    const std::size_t nt = p.n_theta;
    const DiscCells disc(n);
    const double kd = static_cast<double>(k);

    std::vector<Complex> u = transport_table(m, disc, p, [&](const PhaseState& s) {
        return f.sample(s.position()) * std::polar(1.0, kd * s.theta);
    });

    // Spectral d/dtheta over each fiber.
    std::vector<Complex> u_theta = u;
    {
        const detail::FftPlan plan(nt, disc.cells.size());
        plan.forward(u_theta);
        for (std::size_t s = 0; s < disc.cells.size(); ++s) {
            for (std::size_t b = 0; b < nt; ++b) {
                const long l = detail::signed_mode(b, nt);
                const double factor = 2 * static_cast<std::size_t>(std::labs(l)) == nt ? 0.0 : static_cast<double>(l);
                u_theta[s * nt + b] *= Complex(0.0, factor / static_cast<double>(nt));
            }
        }
        plan.backward(u_theta);
    }

    ScalarGrid out(n, 1.0);
    const double h = out.spacing();
    const auto count = static_cast<std::ptrdiff_t>(disc.cells.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t sc = 0; sc < count; ++sc) {
        const auto s = static_cast<std::size_t>(sc);
        const auto ix = static_cast<std::ptrdiff_t>(disc.cells[s] % n);
        const auto iy = static_cast<std::ptrdiff_t>(disc.cells[s] / n);
        const MetricSample ms = m.sample(disc.layout.center(static_cast<std::size_t>(ix), static_cast<std::size_t>(iy)));
        const double speed = std::exp(-ms.lambda);

        // Neighbour slots and finite-difference weights along x and y.
        auto stencil = [&](std::size_t sm, std::size_t sp, double& wm, double& wc, double& wp) {
            wm = wc = wp = 0.0;
            if (sm != DiscCells::npos && sp != DiscCells::npos) {
                wm = -0.5 / h;
                wp = 0.5 / h;
            } else if (sp != DiscCells::npos) {
                wc = -1.0 / h;
                wp = 1.0 / h;
            } else if (sm != DiscCells::npos) {
                wm = -1.0 / h;
                wc = 1.0 / h;
            }
        };
        const std::size_t xm = disc.lookup(ix - 1, iy);
        const std::size_t xp = disc.lookup(ix + 1, iy);
        const std::size_t ym = disc.lookup(ix, iy - 1);
        const std::size_t yp = disc.lookup(ix, iy + 1);
        double axm, axc, axp, aym, ayc, ayp;
        stencil(xm, xp, axm, axc, axp);
        stencil(ym, yp, aym, ayc, ayp);
        auto value = [&](std::size_t slot, std::size_t j) {
            return slot == DiscCells::npos ? Complex{} : u[slot * nt + j];
        };

        Complex coefficient{};
        for (std::size_t j = 0; j < nt; ++j) {
            const double theta = kTwoPi * static_cast<double>(j) / static_cast<double>(nt);
            const double c = std::cos(theta);
            const double sn = std::sin(theta);
            const Complex ux = axm * value(xm, j) + axc * u[s * nt + j] + axp * value(xp, j);
            const Complex uy = aym * value(ym, j) + ayc * u[s * nt + j] + ayp * value(yp, j);
            const Complex ut = u_theta[s * nt + j];
            const Complex xperp =
                -speed * (-sn * ux + c * uy - (c * ms.dlambda_dx + sn * ms.dlambda_dy) * ut);
            coefficient += xperp * std::polar(1.0, -kd * theta);
        }
        out.values()[disc.cells[s]] = coefficient / static_cast<double>(nt);
    }
    return out;
}

ScalarGrid apply_Wk_adjoint_transport(const MetricModel& m, const ScalarGrid& h, int k,
                                      const TransportParams& params) {
    const std::size_t n = h.n();
    const TransportParams p = resolve(params, n);
    const std::size_t nt = p.n_theta;
    const DiscCells disc(n);
    const double kd = static_cast<double>(k);

    // Centred differences of h over the whole square (one-sided at its edge).
    ScalarGrid hx = unmasked_grid(n);
    ScalarGrid hy = unmasked_grid(n);
    const double sp = h.spacing();
    for (std::size_t iy = 0; iy < n; ++iy) {
        for (std::size_t ix = 0; ix < n; ++ix) {
            const std::size_t x0 = ix == 0 ? 0 : ix - 1;
            const std::size_t x1 = ix + 1 == n ? ix : ix + 1;
            const std::size_t y0 = iy == 0 ? 0 : iy - 1;
            const std::size_t y1 = iy + 1 == n ? iy : iy + 1;
            hx(ix, iy) = (h(x1, iy) - h(x0, iy)) / (static_cast<double>(x1 - x0) * sp);
            hy(ix, iy) = (h(ix, y1) - h(ix, y0)) / (static_cast<double>(y1 - y0) * sp);
        }
    }

    const Complex ik(0.0, kd);
    std::vector<Complex> u = transport_table(m, disc, p, [&](const PhaseState& s) {
        const Point2 y = s.position();
        const FlowSample fs = m.flow(y);
        const double c = std::cos(s.theta);
        const double sn = std::sin(s.theta);
        const Complex grad_perp = -sn * hx.sample(y) + c * hy.sample(y);
        const Complex body = -grad_perp + ik * (c * fs.dlambda_dx + sn * fs.dlambda_dy) * h.sample(y);
        return fs.speed * std::polar(1.0, kd * s.theta) * body;
    });

    ScalarGrid out(n, 1.0);
    for (std::size_t s = 0; s < disc.cells.size(); ++s) {
        out.values()[disc.cells[s]] = kth_coefficient(u.data() + s * nt, nt, k);
    }
    return out;
}

Complex weighted_inner(const MetricModel& m, const ScalarGrid& f, const ScalarGrid& h) {
    if (f.n() != h.n()) {
        throw std::invalid_argument("weighted_inner: grid sizes differ");
    }
    Complex sum{};
    const double area = f.spacing() * f.spacing();
    for (std::size_t iy = 0; iy < f.n(); ++iy) {
        for (std::size_t ix = 0; ix < f.n(); ++ix) {
            if (f.in_mask(ix, iy)) {
                sum += f(ix, iy) * std::conj(h(ix, iy)) *
                       std::exp(2.0 * m.lambda(f.center(ix, iy))) * area;
            }
        }
    }
    return sum;
}

double weighted_norm(const MetricModel& m, const ScalarGrid& f) {
    return std::sqrt(std::max(weighted_inner(m, f, f).real(), 0.0));
}

double estimate_Wk_norm(const MetricModel& m, const ScalarGrid& start, int k,
                        std::size_t iterations, const TransportParams& params) {
    auto restrict = [&](const ScalarGrid& g) {
        ScalarGrid out = start;
        for (std::size_t i = 0; i < out.values().size(); ++i) {
            out.values()[i] = g.values()[i];
        }
        out.apply_mask();
        return out;
    };
    ScalarGrid v = start;
    double estimate = 0.0;
    for (std::size_t it = 0; it <= iterations; ++it) {
        const double nv = weighted_norm(m, v);
        if (nv == 0.0) {
            return 0.0;
        }
        v *= Complex(1.0 / nv);
        const ScalarGrid wv = restrict(apply_Wk_transport(m, v, k, params));
        estimate = weighted_norm(m, wv);
        if (it == iterations) {
            break;
        }
        v = restrict(apply_Wk_adjoint_transport(m, wv, k, params));
    }
    return estimate;
}

double geodesic_polar_integral(const MetricModel& m, const std::function<double(Point2)>& f,
                               Point2 x, std::size_t n_theta, double dt) {
    const double step = kTwoPi / static_cast<double>(n_theta);
    double total = 0.0;
    for (std::size_t j = 0; j < n_theta; ++j) {
        const GeodesicPath path = trace_forward(m, x, step * static_cast<double>(j), dt, default_max_steps(dt));
        if (path.trapped) {
            throw TrappedRay();
        }
        const JacobiPair jp = jacobi_fields(m, path);
        for (std::size_t i = 0; i < path.states.size(); ++i) {
            total += trapezoid_weight(path, i) * f(path.states[i].position()) * jp.b[i];
        }
    }
    return total * step;
}

double cartesian_volume_integral(const MetricModel& m, const std::function<double(Point2)>& f,
                                 std::size_t n) {
    const ScalarGrid layout(n, 1.0);
    const double area = layout.spacing() * layout.spacing();
    double total = 0.0;
    for (std::size_t iy = 0; iy < n; ++iy) {
        for (std::size_t ix = 0; ix < n; ++ix) {
            if (layout.in_mask(ix, iy)) {
                const Point2 c = layout.center(ix, iy);
                total += f(c) * std::exp(2.0 * m.lambda(c)) * area;
            }
        }
    }
    return total;
}

std::vector<double> lambda_rate(const MetricModel& m, const GeodesicPath& path) {
    std::vector<double> rate;
    rate.reserve(path.states.size());
    for (const PhaseState& s : path.states) {
        const FlowSample fs = m.flow(s.position());
        rate.push_back(fs.speed * (std::cos(s.theta) * fs.dlambda_dx + std::sin(s.theta) * fs.dlambda_dy));
    }
    return rate;
}

AlphaDerivatives alpha_derivatives_jacobi(const MetricModel& m, const GeodesicPath& path,
                                          const JacobiPair& jp) {
    const std::vector<double> rate = lambda_rate(m, path);
    AlphaDerivatives out;
    for (std::size_t i = 0; i < jp.size(); ++i) {
        out.x_perp_alpha.push_back(jp.a_dot[i] - jp.a[i] * rate[i]);
        out.d_theta_alpha.push_back(jp.b_dot[i] - jp.b[i] * rate[i]);
    }
    return out;
}

AlphaDerivatives alpha_derivatives_shifted(const MetricModel& m, Point2 x, double theta,
                                           double dt, std::size_t samples, double shift) {
    const std::size_t max_steps = samples + 8;
    auto directions = [&](Point2 p, double th) {
        std::vector<double> out;
        const GeodesicPath path = trace_forward(m, p, th, dt, max_steps);
        for (const PhaseState& s : path.states) {
            out.push_back(s.theta);
        }
        return out;
    };
    // The transverse field whose Jacobi field starts at a(0) = 1: it moves the
    // basepoint along +gamma'^perp, i.e. -X_perp with X_perp = [X, V].
    const FlowSample fs = m.flow(x);
    const double c = std::cos(theta);
    const double sn = std::sin(theta);
    const Point2 dx{-fs.speed * sn, fs.speed * c};
    const double dth = -fs.speed * (c * fs.dlambda_dx + sn * fs.dlambda_dy);

    const auto perp_plus = directions(x + shift * dx, theta + shift * dth);
    const auto perp_minus = directions(x - shift * dx, theta - shift * dth);
    const auto fiber_plus = directions(x, theta + shift);
    const auto fiber_minus = directions(x, theta - shift);
    const std::size_t count = std::min({samples, perp_plus.size(), perp_minus.size(),
                                        fiber_plus.size(), fiber_minus.size()});
    AlphaDerivatives out;
    for (std::size_t i = 0; i < count; ++i) {
        out.x_perp_alpha.push_back((perp_plus[i] - perp_minus[i]) / (2.0 * shift));
        out.d_theta_alpha.push_back((fiber_plus[i] - fiber_minus[i]) / (2.0 * shift));
    }
    return out;
}

}  // namespace geoxray
