#include "geoxray/reconstruction.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace geoxray {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Derivative along x (axis 0) or y (axis 1) of a field known on the disc
/// cells of `table`; central where both neighbours exist, one-sided otherwise.
Complex grid_derivative(const BasepointTable& table, const std::vector<Complex>& field,
                        std::size_t ix, std::size_t iy, int axis, double h) {
    const std::size_t n = table.n();
    auto at = [&](std::size_t jx, std::size_t jy) -> std::optional<Complex> {
        if (jx >= n || jy >= n) {
            return std::nullopt;
        }
        const std::size_t s = table.slot(jy * n + jx);
        if (s == BasepointTable::npos) {
            return std::nullopt;
        }
        return field[s];
    };
    const std::size_t mx = axis == 0 ? ix - 1 : ix;
    const std::size_t my = axis == 0 ? iy : iy - 1;
    const std::size_t px = axis == 0 ? ix + 1 : ix;
    const std::size_t py = axis == 0 ? iy : iy + 1;
    const auto minus = at(mx, my);
    const auto plus = at(px, py);
    const auto centre = at(ix, iy);
    if (minus && plus) {
        return (*plus - *minus) / (2.0 * h);
    }
    if (plus && centre) {
        return (*plus - *centre) / h;
    }
    if (minus && centre) {
        return (*centre - *minus) / h;
    }
    return {};
}

}  // namespace

void ReconstructionConfig::validate() const {
    if (n < 8) {
        throw std::invalid_argument("reconstruction: n must be >= 8");
    }
    if (!(dt > 0.0)) {
        throw std::invalid_argument("reconstruction: dt must be positive");
    }
    if (iters < 1) {
        throw std::invalid_argument("reconstruction: iters must be >= 1");
    }
    if (fiber_count() % 2 != 0) {
        throw std::invalid_argument("reconstruction: n_theta must be even");
    }
}

int extension_parity(InversionMode mode, int k) {
    const bool k_even = k % 2 == 0;
    if (mode == InversionMode::InvertIk) {
        return k_even ? -1 : 1;
    }
    return k_even ? 1 : -1;
}

Complex interpolate_influx(const Sinogram& w, double beta, double alpha) {
    const InfluxGrid& g = w.grid();
    const std::size_t nb = g.num_betas();
    const std::size_t na = g.num_alphas();
    const double fb = wrap_positive(beta) / g.beta_step();
    auto i0 = static_cast<std::size_t>(fb);
    const double tb = fb - static_cast<double>(i0);
    i0 %= nb;
    const std::size_t i1 = (i0 + 1) % nb;
    const double fa = std::clamp((alpha - g.alpha(0)) / g.alpha_step(), 0.0,
                                 static_cast<double>(na - 1));
    const std::size_t j0 = std::min(static_cast<std::size_t>(fa), na - 2);
    const double ta = fa - static_cast<double>(j0);
    return (1.0 - tb) * ((1.0 - ta) * w(i0, j0) + ta * w(i0, j0 + 1)) +
           tb * ((1.0 - ta) * w(i1, j0) + ta * w(i1, j0 + 1));
}

Complex transport_value(const MetricModel& m, const Sinogram& w, Point2 x, double theta,
                        double dt) {
    const auto base = try_trace_backward_to_influx(m, x, theta, dt, default_max_steps(dt));
    if (!base) {
        return {};
    }
    return interpolate_influx(w, base->beta, base->alpha);
}

BasepointTable::BasepointTable(const MetricModel& m, std::size_t n, std::size_t n_theta, double dt)
    : n_(n), n_theta_(n_theta), dt_(dt), slot_(n * n, npos) {
    if (n_theta == 0) {
        throw std::invalid_argument("BasepointTable: n_theta must be positive");
    }
    const ScalarGrid layout(n, 1.0);
    for (std::size_t iy = 0; iy < n; ++iy) {
        for (std::size_t ix = 0; ix < n; ++ix) {
            if (layout.in_mask(ix, iy)) {
                slot_[layout.index(ix, iy)] = cells_.size();
                cells_.push_back(layout.index(ix, iy));
            }
        }
    }
    basepoints_.resize(cells_.size() * n_theta);
    trapped_.assign(cells_.size() * n_theta, 0);
    const std::size_t max_steps = default_max_steps(dt);
    const auto count = static_cast<std::ptrdiff_t>(cells_.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t sc = 0; sc < count; ++sc) {
        const auto s = static_cast<std::size_t>(sc);
        const Point2 x = layout.center(cells_[s] % n, cells_[s] / n);
        for (std::size_t j = 0; j < n_theta; ++j) {
            const auto base = try_trace_backward_to_influx(m, x, theta(j), dt, max_steps);
            if (base) {
                basepoints_[s * n_theta + j] = *base;
            } else {
                trapped_[s * n_theta + j] = 1;
            }
        }
    }
    trapped_count_ = static_cast<std::size_t>(std::count(trapped_.begin(), trapped_.end(), 1));
}

double BasepointTable::theta(std::size_t j) const {
    return kTwoPi * static_cast<double>(j) / static_cast<double>(n_theta_);
}

double BasepointTable::trapped_fraction() const {
    return trapped_.empty() ? 0.0
                            : static_cast<double>(trapped_count_) / static_cast<double>(trapped_.size());
}

ApproximateInverse::ApproximateInverse(const MetricModel& m, const ReconstructionConfig& cfg)
    : metric_(m),
      cfg_((cfg.validate(), cfg)),
      grid_(cfg.n),
      table_(std::make_shared<const BasepointTable>(m, cfg.n, cfg.fiber_count(), cfg.dt)) {}

ApproximateInverse::ApproximateInverse(const MetricModel& m, const ReconstructionConfig& cfg,
                                       std::shared_ptr<const BasepointTable> table)
    : metric_(m), cfg_((cfg.validate(), cfg)), grid_(cfg.n), table_(std::move(table)) {
    if (!table_ || !table_->matches(cfg.n, cfg.fiber_count(), cfg.dt)) {
        throw std::invalid_argument("approximate inverse: basepoint table does not match config");
    }
}

ScalarGrid ApproximateInverse::empty_grid() const {
    return cartesian_grid(cfg_.n, cfg_.mask_margin());
}

Sinogram ApproximateInverse::filtered_data(const Sinogram& data, int parity) const {
    if (!(data.grid() == grid_)) {
        throw std::invalid_argument("approximate inverse: data grid does not match config n");
    }
    // The parity part of u on the boundary fiber is half the parity extension
    // of its influx trace, u vanishing on the outflux half.
    ExtendedFiberData extended = parity_extend(data, parity);
    for (auto& v : extended.values()) {
        v *= 0.5;
    }
    return restrict_to_influx(shifted_hilbert(extended, cfg_.k));
}

ScalarGrid ApproximateInverse::apply(const Sinogram& data) const {
    return cfg_.mode == InversionMode::InvertIk ? apply_f(data) : apply_h(data);
}

ScalarGrid ApproximateInverse::apply_f(const Sinogram& data) const {
    const Sinogram w = filtered_data(data, extension_parity(InversionMode::InvertIk, cfg_.k));
    const std::size_t nt = table_->n_theta();
    const double dtheta = kTwoPi / static_cast<double>(nt);
    const double kd = cfg_.k;

    std::vector<Complex> mode_weight(nt);
    std::vector<double> cos_t(nt);
    std::vector<double> sin_t(nt);
    for (std::size_t j = 0; j < nt; ++j) {
        mode_weight[j] = std::polar(dtheta, -kd * table_->theta(j));
        cos_t[j] = std::cos(table_->theta(j));
        sin_t[j] = std::sin(table_->theta(j));
    }

    const std::size_t count = table_->cells().size();
    std::vector<Complex> u(count);
    std::vector<Complex> v(count);
    std::vector<Complex> eu(count);
    std::vector<Complex> ev(count);
    const std::size_t n = cfg_.n;
    const ScalarGrid layout = empty_grid();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t sc = 0; sc < static_cast<std::ptrdiff_t>(count); ++sc) {
        const auto s = static_cast<std::size_t>(sc);
        Complex su{};
        Complex sv{};
        for (std::size_t j = 0; j < nt; ++j) {
            if (table_->trapped(s, j)) {
                continue;
            }
            const FanBeamPoint& b = table_->basepoint(s, j);
            const Complex wv = interpolate_influx(w, b.beta, b.alpha) * mode_weight[j];
            su += wv * cos_t[j];
            sv += wv * sin_t[j];
        }
        u[s] = su;
        v[s] = sv;
        const Point2 x = layout.center(table_->cells()[s] % n, table_->cells()[s] / n);
        const double el = std::exp(metric_.lambda(x));
        eu[s] = el * su;
        ev[s] = el * sv;
    }

    ScalarGrid out = empty_grid();
    const double h = out.spacing();
    const Complex ik(0.0, kd);
    for (std::size_t iy = 0; iy < n; ++iy) {
        for (std::size_t ix = 0; ix < n; ++ix) {
            if (!out.in_mask(ix, iy)) {
                continue;
            }
            const std::size_t s = table_->slot(out.index(ix, iy));
            const MetricSample ms = metric_.sample(out.center(ix, iy));
            const Complex div = -grid_derivative(*table_, ev, ix, iy, 0, h) +
                                grid_derivative(*table_, eu, ix, iy, 1, h);
            out(ix, iy) = std::exp(-2.0 * ms.lambda) / kTwoPi * div -
                          ik * std::exp(-ms.lambda) / kTwoPi *
                              (u[s] * ms.dlambda_dx + v[s] * ms.dlambda_dy);
        }
    }
    return out;
}

ScalarGrid ApproximateInverse::apply_h(const Sinogram& data) const {
    const Sinogram w = filtered_data(data, extension_parity(InversionMode::InvertIkPerp, cfg_.k));
    const std::size_t nt = table_->n_theta();
    const double dtheta = kTwoPi / static_cast<double>(nt);
    std::vector<Complex> mode_weight(nt);
    for (std::size_t j = 0; j < nt; ++j) {
        mode_weight[j] = std::polar(dtheta, -static_cast<double>(cfg_.k) * table_->theta(j));
    }
    ScalarGrid out = empty_grid();
    const std::size_t n = cfg_.n;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t row = 0; row < static_cast<std::ptrdiff_t>(n); ++row) {
        const auto iy = static_cast<std::size_t>(row);
        for (std::size_t ix = 0; ix < n; ++ix) {
            if (!out.in_mask(ix, iy)) {
                continue;
            }
            const std::size_t s = table_->slot(out.index(ix, iy));
            Complex sum{};
            for (std::size_t j = 0; j < nt; ++j) {
                if (table_->trapped(s, j)) {
                    continue;
                }
                const FanBeamPoint& b = table_->basepoint(s, j);
                sum += interpolate_influx(w, b.beta, b.alpha) * mode_weight[j];
            }
            out(ix, iy) = -sum / kTwoPi;
        }
    }
    return out;
}

Sinogram ApproximateInverse::forward(const ScalarGrid& f) const {
    return cfg_.mode == InversionMode::InvertIk ? forward_Ik(metric_, f, cfg_.k, grid_, cfg_.dt)
                                                : forward_Ikperp(metric_, f, cfg_.k, grid_, cfg_.dt);
}

ScalarGrid approx_inverse_f(const MetricModel& m, const Sinogram& data,
                            const ReconstructionConfig& cfg) {
    ReconstructionConfig c = cfg;
    c.mode = InversionMode::InvertIk;
    return ApproximateInverse(m, c).apply_f(data);
}

ScalarGrid approx_inverse_h(const MetricModel& m, const Sinogram& data,
                            const ReconstructionConfig& cfg) {
    ReconstructionConfig c = cfg;
    c.mode = InversionMode::InvertIkPerp;
    return ApproximateInverse(m, c).apply_h(data);
}

NeumannResult neumann_invert(const ApproximateInverse& op, const Sinogram& data,
                             const std::optional<ScalarGrid>& truth,
                             const IterateCallback& on_iterate) {
    const ReconstructionConfig& cfg = op.config();
    NeumannResult result;
    result.backprojection_trapped_fraction = op.table().trapped_fraction();
    auto record = [&](const ScalarGrid& s, double update, const Sinogram& forward_data) {
        if (truth) {
            result.history.rel_l2.push_back(relative_L2_error(s, *truth));
        }
        result.history.update_norm.push_back(update);
        result.history.trapped_fraction.push_back(
            static_cast<double>(forward_data.missing_count()) /
            static_cast<double>(forward_data.grid().size()));
        if (on_iterate) {
            on_iterate(result.history.update_norm.size(), s);
        }
    };

    const ScalarGrid b = op.apply(data);
    ScalarGrid s = b;
    record(s, s.l2_norm(), data);
    for (std::size_t p = 1; p < cfg.iters; ++p) {
        const Sinogram forward = op.forward(s);
        ScalarGrid next = b + s - op.apply(forward);
        const double update = (next - s).l2_norm();
        s = std::move(next);
        record(s, update, forward);
        const double norm = s.l2_norm();
        if (cfg.early_stop_tol > 0.0 && norm > 0.0 && update / norm < cfg.early_stop_tol) {
            break;
        }
    }
    result.reconstruction = std::move(s);
    return result;
}

NeumannResult neumann_invert(const MetricModel& m, const Sinogram& data,
                             const ReconstructionConfig& cfg,
                             const std::optional<ScalarGrid>& truth,
                             const IterateCallback& on_iterate) {
    return neumann_invert(ApproximateInverse(m, cfg), data, truth, on_iterate);
}

}  // namespace geoxray
