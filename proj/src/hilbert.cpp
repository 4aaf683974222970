#include "geoxray/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <vector>
#include <numbers>
#include <stdexcept>

#include "fft.hpp"

namespace geoxray {

namespace {

Complex hilbert_multiplier(long mode, long shift) {
    const long d = mode - shift;
    if (d == 0) {
        return {};
    }
    return d > 0 ? Complex(0.0, -1.0) : Complex(0.0, 1.0);
}

/// Applies the -i sgn(l - shift) multiplier to every row of `data`.
void apply_multiplier(std::span<Complex> data, std::size_t length, std::size_t batch, long shift) {
    const detail::FftPlan plan(length, batch);
    plan.forward(data);
    const double scale = 1.0 / static_cast<double>(length);
    for (std::size_t r = 0; r < batch; ++r) {
        for (std::size_t b = 0; b < length; ++b) {
            data[r * length + b] *= scale * hilbert_multiplier(detail::signed_mode(b, length), shift);
        }
    }
    plan.backward(data);
}

}  // namespace

ExtendedFiberData parity_extend(const Sinogram& s, int parity) {
    if (parity != 1 && parity != -1) {
        throw std::invalid_argument("parity_extend: parity must be +1 or -1");
    }
    const InfluxGrid& g = s.grid();
    ExtendedFiberData e(g, parity);
    const std::size_t n = g.n();
    for (std::size_t i = 0; i < g.num_betas(); ++i) {
        auto slice = e.slice(i);
        for (std::size_t j = 0; j < n; ++j) {
            const Complex v = s.is_missing(i, j) ? Complex{} : s(i, j);
            slice[j] = v;
            slice[n + j] = static_cast<double>(parity) * v;
        }
    }
    return e;
}

ExtendedFiberData shifted_hilbert(const ExtendedFiberData& e, int k) {
    ExtendedFiberData out = e;
    apply_multiplier(out.values(), e.fiber_size(), e.grid().num_betas(), k);
    return out;
}

ExtendedFiberData shifted_hilbert_conjugated(const ExtendedFiberData& e, int k) {
    ExtendedFiberData out = e;
    const std::size_t len = e.fiber_size();
    std::vector<Complex> phase(len);
    for (std::size_t m = 0; m < len; ++m) {
        phase[m] = std::polar(1.0, static_cast<double>(k) * e.fiber_angle(m));
    }
    for (std::size_t i = 0; i < e.grid().num_betas(); ++i) {
        auto slice = out.slice(i);
        for (std::size_t m = 0; m < len; ++m) {
            slice[m] *= std::conj(phase[m]);
        }
    }
    apply_multiplier(out.values(), len, e.grid().num_betas(), 0);
    for (std::size_t i = 0; i < e.grid().num_betas(); ++i) {
        auto slice = out.slice(i);
        for (std::size_t m = 0; m < len; ++m) {
            slice[m] *= phase[m];
        }
    }
    return out;
}

Sinogram restrict_to_influx(const ExtendedFiberData& e) {
    const InfluxGrid& g = e.grid();
    Sinogram s(g);
    for (std::size_t i = 0; i < g.num_betas(); ++i) {
        const auto slice = e.slice(i);
        for (std::size_t j = 0; j < g.num_alphas(); ++j) {
            s(i, j) = slice[j];
        }
    }
    return s;
}

void shifted_hilbert_fiber(std::span<Complex> samples, int k) {
    apply_multiplier(samples, samples.size(), 1, k);
}

Complex fiber_coefficient(std::span<const Complex> samples, int k, double phi0) {
    const std::size_t len = samples.size();
    const double step = 2.0 * std::numbers::pi / static_cast<double>(len);
    Complex sum{};
    for (std::size_t m = 0; m < len; ++m) {
        sum += samples[m] * std::polar(1.0, -static_cast<double>(k) * (phi0 + step * static_cast<double>(m)));
    }
    return sum / static_cast<double>(len);
}

namespace {

struct SyntheticMode {
    double p = 0.0;
    double q = 0.0;
    double weight = 1.0;

    Complex value(Point2 x) const {
        return weight * std::exp(Complex(0.0, p * x.x + q * x.y));
    }
};

/// Spatial jets of the modes at one point.
struct ModeJets {
    std::vector<Complex> value, dx, dy;
};

ModeJets mode_jets(const std::vector<SyntheticMode>& modes, Point2 x) {
    ModeJets j;
    for (const auto& mode : modes) {
        const Complex v = mode.value(x);
        j.value.push_back(v);
        j.dx.push_back(Complex(0.0, mode.p) * v);
        j.dy.push_back(Complex(0.0, mode.q) * v);
    }
    return j;
}

/// Jet of sum_l c_l f_l e^{il theta} with per-mode multipliers c_l.
FiberJet fiber_jet(const ModeJets& j, int bandwidth, double theta,
                   const std::vector<Complex>& multiplier) {
    FiberJet out{};
    for (int l = -bandwidth; l <= bandwidth; ++l) {
        const auto idx = static_cast<std::size_t>(l + bandwidth);
        const Complex e = multiplier[idx] * std::exp(Complex(0.0, l * theta));
        out.value += j.value[idx] * e;
        out.d_dx += j.dx[idx] * e;
        out.d_dy += j.dy[idx] * e;
        out.d_dtheta += Complex(0.0, static_cast<double>(l)) * j.value[idx] * e;
    }
    return out;
}

}  // namespace

CommutatorResidual commutator_residual(const MetricModel& m, int k, int bandwidth,
                                       std::size_t n_grid, std::size_t n_fiber, double radius) {
    if (bandwidth < 0 || n_grid == 0 ||
        n_fiber <= 2 * static_cast<std::size_t>(bandwidth + 1)) {
        throw std::invalid_argument("commutator_residual: fiber too coarse for the bandwidth");
    }
    std::vector<SyntheticMode> modes;
    for (int l = -bandwidth; l <= bandwidth; ++l) {
        modes.push_back({0.7 + 0.3 * l, -0.4 + 0.2 * l, 1.0 / (1.0 + l * l)});
    }
    const auto size = static_cast<std::size_t>(2 * bandwidth + 1);
    const std::vector<Complex> identity(size, Complex(1.0));
    std::vector<Complex> hilbert(size), only_k(size);
    for (int l = -bandwidth; l <= bandwidth; ++l) {
        const auto idx = static_cast<std::size_t>(l + bandwidth);
        hilbert[idx] = hilbert_multiplier(l, k);
        only_k[idx] = l == k ? Complex(1.0) : Complex(0.0);
    }

    CommutatorResidual r;
    const double h = 2.0 / static_cast<double>(n_grid);
    std::vector<Complex> xu(n_fiber), xpu(n_fiber), hxu(n_fiber), hxpu(n_fiber);
    std::vector<double> thetas(n_fiber);
    for (std::size_t j = 0; j < n_fiber; ++j) {
        thetas[j] = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n_fiber);
    }
    for (std::size_t iy = 0; iy < n_grid; ++iy) {
        for (std::size_t ix = 0; ix < n_grid; ++ix) {
            const Point2 x{-1.0 + (static_cast<double>(ix) + 0.5) * h,
                           -1.0 + (static_cast<double>(iy) + 0.5) * h};
            if (x.x * x.x + x.y * x.y >= radius * radius) {
                continue;
            }
            const auto jets = mode_jets(modes, x);
            for (std::size_t j = 0; j < n_fiber; ++j) {
                const auto u = fiber_jet(jets, bandwidth, thetas[j], identity);
                xu[j] = apply_X(m, x, thetas[j], u);
                xpu[j] = apply_X_perp(m, x, thetas[j], u);
                r.scale = std::max(r.scale, std::abs(xu[j]));
            }
            hxu = xu;
            hxpu = xpu;
            shifted_hilbert_fiber(hxu, k);
            shifted_hilbert_fiber(hxpu, k);
            const Complex xu_k = fiber_coefficient(xu, k, 0.0);
            const Complex xpu_k = fiber_coefficient(xpu, k, 0.0);
            for (std::size_t j = 0; j < n_fiber; ++j) {
                const double t = thetas[j];
                const auto hu = fiber_jet(jets, bandwidth, t, hilbert);
                const auto uk = fiber_jet(jets, bandwidth, t, only_k);
                const Complex ek = std::exp(Complex(0.0, k * t));
                const Complex res1 = hxu[j] - apply_X(m, x, t, hu) - apply_X_perp(m, x, t, uk) -
                                     xpu_k * ek;
                const Complex res2 = hxpu[j] - apply_X_perp(m, x, t, hu) + apply_X(m, x, t, uk) +
                                     xu_k * ek;
                r.bracket_x = std::max(r.bracket_x, std::abs(res1));
                r.bracket_x_perp = std::max(r.bracket_x_perp, std::abs(res2));
            }
        }
    }
    return r;
}

}  // namespace geoxray
