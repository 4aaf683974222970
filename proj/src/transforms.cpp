#include "geoxray/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "geoxray/io.hpp"

namespace geoxray {

std::size_t Sinogram::missing_count() const {
    return static_cast<std::size_t>(std::count(missing_.begin(), missing_.end(), 1));
}

namespace {

/// Runs `integrand(state)` along every grid ray and stores the left-endpoint sum.
template <class Integrand>
Sinogram integrate_rays(const MetricModel& m, const InfluxGrid& g, double dt,
                        Integrand&& integrand) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("forward transform requires dt > 0");
    }
    Sinogram out(g);
    const std::size_t max_steps = default_max_steps(dt);
    const auto nb = static_cast<std::ptrdiff_t>(g.num_betas());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t ib = 0; ib < nb; ++ib) {
        const auto i = static_cast<std::size_t>(ib);
        for (std::size_t j = 0; j < g.num_alphas(); ++j) {
            Complex sum{};
            Complex last{};
            const RayExit e = march_geodesic(m, influx_state(g.beta(i), g.alpha(j)), dt, max_steps,
                                             [&](std::size_t, const PhaseState& s) {
                                                 last = integrand(s);
                                                 sum += last;
                                             });
            if (e.trapped) {
                out.mark_missing(i, j);
                continue;
            }
            // Every sample carries weight dt except the truncated final cell.
            out(i, j) = dt * (sum - (1.0 - e.fraction) * last);
        }
    }
    return out;
}

}  // namespace

Sinogram forward_Ik(const MetricModel& m, const ScalarGrid& f, int k, const InfluxGrid& g,
                    double dt) {
    const double kd = k;
    return integrate_rays(m, g, dt, [&](const PhaseState& s) {
        const Complex v = f.sample(s.position());
        return v == Complex{} ? v : v * std::polar(1.0, kd * s.theta);
    });
}

Sinogram forward_Ikperp(const MetricModel& m, const ScalarGrid& f, int k, const InfluxGrid& g,
                        double dt) {
    const double kd = k;
    return integrate_rays(m, g, dt, [&](const PhaseState& s) {
        const double c = std::cos(s.theta);
        const double sn = std::sin(s.theta);
        // x^{p,+-} = x^p -/+ dt * (-sin, cos).
        const Point2 plus{s.x + dt * sn, s.y - dt * c};
        const Point2 minus{s.x - dt * sn, s.y + dt * c};
        const Complex fp = f.sample(plus);
        const Complex fm = f.sample(minus);
        const Complex f0 = f.sample(s.position());
        if (fp == Complex{} && fm == Complex{} && f0 == Complex{}) {
            return Complex{};
        }
        const MetricSample ms = m.sample(s.position());
        const double along = c * ms.dlambda_dx + sn * ms.dlambda_dy;
        const Complex bracket = (fp - fm) / (2.0 * dt) + Complex(0.0, kd) * along * f0;
        return std::exp(-ms.lambda) * std::polar(1.0, kd * s.theta) * bracket;
    });
}

Complex ray_integral_general(const MetricModel& m, const PhaseFunction& u, double beta,
                             double alpha, double dt) {
    Complex sum{};
    Complex last{};
    const RayExit e = march_geodesic(m, influx_state(beta, alpha), dt, default_max_steps(dt),
                                     [&](std::size_t, const PhaseState& s) {
                                         last = u(s.position(), s.theta);
                                         sum += last;
                                     });
    if (e.trapped) {
        throw TrappedRay();
    }
    return dt * (sum - (1.0 - e.fraction) * last);
}

void write_sinogram_csv(const std::string& stem, const Sinogram& s, const SinogramHeader& header) {
    io::Table re;
    re.header = {{"n", std::to_string(header.n)},
                 {"k", std::to_string(header.k)},
                 {"metric", header.metric},
                 {"dt", io::format_double(header.dt)}};
    io::Table im;
    im.header = re.header;
    re.rows = im.rows = s.grid().num_betas();
    re.cols = im.cols = s.grid().num_alphas();
    for (std::size_t idx = 0; idx < s.values().size(); ++idx) {
        const bool miss = s.missing()[idx] != 0;
        re.values.push_back(miss ? std::nan("") : s.values()[idx].real());
        im.values.push_back(miss ? std::nan("") : s.values()[idx].imag());
    }
    io::write_table(stem + "_real.csv", re);
    io::write_table(stem + "_imag.csv", im);
}

Sinogram read_sinogram_csv(const std::string& stem, SinogramHeader* header) {
    const io::Table re = io::read_table(stem + "_real.csv");
    const io::Table im = io::read_table(stem + "_imag.csv");
    if (re.rows != 2 * re.cols || im.rows != re.rows || im.cols != re.cols) {
        throw std::runtime_error(stem + ": sinogram tables must be 2n x n and matching");
    }
    Sinogram s{InfluxGrid(re.cols)};
    for (std::size_t idx = 0; idx < re.values.size(); ++idx) {
        if (std::isnan(re.values[idx]) || std::isnan(im.values[idx])) {
            s.mark_missing(idx / re.cols, idx % re.cols);
        } else {
            s.values()[idx] = {re.values[idx], im.values[idx]};
        }
    }
    if (header != nullptr) {
        header->n = re.cols;
        header->k = re.header.count("k") ? std::stoi(re.header.at("k")) : 0;
        header->metric = re.header.count("metric") ? re.header.at("metric") : "";
        header->dt = re.header.count("dt") ? std::stod(re.header.at("dt")) : 0.0;
    }
    return s;
}

}  // namespace geoxray
