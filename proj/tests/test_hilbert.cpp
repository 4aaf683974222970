#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "geoxray/hilbert.hpp"

using namespace geoxray;

namespace {

constexpr double kPi = std::numbers::pi;

// Slice-wise pure mode e^{il alpha} with per-slice amplitude.
ExtendedFiberData pure_mode(const InfluxGrid& g, int l, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ExtendedFiberData e(g, 1);
    for (std::size_t i = 0; i < g.num_betas(); ++i) {
        const Complex amp(u(rng), u(rng));
        auto slice = e.slice(i);
        for (std::size_t m = 0; m < e.fiber_size(); ++m) {
            slice[m] = amp * std::polar(1.0, l * e.fiber_angle(m));
        }
    }
    return e;
}

Complex multiplier(int l, int k) {
    if (l == k) return {};
    return l > k ? Complex(0.0, -1.0) : Complex(0.0, 1.0);
}

double max_gap(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

ExtendedFiberData random_band_limited(const InfluxGrid& g, int band, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ExtendedFiberData e(g, 1);
    for (int l = -band; l <= band; ++l) {
        const auto mode = pure_mode(g, l, rng);
        for (std::size_t i = 0; i < e.values().size(); ++i) e.values()[i] += mode.values()[i];
    }
    return e;
}

}  // namespace

TEST(Hilbert, ParityExtensionExamples) {
    const InfluxGrid g(8);
    Sinogram c(g);
    for (auto& v : c.values()) v = Complex(2.5, -1.0);
    const auto even = parity_extend(c, 1);
    for (const auto& v : even.values()) EXPECT_EQ(v, Complex(2.5, -1.0));
    const auto odd = parity_extend(c, -1);
    for (std::size_t i = 0; i < g.num_betas(); ++i) {
        const auto s = odd.slice(i);
        for (std::size_t m = 0; m < g.n(); ++m) {
            EXPECT_EQ(s[m], Complex(2.5, -1.0));
            EXPECT_EQ(s[m + g.n()], Complex(-2.5, 1.0));
        }
    }
    Sinogram cosine(g);
    for (std::size_t i = 0; i < g.num_betas(); ++i)
        for (std::size_t j = 0; j < g.n(); ++j) cosine(i, j) = std::cos(g.alpha(j));
    const auto ext = parity_extend(cosine, -1);
    for (std::size_t i = 0; i < g.num_betas(); ++i) {
        const auto s = ext.slice(i);
        for (std::size_t m = 0; m < ext.fiber_size(); ++m) {
            EXPECT_NEAR(s[m].real(), std::cos(ext.fiber_angle(m)), 1e-15);
        }
    }
    EXPECT_THROW(parity_extend(c, 0), std::invalid_argument);
}

TEST(Hilbert, MissingRaysExtendAsZero) {
    const InfluxGrid g(8);
    Sinogram s(g);
    for (auto& v : s.values()) v = 1.0;
    s.mark_missing(3, 2);
    const auto e = parity_extend(s, -1);
    EXPECT_EQ(e.slice(3)[2], Complex{});
    EXPECT_EQ(e.slice(3)[2 + g.n()], Complex{});
}

TEST(Hilbert, ModeActionExamples) {
    std::mt19937_64 rng(1);
    const InfluxGrid g(16);
    const int k = 3;
    for (int l : {k, k + 2, k - 1}) {
        const auto e = pure_mode(g, l, rng);
        const auto h = shifted_hilbert(e, k);
        std::vector<Complex> want = e.values();
        for (auto& v : want) v *= multiplier(l, k);
        EXPECT_LT(max_gap(h.values(), want), 1e-13) << "l=" << l;
    }
}

TEST(Hilbert, ModeActionAcrossTheBand) {
    std::mt19937_64 rng(2);
    const InfluxGrid g(16);
    for (int k : {-2, 0, 5}) {
        for (int l = k - 8; l <= k + 8; ++l) {
            if (l < -16 || l > 15) continue;
            const auto e = pure_mode(g, l, rng);
            const auto h = shifted_hilbert(e, k);
            std::vector<Complex> want = e.values();
            for (auto& v : want) v *= multiplier(l, k);
            EXPECT_LT(max_gap(h.values(), want), 1e-12) << "k=" << k << " l=" << l;
        }
    }
}

TEST(Hilbert, SquaringIdentity) {
    std::mt19937_64 rng(3);
    const InfluxGrid g(16);
    const int k = 2;
    const auto u = random_band_limited(g, 7, rng);
    const auto hh = shifted_hilbert(shifted_hilbert(u, k), k);
    // H^2 u = -u + u_k.
    std::vector<Complex> want(u.values().size());
    for (std::size_t i = 0; i < g.num_betas(); ++i) {
        const auto s = u.slice(i);
        const Complex uk = fiber_coefficient(s, k, u.fiber_angle(0));
        for (std::size_t m = 0; m < u.fiber_size(); ++m) {
            want[i * u.fiber_size() + m] = -s[m] + uk * std::polar(1.0, k * u.fiber_angle(m));
        }
    }
    EXPECT_LT(max_gap(hh.values(), want), 1e-13);
}

TEST(Hilbert, ConjugatedRouteAgrees) {
    std::mt19937_64 rng(4);
    const InfluxGrid g(16);
    const auto u = random_band_limited(g, 6, rng);
    for (int k : {0, 3, -4}) {
        EXPECT_LT(max_gap(shifted_hilbert(u, k).values(), shifted_hilbert_conjugated(u, k).values()),
                  1e-13);
    }
}

TEST(Hilbert, RestrictExamples) {
    std::mt19937_64 rng(5);
    const InfluxGrid g(8);
    Sinogram s(g);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& v : s.values()) v = Complex(u(rng), u(rng));
    for (int parity : {1, -1}) {
        EXPECT_EQ(restrict_to_influx(parity_extend(s, parity)).values(), s.values());
    }
    ExtendedFiberData c(g, 1);
    for (auto& v : c.values()) v = 4.0;
    const auto flat = restrict_to_influx(c);
    for (const auto& v : flat.values()) EXPECT_EQ(v, Complex(4.0));
    const auto mode = pure_mode(g, 3, rng);
    const auto filtered = restrict_to_influx(shifted_hilbert(mode, 3));
    for (const auto& v : filtered.values()) {
        EXPECT_LT(std::abs(v), 1e-14);
    }
}

TEST(Hilbert, RealDataSymmetry) {
    // For k = 0 the multiplier -i sgn(l) commutes with conjugation.
    std::mt19937_64 rng(6);
    const InfluxGrid g(16);
    auto u = random_band_limited(g, 5, rng);
    auto conj_u = u;
    for (auto& v : conj_u.values()) v = std::conj(v);
    const auto h = shifted_hilbert(u, 0);
    const auto hc = shifted_hilbert(conj_u, 0);
    std::vector<Complex> conj_h = h.values();
    for (auto& v : conj_h) v = std::conj(v);
    EXPECT_LT(max_gap(conj_h, hc.values()), 1e-13);
    // Real slices stay real.
    for (auto& v : u.values()) v = v.real();
    const auto real_h = shifted_hilbert(u, 0);
    for (const auto& v : real_h.values()) EXPECT_LT(std::abs(v.imag()), 1e-13);
}

TEST(Hilbert, FiberCoefficientPicksTheMode) {
    std::vector<Complex> s(12);
    const double phi0 = -0.4;
    for (std::size_t m = 0; m < s.size(); ++m) {
        const double phi = phi0 + 2.0 * kPi * m / 12.0;
        s[m] = 2.0 * std::polar(1.0, 3.0 * phi) + Complex(0.0, 1.0) * std::polar(1.0, -2.0 * phi);
    }
    EXPECT_NEAR(std::abs(fiber_coefficient(s, 3, phi0) - 2.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(fiber_coefficient(s, -2, phi0) - Complex(0.0, 1.0)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(fiber_coefficient(s, 1, phi0)), 0.0, 1e-14);
}

TEST(Hilbert, CommutatorIdentities) {
    for (const auto& m : {MetricModel::euclidean(), MetricModel::constant_positive(1.2),
                          MetricModel::constant_negative(1.6), MetricModel::lens(0.9)}) {
        for (int k : {0, 2, 5}) {
            const auto r = commutator_residual(m, k, 6, 24, 32);
            EXPECT_LT(r.bracket_x, 1e-10) << m.to_string() << " k=" << k;
            EXPECT_LT(r.bracket_x_perp, 1e-10) << m.to_string() << " k=" << k;
            EXPECT_GT(r.scale, 0.1);
        }
    }
    EXPECT_THROW(commutator_residual(MetricModel::euclidean(), 0, 6, 24, 14), std::invalid_argument);
}

TEST(Hilbert, CommutatorHoldsForShiftsOutsideTheBand) {
    // With |k| beyond the bandwidth u_k = 0, yet (X u)_k and (X_perp u)_k can
    // still be nonzero at the band edge.
    const auto m = MetricModel::lens(0.9);
    for (int k : {7, -7, 12}) {
        const auto r = commutator_residual(m, k, 6, 16, 32);
        EXPECT_LT(r.bracket_x, 1e-10) << k;
        EXPECT_LT(r.bracket_x_perp, 1e-10) << k;
    }
}
