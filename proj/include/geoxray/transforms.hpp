#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "geoxray/geodesics.hpp"
#include "geoxray/grid.hpp"

namespace geoxray {

/// Complex data on the influx grid, indexed (beta, alpha), beta-major.
///
/// Rays that never left the disc are flagged missing; their stored value is 0.
class Sinogram {
public:
    Sinogram() = default;
    explicit Sinogram(const InfluxGrid& grid)
        : grid_(grid), values_(grid.size()), missing_(grid.size(), 0) {}

    const InfluxGrid& grid() const { return grid_; }
    std::size_t index(std::size_t i_beta, std::size_t j_alpha) const {
        return i_beta * grid_.num_alphas() + j_alpha;
    }
    Complex& operator()(std::size_t i, std::size_t j) { return values_[index(i, j)]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return values_[index(i, j)]; }

    bool is_missing(std::size_t i, std::size_t j) const { return missing_[index(i, j)] != 0; }
    void mark_missing(std::size_t i, std::size_t j) {
        missing_[index(i, j)] = 1;
        values_[index(i, j)] = Complex{};
    }
    std::size_t missing_count() const;

    std::vector<Complex>& values() { return values_; }
    const std::vector<Complex>& values() const { return values_; }
    const std::vector<std::uint8_t>& missing() const { return missing_; }

private:
    InfluxGrid grid_;
    std::vector<Complex> values_;
    std::vector<std::uint8_t> missing_;
};

/// I_k f = I[f e^{ik theta}] by left-endpoint quadrature along each grid ray.
Sinogram forward_Ik(const MetricModel& m, const ScalarGrid& f, int k, const InfluxGrid& g,
                    double dt);

/// I_{k,perp} f = I[X_perp(f e^{ik theta})], transverse derivative by central
/// differences at offsets -/+ dt along the clockwise normal of each sample.
Sinogram forward_Ikperp(const MetricModel& m, const ScalarGrid& f, int k, const InfluxGrid& g,
                        double dt);

using PhaseFunction = std::function<Complex(Point2, double)>;

/// dt * sum_p u(x^p, theta^p) along the ray entering at (beta, alpha). Throws TrappedRay.
Complex ray_integral_general(const MetricModel& m, const PhaseFunction& u, double beta,
                             double alpha, double dt);

/// Header data written with a sinogram.
struct SinogramHeader {
    std::size_t n = 0;
    int k = 0;
    std::string metric;
    double dt = 0.0;
};

/// Writes `<stem>_real.csv` and `<stem>_imag.csv`; rows are beta indices,
/// columns alpha indices, missing rays written as "nan".
void write_sinogram_csv(const std::string& stem, const Sinogram& s, const SinogramHeader& header);

/// Reads a pair written by write_sinogram_csv.
Sinogram read_sinogram_csv(const std::string& stem, SinogramHeader* header = nullptr);

}  // namespace geoxray
