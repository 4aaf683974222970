#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "geoxray/metrics.hpp"

namespace geoxray {

using Complex = std::complex<double>;

/// Complex field on the cell-centred n x n grid over [-1, 1]^2.
///
/// Storage is row-major with row = y index, column = x index. Cells outside the
/// mask hold zero.
class ScalarGrid {
public:
    ScalarGrid() = default;
    /// Mask is the set of cell centres with radius < mask_radius.
    ScalarGrid(std::size_t n, double mask_radius);

    std::size_t n() const { return n_; }
    double spacing() const { return 2.0 / static_cast<double>(n_); }
    double mask_radius() const { return mask_radius_; }
    double coord(std::size_t i) const {
        return -1.0 + (static_cast<double>(i) + 0.5) * spacing();
    }
    Point2 center(std::size_t ix, std::size_t iy) const { return {coord(ix), coord(iy)}; }

    std::size_t index(std::size_t ix, std::size_t iy) const { return iy * n_ + ix; }
    Complex& operator()(std::size_t ix, std::size_t iy) { return values_[index(ix, iy)]; }
    const Complex& operator()(std::size_t ix, std::size_t iy) const {
        return values_[index(ix, iy)];
    }
    bool in_mask(std::size_t ix, std::size_t iy) const { return mask_[index(ix, iy)] != 0; }

    std::vector<Complex>& values() { return values_; }
    const std::vector<Complex>& values() const { return values_; }
    const std::vector<std::uint8_t>& mask() const { return mask_; }

    /// Zeroes every cell outside the mask.
    void apply_mask();
    /// Same n and same mask.
    bool same_layout(const ScalarGrid& other) const;

    /// Bilinear interpolation between cell centres, extended linearly up to one
    /// spacing past the outermost centres and clamped beyond. Masked fields have
    /// zero edge cells and so read zero outside the disc.
    Complex sample(Point2 p) const;

    /// Sum of |v|^2 h^2 over masked cells.
    double l2_norm() const;

    ScalarGrid& operator+=(const ScalarGrid& other);
    ScalarGrid& operator-=(const ScalarGrid& other);
    ScalarGrid& operator*=(Complex s);

private:
    std::size_t n_ = 0;
    double mask_radius_ = 0.0;
    std::vector<Complex> values_;
    std::vector<std::uint8_t> mask_;
};

ScalarGrid operator+(ScalarGrid a, const ScalarGrid& b);
ScalarGrid operator-(ScalarGrid a, const ScalarGrid& b);
ScalarGrid operator*(Complex s, ScalarGrid a);

/// Empty grid with the disc mask at radius 1 - eps_mask. Throws for n < 8.
ScalarGrid cartesian_grid(std::size_t n, double eps_mask);

/// Grid whose mask covers every cell (test mode for non-compact integrands).
ScalarGrid unmasked_grid(std::size_t n);

/// Fills the masked cells of `grid` with f evaluated at the cell centres.
template <class F>
void fill(ScalarGrid& grid, F&& f) {
    for (std::size_t iy = 0; iy < grid.n(); ++iy) {
        for (std::size_t ix = 0; ix < grid.n(); ++ix) {
            grid(ix, iy) = grid.in_mask(ix, iy) ? Complex(f(grid.center(ix, iy))) : Complex{};
        }
    }
}

/// Isotropic Gaussian bump A exp(-|x - c|^2 / (2 w^2)).
struct Bump {
    Point2 center;
    double amplitude = 1.0;
    double width = 0.1;
};

struct PhantomSpec {
    std::vector<Bump> bumps;
    std::size_t n = 128;
    double eps_mask = 0.0;
};

/// Three separated bumps on a masked grid with a 2h margin.
PhantomSpec default_phantom_spec(std::size_t n);

/// Throws std::invalid_argument if a bump centre lies outside radius 1 - 3 width.
void validate(const PhantomSpec& spec);

/// Analytic value of the phantom at p (no mask).
double phantom_value(const PhantomSpec& spec, Point2 p);

ScalarGrid make_phantom(const PhantomSpec& spec);

/// Relative L2 distance ||a - b|| / ||b|| over the masked cells.
///
/// Throws std::invalid_argument if the layouts differ and ZeroReference if b = 0.
double relative_L2_error(const ScalarGrid& a, const ScalarGrid& b);

class ZeroReference : public std::runtime_error {
public:
    ZeroReference() : std::runtime_error("reference field has zero L2 norm") {}
};

}  // namespace geoxray
