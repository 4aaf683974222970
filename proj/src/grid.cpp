#include "geoxray/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace geoxray {

ScalarGrid::ScalarGrid(std::size_t n, double mask_radius)
    : n_(n), mask_radius_(mask_radius), values_(n * n), mask_(n * n, 0) {
    if (n < 8) {
        throw std::invalid_argument("cartesian grid requires n >= 8");
    }
    for (std::size_t iy = 0; iy < n; ++iy) {
        for (std::size_t ix = 0; ix < n; ++ix) {
            const Point2 c = center(ix, iy);
            mask_[index(ix, iy)] = std::hypot(c.x, c.y) < mask_radius ? 1 : 0;
        }
    }
}

void ScalarGrid::apply_mask() {
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (mask_[i] == 0) {
            values_[i] = Complex{};
        }
    }
}

bool ScalarGrid::same_layout(const ScalarGrid& other) const {
    return n_ == other.n_ && mask_ == other.mask_;
}

Complex ScalarGrid::sample(Point2 p) const {
    // Bilinear between cell centres, extended linearly up to one spacing past
    // the outermost centres (half a cell beyond the square, which covers
    // stencils of step h/2 around the disc); clamped further out.
    const double h = spacing();
    const double max_index = static_cast<double>(n_ - 1);
    const double fx = std::clamp((p.x + 1.0) / h - 0.5, -1.0, max_index + 1.0);
    const double fy = std::clamp((p.y + 1.0) / h - 0.5, -1.0, max_index + 1.0);
    const double bx = std::clamp(std::floor(fx), 0.0, max_index - 1.0);
    const double by = std::clamp(std::floor(fy), 0.0, max_index - 1.0);
    const auto ix = static_cast<std::size_t>(bx);
    const auto iy = static_cast<std::size_t>(by);
    const double tx = fx - bx;
    const double ty = fy - by;
    const Complex* row0 = values_.data() + iy * n_ + ix;
    const Complex* row1 = row0 + n_;
    return (1.0 - ty) * ((1.0 - tx) * row0[0] + tx * row0[1]) +
           ty * ((1.0 - tx) * row1[0] + tx * row1[1]);
}

double ScalarGrid::l2_norm() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (mask_[i] != 0) {
            sum += std::norm(values_[i]);
        }
    }
    return std::sqrt(sum) * spacing();
}

ScalarGrid& ScalarGrid::operator+=(const ScalarGrid& other) {
    if (n_ != other.n_) {
        throw std::invalid_argument("grid size mismatch");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        values_[i] += other.values_[i];
    }
    apply_mask();
    return *this;
}

ScalarGrid& ScalarGrid::operator-=(const ScalarGrid& other) {
    if (n_ != other.n_) {
        throw std::invalid_argument("grid size mismatch");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        values_[i] -= other.values_[i];
    }
    apply_mask();
    return *this;
}

ScalarGrid& ScalarGrid::operator*=(Complex s) {
    for (auto& v : values_) {
        v *= s;
    }
    return *this;
}

ScalarGrid operator+(ScalarGrid a, const ScalarGrid& b) { return a += b; }
ScalarGrid operator-(ScalarGrid a, const ScalarGrid& b) { return a -= b; }
ScalarGrid operator*(Complex s, ScalarGrid a) { return a *= s; }

ScalarGrid cartesian_grid(std::size_t n, double eps_mask) { return ScalarGrid(n, 1.0 - eps_mask); }

ScalarGrid unmasked_grid(std::size_t n) { return ScalarGrid(n, 2.0); }

PhantomSpec default_phantom_spec(std::size_t n) {
    PhantomSpec spec;
    spec.n = n;
    spec.eps_mask = 2.0 * 2.0 / static_cast<double>(n);
    spec.bumps = {
        {{-0.3, 0.25}, 1.0, 0.12},
        {{0.25, 0.3}, 0.8, 0.12},
        {{0.1, -0.35}, 0.9, 0.12},
    };
    return spec;
}

void validate(const PhantomSpec& spec) {
    for (const auto& b : spec.bumps) {
        if (!(b.width > 0.0)) {
            throw std::invalid_argument("phantom bump width must be positive");
        }
        if (std::hypot(b.center.x, b.center.y) > 1.0 - 3.0 * b.width) {
            throw std::invalid_argument("phantom bump centre too close to the boundary");
        }
    }
}

double phantom_value(const PhantomSpec& spec, Point2 p) {
    double v = 0.0;
    for (const auto& b : spec.bumps) {
        const double dx = p.x - b.center.x;
        const double dy = p.y - b.center.y;
        v += b.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * b.width * b.width));
    }
    return v;
}

ScalarGrid make_phantom(const PhantomSpec& spec) {
    validate(spec);
    ScalarGrid grid = cartesian_grid(spec.n, spec.eps_mask);
    fill(grid, [&](Point2 p) { return phantom_value(spec, p); });
    return grid;
}

double relative_L2_error(const ScalarGrid& a, const ScalarGrid& b) {
    if (!a.same_layout(b)) {
        throw std::invalid_argument("relative_L2_error: grids differ in size or mask");
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) {
        if (b.mask()[i] != 0) {
            num += std::norm(a.values()[i] - b.values()[i]);
            den += std::norm(b.values()[i]);
        }
    }
    if (den == 0.0) {
        throw ZeroReference();
    }
    return std::sqrt(num / den);
}

}  // namespace geoxray
