#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "geoxray/metrics.hpp"
#include "geoxray/transforms.hpp"

namespace geoxray {

/// Influx data extended to the full fiber circle at every boundary point.
///
/// Column m < n holds alpha_m of the influx grid; column n + m holds the
/// antipodal direction alpha_m + pi. The 2n columns are equispaced with step pi/n.
class ExtendedFiberData {
public:
    ExtendedFiberData() = default;
    ExtendedFiberData(const InfluxGrid& grid, int parity)
        : grid_(grid), parity_(parity), values_(2 * grid.size()) {}

    const InfluxGrid& grid() const { return grid_; }
    /// +1 for an even extension, -1 for odd.
    int parity() const { return parity_; }
    std::size_t fiber_size() const { return 2 * grid_.n(); }
    double fiber_angle(std::size_t m) const {
        return grid_.alpha(0) + static_cast<double>(m) * grid_.alpha_step();
    }

    std::span<Complex> slice(std::size_t i_beta) {
        return {values_.data() + i_beta * fiber_size(), fiber_size()};
    }
    std::span<const Complex> slice(std::size_t i_beta) const {
        return {values_.data() + i_beta * fiber_size(), fiber_size()};
    }
    std::vector<Complex>& values() { return values_; }
    const std::vector<Complex>& values() const { return values_; }

private:
    InfluxGrid grid_;
    int parity_ = 1;
    std::vector<Complex> values_;
};

/// Extends each beta-slice by values(alpha + pi) = parity * values(alpha).
/// Missing rays extend as zero. Throws std::invalid_argument unless parity is +-1.
ExtendedFiberData parity_extend(const Sinogram& s, int parity);

/// Multiplies mode l of each slice by -i sgn(l - k) (sgn 0 = 0), modes
/// l in {-n, ..., n-1}.
ExtendedFiberData shifted_hilbert(const ExtendedFiberData& e, int k);

/// Same operator as e^{ik alpha} H (e^{-ik alpha} u), with H the unshifted
/// multiplier. Agrees with shifted_hilbert on band-limited slices.
ExtendedFiberData shifted_hilbert_conjugated(const ExtendedFiberData& e, int k);

/// The influx half of every slice.
Sinogram restrict_to_influx(const ExtendedFiberData& e);

/// In-place shifted Hilbert transform of samples equispaced over one period
/// (any starting angle). Mode indices follow the FFT convention
/// {-N/2, ..., N/2 - 1}.
void shifted_hilbert_fiber(std::span<Complex> samples, int k);

/// The k-th Fourier coefficient (1/N) sum_m u_m e^{-ik phi_m} of equispaced
/// samples at phi_m = phi_0 + 2 pi m / N.
Complex fiber_coefficient(std::span<const Complex> samples, int k, double phi0);

/// Max-norm residuals of the commutator identities
///   [H_(k), X] u = X_perp u_k + (X_perp u)_k,
///   [H_(k), X_perp] u = -X u_k - (X u)_k
/// for the synthetic band-limited u = sum_{|l| <= bandwidth} f_l(x) e^{il theta},
/// f_l(x) = e^{i(p_l x + q_l y)} / (1 + l^2), evaluated at the cell centres of an
/// n_grid x n_grid grid with radius below `radius` and n_fiber directions.
struct CommutatorResidual {
    double bracket_x = 0.0;
    double bracket_x_perp = 0.0;
    /// max |X u| over the same samples, for scale.
    double scale = 0.0;
};

/// Spatial derivatives of f_l are analytic. Throws std::invalid_argument unless
/// n_fiber > 2 (bandwidth + 1).
CommutatorResidual commutator_residual(const MetricModel& m, int k, int bandwidth,
                                       std::size_t n_grid, std::size_t n_fiber,
                                       double radius = 0.9);

}  // namespace geoxray
