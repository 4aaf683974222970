#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "geoxray/grid.hpp"
#include "geoxray/hilbert.hpp"
#include "geoxray/transforms.hpp"

namespace geoxray {

enum class InversionMode {
    InvertIk,      ///< data is I_k f
    InvertIkPerp,  ///< data is I_{k,perp} h
};

struct ReconstructionConfig {
    int k = 0;
    InversionMode mode = InversionMode::InvertIk;
    std::size_t n = 128;
    double dt = 1.0 / 128.0;
    std::size_t iters = 10;
    /// Fiber quadrature count; 0 selects 2n.
    std::size_t n_theta = 0;
    /// Boundary margin of the output mask; negative selects 2h.
    double eps_mask = -1.0;
    /// Stop once ||s_{p+1} - s_p|| / ||s_{p+1}|| falls below this; 0 disables.
    double early_stop_tol = 0.0;

    std::size_t fiber_count() const { return n_theta == 0 ? 2 * n : n_theta; }
    double mask_margin() const { return eps_mask < 0.0 ? 4.0 / static_cast<double>(n) : eps_mask; }
    /// Throws std::invalid_argument on inconsistent settings.
    void validate() const;
};

/// Fiber parity of the data part each inversion uses: for I_k data the parity
/// of k + 1, for I_{k,perp} data the parity of k.
int extension_parity(InversionMode mode, int k);

/// Per-iteration diagnostics of a Neumann run.
struct ErrorHistory {
    /// Relative L2 error against the ground truth (empty without truth).
    std::vector<double> rel_l2;
    /// ||s_{p+1} - s_p|| (the first entry is ||s_1||).
    std::vector<double> update_norm;
    /// Fraction of rays flagged missing in the forward data of each iteration.
    std::vector<double> trapped_fraction;
};

/// Value at (x, theta) of the flow-invariant extension of influx data `w`:
/// bilinear in (beta, alpha), beta periodic, alpha clamped. Returns 0 when the
/// backward trace is trapped.
Complex transport_value(const MetricModel& m, const Sinogram& w, Point2 x, double theta, double dt);

/// Bilinear lookup of influx data at fan-beam coordinates.
Complex interpolate_influx(const Sinogram& w, double beta, double alpha);

/// Influx basepoints of the backward geodesics through every interior cell
/// centre and every fiber angle 2 pi j / n_theta. Depends only on the metric.
class BasepointTable {
public:
    BasepointTable(const MetricModel& m, std::size_t n, std::size_t n_theta, double dt);

    /// True if this table was built for the given layout and step.
    bool matches(std::size_t n, std::size_t n_theta, double dt) const {
        return n == n_ && n_theta == n_theta_ && dt == dt_;
    }

    std::size_t n() const { return n_; }
    std::size_t n_theta() const { return n_theta_; }
    double theta(std::size_t j) const;
    /// Cells with centre radius < 1, in row-major order.
    const std::vector<std::size_t>& cells() const { return cells_; }
    /// Position of `cell` in cells(), or npos if it is outside the disc.
    std::size_t slot(std::size_t cell) const { return slot_[cell]; }
    const FanBeamPoint& basepoint(std::size_t slot, std::size_t j) const {
        return basepoints_[slot * n_theta_ + j];
    }
    bool trapped(std::size_t slot, std::size_t j) const {
        return trapped_[slot * n_theta_ + j] != 0;
    }
    std::size_t trapped_count() const { return trapped_count_; }
    double trapped_fraction() const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::size_t n_;
    std::size_t n_theta_;
    double dt_;
    std::vector<std::size_t> cells_;
    std::vector<std::size_t> slot_;
    std::vector<FanBeamPoint> basepoints_;
    std::vector<std::uint8_t> trapped_;
    std::size_t trapped_count_ = 0;
};

/// Approximate inverses A_f and A_h together with the matching forward map.
class ApproximateInverse {
public:
    ApproximateInverse(const MetricModel& m, const ReconstructionConfig& cfg);
    /// Reuses a basepoint table built for the same metric, n, n_theta and dt
    /// (the table does not depend on k or the mode).
    ApproximateInverse(const MetricModel& m, const ReconstructionConfig& cfg,
                       std::shared_ptr<const BasepointTable> table);

    const ReconstructionConfig& config() const { return cfg_; }
    const MetricModel& metric() const { return metric_; }
    const InfluxGrid& influx_grid() const { return grid_; }
    const BasepointTable& table() const { return *table_; }
    std::shared_ptr<const BasepointTable> shared_table() const { return table_; }

    /// A_f or A_h depending on the configured mode.
    ScalarGrid apply(const Sinogram& data) const;
    /// -(X_perp w_psi)_k for I_k data.
    ScalarGrid apply_f(const Sinogram& data) const;
    /// -(w_psi)_k for I_{k,perp} data.
    ScalarGrid apply_h(const Sinogram& data) const;
    /// I_k or I_{k,perp} depending on the configured mode.
    Sinogram forward(const ScalarGrid& f) const;

    /// Shifted Hilbert transform of the parity part of `data`, restricted to influx.
    Sinogram filtered_data(const Sinogram& data, int parity) const;

    ScalarGrid empty_grid() const;

private:
    MetricModel metric_;
    ReconstructionConfig cfg_;
    InfluxGrid grid_;
    std::shared_ptr<const BasepointTable> table_;
};

ScalarGrid approx_inverse_f(const MetricModel& m, const Sinogram& data,
                            const ReconstructionConfig& cfg);
ScalarGrid approx_inverse_h(const MetricModel& m, const Sinogram& data,
                            const ReconstructionConfig& cfg);

struct NeumannResult {
    ScalarGrid reconstruction;
    ErrorHistory history;
    /// Fraction of trapped backward traces in the backprojection table.
    double backprojection_trapped_fraction = 0.0;
};

/// Called with (p, s_p) for p = 1, 2, ...
using IterateCallback = std::function<void(std::size_t, const ScalarGrid&)>;

/// Partial sums s_{p+1} = b + s_p - A(I(s_p)), s_1 = b = A(data).
NeumannResult neumann_invert(const ApproximateInverse& op, const Sinogram& data,
                             const std::optional<ScalarGrid>& truth = std::nullopt,
                             const IterateCallback& on_iterate = {});
NeumannResult neumann_invert(const MetricModel& m, const Sinogram& data,
                             const ReconstructionConfig& cfg,
                             const std::optional<ScalarGrid>& truth = std::nullopt,
                             const IterateCallback& on_iterate = {});

}  // namespace geoxray
