#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "geoxray/reconstruction.hpp"

namespace geoxray {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string metric = "euclidean";
    LensOverrides lens;
    int k = 3;
    InversionMode mode = InversionMode::InvertIk;
    std::size_t n = 128;
    /// 0 selects 1/n.
    double dt = 0.0;
    std::size_t iters = 10;
    /// Empty selects the default three-bump phantom.
    std::vector<Bump> bumps;
    std::filesystem::path out = "out";
    bool emit_sinograms = false;
    bool emit_grids = false;
    bool emit_images = false;

    double step() const { return dt > 0.0 ? dt : 1.0 / static_cast<double>(n); }
    PhantomSpec phantom() const;
    ReconstructionConfig reconstruction() const;
};

/// Applies one key=value setting. Keys: metric, k, mode (ik|ikperp), n, dt,
/// iters, out, emit (comma list of sino, grids, images), lens.sigma, lens.cx,
/// lens.cy, bump.<i>.cx, bump.<i>.cy, bump.<i>.amp, bump.<i>.width.
/// Throws ConfigError for unknown keys or malformed values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Parses key=value lines; '#' starts a comment, blank lines are ignored.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

InversionMode parse_mode(const std::string& text);
std::string to_string(InversionMode mode);

/// Shares basepoint tables between runs on the same metric and layout.
class TableCache {
public:
    std::shared_ptr<const BasepointTable> get(const MetricModel& m, std::size_t n,
                                              std::size_t n_theta, double dt);

private:
    std::map<std::string, std::shared_ptr<const BasepointTable>> tables_;
};

struct ExperimentResult {
    NeumannResult neumann;
    ScalarGrid phantom;
    double final_rel_l2 = 0.0;
};

/// Phantom, forward data, Neumann inversion and artifact files under cfg.out:
/// errors.csv, recon_{real,imag}.csv, and on request sino_*.csv,
/// recon_iterNN_*.csv and PGM quick-looks. Prints "rel_l2=<value>" to `log`.
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream& log,
                                TableCache* cache = nullptr);

enum class Regime { Converged, NotConverged, Diverged };
std::string to_string(Regime r);

/// Changes smaller than this (absolute, in relative-error units) count as flat.
inline constexpr double kRegimeFlatTolerance = 1e-3;

/// CONV: final < 10% and non-increasing over the last 3 iterates; DV: final >
/// 30% and increasing; NC otherwise. Throws std::invalid_argument on an empty history.
Regime classify_regime(const std::vector<double>& rel_l2);

struct SuiteCell {
    std::string metric;
    double parameter = 0.0;
    int k = 0;
    InversionMode mode = InversionMode::InvertIk;
    std::vector<double> rel_l2;
    Regime regime = Regime::NotConverged;
};

/// exp1: cpc, exp2: cnc, both k in {3, 6, 10} x R in {2.0, 1.6, 1.2};
/// exp3/exp4: k = 3, lens ell in {0.3, 0.6, 0.9, 1.2}, mode ik / ikperp.
std::vector<std::string> suite_names();

struct SuiteOptions {
    /// Restricts the sweep to one k.
    std::optional<int> only_k;
    TableCache* cache = nullptr;
};

/// Runs every cell of the suite with `base` supplying n, dt, iters, phantom and
/// out (each cell writes to out/<suite>/<cell>), then writes
/// out/<suite>_summary.csv. Throws std::invalid_argument for an unknown name.
std::vector<SuiteCell> run_suite(const std::string& name, const ExperimentConfig& base,
                                 std::ostream& log, const SuiteOptions& options = {});

}  // namespace geoxray
