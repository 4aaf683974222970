#include "geoxray/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "geoxray/io.hpp"

namespace geoxray {

namespace {

std::string trim(const std::string& s) {
    const auto first = std::find_if_not(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
    const auto last = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c) { return std::isspace(c); }).base();
    return first < last ? std::string(first, last) : std::string();
}

double parse_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
        throw ConfigError("invalid number for " + key + ": '" + value + "'");
    }
    return out;
}

long parse_integer(const std::string& key, const std::string& value) {
    long out = 0;
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError("invalid integer for " + key + ": '" + value + "'");
    }
    return out;
}

std::size_t parse_count(const std::string& key, const std::string& value) {
    const long v = parse_integer(key, value);
    if (v <= 0) {
        throw ConfigError(key + " must be positive");
    }
    return static_cast<std::size_t>(v);
}

std::string format_parameter(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string iteration_stem(std::size_t p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "recon_iter%02zu", p);
    return buf;
}

std::vector<double> modulus(const ScalarGrid& g) {
    std::vector<double> out(g.values().size());
    std::transform(g.values().begin(), g.values().end(), out.begin(), [](Complex v) { return std::abs(v); });
    return out;
}

}  // namespace

PhantomSpec ExperimentConfig::phantom() const {
    PhantomSpec spec = default_phantom_spec(n);
    if (!bumps.empty()) {
        spec.bumps = bumps;
    }
    return spec;
}

ReconstructionConfig ExperimentConfig::reconstruction() const {
    ReconstructionConfig rc;
    rc.k = k;
    rc.mode = mode;
    rc.n = n;
    rc.dt = step();
    rc.iters = iters;
    return rc;
}

InversionMode parse_mode(const std::string& text) {
    if (text == "ik") {
        return InversionMode::InvertIk;
    }
    if (text == "ikperp") {
        return InversionMode::InvertIkPerp;
    }
    throw ConfigError("mode must be 'ik' or 'ikperp', got '" + text + "'");
}

std::string to_string(InversionMode mode) {
    return mode == InversionMode::InvertIk ? "ik" : "ikperp";
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "metric") {
        try {
            parse_metric(value, cfg.lens);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        cfg.metric = value;
    } else if (key == "k") {
        cfg.k = static_cast<int>(parse_integer(key, value));
    } else if (key == "mode") {
        cfg.mode = parse_mode(value);
    } else if (key == "n") {
        cfg.n = parse_count(key, value);
        if (cfg.n < 8) {
            throw ConfigError("n must be >= 8");
        }
    } else if (key == "dt") {
        cfg.dt = parse_double(key, value);
        if (!(cfg.dt > 0.0)) {
            throw ConfigError("dt must be positive");
        }
    } else if (key == "iters") {
        cfg.iters = parse_count(key, value);
    } else if (key == "out") {
        cfg.out = value;
    } else if (key == "emit") {
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item == "sino") {
                cfg.emit_sinograms = true;
            } else if (item == "grids") {
                cfg.emit_grids = true;
            } else if (item == "images") {
                cfg.emit_images = true;
            } else if (!item.empty()) {
                throw ConfigError("unknown emit flag '" + item + "'");
            }
        }
    } else if (key == "lens.sigma") {
        cfg.lens.sigma = parse_double(key, value);
    } else if (key == "lens.cx") {
        cfg.lens.cx = parse_double(key, value);
    } else if (key == "lens.cy") {
        cfg.lens.cy = parse_double(key, value);
    } else if (key.rfind("bump.", 0) == 0) {
        const std::size_t dot = key.find('.', 5);
        if (dot == std::string::npos) {
            throw ConfigError("unknown key '" + key + "'");
        }
        const long index = parse_integer(key, key.substr(5, dot - 5));
        if (index < 0 || index > 1000) {
            throw ConfigError("bump index out of range in '" + key + "'");
        }
        const auto i = static_cast<std::size_t>(index);
        if (cfg.bumps.size() <= i) {
            cfg.bumps.resize(i + 1);
        }
        const std::string field = key.substr(dot + 1);
        const double v = parse_double(key, value);
        if (field == "cx") {
            cfg.bumps[i].center.x = v;
        } else if (field == "cy") {
            cfg.bumps[i].center.y = v;
        } else if (field == "amp") {
            cfg.bumps[i].amplitude = v;
        } else if (field == "width") {
            cfg.bumps[i].width = v;
        } else {
            throw ConfigError("unknown key '" + key + "'");
        }
    } else {
        throw ConfigError("unknown key '" + key + "'");
    }
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
    std::stringstream ss(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
        }
        try {
            apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), std::move(base));
}

std::shared_ptr<const BasepointTable> TableCache::get(const MetricModel& m, std::size_t n,
                                                      std::size_t n_theta, double dt) {
    const std::string key = m.to_string() + "|" + std::to_string(n) + "|" +
                            std::to_string(n_theta) + "|" + io::format_double(dt);
    auto it = tables_.find(key);
    if (it == tables_.end()) {
        it = tables_.emplace(key, std::make_shared<const BasepointTable>(m, n, n_theta, dt)).first;
    }
    return it->second;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream& log, TableCache* cache) {
    const MetricModel m = parse_metric(cfg.metric, cfg.lens);
    const PhantomSpec spec = cfg.phantom();
    validate(spec);
    ExperimentResult result;
    result.phantom = make_phantom(spec);
    if (result.phantom.l2_norm() == 0.0) {
        throw ZeroReference();
    }

    const ReconstructionConfig rc = cfg.reconstruction();
    // The lens overrides are not part of to_string(), so only default lenses share tables.
    const bool shareable = cfg.lens.sigma == LensOverrides{}.sigma && cfg.lens.cx == LensOverrides{}.cx &&
                           cfg.lens.cy == LensOverrides{}.cy;
    const auto table = cache != nullptr && shareable
                           ? cache->get(m, rc.n, rc.fiber_count(), rc.dt)
                           : std::make_shared<const BasepointTable>(m, rc.n, rc.fiber_count(), rc.dt);
    const ApproximateInverse op(m, rc, table);
    const Sinogram data = op.forward(result.phantom);

    std::filesystem::create_directories(cfg.out);
    const auto file = [&](const std::string& name) { return (cfg.out / name).string(); };
    const std::map<std::string, std::string> header{
        {"metric", m.to_string()}, {"k", std::to_string(cfg.k)}, {"mode", to_string(cfg.mode)},
        {"n", std::to_string(cfg.n)}, {"dt", io::format_double(rc.dt)}};

    if (cfg.emit_sinograms) {
        write_sinogram_csv(file("sino"), data, SinogramHeader{cfg.n, cfg.k, m.to_string(), rc.dt});
        io::write_grid_csv(file("phantom"), result.phantom, header);
    }
    if (cfg.emit_images) {
        io::write_pgm(file("phantom.pgm"), cfg.n, cfg.n, modulus(result.phantom));
        std::vector<double> sino(data.values().size());
        std::transform(data.values().begin(), data.values().end(), sino.begin(), [](Complex v) { return std::abs(v); });
        io::write_pgm(file("sino_abs.pgm"), data.grid().num_alphas(), data.grid().num_betas(), sino);
    }

    const IterateCallback on_iterate = [&](std::size_t p, const ScalarGrid& s) {
        if (cfg.emit_grids) {
            io::write_grid_csv(file(iteration_stem(p)), s, header);
        }
        if (cfg.emit_images && cfg.emit_grids) {
            io::write_pgm(file(iteration_stem(p) + ".pgm"), cfg.n, cfg.n, modulus(s));
        }
    };
    result.neumann = neumann_invert(op, data, result.phantom, on_iterate);
    result.final_rel_l2 = result.neumann.history.rel_l2.back();

    {
        std::ofstream errors(file("errors.csv"));
        errors << "iter,rel_l2,update_norm,trapped_fraction\n";
        const ErrorHistory& h = result.neumann.history;
        for (std::size_t i = 0; i < h.rel_l2.size(); ++i) {
            errors << (i + 1) << ',' << io::format_double(h.rel_l2[i]) << ','
                   << io::format_double(h.update_norm[i]) << ','
                   << io::format_double(h.trapped_fraction[i]) << '\n';
        }
        if (!errors) {
            throw std::runtime_error("failed to write " + file("errors.csv"));
        }
    }
    io::write_grid_csv(file("recon"), result.neumann.reconstruction, header);
    if (cfg.emit_images) {
        io::write_pgm(file("recon.pgm"), cfg.n, cfg.n, modulus(result.neumann.reconstruction));
    }
    log << "rel_l2=" << io::format_double(result.final_rel_l2) << '\n';
    return result;
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::Converged:
            return "CONV";
        case Regime::Diverged:
            return "DV";
        case Regime::NotConverged:
            break;
    }
    return "NC";
}

Regime classify_regime(const std::vector<double>& rel_l2) {
    if (rel_l2.empty()) {
        throw std::invalid_argument("classify_regime: empty error history");
    }
    const std::size_t first = rel_l2.size() > 3 ? rel_l2.size() - 3 : 0;
    bool non_increasing = true;
    bool increasing = rel_l2.size() > 1;
    for (std::size_t i = first; i + 1 < rel_l2.size(); ++i) {
        const double change = rel_l2[i + 1] - rel_l2[i];
        non_increasing = non_increasing && change <= kRegimeFlatTolerance;
        increasing = increasing && change > kRegimeFlatTolerance;
    }
    const double final = rel_l2.back();
    if (final < 0.10 && non_increasing) {
        return Regime::Converged;
    }
    if (final > 0.30 && increasing) {
        return Regime::Diverged;
    }
    return Regime::NotConverged;
}

std::vector<std::string> suite_names() { return {"exp1", "exp2", "exp3", "exp4"}; }

std::vector<SuiteCell> run_suite(const std::string& name, const ExperimentConfig& base,
                                 std::ostream& log, const SuiteOptions& options) {
    struct Plan {
        std::string metric;
        double parameter;
        int k;
        InversionMode mode;
        std::string label;
    };
    std::vector<Plan> plan;
    if (name == "exp1" || name == "exp2") {
        const std::string family = name == "exp1" ? "cpc" : "cnc";
        for (int k : {3, 6, 10}) {
            for (double r : {2.0, 1.6, 1.2}) {
                const std::string p = format_parameter(r);
                plan.push_back({family + ":" + p, r, k, InversionMode::InvertIk,
                                family + "_R" + p + "_k" + std::to_string(k)});
            }
        }
    } else if (name == "exp3" || name == "exp4") {
        const InversionMode mode = name == "exp3" ? InversionMode::InvertIk : InversionMode::InvertIkPerp;
        for (double ell : {0.3, 0.6, 0.9, 1.2}) {
            const std::string p = format_parameter(ell);
            plan.push_back({"lens:" + p, ell, 3, mode, "lens_l" + p + "_k3_" + to_string(mode)});
        }
    } else {
        throw std::invalid_argument("unknown suite '" + name + "'");
    }

    TableCache local;
    TableCache* cache = options.cache != nullptr ? options.cache : &local;
    std::vector<SuiteCell> cells;
    for (const Plan& p : plan) {
        if (options.only_k && *options.only_k != p.k) {
            continue;
        }
        ExperimentConfig cfg = base;
        cfg.metric = p.metric;
        cfg.k = p.k;
        cfg.mode = p.mode;
        cfg.out = base.out / name / p.label;
        log << name << ' ' << p.label << ": ";
        const ExperimentResult r = run_experiment(cfg, log, cache);
        SuiteCell cell;
        cell.metric = p.metric;
        cell.parameter = p.parameter;
        cell.k = p.k;
        cell.mode = p.mode;
        cell.rel_l2 = r.neumann.history.rel_l2;
        cell.regime = classify_regime(cell.rel_l2);
        cells.push_back(std::move(cell));
    }

    std::filesystem::create_directories(base.out);
    std::ofstream summary(base.out / (name + "_summary.csv"));
    summary << "suite,metric,parameter,k,mode,iters,final_rel_l2,final_percent,regime\n";
    for (const SuiteCell& c : cells) {
        summary << name << ',' << c.metric << ',' << format_parameter(c.parameter) << ',' << c.k << ','
                << to_string(c.mode) << ',' << c.rel_l2.size() << ','
                << io::format_double(c.rel_l2.back()) << ',' << format_parameter(100.0 * c.rel_l2.back())
                << ',' << to_string(c.regime) << '\n';
    }
    if (!summary) {
        throw std::runtime_error("failed to write suite summary for " + name);
    }
    return cells;
}

}  // namespace geoxray
