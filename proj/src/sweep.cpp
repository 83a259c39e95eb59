#include "fhn/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <thread>

#include <CLI11.hpp>

#include "fhn/equilibria.hpp"
#include "fhn/errors.hpp"

namespace fhn {

namespace {

double parse_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) throw ConfigError("'" + key + "': expected a number, got '" + v + "'");
    return out;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end)
        throw ConfigError("'" + key + "': expected a non-negative integer, got '" + v + "'");
    return out;
}

double wrap_deg(double a) {
    double w = std::fmod(a, 360.0);
    if (w < 0.0) w += 360.0;
    if (w >= 360.0) w = 0.0;
    return w;
}

} // namespace

std::vector<double> AngleGrid::values() const {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = n == 1 ? lo_deg : lo_deg + (hi_deg - lo_deg) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

void RunConfig::validate() const {
    try {
        params.validate();
        integrator.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (alpha.n < 2 || delta.n < 2) throw ConfigError("grid resolutions must be at least 2");
    if (!(alpha.lo_deg <= alpha.hi_deg) || !(delta.lo_deg <= delta.hi_deg))
        throw ConfigError("grid bounds must satisfy lo <= hi");
    if (!(delta.lo_deg > 0.0 && delta.hi_deg < 360.0)) throw ConfigError("delta grid must lie in (0, 360)");
    if (ic != "standard") {
        static const std::set<std::string> names{"sym", "anti", "kick1", "kick2", "eq"};
        if (!names.contains(ic)) throw ConfigError("unknown initial condition '" + ic + "'");
    }
}

void set_config_value(RunConfig& cfg, const std::string& section, const std::string& key, const std::string& value) {
    const std::string full = section + "." + key;
    auto num = [&] { return parse_double(full, value); };
    if (section == "parameters") {
        if (key == "a") cfg.params.a = num();
        else if (key == "eps") cfg.params.eps = num();
        else if (key == "k") cfg.params.k = num();
        else if (key == "g") cfg.params.g = num();
        else if (key == "alpha_deg") cfg.params.alpha = deg_to_rad(wrap_deg(num()));
        else if (key == "delta_deg") cfg.params.delta = deg_to_rad(num());
        else throw ConfigError("unknown key '" + full + "'");
    } else if (section == "integrator") {
        if (key == "rel_tol") cfg.integrator.rel_tol = num();
        else if (key == "abs_tol") cfg.integrator.abs_tol = num();
        else if (key == "max_step") cfg.integrator.max_step = num();
        else if (key == "t_transient") cfg.integrator.t_transient = num();
        else if (key == "t_observe") cfg.integrator.t_observe = num();
        else throw ConfigError("unknown key '" + full + "'");
    } else if (section == "grid") {
        if (key == "alpha_lo_deg") cfg.alpha.lo_deg = num();
        else if (key == "alpha_hi_deg") cfg.alpha.hi_deg = num();
        else if (key == "alpha_n") cfg.alpha.n = parse_unsigned(full, value);
        else if (key == "delta_lo_deg") cfg.delta.lo_deg = num();
        else if (key == "delta_hi_deg") cfg.delta.hi_deg = num();
        else if (key == "delta_n") cfg.delta.n = parse_unsigned(full, value);
        else throw ConfigError("unknown key '" + full + "'");
    } else if (section == "run") {
        if (key == "ic") cfg.ic = value;
        else if (key == "seed") cfg.seed = parse_unsigned(full, value);
        else if (key == "output") cfg.output = value;
        else if (key == "workers") cfg.workers = parse_unsigned(full, value);
        else throw ConfigError("unknown key '" + full + "'");
    } else {
        throw ConfigError("unknown section '" + section + "'");
    }
}

RunConfig parse_run_config(std::istream& in, RunConfig base) {
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigINI().from_config(in);
    } catch (const CLI::Error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    RunConfig cfg = std::move(base);
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--") continue; // section markers
        if (item.parents.size() != 1) throw ConfigError("key '" + item.fullname() + "' must sit inside one section");
        if (item.inputs.size() != 1) throw ConfigError("key '" + item.fullname() + "' needs exactly one value");
        set_config_value(cfg, item.parents.front(), item.name, item.inputs.front());
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_run_config(in, std::move(base));
}

State named_ic(const std::string& name, const Parameters& p) {
    const auto eqs = find_equilibria(p);
    const auto sym = std::find_if(eqs.begin(), eqs.end(),
                                  [](const Equilibrium& e) { return e.kind == EquilibriumKind::symmetric; });
    const double y0 = sym != eqs.end() ? sym->y.front() : symmetric_equilibrium_y(p);
    const State eq{p.a, y0, p.a, y0};
    if (name == "eq") return eq;
    if (name == "sym") return {eq.x1 + 0.3, eq.y1, eq.x2 + 0.3, eq.y2};
    if (name == "anti") return {eq.x1 + 0.3, eq.y1, eq.x2 - 0.3, eq.y2};
    if (name == "kick1") return {eq.x1 + 0.5, eq.y1, eq.x2, eq.y2};
    if (name == "kick2") return swap(State{eq.x1 + 0.5, eq.y1, eq.x2, eq.y2});
    throw ConfigError("unknown initial condition '" + name + "'");
}

std::vector<NamedState> standard_ic_set(const Parameters& p, std::uint64_t seed) {
    std::vector<NamedState> out;
    for (const char* name : {"sym", "anti", "kick1", "kick2"}) out.push_back({name, named_ic(name, p)});
    const State eq = named_ic("eq", p);
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    for (int i = 0; i < 4; ++i) {
        std::array<double, 4> d{};
        double norm = 0.0;
        while (norm == 0.0) {
            for (auto& v : d) v = normal(gen);
            norm = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3]);
        }
        for (auto& v : d) v *= 0.3 / norm;
        out.push_back({"random-" + std::to_string(i), {eq.x1 + d[0], eq.y1 + d[1], eq.x2 + d[2], eq.y2 + d[3]}});
    }
    return out;
}

void build_inventory(SweepCell& cell) {
    std::map<std::string, RegimeLabel> seen;
    for (const auto& o : cell.outcomes) seen.emplace(o.label.to_string(), o.label);

    std::set<std::string> entries;
    std::size_t attractors = 0;
    for (const auto& [name, label] : seen) {
        if (label.tag() != RegimeLabel::Tag::sequential) {
            entries.insert(name);
            ++attractors;
            continue;
        }
        const RegimeLabel image = label.swapped();
        if (image == label) {
            entries.insert(name);
            ++attractors;
            continue;
        }
        // the swap image coexists by symmetry whether or not an initial condition found it
        const std::string other = image.to_string();
        if (seen.contains(other)) {
            const auto& [lo, hi] = std::minmax(label.word(), image.word());
            if (entries.insert("Sequential(" + lo + "|" + hi + ")").second) attractors += 2;
        } else {
            entries.insert(name);
            attractors += 2;
        }
    }
    cell.inventory.assign(entries.begin(), entries.end());
    cell.attractor_count = attractors;
    cell.multistable = attractors >= 2;
}

SweepCell analyse_cell(double alpha_deg, double delta_deg, const RunConfig& cfg) {
    SweepCell cell;
    cell.alpha_deg = alpha_deg;
    cell.delta_deg = delta_deg;
    Parameters p = cfg.params;
    p.alpha = deg_to_rad(wrap_deg(alpha_deg));
    p.delta = deg_to_rad(delta_deg);

    std::vector<NamedState> ics;
    try {
        ics = cfg.ic == "standard" ? standard_ic_set(p, cfg.seed)
                                   : std::vector<NamedState>{{cfg.ic, named_ic(cfg.ic, p)}};
    } catch (const std::exception& e) {
        cell.outcomes.push_back({"all", RegimeLabel::unclassified(), e.what()});
        build_inventory(cell);
        return cell;
    }

    ClassifierSettings cs;
    cs.integrator = cfg.integrator;
    for (const auto& ic : ics) {
        IcOutcome o{ic.name, RegimeLabel::unclassified(), {}};
        try {
            const Trajectory traj = integrate(ic.state, p, cfg.integrator);
            o.label = classify_regime(traj, p, cs);
        } catch (const std::exception& e) {
            o.error = e.what();
        }
        cell.outcomes.push_back(std::move(o));
    }
    build_inventory(cell);
    return cell;
}

std::size_t resolve_workers(const RunConfig& cfg) {
    if (const char* env = std::getenv("FHN_WORKERS"); env != nullptr && *env != '\0') {
        const std::uint64_t n = parse_unsigned("FHN_WORKERS", env);
        if (n > 0) return static_cast<std::size_t>(n);
    }
    if (cfg.workers > 0) return cfg.workers;
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<SweepCell> sweep_plane(const RunConfig& cfg,
                                   const std::function<void(std::size_t, std::size_t)>& progress) {
    cfg.validate();
    const std::vector<double> alphas = cfg.alpha.values();
    const std::vector<double> deltas = cfg.delta.values();

    // unique (wrapped alpha, delta) jobs; cells that coincide on the cylinder share one
    std::vector<std::pair<double, double>> jobs;
    std::map<std::pair<double, double>, std::size_t> job_index;
    std::vector<std::size_t> cell_job;
    for (double d : deltas) {
        for (double a : alphas) {
            const auto key = std::pair{wrap_deg(a), d};
            auto [it, inserted] = job_index.emplace(key, jobs.size());
            if (inserted) jobs.push_back(key);
            cell_job.push_back(it->second);
        }
    }

    std::vector<SweepCell> results(jobs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex progress_mutex;
    auto worker = [&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) {
            results[j] = analyse_cell(jobs[j].first, jobs[j].second, cfg);
            const std::size_t finished = ++done;
            if (progress) {
                std::lock_guard lock(progress_mutex);
                progress(finished, jobs.size());
            }
        }
    };
    const std::size_t n_workers = std::min(resolve_workers(cfg), std::max<std::size_t>(jobs.size(), 1));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::vector<SweepCell> cells;
    cells.reserve(cell_job.size());
    std::size_t i = 0;
    for (double d : deltas) {
        for (double a : alphas) {
            SweepCell c = results[cell_job[i++]];
            c.alpha_deg = a;
            c.delta_deg = d;
            cells.push_back(std::move(c));
        }
    }
    return cells;
}

} // namespace fhn
