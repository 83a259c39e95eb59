// fhnpair: command-line front end for the coupled FitzHugh-Nagumo pair.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fhn/attractors.hpp"
#include "fhn/equilibria.hpp"
#include "fhn/errors.hpp"
#include "fhn/io.hpp"
#include "fhn/sweep.hpp"

using namespace fhn;
using nlohmann::json;

namespace {

enum ExitCode : int {
    exit_ok = 0,
    exit_internal = 1,
    exit_usage = 2,
    exit_config = 3,
    exit_domain = 4,
    exit_integration = 5,
    exit_not_periodic = 6,
    exit_io = 7,
};

const char* exit_code_help = R"(Exit codes:
  0  success
  1  internal error
  2  usage error (unknown flag, bad flag value)
  3  malformed or invalid configuration
  4  invalid model parameters or undefined phase angle
  5  integration failure (step underflow or divergence)
  6  no periodic orbit, too few spikes or too few section returns
  7  cannot write output
Errors are reported on stderr as JSON: {"error": {"code", "type", "message"}}.)";

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A flag that overrides one config key when given.
struct Override {
    CLI::Option* opt;
    std::string section;
    std::string key;
    std::shared_ptr<std::string> value;
};

struct Common {
    std::string config_path;
    std::string output;
    std::vector<Override> overrides;
};

void add_override(CLI::App* app, Common& c, const std::string& flag, const std::string& section,
                  const std::string& key, const std::string& help) {
    auto value = std::make_shared<std::string>();
    CLI::Option* opt = app->add_option(flag, *value, help);
    c.overrides.push_back({opt, section, key, value});
}

void add_model_flags(CLI::App* app, Common& c) {
    app->add_option("--config", c.config_path, "key-value config file ([parameters], [integrator], [grid], [run])");
    app->add_option("-o,--output", c.output, "output file (default: stdout)");
    add_override(app, c, "--alpha-deg", "parameters", "alpha_deg", "sector start alpha, degrees");
    add_override(app, c, "--delta-deg", "parameters", "delta_deg", "sector width delta, degrees");
    add_override(app, c, "--a", "parameters", "a", "excitability parameter a");
    add_override(app, c, "--eps", "parameters", "eps", "time-scale ratio eps");
    add_override(app, c, "--k", "parameters", "k", "sigmoid steepness k");
    add_override(app, c, "--g", "parameters", "g", "coupling strength g");
    add_override(app, c, "--rel-tol", "integrator", "rel_tol", "relative tolerance");
    add_override(app, c, "--abs-tol", "integrator", "abs_tol", "absolute tolerance");
    add_override(app, c, "--max-step", "integrator", "max_step", "maximum step");
    add_override(app, c, "--t-transient", "integrator", "t_transient", "discarded transient time");
    add_override(app, c, "--t-observe", "integrator", "t_observe", "recorded time");
}

void add_ic_flag(CLI::App* app, Common& c) {
    add_override(app, c, "--ic", "run", "ic", "initial condition: sym, anti, kick1, kick2 or eq");
}

void add_grid_flags(CLI::App* app, Common& c, bool alpha, bool delta) {
    if (alpha) {
        add_override(app, c, "--alpha-lo-deg", "grid", "alpha_lo_deg", "first alpha, degrees");
        add_override(app, c, "--alpha-hi-deg", "grid", "alpha_hi_deg", "last alpha, degrees");
        add_override(app, c, "--alpha-n", "grid", "alpha_n", "number of alpha values");
    }
    if (delta) {
        add_override(app, c, "--delta-lo-deg", "grid", "delta_lo_deg", "first delta, degrees");
        add_override(app, c, "--delta-hi-deg", "grid", "delta_hi_deg", "last delta, degrees");
        add_override(app, c, "--delta-n", "grid", "delta_n", "number of delta values");
    }
}

RunConfig resolve(const Common& c, RunConfig base) {
    RunConfig cfg = c.config_path.empty() ? std::move(base) : load_run_config(c.config_path, std::move(base));
    for (const auto& o : c.overrides)
        if (o.opt->count() > 0) {
            try {
                set_config_value(cfg, o.section, o.key, *o.value);
            } catch (const ConfigError& e) {
                throw UsageError(o.opt->get_name() + ": " + e.what());
            }
        }
    if (!c.output.empty()) cfg.output = c.output;
    cfg.validate();
    return cfg;
}

// Runs `body` with the configured output stream.
template <class Body>
void with_output(const std::string& path, Body&& body) {
    if (path.empty() || path == "-") {
        body(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    body(out);
    out.flush();
    if (!out) throw IoError("failed writing '" + path + "'");
}

int report(int code, const std::string& type, const std::string& message) {
    json j{{"error", {{"code", code}, {"type", type}, {"message", message}}}};
    std::cerr << j.dump() << '\n';
    return code;
}

RunConfig with_ic(std::string ic) {
    RunConfig cfg;
    cfg.ic = std::move(ic);
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-element FitzHugh-Nagumo ensemble with phase-sector coupling"};
    app.footer(exit_code_help);
    app.require_subcommand(1);

    // simulate
    Common sim;
    double dt = 0.0;
    auto* simulate = app.add_subcommand("simulate", "integrate one trajectory, write t,x1,y1,x2,y2 CSV");
    add_model_flags(simulate, sim);
    add_ic_flag(simulate, sim);
    simulate->add_option("--dt", dt, "uniform output spacing (default: every accepted step)");
    simulate->footer(exit_code_help);

    // equilibria
    Common eqc;
    auto* equilibria = app.add_subcommand("equilibria", "list equilibria with spectra as JSON");
    add_model_flags(equilibria, eqc);
    equilibria->footer(exit_code_help);

    // hopf-curve
    Common hop;
    std::string branch = "both";
    auto* hopf = app.add_subcommand("hopf-curve", "analytic Hopf curves over a delta grid as CSV");
    add_model_flags(hopf, hop);
    add_grid_flags(hopf, hop, false, true);
    hopf->add_option("--branch", branch, "in-phase, anti-phase or both")
        ->check(CLI::IsMember({"in-phase", "anti-phase", "both"}));
    hopf->footer(exit_code_help);

    // cycle
    Common cyc;
    CycleSettings cycle_settings;
    auto* cycle = app.add_subcommand("cycle", "find a limit cycle and its Floquet multipliers, JSON");
    add_model_flags(cycle, cyc);
    add_ic_flag(cycle, cyc);
    cycle->add_option("--max-time", cycle_settings.max_time, "section search budget")->capture_default_str();
    cycle->footer(exit_code_help);

    // lyapunov
    Common lya;
    auto* lyapunov = app.add_subcommand("lyapunov", "largest Lyapunov exponent, JSON");
    add_model_flags(lyapunov, lya);
    add_ic_flag(lyapunov, lya);
    lyapunov->footer(exit_code_help);

    // pd-scan
    Common pds;
    PdScanSettings pd_settings;
    std::string summary_path;
    auto* pdscan = app.add_subcommand("pd-scan", "attractor-following section scan over alpha, CSV");
    add_model_flags(pdscan, pds);
    add_ic_flag(pdscan, pds);
    add_grid_flags(pdscan, pds, true, false);
    pdscan->add_option("--discard", pd_settings.discard, "returns skipped per alpha")->capture_default_str();
    pdscan->add_option("--keep", pd_settings.keep, "returns recorded per alpha")->capture_default_str();
    pdscan->add_option("--cluster-tol", pd_settings.cluster_tolerance, "cluster tolerance for x1 values")->capture_default_str();
    pdscan->add_option("--refine-levels", pd_settings.refine_levels, "refinement passes")->capture_default_str();
    pdscan->add_option("--refine-factor", pd_settings.refine_factor, "subdivisions per refined interval")->capture_default_str();
    pdscan->add_option("--summary", summary_path, "write cascade summary JSON here");
    pdscan->footer(exit_code_help);

    // sweep
    Common swp;
    bool progress = false;
    auto* sweep = app.add_subcommand("sweep", "classify regimes over an (alpha, delta) grid, CSV");
    add_model_flags(sweep, swp);
    add_grid_flags(sweep, swp, true, true);
    add_override(sweep, swp, "--ic", "run", "ic", "standard (default) or one named initial condition");
    add_override(sweep, swp, "--seed", "run", "seed", "seed of the random initial conditions");
    add_override(sweep, swp, "--workers", "run", "workers", "worker threads (FHN_WORKERS overrides)");
    sweep->add_flag("--progress", progress, "report progress on stderr");
    sweep->footer(exit_code_help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report(exit_usage, "usage", e.what());
    }

    try {
        if (*simulate) {
            const RunConfig cfg = resolve(sim, with_ic("anti"));
            if (cfg.ic == "standard") throw ConfigError("simulate needs a single named initial condition");
            const Trajectory traj = integrate(named_ic(cfg.ic, cfg.params), cfg.params, cfg.integrator);
            with_output(cfg.output, [&](std::ostream& os) { write_timeseries_csv(os, traj, dt); });
        } else if (*equilibria) {
            const RunConfig cfg = resolve(eqc, {});
            json j{{"parameters", to_json(cfg.params)}, {"equilibria", json::array()}};
            for (const auto& eq : find_equilibria(cfg.params)) j["equilibria"].push_back(to_json(eq, cfg.params));
            with_output(cfg.output, [&](std::ostream& os) { write_json(os, j); });
        } else if (*hopf) {
            const RunConfig cfg = resolve(hop, {});
            std::vector<double> deltas;
            for (double d : cfg.delta.values()) deltas.push_back(deg_to_rad(d));
            std::vector<HopfCurvePoint> pts;
            for (HopfBranch b : {HopfBranch::in_phase, HopfBranch::anti_phase}) {
                if (branch != "both" && branch != to_string(b)) continue;
                const auto part = hopf_curve(b, deltas, cfg.params);
                pts.insert(pts.end(), part.begin(), part.end());
            }
            with_output(cfg.output, [&](std::ostream& os) { write_hopf_csv(os, pts); });
        } else if (*cycle) {
            const RunConfig cfg = resolve(cyc, with_ic("anti"));
            if (cfg.ic == "standard") throw ConfigError("cycle needs a single named initial condition");
            cycle_settings.integrator = cfg.integrator;
            const CycleRecord rec = find_limit_cycle(named_ic(cfg.ic, cfg.params), cfg.params, cycle_settings);
            json j{{"parameters", to_json(cfg.params)}, {"ic", cfg.ic}, {"cycle", to_json(rec)}};
            with_output(cfg.output, [&](std::ostream& os) { write_json(os, j); });
        } else if (*lyapunov) {
            RunConfig base = with_ic("anti");
            base.integrator.t_observe = 2000.0;
            const RunConfig cfg = resolve(lya, base);
            if (cfg.ic == "standard") throw ConfigError("lyapunov needs a single named initial condition");
            const double exponent = largest_lyapunov(named_ic(cfg.ic, cfg.params), cfg.params, cfg.integrator);
            json j{{"parameters", to_json(cfg.params)},
                   {"integrator", to_json(cfg.integrator)},
                   {"ic", cfg.ic},
                   {"exponent", exponent}};
            with_output(cfg.output, [&](std::ostream& os) { write_json(os, j); });
        } else if (*pdscan) {
            RunConfig base = with_ic("kick1");
            base.params = Parameters::from_degrees(212.0, 15.0);
            base.alpha = {212.0, 215.0, 601};
            const RunConfig cfg = resolve(pds, base);
            if (cfg.ic == "standard") throw ConfigError("pd-scan needs a single named initial condition");
            pd_settings.integrator = cfg.integrator;
            Parameters start = cfg.params;
            start.alpha = deg_to_rad(cfg.alpha.lo_deg);
            const auto scan = period_doubling_scan(cfg.params.delta, deg_to_rad(cfg.alpha.lo_deg),
                                                   deg_to_rad(cfg.alpha.hi_deg), cfg.alpha.n, cfg.params,
                                                   named_ic(cfg.ic, start), pd_settings);
            with_output(cfg.output, [&](std::ostream& os) { write_pd_scan_csv(os, scan); });
            if (!summary_path.empty()) {
                json j = to_json(summarize_cascade(scan, pd_settings.cluster_tolerance));
                j["parameters"] = to_json(cfg.params);
                j["failed_points"] = json::array();
                for (const auto& pt : scan)
                    if (!pt.ok)
                        j["failed_points"].push_back(
                            {{"alpha_deg", rad_to_deg(pt.alpha)}, {"branch", pt.branch}, {"error", pt.error}});
                with_output(summary_path, [&](std::ostream& os) { write_json(os, j); });
            }
        } else if (*sweep) {
            const RunConfig cfg = resolve(swp, {});
            std::function<void(std::size_t, std::size_t)> report_progress;
            if (progress)
                report_progress = [](std::size_t done, std::size_t total) {
                    std::cerr << "cells " << done << '/' << total << '\n';
                };
            const auto cells = sweep_plane(cfg, report_progress);
            with_output(cfg.output, [&](std::ostream& os) { write_sweep_csv(os, cells); });
            if (!cfg.output.empty() && cfg.output != "-") {
                json meta{{"parameters", to_json(cfg.params)},
                          {"integrator", to_json(cfg.integrator)},
                          {"ic", cfg.ic},
                          {"random_generator", random_generator_name},
                          {"seed", cfg.seed},
                          {"cells", json::array()}};
                for (const auto& c : cells) {
                    json cell{{"alpha_deg", c.alpha_deg}, {"delta_deg", c.delta_deg}, {"outcomes", json::array()}};
                    for (const auto& o : c.outcomes) {
                        json oj{{"ic", o.ic}, {"label", o.label.to_string()}};
                        if (!o.error.empty()) oj["error"] = o.error;
                        cell["outcomes"].push_back(oj);
                    }
                    meta["cells"].push_back(cell);
                }
                with_output(cfg.output + ".meta.json", [&](std::ostream& os) { write_json(os, meta); });
            }
        }
    } catch (const UsageError& e) {
        return report(exit_usage, "usage", e.what());
    } catch (const ConfigError& e) {
        return report(exit_config, "config", e.what());
    } catch (const DomainError& e) {
        return report(exit_domain, "domain", e.what());
    } catch (const std::invalid_argument& e) {
        return report(exit_domain, "invalid-argument", e.what());
    } catch (const IntegrationError& e) {
        return report(exit_integration, "integration", e.what());
    } catch (const DivergenceError& e) {
        return report(exit_integration, "divergence", e.what());
    } catch (const NotPeriodicError& e) {
        return report(exit_not_periodic, "not-periodic", e.what());
    } catch (const InsufficientDataError& e) {
        return report(exit_not_periodic, "insufficient-data", e.what());
    } catch (const SectionTimeout& e) {
        return report(exit_not_periodic, "section-timeout", e.what());
    } catch (const IoError& e) {
        return report(exit_io, "io", e.what());
    } catch (const std::exception& e) {
        return report(exit_internal, "internal", e.what());
    }
    return exit_ok;
}
