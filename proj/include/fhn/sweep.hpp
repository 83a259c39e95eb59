#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <string>
#include <vector>

#include "fhn/attractors.hpp"
#include "fhn/integrator.hpp"
#include "fhn/model.hpp"

namespace fhn {

struct AngleGrid {
    double lo_deg = 0.0;
    double hi_deg = 0.0;
    std::size_t n = 2;

    /// n evenly spaced values from lo_deg to hi_deg inclusive.
    std::vector<double> values() const;
};

struct RunConfig {
    Parameters params;          // angles held in radians after parsing
    IntegratorSettings integrator;
    AngleGrid alpha{0.0, 359.0, 360};
    AngleGrid delta{1.0, 90.0, 90};
    std::string ic = "standard"; // standard, or one named initial condition
    std::uint64_t seed = 0;
    std::string output;          // empty: standard output
    std::size_t workers = 0;     // 0: hardware concurrency

    void validate() const;
};

/// Key-value config with [parameters], [integrator], [grid] and [run] sections.
/// Angles are given in degrees (alpha_deg, delta_deg, grid bounds). Unknown keys and
/// malformed values throw ConfigError.
/// Keys absent from the file keep their value from `base`.
RunConfig parse_run_config(std::istream& in, RunConfig base = {});
RunConfig load_run_config(const std::string& path, RunConfig base = {});

/// Sets one key as it would appear in a config file, e.g. ("parameters", "alpha_deg", "210").
void set_config_value(RunConfig& cfg, const std::string& section, const std::string& key, const std::string& value);

struct NamedState {
    std::string name;
    State state;
};

inline constexpr const char* random_generator_name = "std::mt19937_64";

/// Offset from the symmetric equilibrium for "sym", "anti", "kick1", "kick2" or "eq".
State named_ic(const std::string& name, const Parameters& p);

/// IC-sym, IC-anti, IC-kick1, IC-kick2, then four random offsets of length 0.3 drawn
/// from std::mt19937_64 seeded with `seed` (the same offsets for every cell).
std::vector<NamedState> standard_ic_set(const Parameters& p, std::uint64_t seed = 0);

struct IcOutcome {
    std::string ic;
    RegimeLabel label;
    std::string error; // non-empty when the label is Unclassified because of a failure
};

struct SweepCell {
    double alpha_deg = 0.0;
    double delta_deg = 0.0;
    std::vector<IcOutcome> outcomes;
    std::vector<std::string> inventory; // sorted, deduplicated
    std::size_t attractor_count = 0;
    bool multistable = false;
};

/// Deduplicates labels. A Sequential label and its swap image merge into one entry
/// "Sequential(w|w')" when both were observed. A Sequential label whose swap image is a
/// different word stands for two coexisting attractors in attractor_count.
void build_inventory(SweepCell& cell);

SweepCell analyse_cell(double alpha_deg, double delta_deg, const RunConfig& cfg);

/// Number of worker threads: FHN_WORKERS when set, else cfg.workers, else hardware concurrency.
std::size_t resolve_workers(const RunConfig& cfg);

/// Cells in row-major order (delta outer, alpha inner). Alpha values that coincide on the
/// circle are computed once and shared.
std::vector<SweepCell> sweep_plane(const RunConfig& cfg,
                                   const std::function<void(std::size_t done, std::size_t total)>& progress = {});

} // namespace fhn
