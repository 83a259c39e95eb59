#include "fhn/io.hpp"

#include <cmath>
#include <cstdio>

namespace fhn {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

// Grid angles are set in degrees and held in radians; rounding to 1e-9 degrees
// undoes the conversion noise without touching any meaningful digit.
double grid_deg(double rad) { return std::round(rad_to_deg(rad) * 1e9) / 1e9; }

} // namespace

void write_timeseries_csv(std::ostream& os, const Trajectory& traj, double dt) {
    os << "t,x1,y1,x2,y2\n";
    auto row = [&](double t, const State& s) {
        os << format_double(t) << ',' << format_double(s.x1) << ',' << format_double(s.y1) << ','
           << format_double(s.x2) << ',' << format_double(s.y2) << '\n';
    };
    if (traj.empty()) return;
    if (dt > 0.0) {
        const double t0 = traj.t_begin();
        const auto n = static_cast<std::size_t>(std::floor((traj.t_end() - t0) / dt + 1e-9));
        for (std::size_t i = 0; i <= n; ++i) {
            const double t = t0 + dt * static_cast<double>(i);
            row(t, traj.at(t));
        }
        return;
    }
    for (std::size_t i = 0; i < traj.size(); ++i) row(traj.times()[i], traj.states()[i]);
}

void write_pd_scan_csv(std::ostream& os, const std::vector<PdScanPoint>& scan) {
    os << "alpha_deg,x1_section,branch_seed\n";
    for (const auto& pt : scan) {
        const std::string alpha = format_double(grid_deg(pt.alpha));
        for (double x : pt.x1) os << alpha << ',' << format_double(x) << ',' << pt.branch << '\n';
    }
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepCell>& cells) {
    os << "alpha_deg,delta_deg,labels,multistable\n";
    for (const auto& c : cells) {
        os << format_double(c.alpha_deg) << ',' << format_double(c.delta_deg) << ',';
        for (std::size_t i = 0; i < c.inventory.size(); ++i) os << (i ? ";" : "") << c.inventory[i];
        os << ',' << (c.multistable ? "true" : "false") << '\n';
    }
}

void write_hopf_csv(std::ostream& os, const std::vector<HopfCurvePoint>& points) {
    os << "delta_deg,alpha_deg,y0,branch\n";
    for (const auto& pt : points)
        os << format_double(grid_deg(pt.delta)) << ',' << format_double(rad_to_deg(pt.alpha)) << ','
           << format_double(pt.y0) << ',' << to_string(pt.branch) << '\n';
}

json to_json(const Parameters& p) {
    return {{"a", p.a},
            {"eps", p.eps},
            {"k", p.k},
            {"g", p.g},
            {"alpha_deg", grid_deg(p.alpha)},
            {"delta_deg", grid_deg(p.delta)}};
}

json to_json(const IntegratorSettings& cfg) {
    return {{"rel_tol", cfg.rel_tol},
            {"abs_tol", cfg.abs_tol},
            {"max_step", cfg.max_step},
            {"t_transient", cfg.t_transient},
            {"t_observe", cfg.t_observe}};
}

json to_json(const State& s) { return {{"x1", s.x1}, {"y1", s.y1}, {"x2", s.x2}, {"y2", s.y2}}; }

namespace {

json complex_json(std::complex<double> z) { return {{"re", z.real()}, {"im", z.imag()}}; }

} // namespace

json to_json(const Equilibrium& eq, const Parameters& p) {
    json j;
    j["kind"] = eq.kind == EquilibriumKind::symmetric ? "symmetric" : "asymmetric-pair";
    j["y"] = eq.y;
    j["states"] = json::array();
    double residual = 0.0;
    for (const auto& s : eq.states) {
        j["states"].push_back(to_json(s));
        const auto f = vector_field(s, p).to_array();
        for (double v : f) residual = std::max(residual, std::abs(v));
    }
    j["residual"] = residual;
    j["eigenvalues"] = json::array();
    for (const auto& l : eq.spectrum.values) j["eigenvalues"].push_back(complex_json(l));
    j["stability"] = to_string(eq.stability);
    return j;
}

json to_json(const CycleRecord& rec) {
    json j;
    j["period"] = rec.period;
    j["section_period"] = rec.section_period;
    j["fixed_point"] = to_json(rec.fixed_point);
    j["section_points"] = json::array();
    for (const auto& s : rec.section_points) j["section_points"].push_back(to_json(s));
    j["trivial_multiplier"] = complex_json(rec.multipliers[rec.trivial_index]);
    j["multipliers"] = json::array();
    for (std::size_t i = 0; i < rec.multipliers.size(); ++i)
        if (i != rec.trivial_index) j["multipliers"].push_back(complex_json(rec.multipliers[i]));
    j["log_moduli"] = rec.log_moduli;
    j["trace_integral"] = rec.trace_integral;
    j["max_nontrivial_modulus"] = rec.max_nontrivial_modulus();
    j["symmetry"] = to_string(rec.symmetry);
    return j;
}

json to_json(const CascadeSummary& s) {
    json j;
    j["route"] = s.route;
    j["monotone_before_chaos"] = s.monotone_before_chaos;
    j["chaos_onset_deg"] = s.chaos_onset ? json(rad_to_deg(*s.chaos_onset)) : json(nullptr);
    j["merge_alpha_deg"] = s.merge_alpha ? json(rad_to_deg(*s.merge_alpha)) : json(nullptr);
    return j;
}

void write_json(std::ostream& os, const json& j) { os << j.dump(2) << '\n'; }

} // namespace fhn
