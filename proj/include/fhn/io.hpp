#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fhn/attractors.hpp"
#include "fhn/equilibria.hpp"
#include "fhn/integrator.hpp"
#include "fhn/sweep.hpp"

namespace fhn {

/// Shortest-safe decimal with 17 significant digits.
std::string format_double(double v);

/// Columns t,x1,y1,x2,y2. With dt > 0 the dense output is sampled on a uniform grid,
/// otherwise every accepted step is written.
void write_timeseries_csv(std::ostream& os, const Trajectory& traj, double dt = 0.0);

/// Columns alpha_deg,x1_section,branch_seed; one row per recorded return.
void write_pd_scan_csv(std::ostream& os, const std::vector<PdScanPoint>& scan);

/// Columns alpha_deg,delta_deg,labels,multistable; labels joined by ';'.
void write_sweep_csv(std::ostream& os, const std::vector<SweepCell>& cells);

/// Columns delta_deg,alpha_deg,y0,branch.
void write_hopf_csv(std::ostream& os, const std::vector<HopfCurvePoint>& points);

nlohmann::json to_json(const Parameters& p);
nlohmann::json to_json(const IntegratorSettings& cfg);
nlohmann::json to_json(const State& s);
nlohmann::json to_json(const Equilibrium& eq, const Parameters& p);
nlohmann::json to_json(const CycleRecord& rec);
nlohmann::json to_json(const CascadeSummary& summary);

/// Writes j followed by a newline.
void write_json(std::ostream& os, const nlohmann::json& j);

} // namespace fhn
