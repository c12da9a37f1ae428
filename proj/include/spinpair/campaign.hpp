#pragma once

#include <string>

#include "spinpair/config.hpp"
#include "spinpair/report.hpp"

namespace spinpair {

/// Runs the cells described by the [sequence] section as-is: every listed
/// analysis phase, interleaved with the pi-shifted twin when requested.
/// The report carries the raw cell counts next to their density-matrix
/// expectations, the fringe table, and an amplitude fit once at least three
/// distinct phases are present.
Report run_simulate(const Config& cfg);

/// Runs the named study in cfg.preset (one of preset_names()) on top of the
/// supplied configuration and returns estimates, fits and band checks.
Report run_campaign(const Config& cfg);

}  // namespace spinpair
