#pragma once

#include "ulsim/config.hpp"

namespace ulsim {

/// The four link-adaptation scenarios over default parameters. They differ
/// only in the threshold table and the HARQ switch; with a shared seed the
/// channel realization is identical across all of them.
inline SimConfig build_scenario(ScenarioId id) {
    SimConfig c;
    apply_scenario_preset(c, id);
    return c;
}

} // namespace ulsim
