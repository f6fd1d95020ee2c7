#pragma once

#include <string>
#include <vector>

#include "iaosim/results.hpp"
#include "iaosim/scenario.hpp"

namespace iaosim {

/// Spectrum, classification, and participation of the scenario's model.
ResultBundle cmd_eig(const Scenario& scenario);

/// Participation matrix plus dominant states of every oscillatory mode.
ResultBundle cmd_participation(const Scenario& scenario);

/// Builds the tie-disconnected variant, pairs the two spectra, and reports
/// the interconnection modes with their dominant states.
ResultBundle cmd_modes_compare(const Scenario& scenario);

/// Time-domain run with interaction-variable series; runs the resonance
/// experiment instead when the scenario requests one.
ResultBundle cmd_simulate(const Scenario& scenario, bool allow_large_step = false);

/// Interconnection-mode frequency per parameter value.
ResultBundle cmd_sweep(const Scenario& scenario, const std::string& parameter_path,
                       const std::vector<double>& values);

}  // namespace iaosim
