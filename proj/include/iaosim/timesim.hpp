#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iaosim/modal.hpp"
#include "iaosim/netmodel.hpp"
#include "iaosim/statespace.hpp"
#include "iaosim/types.hpp"

namespace iaosim {

enum class SignalKind { Zero, Step, Sinusoid };

/// Load power-rate input dP_L/dt applied at one bus.
struct InputSignal {
  SignalKind kind = SignalKind::Zero;
  double amplitude = 0.0;   // p.u./s
  double frequency = 0.0;   // rad/s, sinusoid only
  double start = 0.0;       // s
  std::string bus;

  double value(double t) const;
  /// Running integral, i.e. the load power deviation itself (p.u.).
  double integral(double t) const;
};

struct Trajectory {
  Vector time;     // uniform grid, s
  Matrix states;   // rows = time points, columns follow model.states
  double step = 0.0;
  StateSpaceModel model;
  InputSignal input;
};

/// Default step: min(0.01/f_max, 0.01 s) where f_max is the fastest modal
/// frequency of A in Hz.
double default_step(const StateSpaceModel& model);

/// Largest step simulate() accepts without an override: 0.01/f_max, or
/// infinity when A has no oscillatory modes.
double step_guard(const StateSpaceModel& model);

/// Classical fixed-step 4th-order integration of x' = A x + B_L u(t).
/// Steps larger than 0.01/f_max throw StepTooLarge unless allowed.
Trajectory simulate(const StateSpaceModel& model, const Vector& x0, const InputSignal& signal,
                    double step, double horizon, bool allow_large_step = false);

struct AreaSeries {
  std::vector<std::string> area_ids;  // sorted
  Matrix intvar;                      // rows = time points, p.u.
  Matrix rate;                        // d/dt intvar, p.u./s
  Vector inter_area;                  // rate of first area minus rate of second, p.u./s
  Vector time;
};

/// Net module power per area along the trajectory, its analytic rate of
/// change, and the inter-area series between the first two areas (sorted by
/// id). Rates use dP_G/dt = K_P omega_G plus the exact forcing correction, not
/// numerical differencing.
AreaSeries interaction_variables(const Trajectory& traj, const NetworkModel& network);

struct ResonanceResult {
  Trajectory resonant;
  Trajectory off_resonant;
  AreaSeries resonant_series;
  AreaSeries off_resonant_series;
  double resonant_growth = 0.0;      // last-decile peak / first-decile peak
  double off_resonant_growth = 0.0;
  double forcing_frequency = 0.0;    // rad/s
};

/// Forces dP_L = amplitude * sin(mode_freq * t) at `bus` and compares the
/// inter-area response growth against a control run at half the frequency.
ResonanceResult resonance_experiment(const StateSpaceModel& model, const NetworkModel& network,
                                     double mode_freq, double amplitude, const std::string& bus,
                                     double horizon, double step = 0.0);

struct SweepRow {
  double value = 0.0;
  std::vector<double> interconnection_freqs;  // rad/s, ascending
  int cis_zero_count = 0;
  int dis_zero_count = 0;
};

/// Rebuilds the reduced model per parameter value and identifies the
/// interconnection mode against the tie-disconnected variant. Paths:
/// "lines.<from>-<to>.X" or "generators.<bus>.M".
std::vector<SweepRow> sweep(const NetworkModel& network, const std::string& parameter_path,
                            const std::vector<double>& values, double zero_tol = 1e-6,
                            std::optional<OperatingPoint> op = std::nullopt);

/// Mean zero-crossing frequency (rad/s) with linear interpolation between
/// samples; 0 when the series crosses fewer than twice.
double zero_crossing_frequency(const Vector& series, double step);

}  // namespace iaosim
