#pragma once

#include <string>
#include <vector>

#include "qencode/scenario.hpp"

namespace qencode {

// One scalar observable pinned to a measured value by adjusting one scenario
// parameter over a bracket. Observables: visibility, herald_ratio,
// qubit_detection_prob, ghz_ratio, fringe_peak_expected. Parameters:
// overlap_qubit_dc, coupling_eta_arms, mu, ghz_mu, pair_emission_prob.
struct CalibrationTarget {
    std::string observable;
    double target = 0.0;
    double tolerance = 1e-9;
    std::string parameter;
    double lower = 0.0;
    double upper = 1.0;
};

struct CalibrationResult {
    std::string observable;
    std::string parameter;
    double value = 0.0;    // fitted parameter
    double achieved = 0.0; // observable at the fitted value
    double residual = 0.0; // |achieved - target|
    int evaluations = 0;
};

double evaluate_observable(const Scenario& s, const std::string& name);
void set_parameter(Scenario& s, const std::string& name, double value);

// Bisection on a monotone observable. Throws CalibrationFailed when the
// target is not bracketed or the residual stays above tolerance.
CalibrationResult calibrate_target(Scenario& s, const CalibrationTarget& target);

// Applies the targets in order, each starting from the scenario the previous
// one produced.
std::vector<CalibrationResult> calibrate(Scenario& s,
                                         const std::vector<CalibrationTarget>& targets);

// The standard bench-matching sequence: pulse strength from the qubit
// detection probability, arm couplings from the heralding ratio, photon
// overlap from the fringe visibility, three-photon pulse strength from the
// signal-to-background ratio, and pair emission from the peak count level.
std::vector<CalibrationTarget> standard_targets();

} // namespace qencode
