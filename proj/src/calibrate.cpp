#include "qencode/calibrate.hpp"

#include <algorithm>
#include <cmath>

#include "qencode/errors.hpp"

namespace qencode {

double evaluate_observable(const Scenario& s, const std::string& name) {
    if (name == "visibility") return observable_visibility(s);
    if (name == "herald_ratio") return observable_herald_ratio(s);
    if (name == "qubit_detection_prob") return observable_qubit_detection_prob(s);
    if (name == "ghz_ratio") return observable_ghz_ratio(s);
    if (name == "fringe_peak_expected") {
        const auto out = run_fringe(s, true);
        double peak = 0.0;
        for (const auto& row : out.rows) peak = std::max(peak, row.expected);
        return peak;
    }
    throw ConfigError("unknown observable '" + name + "'");
}

void set_parameter(Scenario& s, const std::string& name, double value) {
    if (name == "overlap_qubit_dc") {
        s.overlap_gram(0, 1) = s.overlap_gram(1, 0) = value;
        s.overlap_gram(0, 2) = s.overlap_gram(2, 0) = value;
    } else if (name == "coupling_eta_arms") {
        s.sources.coupling_eta["in2"] = value;
        s.sources.coupling_eta["in3"] = value;
    } else if (name == "mu") {
        s.sources.mu = value;
    } else if (name == "ghz_mu") {
        s.ghz_mu = value;
    } else if (name == "pair_emission_prob") {
        s.sources.pair_emission_prob = value;
    } else {
        throw ConfigError("unknown calibration parameter '" + name + "'");
    }
}

CalibrationResult calibrate_target(Scenario& s, const CalibrationTarget& target) {
    if (!(target.lower < target.upper))
        throw CalibrationFailed("bracket for '" + target.parameter + "' is empty");
    if (target.tolerance <= 0.0) throw CalibrationFailed("tolerance must be positive");

    CalibrationResult result;
    result.observable = target.observable;
    result.parameter = target.parameter;

    auto eval = [&](double x) {
        Scenario trial = s;
        set_parameter(trial, target.parameter, x);
        ++result.evaluations;
        return evaluate_observable(trial, target.observable);
    };

    double lo = target.lower, hi = target.upper;
    double flo = eval(lo), fhi = eval(hi);
    if ((flo - target.target) * (fhi - target.target) > 0.0) {
        const double best = std::abs(flo - target.target) < std::abs(fhi - target.target)
                                ? flo
                                : fhi;
        throw CalibrationFailed("target " + target.observable + "=" + format_g12(target.target) +
                                " is not bracketed by [" + format_g12(lo) + ", " +
                                format_g12(hi) + "]; closest value " + format_g12(best));
    }

    double x = lo, fx = flo;
    for (int iter = 0; iter < 200; ++iter) {
        x = 0.5 * (lo + hi);
        fx = eval(x);
        if (std::abs(fx - target.target) <= target.tolerance) break;
        if ((fx - target.target) * (flo - target.target) > 0.0) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        if (hi - lo < 1e-15 * std::max(1.0, std::abs(hi))) break;
    }
    if (std::abs(fx - target.target) > target.tolerance)
        throw CalibrationFailed("calibration of '" + target.parameter + "' stalled at " +
                                format_g12(fx) + " for target " + format_g12(target.target));

    set_parameter(s, target.parameter, x);
    result.value = x;
    result.achieved = fx;
    result.residual = std::abs(fx - target.target);
    return result;
}

std::vector<CalibrationResult> calibrate(Scenario& s,
                                         const std::vector<CalibrationTarget>& targets) {
    std::vector<CalibrationResult> results;
    results.reserve(targets.size());
    for (const auto& t : targets) results.push_back(calibrate_target(s, t));
    return results;
}

std::vector<CalibrationTarget> standard_targets() {
    return {
        // Lower ends sit just above degenerate points (no clicks / flat fringe),
        // where the observables are undefined and would throw.
        {"qubit_detection_prob", 1.0e-3, 1e-12, "mu", 0.0, 0.2},
        {"herald_ratio", 0.10, 1e-9, "coupling_eta_arms", 0.01, 1.0},
        {"visibility", 0.66, 1e-9, "overlap_qubit_dc", 0.05, 1.0},
        {"ghz_ratio", 19.0, 1e-6, "ghz_mu", 1e-4, 0.4},
        {"fringe_peak_expected", 80.0, 1e-6, "pair_emission_prob", 1e-9, 1.0},
    };
}

} // namespace qencode
