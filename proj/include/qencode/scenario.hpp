#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qencode/detection.hpp"
#include "qencode/encoder.hpp"
#include "qencode/sources.hpp"

namespace qencode {

// Analyzer schedule of the fringe scan: theta3 sweeps over at least one
// period (pi) while theta1 and the gate analyzer stay fixed.
struct FringeSchedule {
    double start_deg = 0.0;
    double stop_deg = 180.0;
    int points = 13;
    double gate_deg = 45.0;
    double theta1_deg = 45.0;
};

// Complete description of one simulated experimental run.
struct Scenario {
    std::string name = "scenario";
    std::uint64_t seed = 1;
    double pulse_rate_hz = 76.0e6;
    double duration_s = 1200.0;
    SourceConfig sources;
    Eigen::Matrix3d overlap_gram = Eigen::Matrix3d::Ones(); // [qubit, dc2, dc3]
    std::vector<DetectorSpec> detectors; // empty = the standard three
    std::map<std::string, double> rotation_error_deg;
    FringeSchedule fringe;
    double ghz_mu = -1.0; // pulse strength for the three-photon runs; <0 = sources.mu

    bool operator==(const Scenario& other) const;
};

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path);

struct ApparatusOptions {
    int coherent_sector = -1;
    double mu_override = -1.0;            // >= 0 replaces sources.mu
    double pair_emission_override = -1.0; // >= 0 replaces pair_emission_prob
    bool qubit_off = false;               // replace the input pulse with vacuum
    std::optional<QubitAmplitudes> qubit;
};

Apparatus apparatus_from(const Scenario& s, const ApparatusOptions& opt = {});

// One line of a coincidence-count table. The gate analyzer angle is part of
// the setting label; serialized columns carry theta1 and theta3 only.
struct CountRow {
    std::string setting;
    double theta1_deg = 0.0;
    double theta3_deg = 0.0;
    double probability = 0.0; // per pulse
    double expected = 0.0;    // probability * rate * duration
    long long counts = 0;
};

struct BasisOutput {
    std::vector<CountRow> zero_rows; // logical |0> fed in
    std::vector<CountRow> one_rows;  // logical |1> fed in
};

// Threefold coincidences for both basis inputs at the four co/cross analyzer
// combinations, gate analyzer at its scheduled angle.
BasisOutput run_basis_states(const Scenario& s, bool exact);

struct FringeOutput {
    std::vector<CountRow> rows;
    FringeFit exact_fit;   // fit on per-pulse probabilities
    FringeFit sampled_fit; // fit on sampled counts (valid when !exact)
    bool exact = true;
};

FringeOutput run_fringe(const Scenario& s, bool exact, int points_override = -1,
                        double duration_override = -1.0);

struct GhzOutput {
    std::vector<CountRow> basis_rows;  // the eight H/V combinations
    std::vector<CountRow> parity_rows; // the eight +/-45 degree combinations
    double ratio = 0.0; // min(HHH, VVV) over the largest of the other six
    double mu_used = 0.0;
};

// Three-photon correlations at equal qubit amplitudes.
GhzOutput run_ghz(const Scenario& s, bool exact);

// Rates are exclusive threefold probabilities (exactly one photon per
// detector channel, each accepted by its analyzer) so that an undetected
// partner photon in an output channel vetoes the event; only photons in loss
// channels escape the veto.
struct NoiseRow {
    double mu = 0.0;
    double valid = 0.0;         // exclusive threefolds, one-photon pulse sector
    double error = 0.0;         // exclusive threefolds, two-photon pulse sector
    double error_lost_dc = 0.0; // errors with a downconversion photon in a loss channel
    double ratio = 0.0;         // error / valid
    double ratio_over_mu = 0.0;
    double qubit_detection = 0.0; // P(D1 fires) with the pair source off
};

// Exact per-pulse rates of the pulse-strength trade-off sweep, evaluated at
// the fringe-peak setting (all analyzers at 45 degrees).
std::vector<NoiseRow> run_noise_tradeoff(const Scenario& s, const std::vector<double>& mu_values);

// Scalar observables used by the calibration loop.
double observable_visibility(const Scenario& s);
double observable_herald_ratio(const Scenario& s);
double observable_qubit_detection_prob(const Scenario& s);
double observable_ghz_ratio(const Scenario& s);

// Count tables: header setting,theta1_deg,theta3_deg,prob_per_pulse,counts,
// duration_s,seed; the counts cell is left empty on exact runs. duration_s
// below zero means the scenario default.
void write_count_csv(std::ostream& os, const Scenario& s, const std::vector<CountRow>& rows,
                     bool exact, double duration_s = -1.0);
void write_noise_csv(std::ostream& os, const std::vector<NoiseRow>& rows);
// Fit summary as observable,value,stderr rows.
void write_fit_csv(std::ostream& os, const FringeOutput& out);

} // namespace qencode
