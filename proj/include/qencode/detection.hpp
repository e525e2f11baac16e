#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qencode/elements.hpp"
#include "qencode/fock.hpp"

namespace qencode {

// Threshold (non-number-resolving) detector behind a polarization analyzer.
// The analyzer rotates the channel so its accepted polarization lands in the
// H slot; the detector fires when at least one photon occupies the watched
// slot, over any internal label. Efficiency is realized as a loss tap in
// front of an ideal detector (see apply_detector_losses).
struct DetectorSpec {
    std::string name;
    std::string channel;
    double theta = 0.0; // analyzer angle, radians
    double efficiency = 1.0;
    bool watch_rejected = false;
};

// Detector name -> fired. click_probability requires one entry per configured
// detector; click_marginal leaves unmentioned detectors unconstrained.
using ClickPattern = std::map<std::string, bool>;

// One classical-mixture component of the apparatus state.
struct WeightedState {
    double weight = 1.0;
    PureState state;
    std::string label;
};

double click_probability(const PureState& state, const std::vector<DetectorSpec>& detectors,
                         const ClickPattern& pattern, const ChannelRegistry& reg,
                         int internal_dim);

double click_marginal(const PureState& state, const std::vector<DetectorSpec>& detectors,
                      const ClickPattern& partial, const ChannelRegistry& reg,
                      int internal_dim);

struct ConditionalResult {
    PureState state;
    double probability = 0.0;
};

// Projects onto a click pattern, renormalizes, and drops modes whose
// occupation is identical in every retained ket. Only modes on detector
// channels and on `strip_channels` (typically loss channels) are eligible
// for dropping, so unmeasured signal modes always survive.
ConditionalResult conditional_state(const PureState& state,
                                    const std::vector<DetectorSpec>& detectors,
                                    const ClickPattern& pattern, const ChannelRegistry& reg,
                                    int internal_dim,
                                    const std::vector<std::string>& strip_channels = {});

// Drops modes on the listed channels whose occupation is identical in every
// ket of the state. Amplitudes are preserved; the caller renormalizes.
PureState strip_constant_modes(const PureState& state, const std::set<std::uint16_t>& channels);

// Allocates a loss channel for every detector with efficiency below one and
// returns the corresponding taps, to be applied before measurement.
std::vector<ElementSpec> apply_detector_losses(ChannelRegistry& reg,
                                               std::vector<DetectorSpec>& detectors);

// Analyzer angles of one measurement setting, radians.
struct ThreefoldSetting {
    double theta1 = 0.0;
    double theta2 = 0.0;
    double theta3 = 0.0;
};

// Probability that all three detectors fire together at each setting, summed
// over mixture components. Detector order matches the setting fields.
std::vector<double> threefold_table(const std::vector<WeightedState>& branches,
                                    DetectorSpec det1, DetectorSpec det2, DetectorSpec det3,
                                    const std::vector<ThreefoldSetting>& settings,
                                    const ChannelRegistry& reg, int internal_dim);

// Projection onto the exclusive coincidence events: every listed detector's
// channel carries exactly one photon and that photon sits in the accepted
// slot of the analyzer. A second photon anywhere in a detector channel
// (accepted or rejected) vetoes the event; unlisted channels, such as loss
// taps, are unconstrained. Returns the unnormalized projected state in the
// rotated analyzer frame, so its squared norm is the event probability.
PureState project_exclusive_clicks(const PureState& state,
                                   const std::vector<DetectorSpec>& detectors,
                                   const ChannelRegistry& reg, int internal_dim);

// Deterministic per-stream seed derivation from one master seed.
std::uint64_t rng_stream_seed(std::uint64_t master, std::uint64_t stream);

struct CountRecord {
    std::vector<double> means;     // expected counts per setting
    std::vector<long long> counts; // Poisson samples
};

// Draws Poisson counts with mean p * rate * duration, one independent stream
// per setting so results are stable under reordering or subsetting.
CountRecord sample_counts(const std::vector<double>& probabilities, double rate_hz,
                          double duration_s, std::uint64_t seed);

struct FringeFit {
    double visibility = 0.0;
    double visibility_err = 0.0;
    double phase = 0.0;  // radians, fringe maximum at theta = phase
    double offset = 0.0; // mean level
    double amplitude = 0.0;
};

// Least-squares fit of counts to offset * (1 + V cos(2(theta - phase))),
// period fixed at pi. Visibility is clamped to [0, 1]; its standard error
// comes from the linear-model covariance.
FringeFit fit_fringe(const std::vector<double>& angles_rad, const std::vector<double>& counts);

} // namespace qencode
