#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qencode/detection.hpp"
#include "qencode/elements.hpp"
#include "qencode/fock.hpp"
#include "qencode/sources.hpp"

namespace qencode {

// Canonical channel names of the encoder layout.
namespace ch {
inline constexpr const char* kIn1 = "in1";   // qubit input
inline constexpr const char* kIn2 = "in2";   // downconversion arm 2
inline constexpr const char* kIn3 = "in3";   // downconversion arm 3
inline constexpr const char* kRes = "res";   // pair photon routed to the encoding splitter
inline constexpr const char* kOut1 = "out1"; // encoded output 1
inline constexpr const char* kGate = "gate"; // gate detector port
inline constexpr const char* kOut3 = "out3"; // encoded output 3
} // namespace ch

struct Circuit {
    ChannelRegistry channels;
    int internal_dim = 1;
    std::vector<ElementSpec> elements;
    std::vector<DetectorSpec> detectors;
    std::vector<std::string> loss_channels;

    const DetectorSpec& detector(const std::string& name) const;
};

// A circuit plus the classical mixture of input states it is fed, along with
// the knobs it was built from so reference variants can be rebuilt.
struct Apparatus {
    Circuit circuit;
    std::vector<WeightedState> branches;

    std::string kind; // "ideal" or "full"
    SourceConfig source;
    OverlapSpec overlaps;
    std::map<std::string, double> rotation_error; // channel -> radians
    int coherent_sector = -1; // >= 0 restricts the pulse to one photon number
};

// Applies every element in order to every branch.
std::vector<WeightedState> propagate(const Apparatus& apparatus);

// Minimal encoder: the qubit photon meets one pair photon at a polarizing
// beam splitter; the partner photon exits directly on out3.
Apparatus build_ideal_encoder(const QubitAmplitudes& qubit);

// Full bench layout: pair production behind its own polarizing beam splitter
// (one photon to res, one to out3), optional polarization-rotation errors,
// per-channel coupling losses, and detector-efficiency taps.
Apparatus build_full_apparatus(const SourceConfig& source, const OverlapSpec& overlaps,
                               std::vector<DetectorSpec> detectors = {},
                               const std::map<std::string, double>& rotation_error = {},
                               int coherent_sector = -1);

// Same apparatus with different qubit amplitudes (and optionally ideal
// internal overlaps), used to derive convention-dependent phase tables.
Apparatus rebuild_with_qubit(const Apparatus& apparatus, const QubitAmplitudes& qubit,
                             bool force_indistinguishable = false);

// Feed-forward phase correction on V of out1 for each gate outcome
// ("accept" = gate analyzer's accepted port, "reject" = the rejected port),
// derived from a reference run at alpha = beta = 1/sqrt(2) with fully
// indistinguishable photons. The table depends only on the circuit's phase
// conventions, never on the logical input.
std::map<std::string, double> feed_forward_table(const Apparatus& apparatus);

struct EncoderResult {
    double prob_accept = 0.0;
    double prob_reject = 0.0;
    double success_probability = 0.0; // prob_accept + prob_reject
    PureState state_accept; // encoded two-photon state after correction
    PureState state_reject;
    std::map<std::string, double> correction; // the feed-forward table used
};

// Runs the encoder with the gate analyzer at 45 degrees, splits on exactly
// one gate photon in the accepted or rejected slot, and applies the
// feed-forward correction to each heralded state.
EncoderResult encode(const Apparatus& apparatus);

struct GhzResult {
    PureState state;
    double probability = 0.0; // weight of the one-photon-per-output sector
    double correction = 0.0;  // phase applied to V of the gate channel
};

// State on (out1, gate, out3) conditioned on exactly one photon in each,
// before any gate analyzer projection, with the convention phase on V of the
// gate removed. Requires alpha = beta up to 1e-9 (AsymmetricInput otherwise).
GhzResult ghz_state(const Apparatus& apparatus);

struct Eq2Report {
    double encoded_weight = 0.0; // exactly one gate photon
    double perp_weight = 0.0;    // everything else
    double cross_magnitude = 0.0;
    std::set<int> perp_gate_counts; // gate photon numbers seen in the rest
    PureState encoded;
    PureState perp;
};

// Splits the propagated output by gate photon number and checks that the
// non-encoded remainder is orthogonal and holds zero or two gate photons.
Eq2Report verify_eq2(const Apparatus& apparatus);

void dump_circuit(const Apparatus& apparatus, std::ostream& os);

// Helpers shared by the experiment runners.
std::set<std::uint16_t> loss_channel_indices(const Circuit& circuit);
PureState target_pair_state(const ChannelRegistry& reg, const QubitAmplitudes& qubit);

} // namespace qencode
