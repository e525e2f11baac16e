#pragma once

#include <string>
#include <vector>

#include "qencode/fock.hpp"

namespace qencode {

enum class ElementKind { PBS, BS, HWP, Rot, Phase, LossTap };

std::string element_kind_name(ElementKind k);
ElementKind element_kind_from_name(const std::string& name);

// Declarative description of one circuit element, as it appears in scenario
// configs and in dump-circuit output. Port meaning by kind:
//   PBS     ports = {in_a, in_b, out_c, out_d}, no params
//   BS      ports = {in_a, in_b, out_c, out_d}, params = {transmissivity}
//   HWP     ports = {channel},                  params = {angle_rad}
//   Rot     ports = {channel},                  params = {angle_rad}
//   Phase   ports = {channel},                  params = {phi_rad}, pol selects H or V
//   LossTap ports = {channel, loss_channel},    params = {eta}
struct ElementSpec {
    ElementKind kind = ElementKind::Phase;
    std::vector<std::string> ports;
    std::vector<double> params;
    Pol pol = Pol::V;
};

// Polarizing beam splitter on four distinct channels. Transmits H (in_a ->
// out_c, in_b -> out_d, coefficient 1) and reflects V (in_a -> out_d,
// in_b -> out_c, coefficient i). The reverse direction mirrors the forward
// rules so the completion is unitary. Acts identically on every internal label.
ModeUnitary pbs(const ChannelRegistry& reg, const std::string& in_a, const std::string& in_b,
                const std::string& out_c, const std::string& out_d, int internal_dim);

// Polarization- and internal-preserving beamsplitter, matrix
// [[sqrt(T), i sqrt(1-T)], [i sqrt(1-T), sqrt(T)]] per (pol, internal) pair.
ModeUnitary bs(const ChannelRegistry& reg, const std::string& in_a, const std::string& in_b,
               const std::string& out_c, const std::string& out_d, double transmissivity,
               int internal_dim);

// Half-wave plate with optic axis at theta: [[cos2θ, sin2θ], [sin2θ, -cos2θ]]
// on (H, V) of the channel.
ModeUnitary hwp(const ChannelRegistry& reg, const std::string& channel, double theta,
                int internal_dim);

// Proper polarization rotation by theta (identity at zero), the knob used for
// small alignment and birefringence errors.
ModeUnitary pol_rotation(const ChannelRegistry& reg, const std::string& channel, double theta,
                         int internal_dim);

// Multiplies amplitudes of (channel, pol) by e^{i phi}.
ModeUnitary phase_shift(const ChannelRegistry& reg, const std::string& channel, Pol pol,
                        double phi, int internal_dim);

// Beamsplitter of transmissivity eta from `channel` into `loss_channel`,
// per (pol, internal). The loss channel must be freshly allocated; use
// allocate_loss_channel to pick a deterministic unused name.
ModeUnitary loss_tap(const ChannelRegistry& reg, const std::string& channel,
                     const std::string& loss_channel, double eta, int internal_dim);

std::string allocate_loss_channel(ChannelRegistry& reg, const std::string& channel);

// Rotation mapping (H, V) to (cosθ H + sinθ V, -sinθ H + cosθ V): after
// applying it as a unitary, the channel's H slot holds the analyzer's
// accepted polarization and the V slot the rejected one.
Eigen::Matrix2d analyzer_basis(double theta);

ModeUnitary analyzer_rotation(const ChannelRegistry& reg, const std::string& channel,
                              double theta, int internal_dim);

// Instantiates the ModeUnitary for a declared element.
ModeUnitary element_unitary(const ElementSpec& spec, const ChannelRegistry& reg, int internal_dim);

} // namespace qencode
