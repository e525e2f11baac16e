#include "qencode/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "qencode/errors.hpp"

namespace qencode {

namespace {

constexpr double kRootHalf = 0.70710678118654752440;

int channel_photons(const FockKet& ket, std::uint16_t channel, Pol pol) {
    int n = 0;
    for (const auto& mo : ket.occupations())
        if (mo.mode.spatial == channel && mo.mode.pol == pol) n += mo.count;
    return n;
}

int channel_photons(const FockKet& ket, std::uint16_t channel) {
    return channel_photons(ket, channel, Pol::H) + channel_photons(ket, channel, Pol::V);
}

std::vector<WeightedState> make_branches(const ChannelRegistry& reg, const std::string& kind,
                                         const SourceConfig& src, const OverlapSpec& ov,
                                         int coherent_sector) {
    src.validate();
    if (kind == "ideal") {
        // Deterministic Bell resource (|HH> + |VV>)/sqrt(2), prepared directly
        // on the resource and herald channels rather than post-selected from
        // the pair source.
        PureState pair;
        for (Pol pol : {Pol::H, Pol::V}) {
            FockKet ket;
            ket.add(ModeId{reg.index(ch::kRes), pol, 0}, 1);
            ket.add(ModeId{reg.index(ch::kOut3), pol, 0}, 1);
            pair.add_term(ket, kRootHalf);
        }
        PureState q = ideal_photon(reg, ch::kIn1, src.qubit, ov.qubit());
        return {WeightedState{1.0, tensor(q, pair), "qubit+pair"}};
    }
    if (kind != "full") throw ConfigError("unknown apparatus kind '" + kind + "'");

    PureState q;
    if (src.qubit_source == "off") {
        q = vacuum_state();
    } else if (src.qubit_source == "ideal") {
        q = ideal_photon(reg, ch::kIn1, src.qubit, ov.qubit());
    } else if (coherent_sector >= 0) {
        q = weak_coherent_term(reg, ch::kIn1, src.qubit, src.mu, coherent_sector,
                               src.coherent_n_max, ov.qubit());
    } else {
        q = weak_coherent(reg, ch::kIn1, src.qubit, src.mu, src.coherent_n_max, ov.qubit());
    }

    const double p = src.pair_emission_prob;
    std::vector<WeightedState> branches;
    if (p > 0.0) {
        PureState pair = spdc_pair(reg, ch::kIn2, ch::kIn3, ov.dc2(), ov.dc3());
        branches.push_back(WeightedState{p, tensor(q, pair), "pair"});
    }
    if (p < 1.0) branches.push_back(WeightedState{1.0 - p, q, "no-pair"});
    return branches;
}

std::vector<DetectorSpec> default_detectors() {
    DetectorSpec d1{"D1", ch::kOut1, 0.0, 1.0, false};
    DetectorSpec dg{"gate", ch::kGate, 0.0, 1.0, false};
    DetectorSpec d3{"D3", ch::kOut3, 0.0, 1.0, false};
    return {d1, dg, d3};
}

double wrap_phase(double phi) {
    while (phi <= -M_PI) phi += 2.0 * M_PI;
    while (phi > M_PI) phi -= 2.0 * M_PI;
    return phi;
}

FockKet pair_ket(const ChannelRegistry& reg, Pol pol) {
    FockKet ket;
    ket.add(ModeId{reg.index(ch::kOut1), pol, 0}, 1);
    ket.add(ModeId{reg.index(ch::kOut3), pol, 0}, 1);
    return ket;
}

FockKet triple_ket(const ChannelRegistry& reg, Pol pol) {
    FockKet ket = pair_ket(reg, pol);
    ket.add(ModeId{reg.index(ch::kGate), pol, 0}, 1);
    return ket;
}

void require_single_branch(const Apparatus& apparatus, const char* op) {
    if (apparatus.branches.size() != 1 ||
        std::abs(apparatus.branches.front().weight - 1.0) > 1e-12)
        throw ConfigError(std::string(op) +
                          " needs a deterministic source (one branch of weight 1); set "
                          "pair_emission_prob to 1");
}

// Sector of `state` with the given photon numbers in the accepted and
// rejected slots of the gate channel (number-resolved split).
PureState gate_sector(const PureState& state, std::uint16_t gate, int n_accept, int n_reject) {
    PureState sector;
    for (const auto& [ket, amp] : state.terms())
        if (channel_photons(ket, gate, Pol::H) == n_accept &&
            channel_photons(ket, gate, Pol::V) == n_reject)
            sector.add_term(ket, amp);
    return sector;
}

} // namespace

const DetectorSpec& Circuit::detector(const std::string& name) const {
    for (const auto& d : detectors)
        if (d.name == name) return d;
    throw UnknownDetector("no detector named '" + name + "'");
}

std::vector<WeightedState> propagate(const Apparatus& apparatus) {
    std::vector<WeightedState> out = apparatus.branches;
    for (const auto& spec : apparatus.circuit.elements) {
        const ModeUnitary u =
            element_unitary(spec, apparatus.circuit.channels, apparatus.circuit.internal_dim);
        for (auto& b : out) b.state = apply_unitary(b.state, u);
    }
    return out;
}

Apparatus build_ideal_encoder(const QubitAmplitudes& qubit) {
    qubit.validate();
    Apparatus app;
    app.kind = "ideal";
    app.source.qubit_source = "ideal";
    app.source.qubit = qubit;
    app.overlaps = OverlapSpec::indistinguishable();

    Circuit& c = app.circuit;
    for (const char* name : {ch::kIn1, ch::kRes, ch::kOut1, ch::kGate, ch::kOut3})
        c.channels.add(name);
    c.internal_dim = 1;
    ElementSpec merge;
    merge.kind = ElementKind::PBS;
    merge.ports = {ch::kIn1, ch::kRes, ch::kOut1, ch::kGate};
    c.elements = {merge};
    c.detectors = default_detectors();

    app.branches = make_branches(c.channels, app.kind, app.source, app.overlaps, -1);
    return app;
}

Apparatus build_full_apparatus(const SourceConfig& source, const OverlapSpec& overlaps,
                               std::vector<DetectorSpec> detectors,
                               const std::map<std::string, double>& rotation_error,
                               int coherent_sector) {
    source.validate();
    const bool with_pair = source.pair_emission_prob > 0.0;
    const int pulse_cap = source.qubit_source == "off"
                              ? 0
                              : (source.qubit_source == "ideal" ? 1 : source.coherent_n_max);
    if (pulse_cap + (with_pair ? 2 : 0) > kDefaultMaxPhotons)
        throw ConfigError("source configuration exceeds the photon cap");

    Apparatus app;
    app.kind = "full";
    app.source = source;
    app.overlaps = overlaps;
    app.rotation_error = rotation_error;
    app.coherent_sector = coherent_sector;

    Circuit& c = app.circuit;
    for (const char* name :
         {ch::kIn1, ch::kIn2, ch::kIn3, ch::kRes, ch::kOut1, ch::kGate, ch::kOut3})
        c.channels.add(name);
    c.internal_dim = overlaps.internal_dim;

    for (const auto& [channel, angle] : rotation_error) {
        c.channels.index(channel); // must exist
        if (angle == 0.0) continue;
        ElementSpec rot;
        rot.kind = ElementKind::Rot;
        rot.ports = {channel};
        rot.params = {angle};
        c.elements.push_back(std::move(rot));
    }

    for (const char* name : {ch::kIn1, ch::kIn2, ch::kIn3}) {
        const double eta = source.coupling(name);
        if (eta >= 1.0) continue;
        ElementSpec tap;
        tap.kind = ElementKind::LossTap;
        tap.ports = {name, allocate_loss_channel(c.channels, name)};
        tap.params = {eta};
        c.loss_channels.push_back(tap.ports[1]);
        c.elements.push_back(std::move(tap));
    }

    ElementSpec split;
    split.kind = ElementKind::PBS;
    split.ports = {ch::kIn2, ch::kIn3, ch::kRes, ch::kOut3};
    c.elements.push_back(std::move(split));
    ElementSpec merge;
    merge.kind = ElementKind::PBS;
    merge.ports = {ch::kIn1, ch::kRes, ch::kOut1, ch::kGate};
    c.elements.push_back(std::move(merge));

    c.detectors = detectors.empty() ? default_detectors() : std::move(detectors);
    for (auto& tap : apply_detector_losses(c.channels, c.detectors)) {
        c.loss_channels.push_back(tap.ports[1]);
        c.elements.push_back(std::move(tap));
    }

    app.branches = make_branches(c.channels, app.kind, app.source, app.overlaps, coherent_sector);
    return app;
}

Apparatus rebuild_with_qubit(const Apparatus& apparatus, const QubitAmplitudes& qubit,
                             bool reference_sources) {
    Apparatus ref = apparatus;
    ref.source.qubit = qubit;
    if (reference_sources) {
        ref.source.qubit_source = "ideal";
        ref.source.pair_emission_prob = 1.0;
        ref.coherent_sector = -1;
        ref.overlaps = OverlapSpec::indistinguishable();
        ref.circuit.internal_dim = 1;
    }
    ref.branches = make_branches(ref.circuit.channels, ref.kind, ref.source, ref.overlaps,
                                 ref.coherent_sector);
    return ref;
}

std::set<std::uint16_t> loss_channel_indices(const Circuit& circuit) {
    std::set<std::uint16_t> idx;
    for (const auto& name : circuit.loss_channels) idx.insert(circuit.channels.index(name));
    return idx;
}

PureState target_pair_state(const ChannelRegistry& reg, const QubitAmplitudes& qubit) {
    PureState target;
    target.add_term(pair_ket(reg, Pol::H), qubit.alpha);
    target.add_term(pair_ket(reg, Pol::V), qubit.beta);
    return target;
}

std::map<std::string, double> feed_forward_table(const Apparatus& apparatus) {
    const Apparatus ref =
        rebuild_with_qubit(apparatus, QubitAmplitudes{kRootHalf, kRootHalf}, true);
    const auto& reg = ref.circuit.channels;
    const auto gate = reg.index(ch::kGate);

    PureState state = propagate(ref).front().state;
    state = apply_unitary(state,
                          analyzer_rotation(reg, ch::kGate, M_PI / 4.0, ref.circuit.internal_dim));

    std::set<std::uint16_t> strip = loss_channel_indices(ref.circuit);
    strip.insert(gate);

    std::map<std::string, double> table;
    for (const auto& [outcome, slots] :
         std::map<std::string, std::pair<int, int>>{{"accept", {1, 0}}, {"reject", {0, 1}}}) {
        PureState sector = gate_sector(state, gate, slots.first, slots.second);
        sector = strip_constant_modes(sector, strip);
        const Complex hh = sector.amplitude(pair_ket(reg, Pol::H));
        const Complex vv = sector.amplitude(pair_ket(reg, Pol::V));
        if (std::abs(hh) < 1e-12 || std::abs(vv) < 1e-12)
            throw ConfigError("reference run left a heralded component empty; the circuit does "
                              "not realize the encoder");
        table[outcome] = wrap_phase(std::arg(hh) - std::arg(vv));
    }
    return table;
}

EncoderResult encode(const Apparatus& apparatus) {
    require_single_branch(apparatus, "encode");
    const auto& reg = apparatus.circuit.channels;
    const auto gate = reg.index(ch::kGate);
    const int k = apparatus.circuit.internal_dim;

    EncoderResult result;
    result.correction = feed_forward_table(apparatus);

    PureState state = propagate(apparatus).front().state;
    state = apply_unitary(state, analyzer_rotation(reg, ch::kGate, M_PI / 4.0, k));

    std::set<std::uint16_t> strip = loss_channel_indices(apparatus.circuit);
    strip.insert(gate);

    auto heralded = [&](int n_accept, int n_reject, double phase, double& prob) {
        PureState sector = gate_sector(state, gate, n_accept, n_reject);
        prob = sector.norm() * sector.norm();
        if (prob <= 1e-30) throw ZeroProbabilityPattern("heralded sector has zero probability");
        sector = strip_constant_modes(sector, strip);
        sector = apply_unitary(sector, phase_shift(reg, ch::kOut1, Pol::V, phase, k));
        sector.normalize();
        return sector;
    };
    result.state_accept = heralded(1, 0, result.correction.at("accept"), result.prob_accept);
    result.state_reject = heralded(0, 1, result.correction.at("reject"), result.prob_reject);
    result.success_probability = result.prob_accept + result.prob_reject;
    return result;
}

GhzResult ghz_state(const Apparatus& apparatus) {
    require_single_branch(apparatus, "ghz_state");
    if (std::abs(apparatus.source.qubit.alpha - apparatus.source.qubit.beta) > 1e-9)
        throw AsymmetricInput("the three-photon state needs equal qubit amplitudes");
    const auto& reg = apparatus.circuit.channels;
    const int k = apparatus.circuit.internal_dim;
    const std::uint16_t outs[3] = {reg.index(ch::kOut1), reg.index(ch::kGate),
                                   reg.index(ch::kOut3)};

    auto project = [&](const PureState& state) {
        PureState sector;
        for (const auto& [ket, amp] : state.terms()) {
            if (channel_photons(ket, outs[0]) == 1 && channel_photons(ket, outs[1]) == 1 &&
                channel_photons(ket, outs[2]) == 1)
                sector.add_term(ket, amp);
        }
        return sector;
    };

    // Convention phase between the all-H and all-V components, from the
    // indistinguishable reference at equal amplitudes.
    const Apparatus ref =
        rebuild_with_qubit(apparatus, QubitAmplitudes{kRootHalf, kRootHalf}, true);
    PureState ref_sector = project(propagate(ref).front().state);
    const Complex hhh = ref_sector.amplitude(triple_ket(reg, Pol::H));
    const Complex vvv = ref_sector.amplitude(triple_ket(reg, Pol::V));
    if (std::abs(hhh) < 1e-12 || std::abs(vvv) < 1e-12)
        throw ConfigError("reference run left a three-photon component empty");

    GhzResult result;
    result.correction = wrap_phase(std::arg(hhh) - std::arg(vvv));

    PureState sector = project(propagate(apparatus).front().state);
    result.probability = sector.norm() * sector.norm();
    if (result.probability <= 1e-30)
        throw ZeroProbabilityPattern("no component with one photon per output");
    sector = strip_constant_modes(sector, loss_channel_indices(apparatus.circuit));
    sector = apply_unitary(sector, phase_shift(reg, ch::kGate, Pol::V, result.correction, k));
    sector.normalize();
    result.state = sector;
    return result;
}

Eq2Report verify_eq2(const Apparatus& apparatus) {
    require_single_branch(apparatus, "verify_eq2");
    const auto& reg = apparatus.circuit.channels;
    const auto gate = reg.index(ch::kGate);

    const PureState state = propagate(apparatus).front().state;
    Eq2Report report;
    for (const auto& [ket, amp] : state.terms()) {
        const int n = channel_photons(ket, gate);
        if (n == 1) {
            report.encoded.add_term(ket, amp);
        } else {
            report.perp.add_term(ket, amp);
            report.perp_gate_counts.insert(n);
        }
    }
    report.encoded_weight = report.encoded.norm() * report.encoded.norm();
    report.perp_weight = report.perp.norm() * report.perp.norm();
    report.cross_magnitude = std::abs(inner_product(report.encoded, report.perp));
    if (report.encoded_weight > 0.0) report.encoded.normalize();
    if (report.perp_weight > 0.0) report.perp.normalize();
    return report;
}

void dump_circuit(const Apparatus& apparatus, std::ostream& os) {
    const Circuit& c = apparatus.circuit;
    os << "channels:";
    for (std::uint16_t i = 0; i < c.channels.size(); ++i) os << ' ' << c.channels.name(i);
    os << "\ninternal_dim: " << c.internal_dim << "\n";
    for (const auto& e : c.elements) {
        os << "element " << element_kind_name(e.kind);
        for (const auto& p : e.ports) os << ' ' << p;
        if (e.kind == ElementKind::Phase) os << ' ' << (e.pol == Pol::H ? 'H' : 'V');
        for (double v : e.params) os << ' ' << format_g12(v);
        os << "\n";
    }
    for (const auto& d : c.detectors) {
        os << "detector " << d.name << " channel=" << d.channel
           << " theta=" << format_g12(d.theta)
           << " port=" << (d.watch_rejected ? "rejected" : "accepted") << "\n";
    }
    for (const auto& b : apparatus.branches) {
        os << "branch " << b.label << " weight=" << format_g12(b.weight)
           << " terms=" << b.state.terms().size() << "\n";
    }
}

} // namespace qencode
