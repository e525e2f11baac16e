#include "qencode/elements.hpp"

#include <cmath>
#include <set>

#include "qencode/errors.hpp"

namespace qencode {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_distinct(const std::vector<std::string>& names) {
    std::set<std::string> seen(names.begin(), names.end());
    if (seen.size() != names.size())
        throw DuplicateChannel("element ports must name distinct channels");
}

void require_internal_dim(int internal_dim) {
    if (internal_dim < 1) throw ConfigError("internal_dim must be >= 1");
}

// Modes of one channel, H labels first then V, internal labels in order.
std::vector<ModeId> channel_modes(const ChannelRegistry& reg, const std::string& channel,
                                  int internal_dim) {
    const auto ch = reg.index(channel);
    std::vector<ModeId> modes;
    modes.reserve(2 * static_cast<std::size_t>(internal_dim));
    for (Pol pol : {Pol::H, Pol::V})
        for (int l = 0; l < internal_dim; ++l)
            modes.push_back(ModeId{ch, pol, static_cast<std::uint16_t>(l)});
    return modes;
}

struct FourPortLayout {
    std::vector<ModeId> modes;
    int k; // internal_dim

    // Mode index for (port 0..3, pol, internal label).
    int at(int port, Pol pol, int l) const {
        return (port * 2 + (pol == Pol::V ? 1 : 0)) * k + l;
    }
};

FourPortLayout four_port_layout(const ChannelRegistry& reg, const std::vector<std::string>& ports,
                                int internal_dim) {
    FourPortLayout layout;
    layout.k = internal_dim;
    for (const auto& name : ports) {
        auto modes = channel_modes(reg, name, internal_dim);
        // channel_modes lists H block then V block; interleave per layout.at.
        for (int l = 0; l < internal_dim; ++l) layout.modes.push_back(modes[l]);
        for (int l = 0; l < internal_dim; ++l)
            layout.modes.push_back(modes[internal_dim + l]);
    }
    return layout;
}

} // namespace

std::string element_kind_name(ElementKind k) {
    switch (k) {
        case ElementKind::PBS: return "pbs";
        case ElementKind::BS: return "bs";
        case ElementKind::HWP: return "hwp";
        case ElementKind::Rot: return "rot";
        case ElementKind::Phase: return "phase";
        case ElementKind::LossTap: return "loss_tap";
    }
    throw ConfigError("unknown element kind");
}

ElementKind element_kind_from_name(const std::string& name) {
    if (name == "pbs") return ElementKind::PBS;
    if (name == "bs") return ElementKind::BS;
    if (name == "hwp") return ElementKind::HWP;
    if (name == "rot") return ElementKind::Rot;
    if (name == "phase") return ElementKind::Phase;
    if (name == "loss_tap") return ElementKind::LossTap;
    throw ConfigError("unknown element kind '" + name + "'");
}

ModeUnitary pbs(const ChannelRegistry& reg, const std::string& in_a, const std::string& in_b,
                const std::string& out_c, const std::string& out_d, int internal_dim) {
    require_internal_dim(internal_dim);
    require_distinct({in_a, in_b, out_c, out_d});
    auto layout = four_port_layout(reg, {in_a, in_b, out_c, out_d}, internal_dim);
    const int n = static_cast<int>(layout.modes.size());
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(n, n);
    // column = source mode, row = destination mode
    for (int l = 0; l < internal_dim; ++l) {
        u(layout.at(2, Pol::H, l), layout.at(0, Pol::H, l)) = 1.0; // a H -> c H
        u(layout.at(3, Pol::H, l), layout.at(1, Pol::H, l)) = 1.0; // b H -> d H
        u(layout.at(3, Pol::V, l), layout.at(0, Pol::V, l)) = kI;  // a V -> d V
        u(layout.at(2, Pol::V, l), layout.at(1, Pol::V, l)) = kI;  // b V -> c V
        // reverse direction, same rules
        u(layout.at(0, Pol::H, l), layout.at(2, Pol::H, l)) = 1.0;
        u(layout.at(1, Pol::H, l), layout.at(3, Pol::H, l)) = 1.0;
        u(layout.at(1, Pol::V, l), layout.at(2, Pol::V, l)) = kI;
        u(layout.at(0, Pol::V, l), layout.at(3, Pol::V, l)) = kI;
    }
    return ModeUnitary(std::move(layout.modes), std::move(u));
}

ModeUnitary bs(const ChannelRegistry& reg, const std::string& in_a, const std::string& in_b,
               const std::string& out_c, const std::string& out_d, double transmissivity,
               int internal_dim) {
    require_internal_dim(internal_dim);
    require_distinct({in_a, in_b, out_c, out_d});
    if (!(transmissivity >= 0.0 && transmissivity <= 1.0))
        throw BadTransmissivity("transmissivity must lie in [0, 1]");
    const double t = std::sqrt(transmissivity);
    const Complex r = kI * std::sqrt(1.0 - transmissivity);
    auto layout = four_port_layout(reg, {in_a, in_b, out_c, out_d}, internal_dim);
    const int n = static_cast<int>(layout.modes.size());
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(n, n);
    for (Pol pol : {Pol::H, Pol::V}) {
        for (int l = 0; l < internal_dim; ++l) {
            u(layout.at(2, pol, l), layout.at(0, pol, l)) = t; // a -> c
            u(layout.at(3, pol, l), layout.at(0, pol, l)) = r; // a -> d
            u(layout.at(2, pol, l), layout.at(1, pol, l)) = r; // b -> c
            u(layout.at(3, pol, l), layout.at(1, pol, l)) = t; // b -> d
            u(layout.at(0, pol, l), layout.at(2, pol, l)) = t;
            u(layout.at(1, pol, l), layout.at(2, pol, l)) = r;
            u(layout.at(0, pol, l), layout.at(3, pol, l)) = r;
            u(layout.at(1, pol, l), layout.at(3, pol, l)) = t;
        }
    }
    return ModeUnitary(std::move(layout.modes), std::move(u));
}

ModeUnitary hwp(const ChannelRegistry& reg, const std::string& channel, double theta,
                int internal_dim) {
    require_internal_dim(internal_dim);
    auto modes = channel_modes(reg, channel, internal_dim);
    const int k = internal_dim;
    const double c = std::cos(2.0 * theta);
    const double s = std::sin(2.0 * theta);
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(2 * k, 2 * k);
    for (int l = 0; l < k; ++l) {
        u(l, l) = c;          // H -> H
        u(k + l, l) = s;      // H -> V
        u(l, k + l) = s;      // V -> H
        u(k + l, k + l) = -c; // V -> V
    }
    return ModeUnitary(std::move(modes), std::move(u));
}

ModeUnitary pol_rotation(const ChannelRegistry& reg, const std::string& channel, double theta,
                         int internal_dim) {
    require_internal_dim(internal_dim);
    auto modes = channel_modes(reg, channel, internal_dim);
    const int k = internal_dim;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(2 * k, 2 * k);
    for (int l = 0; l < k; ++l) {
        u(l, l) = c;
        u(k + l, l) = s;
        u(l, k + l) = -s;
        u(k + l, k + l) = c;
    }
    return ModeUnitary(std::move(modes), std::move(u));
}

ModeUnitary phase_shift(const ChannelRegistry& reg, const std::string& channel, Pol pol,
                        double phi, int internal_dim) {
    require_internal_dim(internal_dim);
    auto modes = channel_modes(reg, channel, internal_dim);
    const int k = internal_dim;
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(2 * k, 2 * k);
    const Complex f = std::exp(kI * phi);
    const int base = (pol == Pol::V) ? k : 0;
    for (int l = 0; l < k; ++l) u(base + l, base + l) = f;
    return ModeUnitary(std::move(modes), std::move(u));
}

ModeUnitary loss_tap(const ChannelRegistry& reg, const std::string& channel,
                     const std::string& loss_channel, double eta, int internal_dim) {
    require_internal_dim(internal_dim);
    require_distinct({channel, loss_channel});
    if (!(eta >= 0.0 && eta <= 1.0)) throw BadTransmissivity("efficiency must lie in [0, 1]");
    const double t = std::sqrt(eta);
    const Complex r = kI * std::sqrt(1.0 - eta);
    auto sig = channel_modes(reg, channel, internal_dim);
    auto loss = channel_modes(reg, loss_channel, internal_dim);
    const int m = static_cast<int>(sig.size());
    std::vector<ModeId> modes = sig;
    modes.insert(modes.end(), loss.begin(), loss.end());
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(2 * m, 2 * m);
    for (int j = 0; j < m; ++j) {
        u(j, j) = t;
        u(m + j, j) = r;
        u(j, m + j) = r;
        u(m + j, m + j) = t;
    }
    return ModeUnitary(std::move(modes), std::move(u));
}

std::string allocate_loss_channel(ChannelRegistry& reg, const std::string& channel) {
    std::string base = "loss-" + channel;
    std::string name = base;
    int suffix = 2;
    while (reg.has(name)) name = base + "-" + std::to_string(suffix++);
    reg.add(name);
    return name;
}

Eigen::Matrix2d analyzer_basis(double theta) {
    Eigen::Matrix2d m;
    m << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
    return m;
}

ModeUnitary analyzer_rotation(const ChannelRegistry& reg, const std::string& channel,
                              double theta, int internal_dim) {
    require_internal_dim(internal_dim);
    auto modes = channel_modes(reg, channel, internal_dim);
    const int k = internal_dim;
    const Eigen::Matrix2d b = analyzer_basis(theta);
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(2 * k, 2 * k);
    for (int l = 0; l < k; ++l) {
        u(l, l) = b(0, 0);
        u(l, k + l) = b(0, 1);
        u(k + l, l) = b(1, 0);
        u(k + l, k + l) = b(1, 1);
    }
    return ModeUnitary(std::move(modes), std::move(u));
}

ModeUnitary element_unitary(const ElementSpec& spec, const ChannelRegistry& reg,
                            int internal_dim) {
    switch (spec.kind) {
        case ElementKind::PBS:
            if (spec.ports.size() != 4) throw ConfigError("pbs takes four ports");
            return pbs(reg, spec.ports[0], spec.ports[1], spec.ports[2], spec.ports[3],
                       internal_dim);
        case ElementKind::BS:
            if (spec.ports.size() != 4 || spec.params.size() != 1)
                throw ConfigError("bs takes four ports and a transmissivity");
            return bs(reg, spec.ports[0], spec.ports[1], spec.ports[2], spec.ports[3],
                      spec.params[0], internal_dim);
        case ElementKind::HWP:
            if (spec.ports.size() != 1 || spec.params.size() != 1)
                throw ConfigError("hwp takes one port and an angle");
            return hwp(reg, spec.ports[0], spec.params[0], internal_dim);
        case ElementKind::Rot:
            if (spec.ports.size() != 1 || spec.params.size() != 1)
                throw ConfigError("rot takes one port and an angle");
            return pol_rotation(reg, spec.ports[0], spec.params[0], internal_dim);
        case ElementKind::Phase:
            if (spec.ports.size() != 1 || spec.params.size() != 1)
                throw ConfigError("phase takes one port and an angle");
            return phase_shift(reg, spec.ports[0], spec.pol, spec.params[0], internal_dim);
        case ElementKind::LossTap:
            if (spec.ports.size() != 2 || spec.params.size() != 1)
                throw ConfigError("loss_tap takes signal and loss ports and an efficiency");
            return loss_tap(reg, spec.ports[0], spec.ports[1], spec.params[0], internal_dim);
    }
    throw ConfigError("unknown element kind");
}

} // namespace qencode
