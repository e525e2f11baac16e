#include "qencode/sources.hpp"

#include <cmath>

#include "qencode/errors.hpp"

namespace qencode {

namespace {

struct WeightedMode {
    ModeId mode;
    Complex weight;
};

// Modes carrying the pulse, with amplitudes gamma_pol * coeffs[l].
std::vector<WeightedMode> pulse_modes(const ChannelRegistry& reg, const std::string& channel,
                                      const QubitAmplitudes& qubit,
                                      const Eigen::VectorXcd& coeffs) {
    if (coeffs.size() < 1) throw ConfigError("internal coefficient vector is empty");
    const auto ch = reg.index(channel);
    std::vector<WeightedMode> out;
    for (Pol pol : {Pol::H, Pol::V}) {
        const Complex gamma = (pol == Pol::H) ? qubit.alpha : qubit.beta;
        for (int l = 0; l < coeffs.size(); ++l) {
            const Complex w = gamma * coeffs[l];
            if (std::abs(w) > 1e-15)
                out.push_back({ModeId{ch, pol, static_cast<std::uint16_t>(l)}, w});
        }
    }
    return out;
}

// Adds every occupation of n photons over `modes` to `state`, scaled so the
// total equals scale * (sum_j w_j a_j^dag)^n / sqrt(n!) |0>.
void add_number_component(PureState& state, const std::vector<WeightedMode>& modes, int n,
                          Complex scale) {
    const double root_nfac = std::sqrt(std::tgamma(static_cast<double>(n) + 1.0));
    std::vector<int> occ(modes.size(), 0);
    auto recurse = [&](auto&& self, std::size_t j, int left, Complex amp) -> void {
        if (j + 1 == modes.size()) {
            // remaining photons all in the last mode
            Complex a = amp;
            for (int t = 0; t < left; ++t) a *= modes[j].weight;
            occ[j] = left;
            double fac = root_nfac;
            for (std::size_t q = 0; q < modes.size(); ++q)
                fac /= std::sqrt(std::tgamma(static_cast<double>(occ[q]) + 1.0));
            FockKet ket;
            for (std::size_t q = 0; q < modes.size(); ++q)
                if (occ[q] > 0) ket.add(modes[q].mode, occ[q]);
            state.add_term(ket, scale * a * fac);
            occ[j] = 0;
            return;
        }
        Complex a = amp;
        for (int m = 0; m <= left; ++m) {
            occ[j] = m;
            self(self, j + 1, left - m, a);
            a *= modes[j].weight;
        }
        occ[j] = 0;
    };
    if (modes.empty()) {
        if (n == 0) state.add_term(FockKet{}, scale);
        return;
    }
    recurse(recurse, 0, n, Complex{1.0, 0.0});
}

} // namespace

void QubitAmplitudes::validate() const {
    const double n = std::norm(alpha) + std::norm(beta);
    if (std::abs(n - 1.0) > 1e-9)
        throw ConfigError("qubit amplitudes must satisfy |alpha|^2 + |beta|^2 = 1");
}

std::vector<Eigen::VectorXcd> decompose_overlaps(const Eigen::MatrixXcd& gram, double tol) {
    const auto n = gram.rows();
    if (n < 1 || gram.cols() != n) throw ConfigError("overlap matrix must be square");
    if ((gram - gram.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
        throw NotPSD("overlap matrix must be Hermitian");
    for (Eigen::Index i = 0; i < n; ++i)
        if (std::abs(gram(i, i) - 1.0) > 1e-9)
            throw NotPSD("overlap matrix must have unit diagonal");

    // Outer-product Cholesky with zero-pivot handling: a vanishing pivot means
    // the photon's internal state lies in the span of the previous ones, which
    // is only consistent if the rest of its column is already reproduced.
    Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(n, n);
    std::vector<Eigen::Index> kept;
    for (Eigen::Index j = 0; j < n; ++j) {
        Complex d = gram(j, j);
        for (Eigen::Index k = 0; k < j; ++k) d -= l(j, k) * std::conj(l(j, k));
        const double dj = d.real();
        if (dj > tol) {
            l(j, j) = std::sqrt(dj);
            for (Eigen::Index i = j + 1; i < n; ++i) {
                Complex s = gram(i, j);
                for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
                l(i, j) = s / l(j, j);
            }
            kept.push_back(j);
        } else if (dj > -tol) {
            for (Eigen::Index i = j + 1; i < n; ++i) {
                Complex s = gram(i, j);
                for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
                if (std::abs(s) > tol)
                    throw NotPSD("overlap matrix is rank deficient but inconsistent");
            }
        } else {
            throw NotPSD("overlap matrix has a negative eigenvalue");
        }
    }

    const auto r = static_cast<Eigen::Index>(kept.empty() ? 1 : kept.size());
    std::vector<Eigen::VectorXcd> coeffs;
    coeffs.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(r);
        for (std::size_t q = 0; q < kept.size(); ++q)
            v[static_cast<Eigen::Index>(q)] = std::conj(l(i, kept[q]));
        coeffs.push_back(std::move(v));
    }
    return coeffs;
}

OverlapSpec OverlapSpec::from_gram(const Eigen::MatrixXcd& gram, double tol) {
    OverlapSpec spec;
    spec.gram = gram;
    spec.coeffs = decompose_overlaps(gram, tol);
    spec.internal_dim = static_cast<int>(spec.coeffs.front().size());
    if (gram.rows() != 3) throw ConfigError("expected one overlap row per source photon");
    return spec;
}

OverlapSpec OverlapSpec::indistinguishable() {
    return from_gram(Eigen::MatrixXcd::Ones(3, 3));
}

OverlapSpec OverlapSpec::qubit_vs_pair(double x) {
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Ones(3, 3);
    g(0, 1) = g(1, 0) = g(0, 2) = g(2, 0) = x;
    return from_gram(g);
}

PureState ideal_photon(const ChannelRegistry& reg, const std::string& channel,
                       const QubitAmplitudes& qubit, const Eigen::VectorXcd& coeffs) {
    qubit.validate();
    PureState state;
    for (const auto& [mode, w] : pulse_modes(reg, channel, qubit, coeffs)) {
        FockKet ket;
        ket.add(mode, 1);
        state.add_term(ket, w);
    }
    return state;
}

PureState spdc_pair(const ChannelRegistry& reg, const std::string& channel2,
                    const std::string& channel3, const Eigen::VectorXcd& coeffs2,
                    const Eigen::VectorXcd& coeffs3) {
    if (channel2 == channel3)
        throw DuplicateChannel("pair source needs two distinct channels");
    const double root_half = std::sqrt(0.5);
    auto photon45 = [&](const std::string& channel, const Eigen::VectorXcd& coeffs) {
        const auto ch = reg.index(channel);
        PureState one;
        for (Pol pol : {Pol::H, Pol::V}) {
            for (int l = 0; l < coeffs.size(); ++l) {
                const Complex w = root_half * coeffs[l];
                if (std::abs(w) < 1e-15) continue;
                FockKet ket;
                ket.add(ModeId{ch, pol, static_cast<std::uint16_t>(l)}, 1);
                one.add_term(ket, w);
            }
        }
        return one;
    };
    return tensor(photon45(channel2, coeffs2), photon45(channel3, coeffs3));
}

namespace {

// Poisson amplitudes truncated at n_max and renormalized over the kept terms.
std::vector<double> coherent_amplitudes(double mu, int n_max) {
    if (mu < 0.0) throw ConfigError("mean photon number must be nonnegative");
    if (n_max < 0 || n_max > kDefaultMaxPhotons)
        throw TruncationExceeded("coherent truncation exceeds the photon cap");
    std::vector<double> c(static_cast<std::size_t>(n_max) + 1);
    double total = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        c[static_cast<std::size_t>(n)] = std::exp(-mu / 2.0) * std::pow(mu, n / 2.0) /
                                         std::sqrt(std::tgamma(static_cast<double>(n) + 1.0));
        total += c[static_cast<std::size_t>(n)] * c[static_cast<std::size_t>(n)];
    }
    const double scale = 1.0 / std::sqrt(total);
    for (auto& v : c) v *= scale;
    return c;
}

} // namespace

PureState weak_coherent(const ChannelRegistry& reg, const std::string& channel,
                        const QubitAmplitudes& qubit, double mu, int n_max,
                        const Eigen::VectorXcd& coeffs) {
    qubit.validate();
    const auto modes = pulse_modes(reg, channel, qubit, coeffs);
    const auto c = coherent_amplitudes(mu, n_max);
    PureState state;
    for (int n = 0; n <= n_max; ++n)
        add_number_component(state, modes, n, Complex{c[static_cast<std::size_t>(n)], 0.0});
    state.prune();
    return state;
}

PureState weak_coherent_term(const ChannelRegistry& reg, const std::string& channel,
                             const QubitAmplitudes& qubit, double mu, int n, int n_max,
                             const Eigen::VectorXcd& coeffs) {
    qubit.validate();
    if (n < 0 || n > n_max) throw ConfigError("photon-number term outside truncation");
    const auto modes = pulse_modes(reg, channel, qubit, coeffs);
    const auto c = coherent_amplitudes(mu, n_max);
    PureState state;
    add_number_component(state, modes, n, Complex{c[static_cast<std::size_t>(n)], 0.0});
    state.prune();
    return state;
}

PureState vacuum_state() {
    PureState state;
    state.add_term(FockKet{}, Complex{1.0, 0.0});
    return state;
}

void SourceConfig::validate() const {
    if (qubit_source != "coherent" && qubit_source != "ideal" && qubit_source != "off")
        throw ConfigError("qubit_source must be 'coherent', 'ideal' or 'off'");
    qubit.validate();
    if (mu < 0.0) throw ConfigError("mu must be nonnegative");
    if (coherent_n_max < 1 || coherent_n_max > kDefaultMaxPhotons)
        throw ConfigError("coherent_n_max must lie in [1, 4]");
    if (!(pair_emission_prob >= 0.0 && pair_emission_prob <= 1.0))
        throw ConfigError("pair_emission_prob must lie in [0, 1]");
    for (const auto& [name, eta] : coupling_eta)
        if (!(eta >= 0.0 && eta <= 1.0))
            throw ConfigError("coupling efficiency for '" + name + "' must lie in [0, 1]");
}

double SourceConfig::coupling(const std::string& channel) const {
    auto it = coupling_eta.find(channel);
    return it == coupling_eta.end() ? 1.0 : it->second;
}

} // namespace qencode
