#pragma once

#include <map>
#include <string>
#include <vector>

#include "qencode/fock.hpp"

namespace qencode {

// Normalized polarization amplitudes of the logical input, alpha|H> + beta|V>.
struct QubitAmplitudes {
    Complex alpha{1.0, 0.0};
    Complex beta{0.0, 0.0};

    void validate() const;
};

// Factors a Hermitian PSD pairwise-overlap matrix with unit diagonal into
// per-photon coefficient vectors over a shared orthonormal internal basis,
// dropping directions with zero weight. Row i of the result satisfies
// <c_i, c_j> = gram(i, j). Throws NotPSD if the matrix is not consistent.
std::vector<Eigen::VectorXcd> decompose_overlaps(const Eigen::MatrixXcd& gram,
                                                 double tol = 1e-10);

// Internal-state bookkeeping for the three photons fed into the circuit,
// ordered [qubit, downconversion arm 2, downconversion arm 3].
struct OverlapSpec {
    Eigen::MatrixXcd gram;
    std::vector<Eigen::VectorXcd> coeffs;
    int internal_dim = 1;

    static OverlapSpec from_gram(const Eigen::MatrixXcd& gram, double tol = 1e-10);
    // All photons share one internal state (fully indistinguishable).
    static OverlapSpec indistinguishable();
    // Uniform overlap x between the qubit photon and each downconversion
    // photon; the two downconversion photons stay mutually identical.
    static OverlapSpec qubit_vs_pair(double x);

    const Eigen::VectorXcd& qubit() const { return coeffs[0]; }
    const Eigen::VectorXcd& dc2() const { return coeffs[1]; }
    const Eigen::VectorXcd& dc3() const { return coeffs[2]; }
};

// One photon in `channel` with polarization amplitudes (alpha, beta) and the
// given internal coefficient vector.
PureState ideal_photon(const ChannelRegistry& reg, const std::string& channel,
                       const QubitAmplitudes& qubit, const Eigen::VectorXcd& coeffs);

// Downconversion pair as it enters the splitter: one photon per channel, each
// polarized at 45 degrees ((|H>+|V>)/sqrt(2)), with per-arm internal
// coefficients. The entangled resource only appears downstream, once the
// splitter's one-photon-per-port amplitudes are post-selected; the
// same-port amplitudes are kept because they feed the noise terms.
PureState spdc_pair(const ChannelRegistry& reg, const std::string& channel2,
                    const std::string& channel3, const Eigen::VectorXcd& coeffs2,
                    const Eigen::VectorXcd& coeffs3);

// Weak coherent pulse in the qubit polarization mode, truncated at n_max
// photons and renormalized over the kept terms.
PureState weak_coherent(const ChannelRegistry& reg, const std::string& channel,
                        const QubitAmplitudes& qubit, double mu, int n_max,
                        const Eigen::VectorXcd& coeffs);

// The n-photon component of the truncated, renormalized weak coherent pulse,
// including its amplitude (so its squared norm is the probability of finding
// n photons in the pulse). Photon-number sectors never interfere, so running
// them separately and summing probabilities reproduces the full pulse.
PureState weak_coherent_term(const ChannelRegistry& reg, const std::string& channel,
                             const QubitAmplitudes& qubit, double mu, int n, int n_max,
                             const Eigen::VectorXcd& coeffs);

PureState vacuum_state();

// Source-stage settings of the apparatus.
struct SourceConfig {
    std::string qubit_source = "coherent"; // "coherent", "ideal" or "off"
    QubitAmplitudes qubit;
    double mu = 1e-3;       // mean photon number of the coherent pulse
    int coherent_n_max = 2; // truncation of the coherent expansion
    double pair_emission_prob = 1.0;
    std::map<std::string, double> coupling_eta; // per-channel source coupling

    void validate() const;
    double coupling(const std::string& channel) const;
};

} // namespace qencode
