#pragma once

#include <complex>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qencode/errors.hpp"

namespace qencode {

using Complex = std::complex<double>;

// Default photon-number truncation. The modeled experiment never holds more
// than four photons per pulse (down-conversion pair + two-photon coherent term).
inline constexpr int kDefaultMaxPhotons = 4;

// Amplitudes below this magnitude are dropped when pruning.
inline constexpr double kPruneThreshold = 1e-14;

enum class Pol : std::uint8_t { H = 0, V = 1 };

inline char pol_char(Pol p) { return p == Pol::H ? 'H' : 'V'; }

// One bosonic mode: (spatial channel, polarization, internal temporal label).
// The internal label indexes an orthonormal basis used to express partial
// distinguishability between photons from different sources.
struct ModeId {
    std::uint16_t spatial = 0;
    Pol pol = Pol::H;
    std::uint16_t internal = 0;

    auto operator<=>(const ModeId&) const = default;
};

// Maps channel names ("in1", "out3", "gate", "loss-in2", ...) to spatial
// indices. Capacity-limited so a runaway builder fails loudly.
class ChannelRegistry {
public:
    explicit ChannelRegistry(std::size_t max_channels = 24) : max_channels_(max_channels) {}

    std::uint16_t add(const std::string& name);
    std::uint16_t index(const std::string& name) const;  // throws UnknownMode
    const std::string& name(std::uint16_t idx) const;
    bool has(const std::string& name) const;
    std::size_t size() const { return names_.size(); }
    std::size_t max_channels() const { return max_channels_; }

private:
    std::vector<std::string> names_;
    std::size_t max_channels_;
};

struct ModeOcc {
    ModeId mode;
    int count = 0;

    auto operator<=>(const ModeOcc&) const = default;
};

// Occupation-number basis vector in canonical form: entries sorted by mode,
// zero counts never stored. Equality and ordering are the lexicographic
// order of the canonical entry list.
class FockKet {
public:
    FockKet() = default;

    FockKet& add(ModeId mode, int count = 1);
    int count(ModeId mode) const;
    int total_photons() const;
    bool is_vacuum() const { return occ_.empty(); }
    const std::vector<ModeOcc>& occupations() const { return occ_; }

    auto operator<=>(const FockKet&) const = default;

private:
    std::vector<ModeOcc> occ_;
};

// Sparse complex superposition over Fock kets. States are immutable values in
// practice: every operation below returns a fresh state.
class PureState {
public:
    using Terms = std::map<FockKet, Complex>;

    PureState() = default;
    static PureState vacuum() { return single_ket(FockKet{}); }
    static PureState single_ket(FockKet ket, Complex amp = 1.0);

    void add_term(const FockKet& ket, Complex amp);
    Complex amplitude(const FockKet& ket) const;

    double norm() const;
    PureState& normalize();
    // Removes terms below `threshold` in magnitude; returns the removed mass.
    double prune(double threshold = kPruneThreshold);

    const Terms& terms() const { return terms_; }
    std::size_t term_count() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }
    int max_photons_in_any_term() const;

    PureState scaled(Complex factor) const;

    double norm_tolerance = 1e-10;

private:
    Terms terms_;
};

// A unitary acting on an explicit ordered list of modes. The convention is
// fixed project-wide: creation operators transform as a†_i -> Σ_j U_ji a†_j
// (column convention). Construction validates ‖U†U − I‖_max < 1e-12.
struct ModeUnitary {
    std::vector<ModeId> modes;
    Eigen::MatrixXcd matrix;

    ModeUnitary(std::vector<ModeId> modes_in, Eigen::MatrixXcd matrix_in);
};

// Product state of two states on disjoint spatial channels.
PureState tensor(const PureState& a, const PureState& b, int max_photons = kDefaultMaxPhotons);

// Rewrites creation operators through the unitary and re-expands with bosonic
// normalization. Modes outside u.modes are untouched; norm is preserved.
PureState apply_unitary(const PureState& state, const ModeUnitary& u);

// <a|b> with conjugation on a.
Complex inner_product(const PureState& a, const PureState& b);

// |<a|b>|^2 for normalized inputs.
double fidelity(const PureState& a, const PureState& b);

// Independent single-amplitude oracle: <out|U|in> via the permanent of the
// standard repeated-row/column submatrix, divided by sqrt(Π n_in! Π n_out!).
Complex amplitude_by_permanent(const FockKet& input, const FockKet& output, const ModeUnitary& u);

// Ryser's formula; exact for the small matrices used here.
Complex permanent(const Eigen::MatrixXcd& m);

// Deterministic text form, one line per ket (sorted):
//   <count>@<channel>:<pol>:<internal> ... <re> <im>
std::string serialize_state(const PureState& state, const ChannelRegistry& channels);

// 12-significant-digit formatting shared by all text outputs.
std::string format_g12(double x);

} // namespace qencode
