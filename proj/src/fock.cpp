#include "qencode/fock.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace qencode {

std::uint16_t ChannelRegistry::add(const std::string& name) {
    if (has(name)) throw DuplicateChannel("channel '" + name + "' already registered");
    if (names_.size() >= max_channels_)
        throw TruncationExceeded("channel capacity " + std::to_string(max_channels_) + " exceeded");
    names_.push_back(name);
    return static_cast<std::uint16_t>(names_.size() - 1);
}

std::uint16_t ChannelRegistry::index(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<std::uint16_t>(i);
    throw UnknownMode("channel '" + name + "' not registered");
}

const std::string& ChannelRegistry::name(std::uint16_t idx) const {
    if (idx >= names_.size()) throw UnknownMode("channel index out of range");
    return names_[idx];
}

bool ChannelRegistry::has(const std::string& name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

FockKet& FockKet::add(ModeId mode, int count) {
    if (count == 0) return *this;
    auto it = std::lower_bound(occ_.begin(), occ_.end(), mode,
                               [](const ModeOcc& o, const ModeId& m) { return o.mode < m; });
    if (it != occ_.end() && it->mode == mode) {
        it->count += count;
        if (it->count < 0) throw SimError("negative occupation");
        if (it->count == 0) occ_.erase(it);
    } else {
        if (count < 0) throw SimError("negative occupation");
        occ_.insert(it, ModeOcc{mode, count});
    }
    return *this;
}

int FockKet::count(ModeId mode) const {
    auto it = std::lower_bound(occ_.begin(), occ_.end(), mode,
                               [](const ModeOcc& o, const ModeId& m) { return o.mode < m; });
    return (it != occ_.end() && it->mode == mode) ? it->count : 0;
}

int FockKet::total_photons() const {
    int n = 0;
    for (const auto& o : occ_) n += o.count;
    return n;
}

PureState PureState::single_ket(FockKet ket, Complex amp) {
    PureState s;
    s.terms_.emplace(std::move(ket), amp);
    return s;
}

void PureState::add_term(const FockKet& ket, Complex amp) {
    auto [it, inserted] = terms_.emplace(ket, amp);
    if (!inserted) it->second += amp;
}

Complex PureState::amplitude(const FockKet& ket) const {
    auto it = terms_.find(ket);
    return it == terms_.end() ? Complex{0.0, 0.0} : it->second;
}

double PureState::norm() const {
    double n2 = 0.0;
    for (const auto& [ket, amp] : terms_) n2 += std::norm(amp);
    return std::sqrt(n2);
}

PureState& PureState::normalize() {
    double n = norm();
    if (n <= 0.0) throw SimError("cannot normalize a zero state");
    for (auto& [ket, amp] : terms_) amp /= n;
    return *this;
}

double PureState::prune(double threshold) {
    double removed = 0.0;
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (std::abs(it->second) < threshold) {
            removed += std::norm(it->second);
            it = terms_.erase(it);
        } else {
            ++it;
        }
    }
    return std::sqrt(removed);
}

int PureState::max_photons_in_any_term() const {
    int n = 0;
    for (const auto& [ket, amp] : terms_) n = std::max(n, ket.total_photons());
    return n;
}

PureState PureState::scaled(Complex factor) const {
    PureState out = *this;
    for (auto& [ket, amp] : out.terms_) amp *= factor;
    return out;
}

ModeUnitary::ModeUnitary(std::vector<ModeId> modes_in, Eigen::MatrixXcd matrix_in)
    : modes(std::move(modes_in)), matrix(std::move(matrix_in)) {
    const auto m = static_cast<Eigen::Index>(modes.size());
    if (matrix.rows() != m || matrix.cols() != m)
        throw NonUnitaryMatrix("matrix size does not match mode list");
    std::set<ModeId> distinct(modes.begin(), modes.end());
    if (distinct.size() != modes.size()) throw DuplicateChannel("repeated mode in unitary");
    Eigen::MatrixXcd gram = matrix.adjoint() * matrix;
    gram -= Eigen::MatrixXcd::Identity(m, m);
    if (gram.cwiseAbs().maxCoeff() > 1e-12)
        throw NonUnitaryMatrix("‖U†U − I‖_max = " + std::to_string(gram.cwiseAbs().maxCoeff()));
}

PureState tensor(const PureState& a, const PureState& b, int max_photons) {
    // Disjoint-channel check over every ket of both states.
    std::set<std::uint16_t> chan_a, chan_b;
    for (const auto& [ket, amp] : a.terms())
        for (const auto& o : ket.occupations()) chan_a.insert(o.mode.spatial);
    for (const auto& [ket, amp] : b.terms())
        for (const auto& o : ket.occupations()) chan_b.insert(o.mode.spatial);
    for (auto c : chan_a)
        if (chan_b.count(c)) throw OverlappingChannels("spatial channel " + std::to_string(c) + " on both sides");

    PureState out;
    out.norm_tolerance = a.norm_tolerance;
    for (const auto& [ka, aa] : a.terms()) {
        for (const auto& [kb, ab] : b.terms()) {
            FockKet merged = ka;
            for (const auto& o : kb.occupations()) merged.add(o.mode, o.count);
            if (merged.total_photons() > max_photons)
                throw TruncationExceeded("tensor term with " + std::to_string(merged.total_photons()) +
                                         " photons exceeds N_max=" + std::to_string(max_photons));
            out.add_term(merged, aa * ab);
        }
    }
    out.prune();
    return out;
}

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

} // namespace

PureState apply_unitary(const PureState& state, const ModeUnitary& u) {
    const int m = static_cast<int>(u.modes.size());
    PureState out;
    out.norm_tolerance = state.norm_tolerance;

    for (const auto& [ket, amp] : state.terms()) {
        // Split the ket into the expanded part (occupations on u.modes) and
        // the untouched remainder.
        std::vector<int> n_in(m, 0);
        FockKet rest;
        for (const auto& o : ket.occupations()) {
            auto it = std::find(u.modes.begin(), u.modes.end(), o.mode);
            if (it == u.modes.end())
                rest.add(o.mode, o.count);
            else
                n_in[it - u.modes.begin()] = o.count;
        }

        double in_norm = 1.0;
        for (int c : n_in) in_norm *= factorial(c);

        // Polynomial in commuting creation operators: multiply one photon at
        // a time, collecting like monomials.
        std::map<std::vector<int>, Complex> poly;
        poly.emplace(std::vector<int>(m, 0), Complex{1.0, 0.0});
        for (int i = 0; i < m; ++i) {
            for (int rep = 0; rep < n_in[i]; ++rep) {
                std::map<std::vector<int>, Complex> next;
                for (const auto& [mono, coeff] : poly) {
                    for (int j = 0; j < m; ++j) {
                        Complex c = u.matrix(j, i);
                        if (c == Complex{0.0, 0.0}) continue;
                        std::vector<int> grown = mono;
                        ++grown[j];
                        auto [it, inserted] = next.emplace(std::move(grown), coeff * c);
                        if (!inserted) it->second += coeff * c;
                    }
                }
                poly = std::move(next);
            }
        }

        for (const auto& [mono, coeff] : poly) {
            double out_norm = 1.0;
            for (int c : mono) out_norm *= factorial(c);
            FockKet out_ket = rest;
            for (int j = 0; j < m; ++j) out_ket.add(u.modes[j], mono[j]);
            out.add_term(out_ket, amp * coeff * std::sqrt(out_norm / in_norm));
        }
    }
    out.prune();
    return out;
}

Complex inner_product(const PureState& a, const PureState& b) {
    // Walk the smaller map.
    const PureState& small = a.term_count() <= b.term_count() ? a : b;
    const PureState& large = a.term_count() <= b.term_count() ? b : a;
    Complex acc{0.0, 0.0};
    for (const auto& [ket, amp] : small.terms()) {
        Complex other = large.amplitude(ket);
        if (&small == &a)
            acc += std::conj(amp) * other;
        else
            acc += std::conj(other) * amp;
    }
    return acc;
}

double fidelity(const PureState& a, const PureState& b) {
    return std::norm(inner_product(a, b));
}

Complex permanent(const Eigen::MatrixXcd& m) {
    const int n = static_cast<int>(m.rows());
    if (n == 0) return {1.0, 0.0};
    if (m.cols() != n) throw SimError("permanent of a non-square matrix");
    // Ryser: perm(A) = (-1)^n Σ_{S⊆[n]} (-1)^|S| Π_r Σ_{c∈S} A_rc
    Complex total{0.0, 0.0};
    const std::uint32_t subsets = 1u << n;
    for (std::uint32_t s = 1; s < subsets; ++s) {
        Complex prod{1.0, 0.0};
        for (int r = 0; r < n; ++r) {
            Complex row_sum{0.0, 0.0};
            for (int c = 0; c < n; ++c)
                if (s & (1u << c)) row_sum += m(r, c);
            prod *= row_sum;
        }
        int popcount = __builtin_popcount(s);
        total += ((n - popcount) % 2 == 0 ? 1.0 : -1.0) * prod;
    }
    return total;
}

Complex amplitude_by_permanent(const FockKet& input, const FockKet& output, const ModeUnitary& u) {
    if (input.total_photons() != output.total_photons())
        throw PhotonNumberMismatch(std::to_string(input.total_photons()) + " photons in, " +
                                   std::to_string(output.total_photons()) + " out");

    auto mode_index = [&u](ModeId m) {
        auto it = std::find(u.modes.begin(), u.modes.end(), m);
        if (it == u.modes.end()) throw UnknownMode("photon outside the unitary's modes");
        return static_cast<int>(it - u.modes.begin());
    };

    std::vector<int> cols, rows;
    double norm_prod = 1.0;
    for (const auto& o : input.occupations()) {
        int idx = mode_index(o.mode);
        for (int r = 0; r < o.count; ++r) cols.push_back(idx);
        norm_prod *= factorial(o.count);
    }
    for (const auto& o : output.occupations()) {
        int idx = mode_index(o.mode);
        for (int r = 0; r < o.count; ++r) rows.push_back(idx);
        norm_prod *= factorial(o.count);
    }

    const int n = static_cast<int>(cols.size());
    Eigen::MatrixXcd sub(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) sub(r, c) = u.matrix(rows[r], cols[c]);
    return permanent(sub) / std::sqrt(norm_prod);
}

std::string format_g12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    // "-0" and "0" must serialize identically.
    if (std::string_view(buf) == "-0") return "0";
    return buf;
}

std::string serialize_state(const PureState& state, const ChannelRegistry& channels) {
    std::ostringstream os;
    for (const auto& [ket, amp] : state.terms()) {
        for (const auto& o : ket.occupations()) {
            os << o.count << '@' << channels.name(o.mode.spatial) << ':' << pol_char(o.mode.pol)
               << ':' << o.mode.internal << ' ';
        }
        os << format_g12(amp.real()) << ' ' << format_g12(amp.imag()) << '\n';
    }
    return os.str();
}

} // namespace qencode
