#include "qencode/detection.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "qencode/errors.hpp"

namespace qencode {

namespace {

void validate_detectors(const std::vector<DetectorSpec>& detectors) {
    std::set<std::string> names;
    std::map<std::string, double> channel_theta;
    for (const auto& d : detectors) {
        if (d.name.empty()) throw ConfigError("detector needs a name");
        if (!names.insert(d.name).second)
            throw ConfigError("duplicate detector name '" + d.name + "'");
        auto [it, fresh] = channel_theta.emplace(d.channel, d.theta);
        if (!fresh && std::abs(it->second - d.theta) > 1e-12)
            throw ConfigError("detectors on channel '" + d.channel +
                              "' disagree on the analyzer angle");
    }
}

// Applies each detector's analyzer rotation to its channel.
PureState rotate_for_detectors(const PureState& state, const std::vector<DetectorSpec>& detectors,
                               const ChannelRegistry& reg, int internal_dim) {
    PureState rotated = state;
    std::set<std::string> done;
    for (const auto& d : detectors) {
        if (!done.insert(d.channel).second) continue;
        if (std::abs(d.theta) < 1e-15) continue;
        rotated = apply_unitary(rotated, analyzer_rotation(reg, d.channel, d.theta, internal_dim));
    }
    return rotated;
}

int watched_photons(const FockKet& ket, const DetectorSpec& det, const ChannelRegistry& reg) {
    const auto ch = reg.index(det.channel);
    const Pol pol = det.watch_rejected ? Pol::V : Pol::H;
    int n = 0;
    for (const auto& mo : ket.occupations())
        if (mo.mode.spatial == ch && mo.mode.pol == pol) n += mo.count;
    return n;
}

bool ket_matches(const FockKet& ket, const std::vector<DetectorSpec>& detectors,
                 const ClickPattern& pattern, const ChannelRegistry& reg) {
    for (const auto& d : detectors) {
        auto it = pattern.find(d.name);
        if (it == pattern.end()) continue;
        const bool fired = watched_photons(ket, d, reg) >= 1;
        if (fired != it->second) return false;
    }
    return true;
}

void require_known_names(const std::vector<DetectorSpec>& detectors, const ClickPattern& pattern) {
    for (const auto& [name, fired] : pattern) {
        (void)fired;
        const bool known = std::any_of(detectors.begin(), detectors.end(),
                                       [&](const DetectorSpec& d) { return d.name == name; });
        if (!known) throw UnknownDetector("no detector named '" + name + "'");
    }
}

void require_complete_pattern(const std::vector<DetectorSpec>& detectors,
                              const ClickPattern& pattern) {
    require_known_names(detectors, pattern);
    for (const auto& d : detectors)
        if (!pattern.count(d.name))
            throw UnknownDetector("pattern is missing detector '" + d.name + "'");
}

} // namespace

double click_marginal(const PureState& state, const std::vector<DetectorSpec>& detectors,
                      const ClickPattern& partial, const ChannelRegistry& reg,
                      int internal_dim) {
    validate_detectors(detectors);
    require_known_names(detectors, partial);
    const PureState rotated = rotate_for_detectors(state, detectors, reg, internal_dim);
    double p = 0.0;
    for (const auto& [ket, amp] : rotated.terms())
        if (ket_matches(ket, detectors, partial, reg)) p += std::norm(amp);
    return p;
}

double click_probability(const PureState& state, const std::vector<DetectorSpec>& detectors,
                         const ClickPattern& pattern, const ChannelRegistry& reg,
                         int internal_dim) {
    validate_detectors(detectors);
    require_complete_pattern(detectors, pattern);
    return click_marginal(state, detectors, pattern, reg, internal_dim);
}

ConditionalResult conditional_state(const PureState& state,
                                    const std::vector<DetectorSpec>& detectors,
                                    const ClickPattern& pattern, const ChannelRegistry& reg,
                                    int internal_dim,
                                    const std::vector<std::string>& strip_channels) {
    validate_detectors(detectors);
    require_complete_pattern(detectors, pattern);
    const PureState rotated = rotate_for_detectors(state, detectors, reg, internal_dim);

    std::vector<std::pair<FockKet, Complex>> kept;
    double p = 0.0;
    for (const auto& [ket, amp] : rotated.terms()) {
        if (!ket_matches(ket, detectors, pattern, reg)) continue;
        kept.emplace_back(ket, amp);
        p += std::norm(amp);
    }
    if (kept.empty() || p <= 1e-30)
        throw ZeroProbabilityPattern("click pattern has zero probability");

    std::set<std::uint16_t> strippable;
    for (const auto& d : detectors) strippable.insert(reg.index(d.channel));
    for (const auto& name : strip_channels) strippable.insert(reg.index(name));

    PureState projected;
    for (const auto& [ket, amp] : kept) projected.add_term(ket, amp);

    ConditionalResult result;
    result.probability = p;
    result.state = strip_constant_modes(projected, strippable);
    result.state.normalize();
    return result;
}

PureState strip_constant_modes(const PureState& state, const std::set<std::uint16_t>& channels) {
    if (state.terms().empty()) return state;
    // Candidate modes: listed-channel modes of the first ket; drop any whose
    // count differs in some other ket (absence counts as zero).
    std::map<ModeId, int> constant;
    for (const auto& mo : state.terms().begin()->first.occupations())
        if (channels.count(mo.mode.spatial)) constant[mo.mode] = mo.count;
    for (const auto& [ket, amp] : state.terms()) {
        (void)amp;
        for (auto it = constant.begin(); it != constant.end();) {
            if (ket.count(it->first) != it->second)
                it = constant.erase(it);
            else
                ++it;
        }
    }
    PureState reduced;
    for (const auto& [ket, amp] : state.terms()) {
        FockKet r;
        for (const auto& mo : ket.occupations())
            if (!constant.count(mo.mode)) r.add(mo.mode, mo.count);
        reduced.add_term(r, amp);
    }
    return reduced;
}

std::vector<ElementSpec> apply_detector_losses(ChannelRegistry& reg,
                                               std::vector<DetectorSpec>& detectors) {
    validate_detectors(detectors);
    std::map<std::string, double> channel_eta;
    for (const auto& d : detectors) {
        if (!(d.efficiency >= 0.0 && d.efficiency <= 1.0))
            throw BadTransmissivity("detector efficiency must lie in [0, 1]");
        auto [it, fresh] = channel_eta.emplace(d.channel, d.efficiency);
        if (!fresh && std::abs(it->second - d.efficiency) > 1e-12)
            throw ConfigError("detectors on channel '" + d.channel +
                              "' disagree on efficiency");
    }
    std::vector<ElementSpec> taps;
    for (auto& d : detectors) {
        auto it = channel_eta.find(d.channel);
        if (it != channel_eta.end() && it->second < 1.0) {
            ElementSpec tap;
            tap.kind = ElementKind::LossTap;
            tap.ports = {d.channel, allocate_loss_channel(reg, d.channel)};
            tap.params = {it->second};
            taps.push_back(std::move(tap));
        }
        if (it != channel_eta.end()) channel_eta.erase(it);
        d.efficiency = 1.0; // consumed by the tap
    }
    return taps;
}

std::vector<double> threefold_table(const std::vector<WeightedState>& branches,
                                    DetectorSpec det1, DetectorSpec det2, DetectorSpec det3,
                                    const std::vector<ThreefoldSetting>& settings,
                                    const ChannelRegistry& reg, int internal_dim) {
    std::vector<double> probs;
    probs.reserve(settings.size());
    for (const auto& s : settings) {
        det1.theta = s.theta1;
        det2.theta = s.theta2;
        det3.theta = s.theta3;
        const std::vector<DetectorSpec> dets{det1, det2, det3};
        const ClickPattern all{{det1.name, true}, {det2.name, true}, {det3.name, true}};
        double p = 0.0;
        for (const auto& b : branches)
            p += b.weight * click_probability(b.state, dets, all, reg, internal_dim);
        probs.push_back(p);
    }
    return probs;
}

PureState project_exclusive_clicks(const PureState& state,
                                   const std::vector<DetectorSpec>& detectors,
                                   const ChannelRegistry& reg, int internal_dim) {
    validate_detectors(detectors);
    const PureState rotated = rotate_for_detectors(state, detectors, reg, internal_dim);
    std::vector<std::uint16_t> channels;
    for (const auto& d : detectors) channels.push_back(reg.index(d.channel));

    PureState projected;
    for (const auto& [ket, amp] : rotated.terms()) {
        bool keep = true;
        for (const auto ch : channels) {
            int accepted = 0, rejected = 0;
            for (const auto& mo : ket.occupations()) {
                if (mo.mode.spatial != ch) continue;
                (mo.mode.pol == Pol::H ? accepted : rejected) += mo.count;
            }
            if (accepted != 1 || rejected != 0) {
                keep = false;
                break;
            }
        }
        if (keep) projected.add_term(ket, amp);
    }
    return projected;
}

std::uint64_t rng_stream_seed(std::uint64_t master, std::uint64_t stream) {
    // splitmix64 over master + stream, two rounds
    std::uint64_t z = master + (stream + 1) * 0x9E3779B97F4A7C15ULL;
    for (int round = 0; round < 2; ++round) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        z = z ^ (z >> 31);
    }
    return z;
}

CountRecord sample_counts(const std::vector<double>& probabilities, double rate_hz,
                          double duration_s, std::uint64_t seed) {
    if (rate_hz < 0.0 || duration_s < 0.0)
        throw ConfigError("rate and duration must be nonnegative");
    CountRecord record;
    record.means.reserve(probabilities.size());
    record.counts.reserve(probabilities.size());
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        const double mean = std::max(probabilities[i], 0.0) * rate_hz * duration_s;
        record.means.push_back(mean);
        if (mean <= 0.0) {
            record.counts.push_back(0);
            continue;
        }
        std::mt19937_64 gen(rng_stream_seed(seed, i));
        std::poisson_distribution<long long> dist(mean);
        record.counts.push_back(dist(gen));
    }
    return record;
}

FringeFit fit_fringe(const std::vector<double>& angles_rad, const std::vector<double>& counts) {
    const auto n = angles_rad.size();
    if (counts.size() != n) throw ConfigError("angle and count lists differ in length");

    std::vector<std::pair<double, double>> rows;
    for (double th : angles_rad) rows.emplace_back(std::cos(2.0 * th), std::sin(2.0 * th));
    std::vector<std::pair<double, double>> distinct;
    for (const auto& r : rows) {
        const bool seen = std::any_of(distinct.begin(), distinct.end(), [&](const auto& q) {
            return std::abs(q.first - r.first) < 1e-12 && std::abs(q.second - r.second) < 1e-12;
        });
        if (!seen) distinct.push_back(r);
    }
    if (distinct.size() < 4)
        throw DegenerateFit("fringe fit needs at least four distinct analyzer angles");
    if (std::all_of(counts.begin(), counts.end(), [](double c) { return c == 0.0; }))
        throw DegenerateFit("all counts are zero");
    const auto [mn, mx] = std::minmax_element(counts.begin(), counts.end());
    if (*mx == *mn) throw DegenerateFit("all counts are equal; no fringe to fit");

    Eigen::MatrixXd x(n, 3);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x(static_cast<Eigen::Index>(i), 0) = 1.0;
        x(static_cast<Eigen::Index>(i), 1) = rows[i].first;
        x(static_cast<Eigen::Index>(i), 2) = rows[i].second;
        y(static_cast<Eigen::Index>(i)) = counts[i];
    }
    const Eigen::Matrix3d xtx = x.transpose() * x;
    const Eigen::Vector3d p = xtx.ldlt().solve(x.transpose() * y);
    const double a = p(0), b = p(1), c = p(2);
    if (a <= 0.0) throw DegenerateFit("fitted mean level is not positive");

    FringeFit fit;
    fit.offset = a;
    fit.amplitude = std::hypot(b, c);
    fit.phase = 0.5 * std::atan2(c, b);
    fit.visibility = std::clamp(fit.amplitude / a, 0.0, 1.0);

    const Eigen::VectorXd resid = y - x * p;
    const double dof = static_cast<double>(n) - 3.0;
    const double s2 = dof > 0.0 ? resid.squaredNorm() / dof : 0.0;
    const Eigen::Matrix3d cov = s2 * xtx.inverse();
    Eigen::Vector3d g;
    if (fit.amplitude > 1e-300) {
        g << -fit.amplitude / (a * a), b / (a * fit.amplitude), c / (a * fit.amplitude);
        fit.visibility_err = std::sqrt(std::max(0.0, g.dot(cov * g)));
    } else {
        fit.visibility_err = std::sqrt(std::max(0.0, cov(1, 1) + cov(2, 2))) / a;
    }
    return fit;
}

} // namespace qencode
