#include "qencode/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "qencode/errors.hpp"

namespace qencode {

namespace {

constexpr double kRootHalf = 0.70710678118654752440;

double deg2rad(double deg) { return deg * M_PI / 180.0; }

void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                const std::string& context) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end())
            throw ConfigError("unknown key '" + key + "' in " + context);
    }
}

Complex parse_complex(const nlohmann::json& v, const std::string& context) {
    if (v.is_number()) return Complex(v.get<double>(), 0.0);
    if (v.is_array() && (v.size() == 1 || v.size() == 2)) {
        const double re = v[0].get<double>();
        const double im = v.size() == 2 ? v[1].get<double>() : 0.0;
        return Complex(re, im);
    }
    throw ConfigError(context + " must be a number or [re, im]");
}

nlohmann::json dump_complex(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

bool same_detectors(const std::vector<DetectorSpec>& a, const std::vector<DetectorSpec>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].name != b[i].name || a[i].channel != b[i].channel ||
            a[i].efficiency != b[i].efficiency)
            return false;
    return true;
}

// Detectors of the standard threefold measurement at the given angles (deg).
struct ThreefoldDets {
    DetectorSpec d1, gate, d3;
};

ThreefoldDets threefold_dets(const Circuit& c) {
    return {c.detector("D1"), c.detector("gate"), c.detector("D3")};
}

double mixture_probability(const std::vector<WeightedState>& branches,
                           const std::vector<DetectorSpec>& dets, const ClickPattern& pattern,
                           const ChannelRegistry& reg, int k) {
    double p = 0.0;
    for (const auto& b : branches)
        p += b.weight * click_probability(b.state, dets, pattern, reg, k);
    return p;
}

double mixture_marginal(const std::vector<WeightedState>& branches,
                        const std::vector<DetectorSpec>& dets, const ClickPattern& partial,
                        const ChannelRegistry& reg, int k) {
    double p = 0.0;
    for (const auto& b : branches)
        p += b.weight * click_marginal(b.state, dets, partial, reg, k);
    return p;
}

} // namespace

bool Scenario::operator==(const Scenario& other) const {
    return name == other.name && seed == other.seed && pulse_rate_hz == other.pulse_rate_hz &&
           duration_s == other.duration_s &&
           sources.qubit_source == other.sources.qubit_source &&
           sources.qubit.alpha == other.sources.qubit.alpha &&
           sources.qubit.beta == other.sources.qubit.beta && sources.mu == other.sources.mu &&
           sources.coherent_n_max == other.sources.coherent_n_max &&
           sources.pair_emission_prob == other.sources.pair_emission_prob &&
           sources.coupling_eta == other.sources.coupling_eta &&
           overlap_gram == other.overlap_gram && same_detectors(detectors, other.detectors) &&
           rotation_error_deg == other.rotation_error_deg &&
           fringe.start_deg == other.fringe.start_deg &&
           fringe.stop_deg == other.fringe.stop_deg && fringe.points == other.fringe.points &&
           fringe.gate_deg == other.fringe.gate_deg &&
           fringe.theta1_deg == other.fringe.theta1_deg && ghz_mu == other.ghz_mu;
}

namespace {

Scenario scenario_from_json_impl(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("scenario config must be a JSON object");
    check_keys(j,
               {"name", "seed", "pulse_rate_hz", "duration_s", "sources", "overlaps",
                "detectors", "rotation_error_deg", "fringe", "ghz_mu"},
               "scenario");
    Scenario s;
    if (j.contains("name")) s.name = j.at("name").get<std::string>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("pulse_rate_hz")) s.pulse_rate_hz = j.at("pulse_rate_hz").get<double>();
    if (j.contains("duration_s")) s.duration_s = j.at("duration_s").get<double>();
    if (s.pulse_rate_hz <= 0.0 || s.duration_s <= 0.0)
        throw ConfigError("pulse_rate_hz and duration_s must be positive");

    if (j.contains("sources")) {
        const auto& src = j.at("sources");
        check_keys(src,
                   {"qubit_source", "alpha", "beta", "mu", "coherent_n_max",
                    "pair_emission_prob", "coupling_eta"},
                   "sources");
        if (src.contains("qubit_source"))
            s.sources.qubit_source = src.at("qubit_source").get<std::string>();
        if (src.contains("alpha")) s.sources.qubit.alpha = parse_complex(src.at("alpha"), "alpha");
        if (src.contains("beta")) s.sources.qubit.beta = parse_complex(src.at("beta"), "beta");
        if (src.contains("mu")) s.sources.mu = src.at("mu").get<double>();
        if (src.contains("coherent_n_max"))
            s.sources.coherent_n_max = src.at("coherent_n_max").get<int>();
        if (src.contains("pair_emission_prob"))
            s.sources.pair_emission_prob = src.at("pair_emission_prob").get<double>();
        if (src.contains("coupling_eta"))
            for (const auto& [channel, eta] : src.at("coupling_eta").items())
                s.sources.coupling_eta[channel] = eta.get<double>();
        s.sources.validate();
    }

    if (j.contains("overlaps")) {
        const auto& ov = j.at("overlaps");
        check_keys(ov, {"gram", "qubit_dc", "dc_dc"}, "overlaps");
        if (ov.contains("gram")) {
            const auto& g = ov.at("gram");
            if (!g.is_array() || g.size() != 3)
                throw ConfigError("overlaps.gram must be a 3x3 array");
            for (int r = 0; r < 3; ++r) {
                if (!g[r].is_array() || g[r].size() != 3)
                    throw ConfigError("overlaps.gram must be a 3x3 array");
                for (int c = 0; c < 3; ++c) s.overlap_gram(r, c) = g[r][c].get<double>();
            }
        } else {
            const double x = ov.value("qubit_dc", 1.0);
            const double y = ov.value("dc_dc", 1.0);
            s.overlap_gram = Eigen::Matrix3d::Identity();
            s.overlap_gram(0, 1) = s.overlap_gram(1, 0) = x;
            s.overlap_gram(0, 2) = s.overlap_gram(2, 0) = x;
            s.overlap_gram(1, 2) = s.overlap_gram(2, 1) = y;
        }
        // Fail early on a bad matrix rather than at apparatus build time.
        decompose_overlaps(s.overlap_gram.cast<Complex>());
    }

    if (j.contains("detectors")) {
        for (const auto& d : j.at("detectors")) {
            check_keys(d, {"name", "channel", "efficiency"}, "detector");
            DetectorSpec spec;
            spec.name = d.at("name").get<std::string>();
            spec.channel = d.at("channel").get<std::string>();
            spec.efficiency = d.value("efficiency", 1.0);
            s.detectors.push_back(std::move(spec));
        }
    }

    if (j.contains("rotation_error_deg"))
        for (const auto& [channel, deg] : j.at("rotation_error_deg").items())
            s.rotation_error_deg[channel] = deg.get<double>();

    if (j.contains("fringe")) {
        const auto& f = j.at("fringe");
        check_keys(f, {"start_deg", "stop_deg", "points", "gate_deg", "theta1_deg"}, "fringe");
        s.fringe.start_deg = f.value("start_deg", s.fringe.start_deg);
        s.fringe.stop_deg = f.value("stop_deg", s.fringe.stop_deg);
        s.fringe.points = f.value("points", s.fringe.points);
        s.fringe.gate_deg = f.value("gate_deg", s.fringe.gate_deg);
        s.fringe.theta1_deg = f.value("theta1_deg", s.fringe.theta1_deg);
        if (s.fringe.points < 2) throw ConfigError("fringe.points must be at least 2");
    }

    if (j.contains("ghz_mu")) s.ghz_mu = j.at("ghz_mu").get<double>();
    return s;
}

} // namespace

Scenario scenario_from_json(const nlohmann::json& j) {
    try {
        return scenario_from_json_impl(j);
    } catch (const nlohmann::json::exception& e) {
        // Missing required keys or wrong value types surface as config errors,
        // not as raw JSON library exceptions.
        throw ConfigError(std::string("invalid scenario config: ") + e.what());
    }
}

nlohmann::json scenario_to_json(const Scenario& s) {
    nlohmann::json j;
    j["name"] = s.name;
    j["seed"] = s.seed;
    j["pulse_rate_hz"] = s.pulse_rate_hz;
    j["duration_s"] = s.duration_s;
    nlohmann::json src;
    src["qubit_source"] = s.sources.qubit_source;
    src["alpha"] = dump_complex(s.sources.qubit.alpha);
    src["beta"] = dump_complex(s.sources.qubit.beta);
    src["mu"] = s.sources.mu;
    src["coherent_n_max"] = s.sources.coherent_n_max;
    src["pair_emission_prob"] = s.sources.pair_emission_prob;
    src["coupling_eta"] = nlohmann::json::object();
    for (const auto& [channel, eta] : s.sources.coupling_eta)
        src["coupling_eta"][channel] = eta;
    j["sources"] = std::move(src);
    nlohmann::json gram = nlohmann::json::array();
    for (int r = 0; r < 3; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < 3; ++c) row.push_back(s.overlap_gram(r, c));
        gram.push_back(std::move(row));
    }
    j["overlaps"] = nlohmann::json{{"gram", std::move(gram)}};
    if (!s.detectors.empty()) {
        nlohmann::json dets = nlohmann::json::array();
        for (const auto& d : s.detectors)
            dets.push_back(nlohmann::json{
                {"name", d.name}, {"channel", d.channel}, {"efficiency", d.efficiency}});
        j["detectors"] = std::move(dets);
    }
    if (!s.rotation_error_deg.empty()) {
        j["rotation_error_deg"] = nlohmann::json::object();
        for (const auto& [channel, deg] : s.rotation_error_deg)
            j["rotation_error_deg"][channel] = deg;
    }
    j["fringe"] = nlohmann::json{{"start_deg", s.fringe.start_deg},
                                 {"stop_deg", s.fringe.stop_deg},
                                 {"points", s.fringe.points},
                                 {"gate_deg", s.fringe.gate_deg},
                                 {"theta1_deg", s.fringe.theta1_deg}};
    j["ghz_mu"] = s.ghz_mu;
    return j;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse '" + path + "': " + e.what());
    }
    return scenario_from_json(j);
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write config file '" + path + "'");
    out << scenario_to_json(s).dump(2) << "\n";
}

Apparatus apparatus_from(const Scenario& s, const ApparatusOptions& opt) {
    SourceConfig src = s.sources;
    if (opt.mu_override >= 0.0) src.mu = opt.mu_override;
    if (opt.pair_emission_override >= 0.0) src.pair_emission_prob = opt.pair_emission_override;
    if (opt.qubit_off) src.qubit_source = "off";
    if (opt.qubit) src.qubit = *opt.qubit;
    const OverlapSpec overlaps = OverlapSpec::from_gram(s.overlap_gram.cast<Complex>());
    std::map<std::string, double> rot_rad;
    for (const auto& [channel, deg] : s.rotation_error_deg) rot_rad[channel] = deg2rad(deg);
    return build_full_apparatus(src, overlaps, s.detectors, rot_rad, opt.coherent_sector);
}

BasisOutput run_basis_states(const Scenario& s, bool exact) {
    BasisOutput out;
    std::vector<double> probs;
    std::vector<CountRow>* targets[2] = {&out.zero_rows, &out.one_rows};
    const double combos[4][2] = {{0.0, 0.0}, {0.0, 90.0}, {90.0, 0.0}, {90.0, 90.0}};
    const char* labels[2][4] = {{"0-HH", "0-HV", "0-VH", "0-VV"},
                                {"1-HH", "1-HV", "1-VH", "1-VV"}};
    for (int logical = 0; logical < 2; ++logical) {
        ApparatusOptions opt;
        opt.qubit = logical == 0 ? QubitAmplitudes{Complex{1.0, 0.0}, Complex{0.0, 0.0}}
                                 : QubitAmplitudes{Complex{0.0, 0.0}, Complex{1.0, 0.0}};
        const Apparatus app = apparatus_from(s, opt);
        const auto branches = propagate(app);
        const auto dets = threefold_dets(app.circuit);
        std::vector<ThreefoldSetting> settings;
        for (const auto& combo : combos)
            settings.push_back({deg2rad(combo[0]), deg2rad(s.fringe.gate_deg),
                                deg2rad(combo[1])});
        const auto p = threefold_table(branches, dets.d1, dets.gate, dets.d3, settings,
                                       app.circuit.channels, app.circuit.internal_dim);
        for (int i = 0; i < 4; ++i) {
            CountRow row;
            row.setting = labels[logical][i];
            row.theta1_deg = combos[i][0];
            row.theta3_deg = combos[i][1];
            row.probability = p[static_cast<std::size_t>(i)];
            row.expected = row.probability * s.pulse_rate_hz * s.duration_s;
            targets[logical]->push_back(std::move(row));
            probs.push_back(p[static_cast<std::size_t>(i)]);
        }
    }
    if (!exact) {
        const CountRecord rec = sample_counts(probs, s.pulse_rate_hz, s.duration_s, s.seed);
        for (int i = 0; i < 4; ++i) out.zero_rows[static_cast<std::size_t>(i)].counts =
            rec.counts[static_cast<std::size_t>(i)];
        for (int i = 0; i < 4; ++i) out.one_rows[static_cast<std::size_t>(i)].counts =
            rec.counts[static_cast<std::size_t>(i + 4)];
    }
    return out;
}

FringeOutput run_fringe(const Scenario& s, bool exact, int points_override,
                        double duration_override) {
    const int points = points_override > 0 ? points_override : s.fringe.points;
    if (points < 2) throw ConfigError("a fringe scan needs at least two points");
    const double duration = duration_override > 0.0 ? duration_override : s.duration_s;

    // The scan probes the entangled output: 45-degree input, theta1 fixed,
    // theta3 swept.
    ApparatusOptions opt;
    opt.qubit = QubitAmplitudes{Complex{kRootHalf, 0.0}, Complex{kRootHalf, 0.0}};
    const Apparatus app = apparatus_from(s, opt);
    const auto branches = propagate(app);
    const auto dets = threefold_dets(app.circuit);

    std::vector<double> angles_deg, angles_rad;
    std::vector<ThreefoldSetting> settings;
    for (int i = 0; i < points; ++i) {
        const double t3 =
            s.fringe.start_deg +
            (s.fringe.stop_deg - s.fringe.start_deg) * i / static_cast<double>(points - 1);
        angles_deg.push_back(t3);
        angles_rad.push_back(deg2rad(t3));
        settings.push_back(
            {deg2rad(s.fringe.theta1_deg), deg2rad(s.fringe.gate_deg), deg2rad(t3)});
    }
    const auto probs = threefold_table(branches, dets.d1, dets.gate, dets.d3, settings,
                                       app.circuit.channels, app.circuit.internal_dim);

    FringeOutput out;
    out.exact = exact;
    for (int i = 0; i < points; ++i) {
        CountRow row;
        row.setting = "point-" + std::to_string(i);
        row.theta1_deg = s.fringe.theta1_deg;
        row.theta3_deg = angles_deg[static_cast<std::size_t>(i)];
        row.probability = probs[static_cast<std::size_t>(i)];
        row.expected = row.probability * s.pulse_rate_hz * duration;
        out.rows.push_back(std::move(row));
    }
    out.exact_fit = fit_fringe(angles_rad, probs);
    if (!exact) {
        const CountRecord rec = sample_counts(probs, s.pulse_rate_hz, duration, s.seed);
        std::vector<double> y;
        for (int i = 0; i < points; ++i) {
            out.rows[static_cast<std::size_t>(i)].counts = rec.counts[static_cast<std::size_t>(i)];
            y.push_back(static_cast<double>(rec.counts[static_cast<std::size_t>(i)]));
        }
        out.sampled_fit = fit_fringe(angles_rad, y);
    }
    return out;
}

GhzOutput run_ghz(const Scenario& s, bool exact) {
    GhzOutput out;
    out.mu_used = s.ghz_mu >= 0.0 ? s.ghz_mu : s.sources.mu;
    ApparatusOptions opt;
    opt.mu_override = s.sources.qubit_source == "coherent" ? out.mu_used : -1.0;
    opt.qubit = QubitAmplitudes{Complex{kRootHalf, 0.0}, Complex{kRootHalf, 0.0}};
    const Apparatus app = apparatus_from(s, opt);
    const auto branches = propagate(app);
    const auto dets = threefold_dets(app.circuit);

    std::vector<ThreefoldSetting> settings;
    std::vector<std::string> labels;
    std::vector<double> t1d, t3d;
    for (int b1 = 0; b1 < 2; ++b1)
        for (int b2 = 0; b2 < 2; ++b2)
            for (int b3 = 0; b3 < 2; ++b3) {
                const double a1 = b1 ? 90.0 : 0.0, a2 = b2 ? 90.0 : 0.0, a3 = b3 ? 90.0 : 0.0;
                labels.push_back(std::string() + (b1 ? "V" : "H") + (b2 ? "V" : "H") +
                                 (b3 ? "V" : "H"));
                t1d.push_back(a1);
                t3d.push_back(a3);
                settings.push_back({deg2rad(a1), deg2rad(a2), deg2rad(a3)});
            }
    for (int s1 = 0; s1 < 2; ++s1)
        for (int s2 = 0; s2 < 2; ++s2)
            for (int s3 = 0; s3 < 2; ++s3) {
                const double a1 = s1 ? 135.0 : 45.0, a2 = s2 ? 135.0 : 45.0,
                             a3 = s3 ? 135.0 : 45.0;
                labels.push_back(std::string() + (s1 ? "-" : "+") + (s2 ? "-" : "+") +
                                 (s3 ? "-" : "+"));
                t1d.push_back(a1);
                t3d.push_back(a3);
                settings.push_back({deg2rad(a1), deg2rad(a2), deg2rad(a3)});
            }

    const auto probs = threefold_table(branches, dets.d1, dets.gate, dets.d3, settings,
                                       app.circuit.channels, app.circuit.internal_dim);
    CountRecord rec;
    if (!exact) rec = sample_counts(probs, s.pulse_rate_hz, s.duration_s, s.seed);

    for (std::size_t i = 0; i < settings.size(); ++i) {
        CountRow row;
        row.setting = labels[i];
        row.theta1_deg = t1d[i];
        row.theta3_deg = t3d[i];
        row.probability = probs[i];
        row.expected = probs[i] * s.pulse_rate_hz * s.duration_s;
        if (!exact) row.counts = rec.counts[i];
        (i < 8 ? out.basis_rows : out.parity_rows).push_back(std::move(row));
    }

    const double signal = std::min(probs[0], probs[7]);
    double background = 0.0;
    for (std::size_t i = 1; i < 7; ++i) background = std::max(background, probs[i]);
    out.ratio = background > 0.0 ? signal / background
                                 : std::numeric_limits<double>::infinity();
    return out;
}

namespace {

// Exclusive threefold probability of one apparatus, with the part whose kets
// hold at least one photon in a downconversion coupling-loss channel
// reported separately.
struct ExclusiveRates {
    double total = 0.0;
    double with_lost_dc = 0.0;
};

ExclusiveRates exclusive_threefold(const Apparatus& app, const ThreefoldSetting& setting) {
    auto dets = threefold_dets(app.circuit);
    dets.d1.theta = setting.theta1;
    dets.gate.theta = setting.theta2;
    dets.d3.theta = setting.theta3;
    const std::vector<DetectorSpec> three{dets.d1, dets.gate, dets.d3};

    std::set<std::uint16_t> dc_loss;
    for (const auto& name : app.circuit.loss_channels)
        if (name.rfind("loss-in2", 0) == 0 || name.rfind("loss-in3", 0) == 0)
            dc_loss.insert(app.circuit.channels.index(name));

    ExclusiveRates rates;
    for (const auto& b : propagate(app)) {
        const PureState proj = project_exclusive_clicks(b.state, three, app.circuit.channels,
                                                        app.circuit.internal_dim);
        for (const auto& [ket, amp] : proj.terms()) {
            const double p = b.weight * std::norm(amp);
            rates.total += p;
            const bool lost = std::any_of(
                ket.occupations().begin(), ket.occupations().end(),
                [&](const auto& mo) { return dc_loss.count(mo.mode.spatial) != 0; });
            if (lost) rates.with_lost_dc += p;
        }
    }
    return rates;
}

// P(D1 fires) with the pair source off and the analyzer at 45 degrees.
double qubit_detection_probability(const Scenario& s, double mu_override) {
    ApparatusOptions opt;
    opt.mu_override = mu_override;
    opt.pair_emission_override = 0.0;
    const Apparatus app = apparatus_from(s, opt);
    const auto branches = propagate(app);
    auto dets = threefold_dets(app.circuit);
    dets.d1.theta = M_PI / 4.0;
    const std::vector<DetectorSpec> all{dets.d1, dets.gate, dets.d3};
    return mixture_marginal(branches, all, {{"D1", true}}, app.circuit.channels,
                            app.circuit.internal_dim);
}

} // namespace

std::vector<NoiseRow> run_noise_tradeoff(const Scenario& s, const std::vector<double>& mu_values) {
    if (s.sources.qubit_source != "coherent")
        throw ConfigError("the pulse-strength sweep needs a coherent qubit source");
    const ThreefoldSetting peak{M_PI / 4.0, M_PI / 4.0, M_PI / 4.0};

    std::vector<NoiseRow> rows;
    for (double mu : mu_values) {
        if (mu <= 0.0) throw ConfigError("mu values must be positive");
        NoiseRow row;
        row.mu = mu;

        ApparatusOptions opt;
        opt.mu_override = mu;
        opt.coherent_sector = 1;
        row.valid = exclusive_threefold(apparatus_from(s, opt), peak).total;

        opt.coherent_sector = 2;
        const ExclusiveRates err = exclusive_threefold(apparatus_from(s, opt), peak);
        row.error = err.total;
        row.error_lost_dc = err.with_lost_dc;

        row.ratio = row.valid > 0.0 ? row.error / row.valid
                                    : std::numeric_limits<double>::infinity();
        row.ratio_over_mu = row.ratio / mu;
        row.qubit_detection = qubit_detection_probability(s, mu);
        rows.push_back(row);
    }
    return rows;
}

double observable_visibility(const Scenario& s) { return run_fringe(s, true).exact_fit.visibility; }

double observable_herald_ratio(const Scenario& s) {
    // Probability that a heralding click is accompanied by a click of the
    // partner photon, measured with the input pulse off so only the pair
    // contributes, all analyzers at 45 degrees.
    ApparatusOptions opt;
    opt.qubit_off = true;
    const Apparatus app = apparatus_from(s, opt);
    const auto branches = propagate(app);
    auto dets = threefold_dets(app.circuit);
    dets.d1.theta = dets.gate.theta = dets.d3.theta = M_PI / 4.0;
    const std::vector<DetectorSpec> all{dets.d1, dets.gate, dets.d3};
    const double p_d3 = mixture_marginal(branches, all, {{"D3", true}}, app.circuit.channels,
                                         app.circuit.internal_dim);
    if (p_d3 <= 0.0) throw ZeroProbabilityPattern("the heralding detector never fires");
    const double p_alone = mixture_probability(
        branches, all, {{"D1", false}, {"gate", false}, {"D3", true}}, app.circuit.channels,
        app.circuit.internal_dim);
    return (p_d3 - p_alone) / p_d3;
}

double observable_qubit_detection_prob(const Scenario& s) {
    if (s.sources.qubit_source != "coherent")
        throw ConfigError("the qubit detection probability needs a coherent qubit source");
    return qubit_detection_probability(s, -1.0);
}

double observable_ghz_ratio(const Scenario& s) { return run_ghz(s, true).ratio; }

void write_count_csv(std::ostream& os, const Scenario& s, const std::vector<CountRow>& rows,
                     bool exact, double duration_s) {
    const double duration = duration_s > 0.0 ? duration_s : s.duration_s;
    os << "setting,theta1_deg,theta3_deg,prob_per_pulse,counts,duration_s,seed\n";
    for (const auto& r : rows) {
        os << r.setting << ',' << format_g12(r.theta1_deg) << ',' << format_g12(r.theta3_deg)
           << ',' << format_g12(r.probability) << ',';
        if (!exact) os << r.counts;
        os << ',' << format_g12(duration) << ',' << s.seed << "\n";
    }
}

void write_noise_csv(std::ostream& os, const std::vector<NoiseRow>& rows) {
    os << "mu,valid_prob,error_prob,error_lost_dc_prob,error_to_valid,ratio_over_mu,"
          "qubit_detection_prob\n";
    for (const auto& r : rows) {
        os << format_g12(r.mu) << ',' << format_g12(r.valid) << ',' << format_g12(r.error)
           << ',' << format_g12(r.error_lost_dc) << ',' << format_g12(r.ratio) << ','
           << format_g12(r.ratio_over_mu) << ',' << format_g12(r.qubit_detection) << "\n";
    }
}

void write_fit_csv(std::ostream& os, const FringeOutput& out) {
    os << "observable,value,stderr\n";
    auto fit_rows = [&](const char* suffix, const FringeFit& fit) {
        os << "visibility_" << suffix << ',' << format_g12(fit.visibility) << ','
           << format_g12(fit.visibility_err) << "\n";
        os << "phase_deg_" << suffix << ',' << format_g12(fit.phase * 180.0 / M_PI) << ",\n";
        os << "offset_" << suffix << ',' << format_g12(fit.offset) << ",\n";
        os << "amplitude_" << suffix << ',' << format_g12(fit.amplitude) << ",\n";
    };
    fit_rows("exact", out.exact_fit);
    if (!out.exact) fit_rows("sampled", out.sampled_fit);
}

} // namespace qencode
