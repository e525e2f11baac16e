// Scenario configs (JSON round trips, validation), the four run drivers
// against closed-form oracles, scalar observables, single-target calibration,
// and the CSV writers' exact byte layout.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qencode/calibrate.hpp"
#include "qencode/errors.hpp"
#include "qencode/scenario.hpp"

using namespace qencode;

namespace {

constexpr double kRootHalf = 0.70710678118654752440;

Scenario ideal_scenario() {
    Scenario s;
    s.name = "ideal";
    s.sources.qubit_source = "ideal";
    s.sources.qubit = {Complex{kRootHalf, 0.0}, Complex{kRootHalf, 0.0}};
    s.sources.pair_emission_prob = 1.0;
    return s;
}

// Gram matrix with qubit/pair overlap x and mutually identical pair photons.
Eigen::Matrix3d gram_with_overlap(double x) {
    Eigen::Matrix3d g = Eigen::Matrix3d::Ones();
    g(0, 1) = g(1, 0) = x;
    g(0, 2) = g(2, 0) = x;
    return g;
}

Scenario coherent_scenario(double mu, double eta, double x) {
    Scenario s;
    s.name = "bench";
    s.sources.qubit_source = "coherent";
    s.sources.qubit = {Complex{kRootHalf, 0.0}, Complex{kRootHalf, 0.0}};
    s.sources.mu = mu;
    s.sources.pair_emission_prob = 1e-3;
    if (eta < 1.0) {
        s.sources.coupling_eta["in2"] = eta;
        s.sources.coupling_eta["in3"] = eta;
    }
    s.overlap_gram = gram_with_overlap(x);
    return s;
}

} // namespace

TEST_CASE("scenario JSON round trip preserves every field") {
    Scenario s;
    s.name = "bench-7";
    s.seed = 42;
    s.pulse_rate_hz = 1.0e6;
    s.duration_s = 2.5;
    s.sources.qubit_source = "coherent";
    s.sources.qubit = {Complex{0.6, 0.0}, Complex{0.0, 0.8}};
    s.sources.mu = 0.01;
    s.sources.coherent_n_max = 2;
    s.sources.pair_emission_prob = 0.5;
    s.sources.coupling_eta = {{"in2", 0.5}, {"in3", 0.7}};
    s.overlap_gram = gram_with_overlap(0.8);
    s.detectors.push_back({"D1", "out1", 0.0, 0.3, false});
    s.rotation_error_deg["out3"] = 1.5;
    s.fringe = {10.0, 170.0, 9, 44.0, 46.0};
    s.ghz_mu = 0.02;

    const Scenario back = scenario_from_json(scenario_to_json(s));
    CHECK(back == s);

    const auto path = std::filesystem::temp_directory_path() / "qencode_scenario_rt.json";
    save_scenario(s, path.string());
    const Scenario loaded = load_scenario(path.string());
    CHECK(loaded == s);
    std::filesystem::remove(path);
}

TEST_CASE("scenario JSON applies defaults for omitted keys") {
    const Scenario s = scenario_from_json(nlohmann::json::object());
    CHECK(s.name == "scenario");
    CHECK(s.seed == 1);
    CHECK(s.pulse_rate_hz == 76.0e6);
    CHECK(s.duration_s == 1200.0);
    CHECK(s.sources.qubit_source == "coherent");
    CHECK(s.sources.qubit.alpha == Complex{1.0, 0.0});
    CHECK(s.sources.mu == 1e-3);
    CHECK(s.sources.coherent_n_max == 2);
    CHECK(s.sources.pair_emission_prob == 1.0);
    CHECK(s.sources.coupling_eta.empty());
    CHECK(s.overlap_gram == Eigen::Matrix3d::Ones());
    CHECK(s.detectors.empty());
    CHECK(s.fringe.start_deg == 0.0);
    CHECK(s.fringe.stop_deg == 180.0);
    CHECK(s.fringe.points == 13);
    CHECK(s.fringe.gate_deg == 45.0);
    CHECK(s.fringe.theta1_deg == 45.0);
    CHECK(s.ghz_mu == -1.0);
}

TEST_CASE("scenario JSON rejects unknown keys at every level") {
    using nlohmann::json;
    CHECK_THROWS_AS(scenario_from_json(json{{"bogus", 1}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json{{"sources", {{"bogus", 1}}}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json{{"overlaps", {{"bogus", 1}}}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json{{"fringe", {{"bogus", 1}}}}), ConfigError);
    CHECK_THROWS_AS(
        scenario_from_json(json{{"detectors", json::array({{{"name", "D1"},
                                                            {"channel", "out1"},
                                                            {"bogus", 1}}})}}),
        ConfigError);
}

TEST_CASE("scenario JSON parses amplitudes as scalars or [re, im] pairs") {
    using nlohmann::json;
    const Scenario a = scenario_from_json(
        json{{"sources", {{"alpha", 0.6}, {"beta", 0.8}}}});
    CHECK(a.sources.qubit.alpha == Complex{0.6, 0.0});
    CHECK(a.sources.qubit.beta == Complex{0.8, 0.0});

    const Scenario b = scenario_from_json(
        json{{"sources", {{"alpha", json::array({0.6})},
                          {"beta", json::array({0.0, 0.8})}}}});
    CHECK(b.sources.qubit.alpha == Complex{0.6, 0.0});
    CHECK(b.sources.qubit.beta == Complex{0.0, 0.8});

    // Wrong shape, unnormalized pair, wrong value type.
    CHECK_THROWS_AS(scenario_from_json(json{{"sources", {{"alpha", "x"}}}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json{{"sources", {{"alpha", 0.6}, {"beta", 0.7}}}}),
                    ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json{{"name", 5}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(
                        json{{"detectors", json::array({{{"channel", "out1"}}})}}),
                    ConfigError);
}

TEST_CASE("scenario JSON overlap shorthand builds the symmetric gram matrix") {
    using nlohmann::json;
    const Scenario s = scenario_from_json(
        json{{"overlaps", {{"qubit_dc", 0.81}, {"dc_dc", 0.9}}}});
    CHECK(s.overlap_gram(0, 0) == 1.0);
    CHECK(s.overlap_gram(1, 1) == 1.0);
    CHECK(s.overlap_gram(2, 2) == 1.0);
    CHECK(s.overlap_gram(0, 1) == 0.81);
    CHECK(s.overlap_gram(1, 0) == 0.81);
    CHECK(s.overlap_gram(0, 2) == 0.81);
    CHECK(s.overlap_gram(2, 0) == 0.81);
    CHECK(s.overlap_gram(1, 2) == 0.9);
    CHECK(s.overlap_gram(2, 1) == 0.9);

    const auto grid = json::array(
        {json::array({1.0, 0.5, 0.5}), json::array({0.5, 1.0, 1.0}),
         json::array({0.5, 1.0, 1.0})});
    const Scenario g = scenario_from_json(json{{"overlaps", {{"gram", grid}}}});
    CHECK(g.overlap_gram(0, 1) == 0.5);
    CHECK(g.overlap_gram(1, 2) == 1.0);

    CHECK_THROWS_AS(scenario_from_json(json{{"overlaps",
                                             {{"gram", json::array({1.0, 0.0})}}}}),
                    ConfigError);
    // Overlap pattern with no consistent internal-state assignment.
    const auto bad = json::array(
        {json::array({1.0, 1.0, 1.0}), json::array({1.0, 1.0, 0.5}),
         json::array({1.0, 0.5, 1.0})});
    CHECK_THROWS_AS(scenario_from_json(json{{"overlaps", {{"gram", bad}}}}), NotPSD);
}

TEST_CASE("scenario JSON validates ranges and file errors") {
    using nlohmann::json;
    CHECK_THROWS_AS(scenario_from_json(json{{"pulse_rate_hz", 0.0}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json{{"duration_s", -1.0}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json{{"fringe", {{"points", 1}}}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json::array({1, 2})), ConfigError);
    CHECK_THROWS_AS(load_scenario("/nonexistent/qencode.json"), ConfigError);

    const auto path = std::filesystem::temp_directory_path() / "qencode_bad.json";
    {
        std::ofstream out(path);
        out << "{ not json";
    }
    CHECK_THROWS_AS(load_scenario(path.string()), ConfigError);
    std::filesystem::remove(path);
}

TEST_CASE("basis-state runs keep logical inputs on their own detector pair") {
    Scenario s = ideal_scenario();
    const BasisOutput out = run_basis_states(s, true);
    REQUIRE(out.zero_rows.size() == 4);
    REQUIRE(out.one_rows.size() == 4);

    CHECK(out.zero_rows[0].setting == "0-HH");
    CHECK(out.zero_rows[0].theta1_deg == 0.0);
    CHECK(out.zero_rows[0].theta3_deg == 0.0);
    CHECK(out.zero_rows[0].probability == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(out.zero_rows[0].expected ==
          doctest::Approx(0.125 * s.pulse_rate_hz * s.duration_s).epsilon(1e-12));
    CHECK(out.zero_rows[0].counts == 0); // exact run leaves counts untouched

    const char* zero_labels[4] = {"0-HH", "0-HV", "0-VH", "0-VV"};
    const char* one_labels[4] = {"1-HH", "1-HV", "1-VH", "1-VV"};
    for (int i = 0; i < 4; ++i) {
        CHECK(out.zero_rows[i].setting == zero_labels[i]);
        CHECK(out.one_rows[i].setting == one_labels[i]);
    }
    for (int i = 1; i < 4; ++i) CHECK(std::abs(out.zero_rows[i].probability) < 1e-12);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(out.one_rows[i].probability) < 1e-12);
    CHECK(out.one_rows[3].probability == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(out.one_rows[3].theta1_deg == 90.0);
    CHECK(out.one_rows[3].theta3_deg == 90.0);
}

TEST_CASE("basis-state sampling is deterministic and tracks the expectation") {
    Scenario s = ideal_scenario();
    s.pulse_rate_hz = 1.0e6;
    s.duration_s = 0.01; // expected peak counts ~1250
    const BasisOutput a = run_basis_states(s, false);
    const BasisOutput b = run_basis_states(s, false);
    for (int i = 0; i < 4; ++i) {
        CHECK(a.zero_rows[i].counts == b.zero_rows[i].counts);
        CHECK(a.one_rows[i].counts == b.one_rows[i].counts);
        const auto& r = a.zero_rows[static_cast<std::size_t>(i)];
        CHECK(std::abs(static_cast<double>(r.counts) - r.expected) <=
              5.0 * std::sqrt(std::max(r.expected, 0.0)) + 3.0);
    }
    CHECK(a.zero_rows[0].counts > 0);

    s.seed = 99;
    const BasisOutput c = run_basis_states(s, false);
    bool any_differs = false;
    for (int i = 0; i < 4; ++i)
        if (c.zero_rows[i].counts != a.zero_rows[i].counts) any_differs = true;
    CHECK(any_differs);
}

TEST_CASE("fringe runs: unit visibility for identical photons, x^2 otherwise") {
    Scenario s = ideal_scenario();
    const FringeOutput out = run_fringe(s, true);
    REQUIRE(static_cast<int>(out.rows.size()) == s.fringe.points);
    CHECK(out.exact);
    CHECK(out.rows[0].setting == "point-0");
    CHECK(out.rows[0].theta3_deg == 0.0);
    CHECK(out.rows[12].theta3_deg == 180.0);
    CHECK(out.rows[1].theta3_deg == doctest::Approx(15.0));
    CHECK(out.rows[0].theta1_deg == 45.0);

    // P(theta3) = (1/32)(1 + sin 2*theta3) for indistinguishable photons.
    for (std::size_t i = 0; i < out.rows.size(); ++i) {
        const double t3 = out.rows[i].theta3_deg * M_PI / 180.0;
        CHECK(std::abs(out.rows[i].probability - (1.0 + std::sin(2.0 * t3)) / 32.0) < 1e-12);
    }
    CHECK(out.exact_fit.visibility == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(out.exact_fit.phase == doctest::Approx(M_PI / 4.0).epsilon(1e-6));
    CHECK(out.exact_fit.offset == doctest::Approx(1.0 / 32.0).epsilon(1e-9));
    CHECK(out.exact_fit.amplitude == doctest::Approx(1.0 / 32.0).epsilon(1e-9));

    Scenario part = ideal_scenario();
    part.overlap_gram = gram_with_overlap(0.6);
    const FringeOutput pout = run_fringe(part, true);
    CHECK(pout.exact_fit.visibility == doctest::Approx(0.36).epsilon(1e-9));

    const FringeOutput dense = run_fringe(s, true, 25);
    REQUIRE(dense.rows.size() == 25);
    CHECK(dense.rows[1].theta3_deg == doctest::Approx(7.5));
    CHECK_THROWS_AS(run_fringe(s, true, 1), ConfigError);
}

TEST_CASE("fringe sampling is deterministic, 5-sigma faithful, and refittable") {
    Scenario s = ideal_scenario();
    s.pulse_rate_hz = 1.0e6;
    s.duration_s = 0.2; // peak expectation 12500 counts
    const FringeOutput a = run_fringe(s, false);
    const FringeOutput b = run_fringe(s, false);
    REQUIRE(a.rows.size() == 13);
    CHECK_FALSE(a.exact);
    long long total = 0;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].counts == b.rows[i].counts);
        CHECK(std::abs(static_cast<double>(a.rows[i].counts) - a.rows[i].expected) <=
              5.0 * std::sqrt(std::max(a.rows[i].expected, 0.0)) + 3.0);
        total += a.rows[i].counts;
    }
    CHECK(total > 10000);
    CHECK(std::abs(a.sampled_fit.visibility - 1.0) < 0.05);
    CHECK(a.sampled_fit.phase == doctest::Approx(M_PI / 4.0).epsilon(0.05));

    // Duration override rescales expectations without touching the scenario.
    const FringeOutput twice = run_fringe(s, true, -1, 0.4);
    CHECK(twice.rows[3].expected == doctest::Approx(2.0 * a.rows[3].expected).epsilon(1e-12));
}

TEST_CASE("three-photon runs: only correlated outcomes and even parities survive") {
    Scenario s = ideal_scenario();
    const GhzOutput out = run_ghz(s, true);
    REQUIRE(out.basis_rows.size() == 8);
    REQUIRE(out.parity_rows.size() == 8);

    const char* basis_labels[8] = {"HHH", "HHV", "HVH", "HVV", "VHH", "VHV", "VVH", "VVV"};
    for (int i = 0; i < 8; ++i) CHECK(out.basis_rows[i].setting == basis_labels[i]);
    CHECK(out.basis_rows[0].probability == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(out.basis_rows[7].probability == doctest::Approx(0.125).epsilon(1e-12));
    for (int i = 1; i < 7; ++i) CHECK(std::abs(out.basis_rows[i].probability) < 1e-12);

    // Signs multiply to +1 on rows {+++, +--, -+-, --+}: those carry 1/16.
    const char* parity_labels[8] = {"+++", "++-", "+-+", "+--", "-++", "-+-", "--+", "---"};
    const bool even[8] = {true, false, false, true, false, true, true, false};
    for (int i = 0; i < 8; ++i) {
        CHECK(out.parity_rows[i].setting == parity_labels[i]);
        if (even[i])
            CHECK(out.parity_rows[i].probability == doctest::Approx(0.0625).epsilon(1e-12));
        else
            CHECK(std::abs(out.parity_rows[i].probability) < 1e-12);
    }
    CHECK(out.ratio > 1e6); // fp residue only; no physical background here
    CHECK(out.mu_used == s.sources.mu);

    s.ghz_mu = 0.02;
    CHECK(run_ghz(s, true).mu_used == 0.02);
}

TEST_CASE("noise sweep: lossless pulses cannot fake a coincidence") {
    Scenario s = coherent_scenario(0.004, 1.0, 1.0);
    const auto rows = run_noise_tradeoff(s, {1e-3, 4e-3});
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        CHECK(row.error == 0.0);
        CHECK(row.error_lost_dc == 0.0);
        CHECK(row.ratio == 0.0);
        CHECK(row.ratio_over_mu == 0.0);
        const double valid = testutil::exclusive_valid(
            s.sources.pair_emission_prob, testutil::coherent_weight(row.mu, 1), 1.0, 1.0);
        CHECK(row.valid == doctest::Approx(valid).epsilon(1e-10));
        CHECK(row.qubit_detection ==
              doctest::Approx(testutil::qubit_detection(row.mu, 0.5)).epsilon(1e-10));
    }
}

TEST_CASE("noise sweep matches the closed-form rates under coupling loss") {
    const double eta = 0.36, x = 0.81, p = 1e-3;
    Scenario s = coherent_scenario(0.004, eta, x);
    const std::vector<double> mus = {1e-3, 2e-3, 8e-3};
    const auto rows = run_noise_tradeoff(s, mus);
    REQUIRE(rows.size() == 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        CHECK(row.mu == mus[i]);
        const double valid = testutil::exclusive_valid(
            p, testutil::coherent_weight(row.mu, 1), eta, x);
        const double error = testutil::exclusive_error(
            p, testutil::coherent_weight(row.mu, 2), eta);
        CHECK(row.valid == doctest::Approx(valid).epsilon(1e-10));
        CHECK(row.error == doctest::Approx(error).epsilon(1e-10));
        CHECK(row.error_lost_dc == row.error); // every error ket lost a pair photon
        CHECK(row.ratio == doctest::Approx(error / valid).epsilon(1e-10));
        CHECK(row.ratio ==
              doctest::Approx(row.mu * (1.0 - eta) / (eta * (1.0 + x * x))).epsilon(1e-10));
    }
    // The truncated-pulse weight ratio is mu/2 exactly, so ratio/mu is flat.
    CHECK(rows[0].ratio_over_mu == doctest::Approx(rows[1].ratio_over_mu).epsilon(1e-12));
    CHECK(rows[1].ratio_over_mu == doctest::Approx(rows[2].ratio_over_mu).epsilon(1e-12));

    CHECK_THROWS_AS(run_noise_tradeoff(s, {0.0}), ConfigError);
    Scenario ideal = ideal_scenario();
    CHECK_THROWS_AS(run_noise_tradeoff(ideal, {1e-3}), ConfigError);
}

TEST_CASE("herald ratio observable matches eta/(4 - eta)") {
    Scenario s = ideal_scenario();
    s.sources.pair_emission_prob = 0.2;

    auto with_eta = [&](double eta) {
        Scenario t = s;
        t.sources.coupling_eta["in2"] = eta;
        t.sources.coupling_eta["in3"] = eta;
        return observable_herald_ratio(t);
    };
    CHECK(with_eta(1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(with_eta(0.5) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
    CHECK(with_eta(4.0 / 11.0) == doctest::Approx(0.10).epsilon(1e-12));
    CHECK(with_eta(0.7) == doctest::Approx(testutil::herald_ratio(0.7)).epsilon(1e-12));

    // Emission probability scales both clicks and heralds; the ratio stays put.
    Scenario weak = s;
    weak.sources.pair_emission_prob = 0.01;
    weak.sources.coupling_eta["in2"] = 0.5;
    weak.sources.coupling_eta["in3"] = 0.5;
    CHECK(observable_herald_ratio(weak) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));

    Scenario off = s;
    off.sources.pair_emission_prob = 0.0;
    CHECK_THROWS_AS(observable_herald_ratio(off), ZeroProbabilityPattern);
}

TEST_CASE("qubit detection probability matches the truncated-pulse closed form") {
    Scenario s = coherent_scenario(0.01, 1.0, 1.0);
    CHECK(observable_qubit_detection_prob(s) ==
          doctest::Approx(testutil::qubit_detection(0.01, 0.5)).epsilon(1e-10));

    Scenario h = s;
    h.sources.qubit = {Complex{1.0, 0.0}, Complex{0.0, 0.0}};
    CHECK(observable_qubit_detection_prob(h) ==
          doctest::Approx(testutil::qubit_detection(0.01, 1.0)).epsilon(1e-10));

    Scenario ideal = ideal_scenario();
    CHECK_THROWS_AS(observable_qubit_detection_prob(ideal), ConfigError);
}

TEST_CASE("visibility observable equals the squared photon overlap") {
    Scenario s = ideal_scenario();
    s.overlap_gram = gram_with_overlap(0.9);
    CHECK(observable_visibility(s) == doctest::Approx(0.81).epsilon(1e-9));
}

TEST_CASE("single-target calibration lands on the known solution") {
    Scenario s = ideal_scenario();
    CalibrationTarget target{"visibility", 0.66, 1e-9, "overlap_qubit_dc", 0.05, 1.0};
    const CalibrationResult res = calibrate_target(s, target);
    CHECK(res.observable == "visibility");
    CHECK(res.parameter == "overlap_qubit_dc");
    CHECK(res.value == doctest::Approx(std::sqrt(0.66)).epsilon(1e-7));
    CHECK(res.achieved == doctest::Approx(0.66).epsilon(1e-8));
    CHECK(res.residual <= target.tolerance);
    CHECK(res.evaluations > 2);
    // The scenario itself carries the fitted value afterwards.
    CHECK(s.overlap_gram(0, 1) == res.value);
    CHECK(s.overlap_gram(2, 0) == res.value);
    CHECK(observable_visibility(s) == doctest::Approx(0.66).epsilon(1e-8));

    CalibrationTarget impossible{"visibility", 2.0, 1e-9, "overlap_qubit_dc", 0.05, 1.0};
    Scenario t = ideal_scenario();
    CHECK_THROWS_AS(calibrate_target(t, impossible), CalibrationFailed);
    CalibrationTarget empty{"visibility", 0.5, 1e-9, "overlap_qubit_dc", 0.9, 0.2};
    CHECK_THROWS_AS(calibrate_target(t, empty), CalibrationFailed);
}

TEST_CASE("calibration parameter and observable names are validated") {
    Scenario s = ideal_scenario();
    CHECK_THROWS_AS(evaluate_observable(s, "nope"), ConfigError);
    CHECK_THROWS_AS(set_parameter(s, "nope", 1.0), ConfigError);

    set_parameter(s, "mu", 0.02);
    CHECK(s.sources.mu == 0.02);
    set_parameter(s, "ghz_mu", 0.03);
    CHECK(s.ghz_mu == 0.03);
    set_parameter(s, "pair_emission_prob", 0.4);
    CHECK(s.sources.pair_emission_prob == 0.4);
    set_parameter(s, "coupling_eta_arms", 0.5);
    CHECK(s.sources.coupling_eta.at("in2") == 0.5);
    CHECK(s.sources.coupling_eta.at("in3") == 0.5);
    set_parameter(s, "overlap_qubit_dc", 0.7);
    CHECK(s.overlap_gram(0, 1) == 0.7);
    CHECK(s.overlap_gram(0, 2) == 0.7);
    CHECK(s.overlap_gram(1, 2) == 1.0);

    const auto standard = standard_targets();
    REQUIRE(standard.size() == 5);
    CHECK(standard[0].parameter == "mu");
    CHECK(standard[1].parameter == "coupling_eta_arms");
    CHECK(standard[2].parameter == "overlap_qubit_dc");
    CHECK(standard[3].parameter == "ghz_mu");
    CHECK(standard[4].parameter == "pair_emission_prob");
    for (const auto& t : standard) CHECK(t.lower < t.upper);
}

TEST_CASE("count CSV writer emits the exact documented layout") {
    Scenario s;
    s.seed = 7;
    s.duration_s = 1200.0;
    CountRow r;
    r.setting = "0-HH";
    r.theta1_deg = 0.0;
    r.theta3_deg = 90.0;
    r.probability = 0.125;
    r.expected = 1.14e10;
    r.counts = 42;

    std::ostringstream sampled;
    write_count_csv(sampled, s, {r}, false);
    CHECK(sampled.str() ==
          "setting,theta1_deg,theta3_deg,prob_per_pulse,counts,duration_s,seed\n"
          "0-HH,0,90,0.125,42,1200,7\n");

    std::ostringstream exact;
    write_count_csv(exact, s, {r}, true);
    CHECK(exact.str() ==
          "setting,theta1_deg,theta3_deg,prob_per_pulse,counts,duration_s,seed\n"
          "0-HH,0,90,0.125,,1200,7\n");

    std::ostringstream shorter;
    write_count_csv(shorter, s, {r}, true, 3.5);
    CHECK(shorter.str() ==
          "setting,theta1_deg,theta3_deg,prob_per_pulse,counts,duration_s,seed\n"
          "0-HH,0,90,0.125,,3.5,7\n");
}

TEST_CASE("noise CSV writer emits the exact documented layout") {
    NoiseRow r;
    r.mu = 0.004;
    r.valid = 1.25e-07;
    r.error = 0.0;
    r.error_lost_dc = 0.0;
    r.ratio = 0.03;
    r.ratio_over_mu = 7.5;
    r.qubit_detection = 0.001;
    std::ostringstream os;
    write_noise_csv(os, {r});
    CHECK(os.str() ==
          "mu,valid_prob,error_prob,error_lost_dc_prob,error_to_valid,ratio_over_mu,"
          "qubit_detection_prob\n"
          "0.004,1.25e-07,0,0,0.03,7.5,0.001\n");
}

TEST_CASE("fit CSV writer emits exact and sampled blocks") {
    FringeOutput out;
    out.exact = true;
    out.exact_fit = {0.66, 0.015, 0.0, 0.03125, 0.020625};
    std::ostringstream os;
    write_fit_csv(os, out);
    CHECK(os.str() ==
          "observable,value,stderr\n"
          "visibility_exact,0.66,0.015\n"
          "phase_deg_exact,0,\n"
          "offset_exact,0.03125,\n"
          "amplitude_exact,0.020625,\n");

    out.exact = false;
    out.sampled_fit = {0.5, 0.25, 0.0, 2.0, 1.0};
    std::ostringstream both;
    write_fit_csv(both, out);
    CHECK(both.str() ==
          "observable,value,stderr\n"
          "visibility_exact,0.66,0.015\n"
          "phase_deg_exact,0,\n"
          "offset_exact,0.03125,\n"
          "amplitude_exact,0.020625,\n"
          "visibility_sampled,0.5,0.25\n"
          "phase_deg_sampled,0,\n"
          "offset_sampled,2,\n"
          "amplitude_sampled,1,\n");
}
