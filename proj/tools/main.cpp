#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qencode/calibrate.hpp"
#include "qencode/encoder.hpp"
#include "qencode/errors.hpp"
#include "qencode/scenario.hpp"

namespace {

using qencode::format_g12;

struct CommonOpts {
    std::string config;
    std::string out = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    double duration = -1.0;
    bool exact = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_exact = true) {
    cmd->add_option("--config", opts.config, "scenario config (JSON)")->required();
    cmd->add_option("--out", opts.out, "output directory");
    cmd->add_option("--seed", opts.seed, "override the scenario seed")
        ->each([&](const std::string&) { opts.seed_set = true; });
    cmd->add_option("--duration", opts.duration, "override the run duration in seconds");
    if (with_exact)
        cmd->add_flag("--exact", opts.exact, "report exact probabilities, no sampled counts");
}

qencode::Scenario load(const CommonOpts& opts) {
    qencode::Scenario s = qencode::load_scenario(opts.config);
    if (opts.seed_set) s.seed = opts.seed;
    if (opts.duration > 0.0) s.duration_s = opts.duration;
    return s;
}

std::ofstream open_out(const CommonOpts& opts, const std::string& file) {
    std::filesystem::create_directories(opts.out);
    const auto path = std::filesystem::path(opts.out) / file;
    std::ofstream os(path);
    if (!os) throw qencode::ConfigError("cannot write '" + path.string() + "'");
    return os;
}

void cmd_basis(const CommonOpts& opts) {
    const auto s = load(opts);
    const auto result = qencode::run_basis_states(s, opts.exact);
    {
        auto os = open_out(opts, "basis_zero.csv");
        qencode::write_count_csv(os, s, result.zero_rows, opts.exact);
    }
    {
        auto os = open_out(opts, "basis_one.csv");
        qencode::write_count_csv(os, s, result.one_rows, opts.exact);
    }
    for (const auto* rows : {&result.zero_rows, &result.one_rows})
        for (const auto& r : *rows)
            std::cout << "basis " << r.setting << " probability=" << format_g12(r.probability)
                      << (opts.exact ? "" : " counts=" + std::to_string(r.counts)) << "\n";
}

void cmd_fringe(const CommonOpts& opts, int points) {
    const auto s = load(opts);
    const auto result = qencode::run_fringe(s, opts.exact, points);
    {
        auto os = open_out(opts, "fringe.csv");
        qencode::write_count_csv(os, s, result.rows, opts.exact);
    }
    {
        auto os = open_out(opts, "fringe_fit.csv");
        qencode::write_fit_csv(os, result);
    }
    std::cout << "fringe exact visibility=" << format_g12(result.exact_fit.visibility)
              << " phase_deg=" << format_g12(result.exact_fit.phase * 180.0 / M_PI) << "\n";
    if (!opts.exact)
        std::cout << "fringe sampled visibility=" << format_g12(result.sampled_fit.visibility)
                  << " stderr=" << format_g12(result.sampled_fit.visibility_err) << "\n";
}

void cmd_ghz(const CommonOpts& opts) {
    const auto s = load(opts);
    const auto result = qencode::run_ghz(s, opts.exact);
    {
        auto os = open_out(opts, "ghz_basis.csv");
        qencode::write_count_csv(os, s, result.basis_rows, opts.exact);
    }
    {
        auto os = open_out(opts, "ghz_parity.csv");
        qencode::write_count_csv(os, s, result.parity_rows, opts.exact);
    }
    std::cout << "ghz mu=" << format_g12(result.mu_used)
              << " signal_to_background=" << format_g12(result.ratio) << "\n";
}

void cmd_noise(const CommonOpts& opts, std::vector<double> mu_values) {
    const auto s = load(opts);
    if (mu_values.empty()) mu_values = {5e-4, 1e-3, 2e-3, 5e-3, 1e-2};
    const auto rows = qencode::run_noise_tradeoff(s, mu_values);
    {
        auto os = open_out(opts, "noise.csv");
        qencode::write_noise_csv(os, rows);
    }
    for (const auto& r : rows)
        std::cout << "noise mu=" << format_g12(r.mu)
                  << " error_to_valid=" << format_g12(r.ratio)
                  << " ratio_over_mu=" << format_g12(r.ratio_over_mu) << "\n";
}

void cmd_calibrate(const CommonOpts& opts, const std::string& out_config) {
    auto s = load(opts);
    const auto results = qencode::calibrate(s, qencode::standard_targets());
    for (const auto& r : results)
        std::cout << "calibrated " << r.parameter << "=" << format_g12(r.value) << " "
                  << r.observable << "=" << format_g12(r.achieved)
                  << " residual=" << format_g12(r.residual)
                  << " evaluations=" << r.evaluations << "\n";
    std::string path = out_config;
    if (path.empty()) {
        std::filesystem::create_directories(opts.out);
        path = (std::filesystem::path(opts.out) / "calibrated.json").string();
    }
    qencode::save_scenario(s, path);
    std::cout << "wrote " << path << "\n";
}

void cmd_verify_eq2(const CommonOpts& opts) {
    const auto s = load(opts);
    const auto app = qencode::build_ideal_encoder(s.sources.qubit);
    const auto report = qencode::verify_eq2(app);
    std::cout << "encoded_weight " << format_g12(report.encoded_weight) << "\n";
    std::cout << "perp_weight " << format_g12(report.perp_weight) << "\n";
    std::cout << "cross_magnitude " << format_g12(report.cross_magnitude) << "\n";
    std::cout << "perp_gate_counts";
    for (int n : report.perp_gate_counts) std::cout << ' ' << n;
    std::cout << "\n";

    const auto enc = qencode::encode(app);
    const auto target = qencode::target_pair_state(app.circuit.channels, s.sources.qubit);
    std::cout << "success_probability " << format_g12(enc.success_probability) << "\n";
    std::cout << "fidelity_accept "
              << format_g12(qencode::fidelity(enc.state_accept, target)) << "\n";
    std::cout << "fidelity_reject "
              << format_g12(qencode::fidelity(enc.state_reject, target)) << "\n";
    std::cout << "correction_accept " << format_g12(enc.correction.at("accept")) << "\n";
    std::cout << "correction_reject " << format_g12(enc.correction.at("reject")) << "\n";
}

void cmd_dump_circuit(const CommonOpts& opts, bool ideal) {
    const auto s = load(opts);
    if (ideal) {
        qencode::dump_circuit(qencode::build_ideal_encoder(s.sources.qubit), std::cout);
    } else {
        qencode::dump_circuit(qencode::apparatus_from(s), std::cout);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"full-amplitude simulator of a heralded single-photon qubit encoder"};
    app.require_subcommand(1);

    CommonOpts basis_opts, fringe_opts, ghz_opts, noise_opts, cal_opts, eq2_opts, dump_opts;
    int fringe_points = -1;
    std::vector<double> mu_values;
    std::string out_config;
    bool dump_ideal = false;

    add_common(app.add_subcommand("basis", "threefold counts for both logical inputs"),
               basis_opts);
    auto* fringe_cmd =
        app.add_subcommand("fringe", "polarization interference scan and visibility fit");
    add_common(fringe_cmd, fringe_opts);
    fringe_cmd->add_option("--points", fringe_points, "number of analyzer angles");
    add_common(app.add_subcommand("ghz", "three-photon correlation tables"), ghz_opts);
    auto* noise_cmd =
        app.add_subcommand("noise", "valid and error rates against pulse strength");
    add_common(noise_cmd, noise_opts, false);
    noise_cmd->add_option("--mu", mu_values, "pulse strengths to sweep");
    auto* cal_cmd =
        app.add_subcommand("calibrate", "fit model knobs to the bench-reported values");
    add_common(cal_cmd, cal_opts, false);
    cal_cmd->add_option("--out-config", out_config, "path of the calibrated config");
    add_common(app.add_subcommand("verify-eq2",
                                  "split the minimal encoder output by gate photon number"),
               eq2_opts, false);
    auto* dump_cmd = app.add_subcommand("dump-circuit", "print the circuit layout");
    add_common(dump_cmd, dump_opts, false);
    dump_cmd->add_flag("--ideal", dump_ideal, "dump the minimal encoder instead");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("basis")) cmd_basis(basis_opts);
        if (app.got_subcommand("fringe")) cmd_fringe(fringe_opts, fringe_points);
        if (app.got_subcommand("ghz")) cmd_ghz(ghz_opts);
        if (app.got_subcommand("noise")) cmd_noise(noise_opts, mu_values);
        if (app.got_subcommand("calibrate")) cmd_calibrate(cal_opts, out_config);
        if (app.got_subcommand("verify-eq2")) cmd_verify_eq2(eq2_opts);
        if (app.got_subcommand("dump-circuit")) cmd_dump_circuit(dump_opts, dump_ideal);
    } catch (const qencode::SimError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
