#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "qencode/elements.hpp"
#include "qencode/errors.hpp"

using namespace qencode;

namespace {

struct Bench {
    ChannelRegistry reg;
    Bench() {
        reg.add("a");
        reg.add("b");
        reg.add("c");
        reg.add("d");
    }
    ModeId mode(const char* ch, Pol p, int l = 0) const {
        return ModeId{reg.index(ch), p, static_cast<std::uint16_t>(l)};
    }
    FockKet ket1(const char* ch, Pol p, int l = 0) const {
        return FockKet{}.add(mode(ch, p, l));
    }
};

PureState photon45(const Bench& b, const char* ch) {
    PureState s;
    s.add_term(b.ket1(ch, Pol::H), std::sqrt(0.5));
    s.add_term(b.ket1(ch, Pol::V), std::sqrt(0.5));
    return s;
}

}  // namespace

TEST_CASE("pbs transmits H with unit amplitude and reflects V with i") {
    Bench b;
    auto u = pbs(b.reg, "a", "b", "c", "d", 1);

    auto from_aH = apply_unitary(PureState::single_ket(b.ket1("a", Pol::H)), u);
    CHECK(std::abs(from_aH.amplitude(b.ket1("c", Pol::H)) - Complex(1.0, 0.0)) < 1e-14);

    auto from_aV = apply_unitary(PureState::single_ket(b.ket1("a", Pol::V)), u);
    CHECK(std::abs(from_aV.amplitude(b.ket1("d", Pol::V)) - Complex(0.0, 1.0)) < 1e-14);

    auto from_bH = apply_unitary(PureState::single_ket(b.ket1("b", Pol::H)), u);
    CHECK(std::abs(from_bH.amplitude(b.ket1("d", Pol::H)) - Complex(1.0, 0.0)) < 1e-14);

    auto from_bV = apply_unitary(PureState::single_ket(b.ket1("b", Pol::V)), u);
    CHECK(std::abs(from_bV.amplitude(b.ket1("c", Pol::V)) - Complex(0.0, 1.0)) < 1e-14);
}

TEST_CASE("pbs acts identically on every internal label") {
    Bench b;
    auto u = pbs(b.reg, "a", "b", "c", "d", 2);
    auto out = apply_unitary(PureState::single_ket(b.ket1("a", Pol::V, 1)), u);
    CHECK(std::abs(out.amplitude(b.ket1("d", Pol::V, 1)) - Complex(0.0, 1.0)) < 1e-14);
    CHECK(out.term_count() == 1);
}

TEST_CASE("two diagonal photons on a pbs leave a pi-phased pair half the time") {
    Bench b;
    auto u = pbs(b.reg, "a", "b", "c", "d", 1);
    auto in = tensor(photon45(b, "a"), photon45(b, "b"));
    auto out = apply_unitary(in, u);

    FockKet hh = FockKet{}.add(b.mode("c", Pol::H)).add(b.mode("d", Pol::H));
    FockKet vv = FockKet{}.add(b.mode("c", Pol::V)).add(b.mode("d", Pol::V));
    FockKet hv = FockKet{}.add(b.mode("c", Pol::H)).add(b.mode("d", Pol::V));
    FockKet both_c = FockKet{}.add(b.mode("c", Pol::H)).add(b.mode("c", Pol::V));
    FockKet both_d = FockKet{}.add(b.mode("d", Pol::H)).add(b.mode("d", Pol::V));

    auto ahh = out.amplitude(hh);
    auto avv = out.amplitude(vv);
    CHECK(std::abs(ahh - Complex(0.5, 0.0)) < 1e-14);
    CHECK(std::abs(avv - Complex(-0.5, 0.0)) < 1e-14);
    CHECK(std::abs(out.amplitude(hv)) < 1e-14);  // mixed pair never splits one-per-port
    CHECK(std::abs(std::arg(ahh / avv)) == doctest::Approx(M_PI).epsilon(1e-12));

    // One-photon-per-port post-selection succeeds with probability one half...
    CHECK(std::norm(ahh) + std::norm(avv) == doctest::Approx(0.5).epsilon(1e-12));
    // ...and the remainder sits in same-port pairs with amplitude i/2 each.
    CHECK(std::abs(out.amplitude(both_c) - Complex(0.0, 0.5)) < 1e-14);
    CHECK(std::abs(out.amplitude(both_d) - Complex(0.0, 0.5)) < 1e-14);
    CHECK(out.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("balanced beamsplitter cancels identical-photon coincidences exactly") {
    Bench b;
    auto u = bs(b.reg, "a", "b", "c", "d", 0.5, 2);

    auto in = PureState::single_ket(
        FockKet{}.add(b.mode("a", Pol::H)).add(b.mode("b", Pol::H)));
    auto out = apply_unitary(in, u);
    FockKet coincidence = FockKet{}.add(b.mode("c", Pol::H)).add(b.mode("d", Pol::H));
    CHECK(out.amplitude(coincidence) == Complex(0.0, 0.0));

    // Bunched outcomes carry everything, i/sqrt(2) each.
    FockKet cc = FockKet{}.add(b.mode("c", Pol::H), 2);
    FockKet dd = FockKet{}.add(b.mode("d", Pol::H), 2);
    CHECK(std::abs(out.amplitude(cc) - Complex(0.0, std::sqrt(0.5))) < 1e-14);
    CHECK(std::abs(out.amplitude(dd) - Complex(0.0, std::sqrt(0.5))) < 1e-14);

    // Distinguishable photons (orthogonal internal labels) coincide half the time.
    auto in2 = PureState::single_ket(
        FockKet{}.add(b.mode("a", Pol::H, 0)).add(b.mode("b", Pol::H, 1)));
    auto out2 = apply_unitary(in2, u);
    FockKet c0d1 = FockKet{}.add(b.mode("c", Pol::H, 0)).add(b.mode("d", Pol::H, 1));
    FockKet c1d0 = FockKet{}.add(b.mode("c", Pol::H, 1)).add(b.mode("d", Pol::H, 0));
    double coincidence_prob = std::norm(out2.amplitude(c0d1)) + std::norm(out2.amplitude(c1d0));
    CHECK(coincidence_prob == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("beamsplitter transmissivity edges and validation") {
    Bench b;
    auto full = apply_unitary(PureState::single_ket(b.ket1("a", Pol::H)),
                              bs(b.reg, "a", "b", "c", "d", 1.0, 1));
    CHECK(std::abs(full.amplitude(b.ket1("c", Pol::H)) - Complex(1.0, 0.0)) < 1e-14);

    auto none = apply_unitary(PureState::single_ket(b.ket1("a", Pol::H)),
                              bs(b.reg, "a", "b", "c", "d", 0.0, 1));
    CHECK(std::abs(none.amplitude(b.ket1("d", Pol::H)) - Complex(0.0, 1.0)) < 1e-14);

    CHECK_THROWS_AS(bs(b.reg, "a", "b", "c", "d", 1.5, 1), BadTransmissivity);
    CHECK_THROWS_AS(bs(b.reg, "a", "b", "c", "d", -0.1, 1), BadTransmissivity);
    CHECK_THROWS_AS(pbs(b.reg, "a", "a", "c", "d", 1), DuplicateChannel);
}

TEST_CASE("half-wave plate rotates polarization by twice its axis angle") {
    Bench b;
    auto h = apply_unitary(PureState::single_ket(b.ket1("a", Pol::H)),
                           hwp(b.reg, "a", M_PI / 8, 1));  // axis at 22.5 degrees
    CHECK(std::abs(h.amplitude(b.ket1("a", Pol::H)) - Complex(std::sqrt(0.5), 0.0)) < 1e-14);
    CHECK(std::abs(h.amplitude(b.ket1("a", Pol::V)) - Complex(std::sqrt(0.5), 0.0)) < 1e-14);

    auto swap = apply_unitary(PureState::single_ket(b.ket1("a", Pol::H)),
                              hwp(b.reg, "a", M_PI / 4, 1));
    CHECK(std::abs(swap.amplitude(b.ket1("a", Pol::V)) - Complex(1.0, 0.0)) < 1e-14);

    // A half-wave plate is its own inverse.
    auto twice = apply_unitary(h, hwp(b.reg, "a", M_PI / 8, 1));
    CHECK(std::abs(twice.amplitude(b.ket1("a", Pol::H)) - Complex(1.0, 0.0)) < 1e-12);
}

TEST_CASE("polarization rotation is proper and composes additively") {
    Bench b;
    double t = 0.3;
    auto r = apply_unitary(PureState::single_ket(b.ket1("a", Pol::H)),
                           pol_rotation(b.reg, "a", t, 1));
    CHECK(std::abs(r.amplitude(b.ket1("a", Pol::H)) - Complex(std::cos(t), 0.0)) < 1e-14);
    CHECK(std::abs(r.amplitude(b.ket1("a", Pol::V)) - Complex(std::sin(t), 0.0)) < 1e-14);

    auto back = apply_unitary(r, pol_rotation(b.reg, "a", -t, 1));
    CHECK(std::abs(back.amplitude(b.ket1("a", Pol::H)) - Complex(1.0, 0.0)) < 1e-12);

    auto chained = apply_unitary(r, pol_rotation(b.reg, "a", 0.2, 1));
    auto direct = apply_unitary(PureState::single_ket(b.ket1("a", Pol::H)),
                                pol_rotation(b.reg, "a", t + 0.2, 1));
    CHECK(std::abs(chained.amplitude(b.ket1("a", Pol::V)) -
                   direct.amplitude(b.ket1("a", Pol::V))) < 1e-12);
}

TEST_CASE("phase shift multiplies only the selected polarization") {
    Bench b;
    PureState s;
    s.add_term(b.ket1("a", Pol::H), std::sqrt(0.5));
    s.add_term(b.ket1("a", Pol::V), std::sqrt(0.5));
    auto out = apply_unitary(s, phase_shift(b.reg, "a", Pol::V, M_PI / 2, 1));
    CHECK(std::abs(out.amplitude(b.ket1("a", Pol::H)) - Complex(std::sqrt(0.5), 0.0)) < 1e-14);
    CHECK(std::abs(out.amplitude(b.ket1("a", Pol::V)) - Complex(0.0, std::sqrt(0.5))) < 1e-14);
}

TEST_CASE("loss taps split amplitude into a dedicated loss channel") {
    Bench b;
    std::string loss = allocate_loss_channel(b.reg, "a");
    CHECK(loss == "loss-a");
    CHECK(allocate_loss_channel(b.reg, "a") == "loss-a-2");  // names never collide

    double eta = 0.36;
    auto u = loss_tap(b.reg, "a", loss, eta, 1);
    auto out = apply_unitary(PureState::single_ket(b.ket1("a", Pol::H)), u);
    CHECK(std::abs(out.amplitude(b.ket1("a", Pol::H)) - Complex(std::sqrt(eta), 0.0)) < 1e-14);
    CHECK(std::abs(out.amplitude(b.ket1(loss.c_str(), Pol::H)) -
                   Complex(0.0, std::sqrt(1.0 - eta))) < 1e-14);
    CHECK(out.norm() == doctest::Approx(1.0).epsilon(1e-13));

    auto two = apply_unitary(PureState::single_ket(FockKet{}.add(b.mode("a", Pol::H), 2)), u);
    FockKet both_lost = FockKet{}.add(b.mode(loss.c_str(), Pol::H), 2);
    CHECK(std::norm(two.amplitude(both_lost)) == doctest::Approx((1 - eta) * (1 - eta)).epsilon(1e-12));
    CHECK_THROWS_AS(loss_tap(b.reg, "a", loss, 1.2, 1), BadTransmissivity);
}

TEST_CASE("analyzer rotation maps its accepted polarization onto the H slot") {
    Bench b;
    double t = 0.7;
    Eigen::Matrix2d m = analyzer_basis(t);
    CHECK(m(0, 0) == doctest::Approx(std::cos(t)));
    CHECK(m(0, 1) == doctest::Approx(std::sin(t)));
    CHECK(m(1, 0) == doctest::Approx(-std::sin(t)));
    CHECK(m(1, 1) == doctest::Approx(std::cos(t)));

    PureState aligned;
    aligned.add_term(b.ket1("a", Pol::H), std::cos(t));
    aligned.add_term(b.ket1("a", Pol::V), std::sin(t));
    auto out = apply_unitary(aligned, analyzer_rotation(b.reg, "a", t, 1));
    CHECK(std::abs(out.amplitude(b.ket1("a", Pol::H)) - Complex(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(out.amplitude(b.ket1("a", Pol::V))) < 1e-12);
}

TEST_CASE("declared elements instantiate and validate their port lists") {
    Bench b;
    ElementSpec good{ElementKind::PBS, {"a", "b", "c", "d"}, {}, Pol::V};
    CHECK_NOTHROW(element_unitary(good, b.reg, 2));

    ElementSpec short_pbs{ElementKind::PBS, {"a", "b", "c"}, {}, Pol::V};
    CHECK_THROWS_AS(element_unitary(short_pbs, b.reg, 1), ConfigError);

    ElementSpec bad_bs{ElementKind::BS, {"a", "b", "c", "d"}, {}, Pol::V};
    CHECK_THROWS_AS(element_unitary(bad_bs, b.reg, 1), ConfigError);

    ElementSpec bad_hwp{ElementKind::HWP, {"a"}, {}, Pol::V};
    CHECK_THROWS_AS(element_unitary(bad_hwp, b.reg, 1), ConfigError);

    ElementSpec rot{ElementKind::Rot, {"a"}, {0.1}, Pol::V};
    CHECK_NOTHROW(element_unitary(rot, b.reg, 1));

    ElementSpec phase{ElementKind::Phase, {"a"}, {M_PI}, Pol::H};
    auto u = element_unitary(phase, b.reg, 1);
    auto out = apply_unitary(PureState::single_ket(b.ket1("a", Pol::H)), u);
    CHECK(std::abs(out.amplitude(b.ket1("a", Pol::H)) - Complex(-1.0, 0.0)) < 1e-12);

    CHECK(element_kind_from_name("pbs") == ElementKind::PBS);
    CHECK(element_kind_name(ElementKind::LossTap) == "loss_tap");
    CHECK_THROWS_AS(element_kind_from_name("prism"), ConfigError);
}

TEST_CASE("random interferometers agree with the permanent oracle") {
    auto gen = testutil::rng(46);
    Bench b;
    std::vector<ModeId> modes = {b.mode("a", Pol::H), b.mode("a", Pol::V),
                                 b.mode("b", Pol::H), b.mode("b", Pol::V),
                                 b.mode("c", Pol::H), b.mode("c", Pol::V)};
    std::uniform_int_distribution<int> nmodes(2, 6);
    std::uniform_int_distribution<int> nphot(1, 4);
    for (int rep = 0; rep < 25; ++rep) {
        int m = nmodes(gen);
        std::vector<ModeId> sub(modes.begin(), modes.begin() + m);
        ModeUnitary u(sub, testutil::haar_unitary(m, gen));

        FockKet in;
        int n = nphot(gen);
        std::uniform_int_distribution<int> pick(0, m - 1);
        for (int k = 0; k < n; ++k) in.add(sub[pick(gen)]);

        auto out = apply_unitary(PureState::single_ket(in), u);
        double total = 0.0;
        for (const auto& [k, amp] : out.terms()) {
            CHECK(std::abs(amp - amplitude_by_permanent(in, k, u)) < 1e-10);
            total += std::norm(amp);
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
}
