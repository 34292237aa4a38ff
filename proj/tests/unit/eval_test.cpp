#include "dohertycad/errors.hpp"
#include "dohertycad/eval/eval.hpp"
#include "dohertycad/netkit/solver.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace doherty;
using namespace doherty::eval;
using net::Complex;

namespace {

constexpr double kPi = oracle::kPi;
const double k6dB = 20 * std::log10(2.0);

DohertyConfig proto() { return {}; }

net::Netlist two_line(const synth::QBudget& q = {}) {
    const auto c = proto();
    return synth::to_netlist(synth::synth_two_line(c), c, q);
}

net::Netlist three_line() {
    const auto c = proto();
    return synth::to_netlist(synth::synth_three_line(c), c);
}

net::Netlist transformer(const synth::QBudget& q = {}) {
    const auto c = proto();
    return synth::to_netlist(synth::synth_transformer_combiner(c), c, q);
}

/// Single quarter-wave section from port "in" to a resistive load.
net::Netlist inverter(double z0, double zl, double f0) {
    net::Netlist n(f0);
    const auto in = n.add_node("in");
    const auto out = n.add_node("out");
    n.add_transmission_line("TL", in, net::kGround, out, net::kGround, {z0, 90.0, 0.0});
    n.add_resistor("RL", out, net::kGround, zl).termination = true;
    n.add_port("in", in);
    n.add_port("load", out);
    return n;
}

PASimResult ideal_doherty_sim(const std::vector<double>& drives) {
    const auto c = proto();
    const auto n = two_line();
    const auto [m, a] = ideal_doherty_cells(c);
    const double off = required_phase_offset(n, c);
    return simulate_pa(m, a, n, drives, c.f0, 0.0, -off);
}

}  // namespace

TEST(PhaseOffset, SymmetricPathsGiveZero) {
    net::Netlist n(1e9);
    const auto m = n.add_node("main");
    const auto a = n.add_node("aux");
    const auto o = n.add_node("out");
    n.add_transmission_line("TLm", m, net::kGround, o, net::kGround, {50.0, 90.0, 0.0});
    n.add_transmission_line("TLa", a, net::kGround, o, net::kGround, {50.0, 90.0, 0.0});
    n.add_resistor("RL", o, net::kGround, 25.0).termination = true;
    n.add_port("main", m);
    n.add_port("aux", a);
    n.add_port("load", o);
    EXPECT_NEAR(required_phase_offset(n, 1e9, 50.0, 50.0), 0.0, 1e-9);
}

TEST(PhaseOffset, Topologies) {
    EXPECT_NEAR(std::abs(required_phase_offset(three_line(), proto())), 90.0, 0.5);
    EXPECT_NEAR(std::abs(required_phase_offset(transformer(), proto())), 90.0, 0.5);
    // Main leads aux in the transformer combiner and lags it in the three-line combiner.
    EXPECT_GT(required_phase_offset(transformer(), proto()), 0.0);
    EXPECT_LT(required_phase_offset(three_line(), proto()), 0.0);
}

TEST(PhaseOffset, PerturbationReducesDeliveredPower) {
    const auto c = proto();
    for (const auto& n : {three_line(), transformer(), two_line()}) {
        const double off = required_phase_offset(n, c);
        const auto p = [&](double d) {
            return norton_delivered_power(n, c.f0, 1.0, std::polar(1.0, -(off + d) * kPi / 180), c.main_peak_load(),
                                          c.aux_peak_load());
        };
        EXPECT_LT(p(1.0), p(0.0));
        EXPECT_LT(p(-1.0), p(0.0));
    }
}

TEST(PhaseOffset, DegenerateTransferRaises) {
    net::Netlist n(1e9);
    const auto m = n.add_node("main");
    const auto a = n.add_node("aux");
    const auto o = n.add_node("out");
    n.add_resistor("Rm", m, net::kGround, 50.0);
    n.add_resistor("Ra", a, o, 50.0);
    n.add_resistor("RL", o, net::kGround, 50.0).termination = true;
    n.add_port("main", m);
    n.add_port("aux", a);
    n.add_port("load", o);
    EXPECT_THROW(required_phase_offset(n, 1e9, 50.0, 50.0), DomainError);
}

TEST(LoadModulation, TwoLineExamples) {
    const auto c = proto();
    const auto n = two_line();
    const auto sweep = load_modulation(n, c, make_drive_profile(c, required_phase_offset(n, c)));
    bool saw_peak = false, saw_back = false;
    for (const auto& p : sweep.points) {
        EXPECT_LT(std::abs(p.z_main.imag()), 1e-3 * p.z_main.real());
        EXPECT_NEAR(p.z_main.real(), target_main_resistance(c, p.drive.i_main), 1e-9 * p.z_main.real());
        if (std::abs(p.drive.i_main - 1.0) < 1e-12) {
            saw_peak = true;
            EXPECT_NEAR(p.z_main.real(), 41.3, 0.0413);
            EXPECT_NEAR(p.z_aux.real(), 41.3, 1e-6);
        }
        if (std::abs(p.drive.i_main - 0.5) < 1e-12) {
            saw_back = true;
            EXPECT_NEAR(p.z_main.real(), 82.6, 1e-6);
        }
        if (p.drive.i_aux == 0.0) {
            EXPECT_TRUE(p.aux_is_admittance);
            EXPECT_LT(std::abs(p.z_aux), 1e-9);
        }
    }
    EXPECT_TRUE(saw_peak);
    EXPECT_TRUE(saw_back);
}

TEST(LoadModulation, TransformerTracksTargets) {
    const auto c = proto();
    const auto n = transformer();
    const auto sweep = load_modulation(n, c, make_drive_profile(c, required_phase_offset(n, c)));
    const double scale = c.main_peak_load();
    for (const auto& p : sweep.points) {
        EXPECT_LT(std::abs(p.z_main.imag()), 0.01 * scale);
        EXPECT_LT(std::abs(p.z_main.real() - target_main_resistance(c, p.drive.i_main)),
                  0.005 * target_main_resistance(c, p.drive.i_main));
        if (!p.aux_is_admittance) {
            EXPECT_LT(std::abs(p.z_aux.imag()), 0.01 * scale);
            EXPECT_LT(std::abs(p.z_aux.real() - target_aux_resistance(c, p.drive.i_main)),
                      0.005 * target_aux_resistance(c, p.drive.i_main));
        }
    }
    EXPECT_NEAR(sweep.points.back().z_main.real(), scale, 0.005 * scale);
}

TEST(LoadModulation, TransformerOffCenterReactanceGrows) {
    const auto c = proto();
    const auto n = transformer();
    const auto profile = make_drive_profile(c, required_phase_offset(n, c), 3);
    for (double sign : {-1.0, 1.0}) {
        double prev = std::abs(load_modulation(n, c, profile, c.f0).points.back().z_main.imag());
        for (int k = 1; k <= 10; ++k) {
            const double f = c.f0 * (1 + sign * 0.01 * k);
            const double im = std::abs(load_modulation(n, c, profile, f).points.back().z_main.imag());
            EXPECT_GT(im, prev) << sign * k;
            prev = im;
        }
    }
}

TEST(LoadModulation, InverterRatioFollowsInverseSquareLaw) {
    // MNA-measured ratio across the main inverter equals (peak current / i_main)^2.
    for (double alpha : {0.5, 1.0, 2.0}) {
        DohertyConfig c;
        c.alpha = alpha;
        const auto n = synth::to_netlist(synth::synth_two_line(c), c);
        const auto prof = make_drive_profile(c, required_phase_offset(n, c), 50);
        for (std::size_t k = 0; k < prof.grid.size(); ++k) {
            if (prof.grid[k].i_aux == 0.0) continue;
            const auto drive = net::excitation(n, {{"main", prof.main_current(k)}, {"aux", prof.aux_current(k)}});
            const auto r = net::solve(n, c.f0, drive);
            const double expect = std::pow(c.main_peak_current() / prof.grid[k].i_main, 2);
            EXPECT_NEAR(net::impedance_transformation_ratio(r, n, "TL1"), expect, 1e-9 * expect);
        }
    }
}

TEST(PassiveEfficiency, LosslessIsFlat) {
    const auto c = proto();
    const auto n = transformer();
    for (const auto& p : passive_eff_vs_pbo(n, c, make_drive_profile(c, required_phase_offset(n, c))))
        EXPECT_NEAR(p.efficiency, 1.0, 1e-9);
}

TEST(PassiveEfficiency, TwoLineLosesMoreInBackOff) {
    const auto c = proto();
    const auto n = two_line({20.0, 20.0});
    const auto curve = passive_eff_vs_pbo(n, c, make_drive_profile(c, required_phase_offset(n, c)));
    double at_peak = -1, at_6 = -1;
    for (const auto& p : curve) {
        if (std::abs(p.pbo_db) < 1e-9) at_peak = p.efficiency;
        if (std::abs(p.pbo_db - k6dB) < 1e-9) at_6 = p.efficiency;
    }
    ASSERT_GT(at_peak, 0);
    ASSERT_GT(at_6, 0);
    EXPECT_LT(at_6, at_peak);
}

TEST(PassiveEfficiency, ComparisonUsesIdenticalGrids) {
    const auto cmp = compare_passive_efficiency(proto(), {20.0, 20.0}, {}, 21);
    ASSERT_EQ(cmp.transformer.size(), cmp.two_line.size());
    for (std::size_t k = 0; k < cmp.two_line.size(); ++k) {
        EXPECT_DOUBLE_EQ(cmp.transformer[k].pbo_db, cmp.two_line[k].pbo_db);
        EXPECT_GT(cmp.transformer[k].efficiency, 0.0);
        EXPECT_LT(cmp.transformer[k].efficiency, 1.0);
    }
}

TEST(Bandwidth, MatchedInverterFillsWindow) {
    const auto r = load_match_bandwidth(inverter(50.0, 50.0, 1e9), "in", 1e9);
    EXPECT_NEAR(r.fraction, 0.8, 1e-9);
    EXPECT_EQ(r.frequencies.size(), 201u);
}

TEST(Bandwidth, HigherTransformationRatioIsNarrower) {
    const double rl = 50.0;
    const auto itr2 = load_match_bandwidth(inverter(rl * std::sqrt(2.0), rl, 1e9), "in", 1e9);
    const auto itr4 = load_match_bandwidth(inverter(rl * 2.0, rl, 1e9), "in", 1e9);
    EXPECT_LT(itr4.fraction, itr2.fraction);
    // Textbook -10 dB bandwidth of a single quarter-wave step, ITR = 4.
    const double gm = std::pow(10.0, -0.5);
    const double expect = 2 - 4 / kPi * std::acos(gm / std::sqrt(1 - gm * gm) * 2 * std::sqrt(4.0) / 3.0);
    EXPECT_NEAR(itr4.fraction, expect, 0.01);
}

TEST(Bandwidth, ContiguousBandInterpolatesEdges) {
    const std::vector<double> f{1, 2, 3, 4, 5};
    const std::vector<double> m{-1, 1, 2, 1, -3};
    const auto [lo, hi] = contiguous_band(f, m, 3);
    EXPECT_DOUBLE_EQ(lo, 1.5);
    EXPECT_DOUBLE_EQ(hi, 4.25);
    const auto [lo2, hi2] = contiguous_band(f, {-1, -1, -1, 1, 1}, 3);
    EXPECT_EQ(lo2, hi2);
}

TEST(Bandwidth, MetricNames) {
    EXPECT_EQ(parse_bandwidth_metric("load-match"), BandwidthMetric::load_match);
    EXPECT_EQ(to_string(BandwidthMetric::passive_efficiency), "passive-efficiency");
    EXPECT_THROW(parse_bandwidth_metric("vswr"), ArgumentError);
}

TEST(Bandwidth, SweepIncludesCenterExactly) {
    const auto f = sweep_frequencies(37e9, {});
    ASSERT_EQ(f.size(), 201u);
    EXPECT_EQ(f[100], 37e9);
    EXPECT_NEAR(f.front(), 0.6 * 37e9, 1.0);
}

TEST(Cells, ClassBExamples) {
    const ActiveCellModel b;
    const auto full = cell_currents(b, 1.0);
    EXPECT_NEAR(full.i_fund.real(), 0.5, 1e-12);
    EXPECT_NEAR(full.i_dc, 1 / kPi, 1e-12);
    const auto half = cell_currents(b, 0.5);
    EXPECT_NEAR(half.i_fund.real(), 0.25, 1e-12);
    EXPECT_NEAR(half.i_dc, 1 / (2 * kPi), 1e-12);
}

TEST(Cells, ClassCIsOffBelowTurnOn) {
    const auto c = class_c_cell(0.5, 1.0, 1.0);
    EXPECT_LT(c.conduction_angle, kPi);
    EXPECT_EQ(cell_currents(c, 0.49).i_fund, Complex(0.0));
    EXPECT_EQ(cell_currents(c, 0.49).i_dc, 0.0);
    EXPECT_GT(cell_currents(c, 0.51).i_fund.real(), 0.0);
    EXPECT_NEAR(cell_currents(c, 1.0).conduction_angle, c.conduction_angle, 1e-12);
}

TEST(Cells, MatchNumericalFourierIntegrals) {
    oracle::Sampler s(0xce11);
    for (int k = 0; k < 60; ++k) {
        ActiveCellModel cell;
        cell.conduction_angle = s.uniform(0.3, 2 * kPi - 0.1);
        cell.i_max = s.uniform(0.1, 3.0);
        const double v = s.uniform(0.05, 1.0);
        const double c = std::cos(cell.conduction_angle / 2);
        const double ip1 = cell.i_max / (1 - c);
        const auto [dc, fund] = oracle::clipped_cosine_fourier(-ip1 * c, v * ip1);
        const auto got = cell_currents(cell, v);
        EXPECT_NEAR(got.i_dc, dc, 1e-6 * cell.i_max) << k;
        EXPECT_NEAR(got.i_fund.real(), fund, 1e-6 * cell.i_max) << k;
    }
}

TEST(Cells, PeakEfficiencyBound) {
    // Full-swing drain efficiency I_fund / (2 I_dc).
    for (double phi = kPi; phi <= 2 * kPi; phi += 0.05) {
        ActiveCellModel cell;
        cell.conduction_angle = phi;
        const auto cc = cell_currents(cell, 1.0);
        EXPECT_LE(cc.i_fund.real() / (2 * cc.i_dc), kPi / 4 + 1e-9) << phi;
    }
    for (double phi = 0.5; phi < kPi - 0.05; phi += 0.05) {
        ActiveCellModel cell;
        cell.conduction_angle = phi;
        const auto cc = cell_currents(cell, 1.0);
        EXPECT_GT(cc.i_fund.real() / (2 * cc.i_dc), kPi / 4) << phi;
    }
}

TEST(Cells, InvalidInputs) {
    EXPECT_THROW(cell_currents({}, 1.1), ArgumentError);
    EXPECT_THROW(class_c_cell(0.0, 1.0, 1.0), ArgumentError);
}

TEST(PASim, SingleClassBCellAtOptimumLoad) {
    net::Netlist n(1e9);
    const auto o = n.add_node("o");
    const auto x = n.add_node("x");
    n.add_resistor("RL", o, net::kGround, 50.0).termination = true;
    n.add_resistor("Rx", x, net::kGround, 1.0);
    n.add_port("main", o);
    n.add_port("aux", x);
    n.add_port("load", o);
    ActiveCellModel main;
    main.i_max = 2.0;
    main.v_dc = 50.0;
    ActiveCellModel idle;
    idle.v_dc = 0.0;
    const auto r = simulate_pa(main, idle, n, {0.5, 1.0}, 1e9, 0.0, 0.0);
    EXPECT_NEAR(r.points.back().efficiency, kPi / 4, 1e-12);
    EXPECT_NEAR(r.points.front().efficiency, kPi / 8, 1e-12);
}

TEST(PASim, IdealDohertyPeaks) {
    const auto r = ideal_doherty_sim(drive_grid(101, 0.1, {0.5}));
    double eta0 = -1, eta6 = -1;
    for (const auto& p : r.points) {
        if (p.drive == 1.0) eta0 = p.efficiency;
        if (p.drive == 0.5) eta6 = p.efficiency;
        EXPECT_FALSE(p.overdrive);
    }
    EXPECT_NEAR(eta0, kPi / 4, 1e-3);
    EXPECT_NEAR(eta6, kPi / 4, 1e-3);
    // Local maxima sit at 0 dB and the second peak.
    std::vector<double> peaks;
    for (std::size_t k = 1; k + 1 < r.points.size(); ++k) {
        if (r.points[k].efficiency > r.points[k - 1].efficiency + 1e-12 &&
            r.points[k].efficiency > r.points[k + 1].efficiency + 1e-12)
            peaks.push_back(r.points[k].pbo_db);
    }
    if (r.points.back().efficiency > r.points[r.points.size() - 2].efficiency) peaks.push_back(r.points.back().pbo_db);
    ASSERT_EQ(peaks.size(), 2u);
    EXPECT_NEAR(peaks[0], k6dB, 0.05);
    EXPECT_NEAR(peaks[1], 0.0, 1e-9);
}

TEST(PASim, MatchesIdealEfficiencyCurve) {
    const auto r = ideal_doherty_sim(drive_grid(41, 0.2, {0.5}));
    for (const auto& p : r.points)
        EXPECT_NEAR(p.efficiency, ideal::ideal_efficiency(ideal::AmplifierClass::doherty, p.pbo_db), 1e-3);
}

TEST(PASim, MainVoltageSaturatesInDohertyRegion) {
    const auto r = ideal_doherty_sim(drive_grid(51, 0.1, {0.5}));
    const double v_ref = std::abs(r.points.back().v_main);
    EXPECT_NEAR(v_ref, 41.3, 0.5e-2 * 41.3);
    for (const auto& p : r.points)
        if (p.drive >= 0.5) EXPECT_LT(std::abs(std::abs(p.v_main) - v_ref), 0.005 * v_ref) << p.drive;
}

TEST(PASim, PowerBookkeepingWithLosses) {
    const auto c = proto();
    for (const auto& n : {two_line({20.0, 30.0}), transformer({20.0, 30.0})}) {
        const auto [m, a] = ideal_doherty_cells(c);
        const auto r = simulate_pa(m, a, n, drive_grid(30, 0.05), c.f0, 0.0, -required_phase_offset(n, c));
        for (const auto& p : r.points) {
            const double injected = 0.5 * (p.v_main * std::conj(p.i_main) + p.v_aux * std::conj(p.i_aux)).real();
            EXPECT_NEAR(p.p_injected, injected, 1e-9 * injected);
            EXPECT_NEAR(p.p_out, injected - p.p_loss, 1e-9 * injected);
        }
    }
}

TEST(PASim, AmPmReferencedToLowestDrive) {
    const auto r = ideal_doherty_sim(drive_grid(11, 0.1));
    EXPECT_EQ(r.points.front().am_pm_deg, 0.0);
    EXPECT_EQ(r.points.front().am_am_db, 0.0);
}

TEST(PASim, RejectsUnorderedDrives) {
    const auto c = proto();
    const auto [m, a] = ideal_doherty_cells(c);
    EXPECT_THROW(simulate_pa(m, a, two_line(), {0.5, 0.4}, c.f0, 0, 0), ArgumentError);
    EXPECT_THROW(simulate_pa(m, a, two_line(), {0.0, 0.4}, c.f0, 0, 0), ArgumentError);
}

TEST(Evm, IdentityResponseIsClean) {
    const LevelMap am{{0.0, 3.0}, {0.0, 3.0}};
    const LevelMap pm{{0.0, 3.0}, {0.0, 0.0}};
    EXPECT_NEAR(evm_64qam(am, pm, 6.0), 0.0, 1e-12);
}

TEST(Evm, ConstantRotationIsAbsorbed) {
    const LevelMap am{{0.0, 3.0}, {0.0, 2.0}};
    const LevelMap pm{{0.0, 3.0}, {10.0, 10.0}};
    EXPECT_NEAR(evm_64qam(am, pm, 6.0), 0.0, 1e-12);
}

TEST(Evm, HardLimiterMatchesBruteForce) {
    // Limiter at the corner-symbol amplitude, characterized up to twice that.
    const double corner = 7 * std::sqrt(2.0) / std::sqrt(42.0);
    const LevelMap am{{0.0, corner, 2 * corner}, {0.0, corner, corner}};
    const LevelMap pm{{0.0, 2 * corner}, {0.0, 0.0}};
    // Saturation input is the corner amplitude, so the rms input is `corner`.
    std::vector<Complex> ref, out;
    for (int i = -7; i <= 7; i += 2) {
        for (int q = -7; q <= 7; q += 2) {
            const Complex s = Complex(i, q) / std::sqrt(42.0);
            const double a = std::abs(s) * corner;
            ref.push_back(s);
            out.push_back(std::min(a, corner) * s / std::abs(s));
        }
    }
    Complex num{};
    double den = 0;
    for (std::size_t k = 0; k < ref.size(); ++k) {
        num += out[k] * std::conj(ref[k]);
        den += std::norm(ref[k]);
    }
    const Complex g = num / den;
    double e = 0, p = 0;
    for (std::size_t k = 0; k < ref.size(); ++k) {
        e += std::norm(out[k] - g * ref[k]);
        p += std::norm(g * ref[k]);
    }
    const double expect = 100 * std::sqrt(e / p);
    EXPECT_GT(expect, 1.0);
    EXPECT_NEAR(evm_64qam(am, pm, 0.0), expect, 1e-9);
}

TEST(Evm, OutOfRangeBackoffRaises) {
    const LevelMap am{{0.0, 1.0}, {0.0, 1.0}};
    const LevelMap pm{{0.0, 1.0}, {0.0, 0.0}};
    EXPECT_THROW(evm_64qam(am, pm, 0.0), DomainError);
    EXPECT_NO_THROW(evm_64qam(am, pm, 4.0));
}

TEST(Evm, ConstellationHasUnitPower) {
    const auto s = qam64_constellation();
    ASSERT_EQ(s.size(), 64u);
    double p = 0;
    for (const auto& x : s) p += std::norm(x);
    EXPECT_NEAR(p / 64, 1.0, 1e-12);
}

TEST(Evm, PaSimMapsAreUsable) {
    const auto r = ideal_doherty_sim(drive_grid(41, 0.05, {0.5}));
    const auto [am, pm] = level_maps(r);
    EXPECT_EQ(am.x.front(), 0.0);
    // The ideal Doherty is linear until full drive.
    EXPECT_LT(evm_64qam(am, pm, 6.0), 1e-6);
}
