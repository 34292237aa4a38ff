#include "dohertycad/errors.hpp"
#include "dohertycad/netkit/solver.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <thread>

using namespace doherty;
using namespace doherty::net;

namespace {

constexpr double kF0 = 1e9;

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

Netlist quarter_wave(double z0, double zl, double atten_db = 0.0) {
    Netlist n(kF0);
    const auto in = n.add_node("in");
    const auto out = n.add_node("out");
    n.add_transmission_line("TL", in, kGround, out, kGround, {z0, 90.0, atten_db});
    n.add_resistor("RL", out, kGround, zl).termination = true;
    n.add_port("in", in);
    n.add_port("load", out);
    return n;
}

}  // namespace

TEST(Solve, OhmsLaw) {
    Netlist n(kF0);
    const auto a = n.add_node("a");
    n.add_resistor("R", a, kGround, 50.0);
    n.add_port("p", a);
    const std::vector<Complex> drive{1.0};
    const auto r = solve(n, kF0, drive);
    EXPECT_NEAR(r.voltage(a).real(), 50.0, 1e-12);
    EXPECT_NEAR(r.voltage(a).imag(), 0.0, 1e-12);
}

TEST(Solve, QuarterWaveInputImpedance) {
    const auto n = quarter_wave(50.0, 100.0);
    const std::vector<Complex> drive{1.0};
    const auto r = solve(n, kF0, drive);
    const Complex z = r.port_impedance(0);
    EXPECT_NEAR(z.real(), 25.0, 1e-9);
    EXPECT_NEAR(z.imag(), 0.0, 1e-9);
}

TEST(Solve, LineMatchesTelegrapherFormulaOffCenter) {
    const auto n = quarter_wave(35.0, 80.0);
    for (double f : {0.6e9, 0.83e9, 1.27e9}) {
        const std::vector<Complex> drive{1.0};
        const auto z = solve(n, f, drive).port_impedance(0);
        const auto expect = oracle::line_input_impedance(35.0, 80.0, oracle::kPi / 2 * f / kF0);
        EXPECT_LT(std::abs(z - expect) / std::abs(expect), 1e-12) << f;
    }
}

TEST(Solve, FloatingNodeIsNamed) {
    Netlist n(kF0);
    const auto a = n.add_node("a");
    const auto b = n.add_node("island");
    const auto c = n.add_node("island2");
    n.add_resistor("R1", a, kGround, 50.0);
    n.add_resistor("R2", b, c, 10.0);
    n.add_port("p", a);
    const std::vector<Complex> drive{1.0};
    try {
        solve(n, kF0, drive);
        FAIL() << "expected SingularSystemError";
    } catch (const SingularSystemError& e) {
        EXPECT_NE(e.offender().find("island"), std::string::npos);
    }
}

TEST(Solve, NonpositiveFrequencyRejected) {
    const auto n = quarter_wave(50.0, 50.0);
    const std::vector<Complex> drive{1.0};
    EXPECT_THROW(solve(n, 0.0, drive), ArgumentError);
    EXPECT_THROW(solve(n, -1e9, drive), ArgumentError);
}

TEST(Solve, InvalidElementValuesRejected) {
    Netlist n(kF0);
    const auto a = n.add_node("a");
    EXPECT_THROW(n.add_resistor("R", a, kGround, 0.0), ArgumentError);
    EXPECT_THROW(n.add_capacitor("C", a, kGround, -1e-12), ArgumentError);
    CoupledInductor bad{1e-9, 1.0, 1.0};
    const auto b = n.add_node("b");
    EXPECT_THROW(n.add_coupled_inductor("K", a, kGround, b, kGround, bad), ArgumentError);
}

TEST(Solve, UnknownPortNameRejected) {
    const auto n = quarter_wave(50.0, 50.0);
    EXPECT_THROW(n.port_index("nope"), ArgumentError);
    EXPECT_THROW(excitation(n, {{"nope", 1.0}}), ArgumentError);
}

TEST(Solve, PowerConservationOnRandomLadders) {
    oracle::Sampler s(0x5eed01);
    for (int trial = 0; trial < 200; ++trial) {
        Netlist n(kF0);
        std::vector<NodeId> nodes{n.add_node("n0")};
        const int stages = 2 + trial % 5;
        for (int k = 1; k <= stages; ++k) nodes.push_back(n.add_node("n" + std::to_string(k)));
        for (int k = 0; k < stages; ++k) {
            const std::string tag = std::to_string(k);
            switch (k % 3) {
                case 0: n.add_inductor("L" + tag, nodes[k], nodes[k + 1], s.log_uniform(0.1e-9, 10e-9), s.uniform(5, 80)); break;
                case 1: n.add_resistor("R" + tag, nodes[k], nodes[k + 1], s.log_uniform(1, 100)); break;
                default:
                    n.add_transmission_line("T" + tag, nodes[k], kGround, nodes[k + 1], kGround,
                                            {s.uniform(20, 120), s.uniform(10, 170), s.uniform(0, 0.5)});
            }
            n.add_capacitor("C" + tag, nodes[k + 1], kGround, s.log_uniform(0.1e-12, 5e-12), s.uniform(5, 80));
        }
        n.add_resistor("RL", nodes.back(), kGround, s.uniform(10, 200)).termination = true;
        n.add_port("in", nodes.front());
        const std::vector<Complex> drive{std::polar(s.uniform(0.1, 2.0), s.uniform(-3, 3))};
        const auto r = solve(n, s.uniform(0.5e9, 1.5e9), drive);
        double dissipated = 0.0;
        for (double d : r.dissipated) {
            EXPECT_GE(d, -1e-15);
            dissipated += d;
        }
        EXPECT_LT(rel(r.total_injected(), dissipated), 1e-9) << trial;
        EXPECT_LT(rel(r.total_injected(), r.total_loss() + r.delivered), 1e-9) << trial;
        EXPECT_LT(r.kcl_residual, 1e-9) << trial;
    }
}

TEST(Solve, QuarterWaveInversionProperty) {
    oracle::Sampler s(0x5eed02);
    const double z0 = 50.0;
    for (int k = 0; k < 100; ++k) {
        Netlist n(kF0);
        const auto in = n.add_node("in");
        const auto out = n.add_node("out");
        n.add_transmission_line("TL", in, kGround, out, kGround, {z0, 90.0, 0.0});
        const double r = s.log_uniform(1, 1000);
        const double x = s.uniform(-500, 500);
        // Series R + jX load built from a resistor and a reactive element.
        const auto mid = n.add_node("mid");
        n.add_resistor("R", out, mid, r);
        if (x >= 0)
            n.add_inductor("X", mid, kGround, x / (2 * oracle::kPi * kF0));
        else
            n.add_capacitor("X", mid, kGround, -1.0 / (x * 2 * oracle::kPi * kF0));
        n.add_port("in", in);
        const std::vector<Complex> drive{1.0};
        const Complex zin = solve(n, kF0, drive).port_impedance(0);
        const Complex zl{r, x};
        EXPECT_LT(std::abs(zin * zl - z0 * z0) / (z0 * z0), 1e-9) << k;
    }
}

TEST(PassiveEfficiency, LosslessIsUnity) {
    const auto n = quarter_wave(50.0, 100.0);
    const std::vector<Complex> drive{Complex{0.3, -0.7}};
    EXPECT_NEAR(passive_efficiency(n, kF0, drive, "load"), 1.0, 1e-9);
}

TEST(PassiveEfficiency, ResistiveDivider) {
    Netlist n(kF0);
    const auto a = n.add_node("a");
    const auto b = n.add_node("b");
    n.add_resistor("Rs", a, b, 5.0);
    n.add_resistor("RL", b, kGround, 50.0).termination = true;
    n.add_port("in", a);
    n.add_port("load", b);
    const std::vector<Complex> drive{1.0};
    EXPECT_NEAR(passive_efficiency(n, kF0, drive, "load"), 50.0 / 55.0, 1e-12);
}

TEST(PassiveEfficiency, ZeroDriveIsUndefined) {
    const auto n = quarter_wave(50.0, 100.0);
    const std::vector<Complex> drive{0.0};
    EXPECT_THROW(passive_efficiency(n, kF0, drive, "load"), DomainError);
}

TEST(PassiveEfficiency, LargerTransformationRatioLosesMore) {
    // Lossy lumped CLC inverter, Q = 20, Z0 = 50.
    const double w = 2 * oracle::kPi * kF0;
    auto build = [&](double zl, double q = 20.0) {
        Netlist n(kF0);
        const auto in = n.add_node("in");
        const auto out = n.add_node("out");
        n.add_capacitor("Ca", in, kGround, 1.0 / (w * 50.0), q);
        n.add_inductor("L", in, out, 50.0 / w, q);
        n.add_capacitor("Cb", out, kGround, 1.0 / (w * 50.0), q);
        n.add_resistor("RL", out, kGround, zl).termination = true;
        n.add_port("in", in);
        n.add_port("load", out);
        return n;
    };
    const std::vector<Complex> drive{1.0};
    const auto itr1 = build(50.0);
    const auto itr4 = build(100.0);
    const double eta1 = passive_efficiency(itr1, kF0, drive, "load");
    const double eta4 = passive_efficiency(itr4, kF0, drive, "load");
    EXPECT_LT(eta4, eta1);
    const double r_in = solve(build(100.0, kLossless), kF0, drive).port_impedance(0).real();
    EXPECT_NEAR(100.0 / r_in, 4.0, 1e-9);
}

TEST(CoupledInductor, ShortedSecondaryMatchesHandFormula) {
    const double lp = 2e-9, n_ratio = 1.5, k = 0.6, q = 25.0;
    const double w = 2 * oracle::kPi * kF0;
    Netlist n(kF0);
    const auto p = n.add_node("p");
    const auto s = n.add_node("s");
    n.add_coupled_inductor("K", p, kGround, s, kGround, {lp, n_ratio, k, q});
    n.add_resistor("Rs", s, kGround, 1e-6);
    n.add_port("p", p);
    const std::vector<Complex> drive{1.0};
    const Complex z = solve(n, kF0, drive).port_impedance(0);
    const double ls = n_ratio * n_ratio * lp;
    const double m = k * n_ratio * lp;
    const Complex z1 = Complex{w * lp / q, w * lp};
    const Complex z2 = Complex{w * ls / q + 1e-6, w * ls};
    const Complex zm{0.0, w * m};
    const Complex expect = z1 - zm * zm / z2;
    EXPECT_LT(std::abs(z - expect) / std::abs(expect), 1e-9);
}

TEST(CoupledInductor, IdealTransformerScalesImpedance) {
    Netlist n(kF0);
    const auto p = n.add_node("p");
    const auto s = n.add_node("s");
    n.add_ideal_transformer("T", p, kGround, s, kGround, 2.0);
    n.add_resistor("R", s, kGround, 100.0);
    n.add_port("p", p);
    const std::vector<Complex> drive{1.0};
    EXPECT_NEAR(solve(n, kF0, drive).port_impedance(0).real(), 25.0, 1e-9);
}

TEST(Solve, ConcurrentSolvesAgree) {
    const auto n = quarter_wave(40.0, 73.0, 0.2);
    const std::vector<Complex> drive{1.0};
    const auto ref = solve(n, 1.1e9, drive);
    std::vector<Complex> got(8);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < got.size(); ++t)
        pool.emplace_back([&, t] { got[t] = solve(n, 1.1e9, drive).port_impedance(0); });
    for (auto& th : pool) th.join();
    for (const auto& z : got) EXPECT_EQ(z, ref.port_impedance(0));
}
