#include "dohertycad/errors.hpp"
#include "dohertycad/netkit/twoport.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace doherty;
using namespace doherty::net;

namespace {

constexpr double kF0 = 1e9;
const double kW0 = 2 * oracle::kPi * kF0;

double max_diff(const Mat2& a, const std::array<oracle::C, 4>& b) {
    return std::max({std::abs(a[0][0] - b[0]), std::abs(a[0][1] - b[1]), std::abs(a[1][0] - b[2]),
                     std::abs(a[1][1] - b[3])});
}

double max_diff(const Mat2& a, const Mat2& b) {
    return max_diff(a, std::array<oracle::C, 4>{b[0][0], b[0][1], b[1][0], b[1][1]});
}

std::vector<Section> lp_pi(double z0, double w) {
    return {ShuntSection{Capacitor{1.0 / (w * z0)}}, SeriesSection{Inductor{z0 / w}},
            ShuntSection{Capacitor{1.0 / (w * z0)}}};
}

std::vector<Section> hp_pi(double z0, double w) {
    return {ShuntSection{Inductor{z0 / w}}, SeriesSection{Capacitor{1.0 / (w * z0)}},
            ShuntSection{Inductor{z0 / w}}};
}

}  // namespace

TEST(TwoPort, QuarterWaveLineAbcd) {
    const auto m = two_port_matrix({TransmissionLine{50.0, 90.0, 0.0}}, kF0, Representation::abcd, kF0);
    const std::array<oracle::C, 4> expect{0.0, oracle::j * 50.0, oracle::j / 50.0, 0.0};
    EXPECT_LT(max_diff(m.m, expect), 1e-12);
}

TEST(TwoPort, LowPassPiEqualsMinusNinetyLine) {
    const auto pi = two_port_matrix(lp_pi(50.0, kW0), kF0, Representation::abcd, kF0);
    const auto line = two_port_matrix({TransmissionLine{50.0, 90.0, 0.0}}, kF0, Representation::abcd, kF0);
    EXPECT_LT(max_diff(pi.m, line.m), 1e-12);
}

TEST(TwoPort, HighPassPiEqualsPlusNinetyLine) {
    const auto pi = two_port_matrix(hp_pi(50.0, kW0), kF0, Representation::abcd, kF0);
    const std::array<oracle::C, 4> expect{0.0, -oracle::j * 50.0, -oracle::j / 50.0, 0.0};
    EXPECT_LT(max_diff(pi.m, expect), 1e-12);
}

TEST(TwoPort, PiMatchesClosedFormOffCenter) {
    oracle::Sampler s(0x7a01);
    for (int k = 0; k < 50; ++k) {
        const double z0 = s.uniform(10, 150);
        const double f = s.uniform(0.3, 1.7) * kF0;
        const double w = 2 * oracle::kPi * f;
        const auto lp = two_port_matrix(lp_pi(z0, kW0), f, Representation::abcd, kF0);
        const auto hp = two_port_matrix(hp_pi(z0, kW0), f, Representation::abcd, kF0);
        EXPECT_LT(max_diff(lp.m, oracle::clc_abcd(z0 / kW0, 1.0 / (kW0 * z0), w)), 1e-9);
        EXPECT_LT(max_diff(hp.m, oracle::lcl_abcd(z0 / kW0, 1.0 / (kW0 * z0), w)), 1e-9);
    }
}

TEST(TwoPort, ReciprocalChainsHaveUnitDeterminant) {
    oracle::Sampler s(0x7a02);
    for (int k = 0; k < 200; ++k) {
        std::vector<Section> chain;
        const int n = 1 + k % 6;
        for (int i = 0; i < n; ++i) {
            switch ((k + i) % 5) {
                case 0: chain.push_back(SeriesSection{Inductor{s.log_uniform(1e-10, 1e-8), s.uniform(5, 50)}}); break;
                case 1: chain.push_back(ShuntSection{Capacitor{s.log_uniform(1e-13, 1e-11), s.uniform(5, 50)}}); break;
                case 2: chain.push_back(TransmissionLine{s.uniform(20, 120), s.uniform(5, 175), s.uniform(0, 0.3)}); break;
                case 3: chain.push_back(SeriesSection{Resistor{s.uniform(1, 100)}}); break;
                default: chain.push_back(CoupledInductor{s.log_uniform(1e-10, 1e-8), s.uniform(0.3, 3), s.uniform(0.1, 0.95)});
            }
        }
        const auto m = two_port_matrix(chain, s.uniform(0.5, 1.5) * kF0, Representation::abcd, kF0);
        EXPECT_LT(std::abs(determinant(m.m) - 1.0), 1e-9) << k;
    }
}

TEST(TwoPort, ConversionsAreMutualInverses) {
    oracle::Sampler s(0x7a03);
    for (int k = 0; k < 100; ++k) {
        const std::vector<Section> chain{SeriesSection{Resistor{s.uniform(1, 40)}},
                                         ShuntSection{Capacitor{s.log_uniform(1e-13, 1e-11)}},
                                         TransmissionLine{s.uniform(20, 100), s.uniform(20, 160), 0.0},
                                         SeriesSection{Inductor{s.log_uniform(1e-10, 1e-8)}}};
        const auto abcd = two_port_matrix(chain, kF0, Representation::abcd, kF0);
        const double z_ref = s.uniform(25, 75);
        const auto sm = convert(abcd, Representation::s, z_ref);
        const auto zm = convert(sm, Representation::z, z_ref);
        const auto back_s = convert(convert(zm, Representation::abcd), Representation::s, z_ref);
        const auto back = convert(back_s, Representation::abcd);
        EXPECT_LT(max_diff(back.m, abcd.m) / std::abs(abcd.m[0][1]), 1e-9) << k;
        EXPECT_LT(max_diff(back_s.m, sm.m), 1e-9) << k;
    }
}

TEST(TwoPort, SMatrixOfMatchedLine) {
    const auto sm = two_port_matrix({TransmissionLine{50.0, 60.0, 0.0}}, kF0, Representation::s, kF0, 50.0);
    EXPECT_LT(std::abs(sm(0, 0)), 1e-12);
    EXPECT_LT(std::abs(sm(1, 0) - std::polar(1.0, -oracle::kPi / 3)), 1e-12);
}

TEST(TwoPort, EmptyChainIsFlaggedIdentity) {
    const auto m = two_port_matrix({}, kF0, Representation::abcd, kF0);
    EXPECT_TRUE(m.empty_chain);
    EXPECT_EQ(m(0, 0), oracle::C(1.0));
    EXPECT_EQ(m(0, 1), oracle::C(0.0));
    EXPECT_EQ(m(1, 1), oracle::C(1.0));
}

TEST(TwoPort, SingularConversionRaises) {
    // A pure series element has no Z matrix.
    const auto m = two_port_matrix({SeriesSection{Resistor{10.0}}}, kF0, Representation::abcd, kF0);
    EXPECT_THROW(convert(m, Representation::z), DomainError);
    EXPECT_THROW(convert(m, Representation::s, 0.0), DomainError);
}

TEST(TwoPort, CoupledPairEqualsLeakageMagnetizingDecomposition) {
    oracle::Sampler s(0x7a04);
    for (int k = 0; k < 100; ++k) {
        const double lp = s.log_uniform(1e-10, 1e-8);
        const double n = s.uniform(0.2, 5);
        const double kc = s.uniform(0.05, 0.98);
        const double f = s.uniform(0.3, 2.0) * kF0;
        const auto pair = two_port_matrix({CoupledInductor{lp, n, kc}}, f, Representation::abcd, kF0);
        const auto split = two_port_matrix({SeriesSection{Inductor{(1 - kc * kc) * lp}},
                                            ShuntSection{Inductor{kc * kc * lp}}, IdealTransformer{n / kc}},
                                           f, Representation::abcd, kF0);
        double scale = 0.0;
        for (const auto& row : pair.m)
            for (const auto& v : row) scale = std::max(scale, std::abs(v));
        EXPECT_LT(max_diff(pair.m, split.m) / scale, 1e-12) << k;
    }
}
