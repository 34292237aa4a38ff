#include "dohertycad/synth/synth.hpp"

#include "dohertycad/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace doherty::synth {

namespace {

constexpr double kNeperToDb = 8.685889638065035;

double omega_of(double f0) { return 2.0 * std::numbers::pi * f0; }

IdentityCheck check(std::string name, std::string relation, double lhs, double rhs) {
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    const double residual = scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
    return {std::move(name), std::move(relation), lhs, rhs, residual};
}

std::string describe(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

void window(std::vector<std::string>& warnings, const char* what, double value, double lo, double hi,
            const char* unit) {
    if (value < lo || value > hi) {
        warnings.push_back(std::string(what) + " = " + describe(value) + " " + unit + " outside realizable window [" +
                           describe(lo) + ", " + describe(hi) + "] " + unit);
    }
}

void add_pi(net::Netlist& net, const std::string& prefix, net::NodeId a, net::NodeId b, const PiNetwork& pi,
            const QBudget& q) {
    using net::kGround;
    if (pi.type == PiType::low_pass) {
        net.add_capacitor(prefix + "_Ca", a, kGround, pi.shunt_values[0], q.q_c);
        net.add_inductor(prefix + "_L", a, b, pi.series_value, q.q_l);
        net.add_capacitor(prefix + "_Cb", b, kGround, pi.shunt_values[1], q.q_c);
    } else {
        net.add_inductor(prefix + "_La", a, kGround, pi.shunt_values[0], q.q_l);
        net.add_capacitor(prefix + "_C", a, b, pi.series_value, q.q_c);
        net.add_inductor(prefix + "_Lb", b, kGround, pi.shunt_values[1], q.q_l);
    }
}

void add_line(net::Netlist& net, const std::string& name, net::NodeId a, net::NodeId b, double z0, double f0,
              PiType pi_type, const QBudget& q, LineRealization realization) {
    if (realization == LineRealization::transmission_line) {
        net.add_transmission_line(name, a, net::kGround, b, net::kGround,
                                  {z0, 90.0, q.line_atten_db_per_quarter_wave()});
    } else {
        add_pi(net, name, a, b, pi_approx(z0, f0, pi_type), q);
    }
}

}  // namespace

bool all_pass(const std::vector<IdentityCheck>& checks, double tolerance) {
    return std::all_of(checks.begin(), checks.end(),
                       [tolerance](const IdentityCheck& c) { return c.residual < tolerance; });
}

bool QBudget::lossless() const { return std::isinf(q_l) && std::isinf(q_c); }

double QBudget::line_atten_db_per_quarter_wave() const {
    const double inv = (std::isinf(q_l) ? 0.0 : 1.0 / q_l) + (std::isinf(q_c) ? 0.0 : 1.0 / q_c);
    return std::numbers::pi / 4.0 * inv * kNeperToDb;
}

TwoLineDesign synth_two_line(const DohertyConfig& cfg, const Realizability& limits) {
    cfg.validate();
    TwoLineDesign d;
    d.z01 = (1.0 + cfg.alpha) * cfg.r_opt / 2.0;
    d.z02 = std::sqrt(cfg.r_opt * cfg.r_load / 2.0);
    d.f0 = cfg.f0;
    window(d.warnings, "Z01", d.z01, limits.z0_min, limits.z0_max, "ohm");
    window(d.warnings, "Z02", d.z02, limits.z0_min, limits.z0_max, "ohm");
    return d;
}

ThreeLineDesign synth_three_line(const DohertyConfig& cfg, std::optional<double> z02, const Realizability& limits) {
    cfg.validate();
    ThreeLineDesign d;
    d.z01 = (1.0 + cfg.alpha) * std::sqrt(cfg.r_opt * cfg.r_load / 2.0);
    d.z02 = z02.value_or(d.z01);
    if (!(d.z02 > 0.0)) {
        throw ArgumentError("Z02 must be positive");
    }
    d.z03 = d.z02 * std::sqrt(2.0 * cfg.r_load / cfg.r_opt);
    d.f0 = cfg.f0;
    window(d.warnings, "Z01", d.z01, limits.z0_min, limits.z0_max, "ohm");
    window(d.warnings, "Z02", d.z02, limits.z0_min, limits.z0_max, "ohm");
    window(d.warnings, "Z03", d.z03, limits.z0_min, limits.z0_max, "ohm");
    return d;
}

PiNetwork pi_approx(double z0, double f0, PiType type) {
    if (!(z0 > 0.0) || !(f0 > 0.0)) {
        throw ArgumentError("pi approximation needs positive Z0 and f0");
    }
    const double w = omega_of(f0);
    const double l = z0 / w;
    const double c = 1.0 / (w * z0);
    if (type == PiType::low_pass) {
        return {type, z0, l, {c, c}, f0};
    }
    return {type, z0, c, {l, l}, f0};
}

double aux_coupling(double n2, double r_opt, double r_load) {
    if (!(n2 > 0.0) || !(r_opt > 0.0) || !(r_load > 0.0)) {
        throw ArgumentError("n2, R_opt and R_L must be positive");
    }
    const double ratio = r_opt / (2.0 * r_load);
    return (std::sqrt(n2 * n2 * ratio + 4.0) - n2 * std::sqrt(ratio)) / 2.0;
}

TransformerCombinerDesign synth_transformer_combiner(const DohertyConfig& cfg, const TransformerFreeParams& params,
                                                     double c_pad, const Realizability& limits) {
    cfg.validate();
    if (std::abs(cfg.alpha - 1.0) > 1e-12) {
        throw UnsupportedError("transformer combiner synthesis is derived for the symmetric design (alpha = 1)");
    }
    const double n1 = params.n1, k1 = params.k1, n2 = params.n2;
    if (!(n1 > 0.0) || !(n2 > 0.0) || !std::isfinite(n1) || !std::isfinite(n2)) {
        throw ArgumentError("turn ratios n1, n2 must be positive");
    }
    if (!(k1 > 0.0 && k1 < 1.0)) {
        throw ArgumentError("coupling k1 must lie in (0, 1)");
    }
    if (!(c_pad >= 0.0)) {
        throw ArgumentError("pad capacitance must be nonnegative");
    }

    const double w = omega_of(cfg.f0);
    TransformerCombinerDesign d;
    d.f0 = cfg.f0;
    d.c_pad = c_pad;

    d.z0_lp_main = k1 / n1 * std::sqrt(2.0 * cfg.r_opt * cfg.r_load);
    d.tf1 = {d.z0_lp_main / (w * (1.0 - k1 * k1)), n1, k1};
    const double c1 = 1.0 / (w * d.z0_lp_main);
    d.c3_total = (k1 / n1) * (k1 / n1) * c1;
    d.z0_hp_aux = n1 * n1 / (1.0 - k1 * k1) * d.z0_lp_main;

    const double k2 = aux_coupling(n2, cfg.r_opt, cfg.r_load);
    if (!(k2 > 0.0 && k2 < 1.0)) {
        throw ConsistencyError("solved k2 = " + std::to_string(k2) + " outside (0, 1)");
    }
    d.tf2 = {(n1 / n2) * (n1 / n2) * d.tf1.primary_inductance, n2, k2};
    const double c5 = 1.0 / (w * d.z0_hp_aux);
    d.z0_lp_aux = d.z0_hp_aux * (1.0 - k2 * k2) / (n2 * n2);
    const double c2 = 1.0 / (w * d.z0_lp_aux);
    const double c4 = (k2 / n2) * (k2 / n2) * c2;
    d.lm1 = k1 * k1 * d.tf1.primary_inductance;
    d.lm2 = k2 * k2 * d.tf2.primary_inductance;

    if (c_pad > d.c3_total) {
        throw ArgumentError("pad capacitance " + describe(c_pad) + " F exceeds C3 = " + describe(d.c3_total) + " F");
    }
    d.c = {c1, c2, d.c3_total - c_pad, c4, c5};

    d.identities = identities(d, cfg, params);
    for (const auto& id : d.identities) {
        if (!(id.residual < kIdentityTolerance)) {
            throw ConsistencyError("identity " + id.name + " violated (residual " + describe(id.residual) + ")");
        }
    }

    window(d.warnings, "Lp1", d.tf1.primary_inductance, limits.l_min, limits.l_max, "H");
    window(d.warnings, "Lp2", d.tf2.primary_inductance, limits.l_min, limits.l_max, "H");
    const char* names[] = {"C1", "C2", "C3", "C4", "C5"};
    for (std::size_t i = 0; i < 5; ++i) {
        if (i == 2 && c_pad > 0.0) {
            continue;  // net C3 may legitimately shrink toward zero
        }
        window(d.warnings, names[i], d.c[i], limits.c_min, limits.c_max, "F");
    }
    window(d.warnings, "Z0_LP_main", d.z0_lp_main, limits.z0_min, limits.z0_max, "ohm");
    window(d.warnings, "Z0_LP_aux", d.z0_lp_aux, limits.z0_min, limits.z0_max, "ohm");
    window(d.warnings, "Z0_HP_aux", d.z0_hp_aux, limits.z0_min, limits.z0_max, "ohm");
    return d;
}

std::vector<IdentityCheck> identities(const TwoLineDesign& d, const DohertyConfig& cfg) {
    const double peak = (1.0 + cfg.alpha) * cfg.r_opt / 2.0;
    return {
        check("eq2", "Z02^2 / R_L = R_opt / 2", d.z02 * d.z02 / cfg.r_load, cfg.r_opt / 2.0),
        check("eq3", "Z01^2 / ((1+a) R_opt / 2) = (1+a) R_opt / 2", d.z01 * d.z01 / peak, peak),
    };
}

std::vector<IdentityCheck> identities(const ThreeLineDesign& d, const DohertyConfig& cfg) {
    return {
        check("eq5", "Z01^2 / ((1+a) R_L) = (1+a) R_opt / 2", d.z01 * d.z01 / ((1.0 + cfg.alpha) * cfg.r_load),
              (1.0 + cfg.alpha) * cfg.r_opt / 2.0),
        check("eq6", "Z03 / Z02 = sqrt(2 R_L / R_opt)", d.z03 / d.z02, std::sqrt(2.0 * cfg.r_load / cfg.r_opt)),
    };
}

std::vector<IdentityCheck> identities(const TransformerCombinerDesign& d, const DohertyConfig& cfg,
                                      const TransformerFreeParams& p) {
    const double w = omega_of(d.f0);
    const double root = std::sqrt(2.0 * cfg.r_opt * cfg.r_load);
    const double n1 = p.n1, k1 = p.k1, n2 = p.n2;
    const double k2 = d.tf2.coupling;
    const double s = std::sqrt(2.0 * cfg.r_load / cfg.r_opt);
    const double lp1 = d.tf1.primary_inductance;
    const double lp2 = d.tf2.primary_inductance;
    const double c1 = d.c[0], c2 = d.c[1], c4 = d.c[3], c5 = d.c[4];
    return {
        check("eq11", "Z0_LP_main (n1/k1) = (1+a) sqrt(R_opt R_L / 2)", d.z0_lp_main * n1 / k1,
              (1.0 + cfg.alpha) * std::sqrt(cfg.r_opt * cfg.r_load / 2.0)),
        check("eq12", "Z0_HP_aux / Z0_LP_aux = (n2/k2) sqrt(2 R_L / R_opt)", d.z0_hp_aux / d.z0_lp_aux, n2 / k2 * s),
        check("eq13", "Lp1 = k1 sqrt(2 R_opt R_L) / (w n1 (1-k1^2))", lp1, k1 * root / (w * n1 * (1.0 - k1 * k1))),
        check("eq14", "C1 = n1 / (w k1 sqrt(2 R_opt R_L))", c1, n1 / (w * k1 * root)),
        check("eq15", "C3 = k1 / (w n1 sqrt(2 R_opt R_L))", d.c3_total, k1 / (w * n1 * root)),
        check("eq16", "k1^2 Z0_LP_main / (w (1-k1^2)) = Z0_HP_aux / (w (n1/k1)^2)",
              k1 * k1 * d.z0_lp_main / (w * (1.0 - k1 * k1)), d.z0_hp_aux / (w * (n1 / k1) * (n1 / k1))),
        check("eq17", "k2^2 Z0_LP_aux / (w (1-k2^2)) = Z0_HP_aux / (w (n2/k2)^2)",
              k2 * k2 * d.z0_lp_aux / (w * (1.0 - k2 * k2)), d.z0_hp_aux / (w * (n2 / k2) * (n2 / k2))),
        check("eq18", "Z0_HP_aux = n1 k1 sqrt(2 R_opt R_L) / (1-k1^2)", d.z0_hp_aux, n1 * k1 * root / (1.0 - k1 * k1)),
        check("eq19", "Lp2 = n1 k1 sqrt(2 R_opt R_L) / (w n2^2 (1-k1^2))", lp2,
              n1 * k1 * root / (w * n2 * n2 * (1.0 - k1 * k1))),
        check("eq20", "C5 = (1-k1^2) / (w n1 k1 sqrt(2 R_opt R_L))", c5, (1.0 - k1 * k1) / (w * n1 * k1 * root)),
        check("eq21", "Z0_HP_aux / Z0_LP_aux = n2^2 / (1-k2^2)", d.z0_hp_aux / d.z0_lp_aux, n2 * n2 / (1.0 - k2 * k2)),
        check("eq22", "n2 k2 = sqrt(2 R_L / R_opt) (1-k2^2)", n2 * k2, s * (1.0 - k2 * k2)),
        check("eq23", "C2 = n2^2 (1-k1^2) / (w n1 k1 (1-k2^2) sqrt(2 R_opt R_L))", c2,
              n2 * n2 * (1.0 - k1 * k1) / (w * n1 * k1 * (1.0 - k2 * k2) * root)),
        check("eq24", "C4 = k2^2 (1-k1^2) / (w n1 k1 (1-k2^2) sqrt(2 R_opt R_L))", c4,
              k2 * k2 * (1.0 - k1 * k1) / (w * n1 * k1 * (1.0 - k2 * k2) * root)),
    };
}

net::Netlist to_netlist(const TwoLineDesign& d, const DohertyConfig& cfg, const QBudget& q,
                        LineRealization realization) {
    net::Netlist net(d.f0);
    const auto main = net.add_node("main");
    const auto comb = net.add_node("comb");
    const auto out = net.add_node("out");
    add_line(net, "TL1", main, comb, d.z01, d.f0, PiType::low_pass, q, realization);
    add_line(net, "TL2", comb, out, d.z02, d.f0, PiType::low_pass, q, realization);
    net.add_resistor("RL", out, net::kGround, cfg.r_load).termination = true;
    net.add_port("main", main);
    net.add_port("aux", comb);
    net.add_port("load", out);
    return net;
}

net::Netlist to_netlist(const ThreeLineDesign& d, const DohertyConfig& cfg, const QBudget& q,
                        LineRealization realization) {
    net::Netlist net(d.f0);
    const auto main = net.add_node("main");
    const auto aux = net.add_node("aux");
    const auto mid = net.add_node("mid");
    const auto out = net.add_node("out");
    add_line(net, "TL1", main, out, d.z01, d.f0, PiType::low_pass, q, realization);
    add_line(net, "TL2", aux, mid, d.z02, d.f0, PiType::low_pass, q, realization);
    add_line(net, "TL3", mid, out, d.z03, d.f0, PiType::high_pass, q, realization);
    net.add_resistor("RL", out, net::kGround, cfg.r_load).termination = true;
    net.add_port("main", main);
    net.add_port("aux", aux);
    net.add_port("load", out);
    return net;
}

net::Netlist to_netlist(const TransformerCombinerDesign& d, const DohertyConfig& cfg, const QBudget& q) {
    using net::kGround;
    net::Netlist net(d.f0);
    const auto main = net.add_node("main");
    const auto aux = net.add_node("aux");
    const auto out = net.add_node("out");
    const auto y = net.add_node("y");

    net.add_capacitor("C1", main, kGround, d.c[0], q.q_c);
    net.add_coupled_inductor("TF1", main, kGround, out, kGround,
                             {d.tf1.primary_inductance, d.tf1.turn_ratio, d.tf1.coupling, q.q_l});
    if (d.c[2] > 0.0) {
        net.add_capacitor("C3", out, kGround, d.c[2], q.q_c);
    }
    if (d.c_pad > 0.0) {
        net.add_capacitor("Cpad", out, kGround, d.c_pad, q.q_c);
    }
    net.add_resistor("RL", out, kGround, cfg.r_load).termination = true;

    net.add_capacitor("C2", aux, kGround, d.c[1], q.q_c);
    net.add_coupled_inductor("TF2", aux, kGround, y, kGround,
                             {d.tf2.primary_inductance, d.tf2.turn_ratio, d.tf2.coupling, q.q_l});
    net.add_capacitor("C4", y, kGround, d.c[3], q.q_c);
    net.add_capacitor("C5", y, out, d.c[4], q.q_c);

    net.add_port("main", main);
    net.add_port("aux", aux);
    net.add_port("load", out);
    return net;
}

net::Netlist to_pi_section_netlist(const TransformerCombinerDesign& d, const DohertyConfig& cfg, const QBudget& q) {
    using net::kGround;
    net::Netlist net(d.f0);
    const auto main = net.add_node("main");
    const auto aux = net.add_node("aux");
    const auto out = net.add_node("out");
    const auto x1 = net.add_node("x1");
    const auto x2 = net.add_node("x2");
    const auto y = net.add_node("y");

    const auto lp_main = pi_approx(d.z0_lp_main, d.f0, PiType::low_pass);
    const auto lp_aux = pi_approx(d.z0_lp_aux, d.f0, PiType::low_pass);
    const auto hp_aux = pi_approx(d.z0_hp_aux, d.f0, PiType::high_pass);

    add_pi(net, "PI1", main, x1, lp_main, q);
    net.add_ideal_transformer("T1", x1, kGround, out, kGround, d.tf1.turn_ratio / d.tf1.coupling);
    add_pi(net, "PI2", aux, x2, lp_aux, q);
    net.add_ideal_transformer("T2", x2, kGround, y, kGround, d.tf2.turn_ratio / d.tf2.coupling);
    add_pi(net, "PI3", y, out, hp_aux, q);
    net.add_resistor("RL", out, kGround, cfg.r_load).termination = true;

    net.add_port("main", main);
    net.add_port("aux", aux);
    net.add_port("load", out);
    return net;
}

}  // namespace doherty::synth
