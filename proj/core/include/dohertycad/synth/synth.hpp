#pragma once

#include "dohertycad/ideal/doherty.hpp"
#include "dohertycad/netkit/element.hpp"
#include "dohertycad/netkit/netlist.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace doherty::synth {

using ideal::DohertyConfig;

/// One closed-form relation re-evaluated by an independent algebraic route.
struct IdentityCheck {
    std::string name;  // e.g. "eq13"
    std::string relation;
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;  // |lhs - rhs| / max(|lhs|, |rhs|)
};

inline constexpr double kIdentityTolerance = 1e-9;

bool all_pass(const std::vector<IdentityCheck>& checks, double tolerance = kIdentityTolerance);

/// Realizability windows. Outside them a design carries warnings, not errors.
struct Realizability {
    double z0_min = 10.0, z0_max = 150.0;     // ohm
    double l_min = 50e-12, l_max = 10e-9;     // H
    double c_min = 5e-15, c_max = 10e-12;     // F
};

struct TwoLineDesign {
    double z01 = 0.0;  // main-path inverter
    double z02 = 0.0;  // output transformer line
    double f0 = 0.0;
    std::vector<std::string> warnings;
};

struct ThreeLineDesign {
    double z01 = 0.0;
    double z02 = 0.0;
    double z03 = 0.0;
    double f0 = 0.0;
    std::vector<std::string> warnings;
};

enum class PiType { low_pass, high_pass };

/// Three-element lumped equivalent of a quarter-wave line at f0. Low-pass is
/// C-L-C (series L), high-pass is L-C-L (series C).
struct PiNetwork {
    PiType type = PiType::low_pass;
    double z0 = 0.0;
    double series_value = 0.0;             // H for low-pass, F for high-pass
    std::array<double, 2> shunt_values{};  // F for low-pass, H for high-pass
    double f0 = 0.0;
};

struct TransformerSpec {
    double primary_inductance = 0.0;  // H
    double turn_ratio = 1.0;
    double coupling = 0.0;
};

/// Designer-chosen parameters of the transformer combiner.
struct TransformerFreeParams {
    double n1 = 1.0;
    double k1 = 0.7;
    double n2 = 1.0;
};

struct TransformerCombinerDesign {
    TransformerSpec tf1;               // main path
    TransformerSpec tf2;               // auxiliary path
    std::array<double, 5> c{};         // C1..C5, F. C3 is net of any absorbed pad capacitance.
    double c3_total = 0.0;             // C3 before pad absorption
    double c_pad = 0.0;
    double z0_lp_main = 0.0;
    double z0_lp_aux = 0.0;
    double z0_hp_aux = 0.0;
    double lm1 = 0.0;  // magnetizing inductances, primary referred
    double lm2 = 0.0;
    double f0 = 0.0;
    std::vector<IdentityCheck> identities;
    std::vector<std::string> warnings;
};

TwoLineDesign synth_two_line(const DohertyConfig& cfg, const Realizability& limits = {});

/// `z02` defaults to Z01, giving Z03 = (1 + alpha) R_L.
ThreeLineDesign synth_three_line(const DohertyConfig& cfg, std::optional<double> z02 = std::nullopt,
                                 const Realizability& limits = {});

PiNetwork pi_approx(double z0, double f0, PiType type);

/// Closed-form transformer combiner for the symmetric design (alpha = 1).
/// Throws UnsupportedError for other alpha, ConsistencyError if k2 leaves (0, 1)
/// or an identity fails, ArgumentError if `c_pad` exceeds C3.
TransformerCombinerDesign synth_transformer_combiner(const DohertyConfig& cfg, const TransformerFreeParams& params = {},
                                                     double c_pad = 0.0, const Realizability& limits = {});

/// Solves the auxiliary-path coupling for a given n2 and R_opt / R_L.
double aux_coupling(double n2, double r_opt, double r_load);

std::vector<IdentityCheck> identities(const TwoLineDesign& design, const DohertyConfig& cfg);
std::vector<IdentityCheck> identities(const ThreeLineDesign& design, const DohertyConfig& cfg);
std::vector<IdentityCheck> identities(const TransformerCombinerDesign& design, const DohertyConfig& cfg,
                                      const TransformerFreeParams& params);

/// Component quality factors. Inductors (and windings) use q_l, capacitors q_c.
/// Transmission lines get the equivalent attenuation (pi/4)(1/q_l + 1/q_c) Np
/// per quarter wave.
struct QBudget {
    double q_l = net::kLossless;
    double q_c = net::kLossless;

    bool lossless() const;
    double line_atten_db_per_quarter_wave() const;
};

enum class LineRealization { transmission_line, lumped_pi };

/// Netlists carry ports "main", "aux" and "load" and a termination resistor
/// "RL" at the output node "out". The main-path inverter is named "TL1" in
/// line realizations.
net::Netlist to_netlist(const TwoLineDesign& design, const DohertyConfig& cfg, const QBudget& q = {},
                        LineRealization realization = LineRealization::transmission_line);
net::Netlist to_netlist(const ThreeLineDesign& design, const DohertyConfig& cfg, const QBudget& q = {},
                        LineRealization realization = LineRealization::transmission_line);
/// Coupled-inductor network: C1 at the main input, TF1 to the output node
/// (C3, pad, RL), C2 at the auxiliary input, TF2 to node "y" (C4), C5 from
/// "y" to the output.
net::Netlist to_netlist(const TransformerCombinerDesign& design, const DohertyConfig& cfg, const QBudget& q = {});

/// The same combiner before inductor absorption: the three pi sections with
/// ideal transformers between them.
net::Netlist to_pi_section_netlist(const TransformerCombinerDesign& design, const DohertyConfig& cfg,
                                   const QBudget& q = {});

}  // namespace doherty::synth
