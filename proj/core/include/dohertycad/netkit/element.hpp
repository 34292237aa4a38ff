#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace doherty::net {

using Complex = std::complex<double>;
using NodeId = std::size_t;

inline constexpr NodeId kGround = 0;
inline constexpr double kLossless = std::numeric_limits<double>::infinity();

enum class ElementKind {
    resistor,
    inductor,
    capacitor,
    coupled_inductor,
    ideal_transformer,
    transmission_line,
    current_source,
};

std::string_view to_string(ElementKind kind);

struct Resistor {
    double resistance = 0.0;  // ohm
};

/// Finite Q is realized as a series resistance wL/Q at the analysis frequency.
struct Inductor {
    double inductance = 0.0;  // H
    double q = kLossless;
};

/// Finite Q is realized as a shunt conductance wC/Q at the analysis frequency.
struct Capacitor {
    double capacitance = 0.0;  // F
    double q = kLossless;
};

/// Magnetically coupled pair. Secondary inductance is n^2 * L_p and the mutual
/// inductance k * n * L_p. Terminals: primary (+,-), secondary (+,-).
struct CoupledInductor {
    double primary_inductance = 0.0;  // H
    double turn_ratio = 1.0;
    double coupling = 0.5;
    double q = kLossless;  // applied to both windings

    double secondary_inductance() const { return turn_ratio * turn_ratio * primary_inductance; }
    double mutual_inductance() const { return coupling * turn_ratio * primary_inductance; }
};

/// Ideal 1:n transformer, V_sec = n * V_pri. Terminals: primary (+,-), secondary (+,-).
struct IdealTransformer {
    double turn_ratio = 1.0;
};

/// Uniform TEM line. The electrical length is given at the netlist reference
/// frequency and scales linearly with frequency; attenuation per quarter wave
/// is frequency independent (constant Q).
struct TransmissionLine {
    double z0 = 50.0;                        // ohm
    double electrical_length_deg = 90.0;     // at reference frequency
    double atten_db_per_quarter_wave = 0.0;  // dB
};

/// Independent phasor current source driving current from nodes[0] to nodes[1]
/// through the source, i.e. injecting it into nodes[1].
struct CurrentSource {
    Complex amplitude{};  // A (peak)
};

using ElementValue = std::variant<Resistor, Inductor, Capacitor, CoupledInductor, IdealTransformer,
                                  TransmissionLine, CurrentSource>;

struct Element {
    std::string name;
    std::vector<NodeId> nodes;  // 2 or 4 entries
    ElementValue value;
    /// Termination resistors represent the system load. They absorb "delivered"
    /// power and are removed when extracting network S-parameters.
    bool termination = false;

    ElementKind kind() const { return static_cast<ElementKind>(value.index()); }
    bool is_four_terminal() const { return nodes.size() == 4; }
};

/// Number of terminals an element kind attaches to.
std::size_t terminal_count(ElementKind kind);

/// Throws ArgumentError when the element violates its value invariants.
void validate_element(const Element& element);

}  // namespace doherty::net
