#include "dohertycad/netkit/element.hpp"

#include "dohertycad/errors.hpp"

#include <cmath>

namespace doherty::net {

std::string_view to_string(ElementKind kind) {
    switch (kind) {
        case ElementKind::resistor: return "resistor";
        case ElementKind::inductor: return "inductor";
        case ElementKind::capacitor: return "capacitor";
        case ElementKind::coupled_inductor: return "coupled_inductor";
        case ElementKind::ideal_transformer: return "ideal_transformer";
        case ElementKind::transmission_line: return "transmission_line";
        case ElementKind::current_source: return "current_source";
    }
    return "unknown";
}

std::size_t terminal_count(ElementKind kind) {
    switch (kind) {
        case ElementKind::coupled_inductor:
        case ElementKind::ideal_transformer:
        case ElementKind::transmission_line:
            return 4;
        default:
            return 2;
    }
}

namespace {

void require(bool ok, const Element& e, const char* what) {
    if (!ok) {
        throw ArgumentError("element '" + e.name + "': " + what);
    }
}

bool valid_q(double q) { return q > 0.0; }  // +inf passes, NaN fails

struct Checker {
    const Element& e;

    void operator()(const Resistor& r) const {
        require(std::isfinite(r.resistance) && r.resistance > 0.0, e, "resistance must be positive");
    }
    void operator()(const Inductor& l) const {
        require(std::isfinite(l.inductance) && l.inductance > 0.0, e, "inductance must be positive");
        require(valid_q(l.q), e, "Q must be positive or infinite");
    }
    void operator()(const Capacitor& c) const {
        require(std::isfinite(c.capacitance) && c.capacitance > 0.0, e, "capacitance must be positive");
        require(valid_q(c.q), e, "Q must be positive or infinite");
    }
    void operator()(const CoupledInductor& m) const {
        require(std::isfinite(m.primary_inductance) && m.primary_inductance > 0.0, e,
                "primary inductance must be positive");
        require(std::isfinite(m.turn_ratio) && m.turn_ratio > 0.0, e, "turn ratio must be positive");
        require(m.coupling > 0.0 && m.coupling < 1.0, e, "coupling must lie in (0, 1)");
        require(valid_q(m.q), e, "Q must be positive or infinite");
    }
    void operator()(const IdealTransformer& t) const {
        require(std::isfinite(t.turn_ratio) && t.turn_ratio > 0.0, e, "turn ratio must be positive");
    }
    void operator()(const TransmissionLine& t) const {
        require(std::isfinite(t.z0) && t.z0 > 0.0, e, "Z0 must be positive");
        require(std::isfinite(t.electrical_length_deg) && t.electrical_length_deg > 0.0, e,
                "electrical length must be positive");
        require(std::isfinite(t.atten_db_per_quarter_wave) && t.atten_db_per_quarter_wave >= 0.0, e,
                "attenuation must be nonnegative");
    }
    void operator()(const CurrentSource& s) const {
        require(std::isfinite(s.amplitude.real()) && std::isfinite(s.amplitude.imag()), e,
                "source amplitude must be finite");
    }
};

}  // namespace

void validate_element(const Element& element) {
    require(!element.name.empty(), element, "name must not be empty");
    require(element.nodes.size() == terminal_count(element.kind()), element, "wrong number of terminals");
    std::visit(Checker{element}, element.value);
    if (element.termination) {
        require(element.kind() == ElementKind::resistor, element, "only resistors can be terminations");
    }
}

}  // namespace doherty::net
