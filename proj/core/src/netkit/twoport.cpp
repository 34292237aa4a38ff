#include "dohertycad/netkit/twoport.hpp"

#include "dohertycad/errors.hpp"

#include <cmath>
#include <numbers>

namespace doherty::net {

namespace {

constexpr double kNeperToDb = 8.685889638065035;

constexpr Mat2 identity() { return {{{Complex{1.0}, Complex{0.0}}, {Complex{0.0}, Complex{1.0}}}}; }

void require_nonzero(Complex v, const char* what) {
    if (std::abs(v) < 1e-300) {
        throw DomainError(std::string("two-port conversion singular: ") + what);
    }
}

}  // namespace

Mat2 multiply(const Mat2& a, const Mat2& b) {
    Mat2 r{};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    return r;
}

Complex determinant(const Mat2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

Complex element_impedance(const ElementValue& value, double frequency) {
    const double omega = 2.0 * std::numbers::pi * frequency;
    if (const auto* r = std::get_if<Resistor>(&value)) {
        return r->resistance;
    }
    if (const auto* l = std::get_if<Inductor>(&value)) {
        const double x = omega * l->inductance;
        return {std::isinf(l->q) ? 0.0 : x / l->q, x};
    }
    if (const auto* c = std::get_if<Capacitor>(&value)) {
        const double b = omega * c->capacitance;
        return 1.0 / Complex(std::isinf(c->q) ? 0.0 : b / c->q, b);
    }
    throw ArgumentError("series/shunt sections must hold a resistor, inductor or capacitor");
}

Mat2 section_abcd(const Section& section, double frequency, double reference_frequency) {
    const double omega = 2.0 * std::numbers::pi * frequency;
    if (const auto* s = std::get_if<SeriesSection>(&section)) {
        return {{{Complex{1.0}, element_impedance(s->value, frequency)}, {Complex{0.0}, Complex{1.0}}}};
    }
    if (const auto* s = std::get_if<ShuntSection>(&section)) {
        return {{{Complex{1.0}, Complex{0.0}}, {1.0 / element_impedance(s->value, frequency), Complex{1.0}}}};
    }
    if (const auto* t = std::get_if<TransmissionLine>(&section)) {
        if (!(reference_frequency > 0.0)) {
            throw ArgumentError("transmission-line section needs a positive reference frequency");
        }
        const double theta = t->electrical_length_deg * std::numbers::pi / 180.0 * frequency / reference_frequency;
        const double loss = t->atten_db_per_quarter_wave / kNeperToDb * theta / (std::numbers::pi / 2.0);
        const Complex gl(loss, theta);
        return {{{std::cosh(gl), t->z0 * std::sinh(gl)}, {std::sinh(gl) / t->z0, std::cosh(gl)}}};
    }
    if (const auto* t = std::get_if<IdealTransformer>(&section)) {
        return {{{Complex{1.0 / t->turn_ratio}, Complex{0.0}}, {Complex{0.0}, Complex{t->turn_ratio}}}};
    }
    const auto& m = std::get<CoupledInductor>(section);
    const double xp = omega * m.primary_inductance;
    const double xs = omega * m.secondary_inductance();
    const Complex z11(std::isinf(m.q) ? 0.0 : xp / m.q, xp);
    const Complex z22(std::isinf(m.q) ? 0.0 : xs / m.q, xs);
    const Complex z21(0.0, omega * m.mutual_inductance());
    const Complex det = z11 * z22 - z21 * z21;
    return {{{z11 / z21, det / z21}, {1.0 / z21, z22 / z21}}};
}

TwoPortMatrix two_port_matrix(const std::vector<Section>& chain, double frequency, Representation representation,
                              double reference_frequency, double z_ref) {
    if (!(frequency > 0.0)) {
        throw ArgumentError("frequency must be positive");
    }
    TwoPortMatrix abcd{Representation::abcd, identity(), z_ref, chain.empty()};
    for (const auto& section : chain) {
        abcd.m = multiply(abcd.m, section_abcd(section, frequency, reference_frequency));
    }
    auto out = convert(abcd, representation, z_ref);
    out.empty_chain = chain.empty();
    return out;
}

TwoPortMatrix convert(const TwoPortMatrix& in, Representation to, double z_ref) {
    if (in.representation == to && (to != Representation::s || in.z_ref == z_ref)) {
        return in;
    }

    // Route through ABCD.
    Mat2 t{};
    const auto& m = in.m;
    switch (in.representation) {
        case Representation::abcd:
            t = m;
            break;
        case Representation::z: {
            require_nonzero(m[1][0], "Z21 = 0");
            const Complex det = determinant(m);
            t = {{{m[0][0] / m[1][0], det / m[1][0]}, {1.0 / m[1][0], m[1][1] / m[1][0]}}};
            break;
        }
        case Representation::s: {
            const double z0 = in.z_ref;
            const Complex s11 = m[0][0], s12 = m[0][1], s21 = m[1][0], s22 = m[1][1];
            require_nonzero(s21, "S21 = 0");
            const Complex two_s21 = 2.0 * s21;
            t = {{{((1.0 + s11) * (1.0 - s22) + s12 * s21) / two_s21,
                   z0 * ((1.0 + s11) * (1.0 + s22) - s12 * s21) / two_s21},
                  {((1.0 - s11) * (1.0 - s22) - s12 * s21) / (two_s21 * z0),
                   ((1.0 - s11) * (1.0 + s22) + s12 * s21) / two_s21}}};
            break;
        }
    }

    TwoPortMatrix out{to, {}, z_ref, in.empty_chain};
    const Complex a = t[0][0], b = t[0][1], c = t[1][0], d = t[1][1];
    switch (to) {
        case Representation::abcd:
            out.m = t;
            break;
        case Representation::z: {
            require_nonzero(c, "C = 0 (no finite Z matrix)");
            out.m = {{{a / c, determinant(t) / c}, {1.0 / c, d / c}}};
            break;
        }
        case Representation::s: {
            if (!(z_ref > 0.0)) {
                throw DomainError("reference impedance must be positive");
            }
            const Complex den = a + b / z_ref + c * z_ref + d;
            require_nonzero(den, "A + B/Z0 + C Z0 + D = 0");
            out.m = {{{(a + b / z_ref - c * z_ref - d) / den, 2.0 * determinant(t) / den},
                      {2.0 / den, (-a + b / z_ref - c * z_ref + d) / den}}};
            break;
        }
    }
    return out;
}

}  // namespace doherty::net
