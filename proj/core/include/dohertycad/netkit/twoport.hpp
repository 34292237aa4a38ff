#pragma once

#include "dohertycad/netkit/element.hpp"

#include <array>
#include <variant>
#include <vector>

namespace doherty::net {

enum class Representation { abcd, s, z };

using Mat2 = std::array<std::array<Complex, 2>, 2>;

struct TwoPortMatrix {
    Representation representation = Representation::abcd;
    Mat2 m{};
    double z_ref = 50.0;        // only meaningful for S
    bool empty_chain = false;   // set when built from an empty section list

    Complex operator()(int r, int c) const { return m[r][c]; }
};

/// Two-terminal element placed in series between the two ports.
struct SeriesSection {
    ElementValue value;
};

/// Two-terminal element placed from the through path to ground.
struct ShuntSection {
    ElementValue value;
};

/// Ladder section. Four-terminal values (line, transformer, coupled pair) are
/// inserted with both minus terminals grounded.
using Section = std::variant<SeriesSection, ShuntSection, TransmissionLine, IdealTransformer, CoupledInductor>;

/// Impedance of a two-terminal element value (R, L, C) at `frequency`.
Complex element_impedance(const ElementValue& value, double frequency);

/// ABCD matrix of one section. Transmission line lengths are taken at `reference_frequency`.
Mat2 section_abcd(const Section& section, double frequency, double reference_frequency);

/// Cascade product of `chain`, expressed in `representation`.
TwoPortMatrix two_port_matrix(const std::vector<Section>& chain, double frequency, Representation representation,
                              double reference_frequency, double z_ref = 50.0);

TwoPortMatrix convert(const TwoPortMatrix& in, Representation to, double z_ref = 50.0);

Mat2 multiply(const Mat2& a, const Mat2& b);
Complex determinant(const Mat2& m);

}  // namespace doherty::net
