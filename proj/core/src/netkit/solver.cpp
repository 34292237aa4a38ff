#include "dohertycad/netkit/solver.hpp"

#include "dohertycad/errors.hpp"
#include "dohertycad/netkit/twoport.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace doherty::net {

double AnalysisResult::total_injected() const {
    double total = source_injected;
    for (double p : port_injected) {
        total += p;
    }
    return total;
}

double AnalysisResult::total_loss() const { return total_injected() - delivered; }

std::vector<Complex> excitation(const Netlist& netlist, const std::map<std::string, Complex>& currents) {
    std::vector<Complex> out(netlist.ports().size());
    for (const auto& [name, current] : currents) {
        out[netlist.port_index(name)] = current;
    }
    return out;
}

namespace {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

constexpr double kNeperToDb = 8.685889638065035;  // 20 / ln(10)
constexpr double kRankThreshold = 1e-13;

/// Index bookkeeping: node voltages first (ground eliminated), then the
/// auxiliary branch currents of four-terminal elements.
struct Layout {
    std::size_t nodes = 0;
    std::vector<std::ptrdiff_t> aux_offset;  // per element, -1 when none
    std::size_t size = 0;

    std::ptrdiff_t v(NodeId n) const { return n == kGround ? -1 : static_cast<std::ptrdiff_t>(n - 1); }
};

Layout make_layout(const Netlist& netlist) {
    Layout layout;
    layout.nodes = netlist.node_count() - 1;
    layout.size = layout.nodes;
    layout.aux_offset.assign(netlist.elements().size(), -1);
    for (std::size_t i = 0; i < netlist.elements().size(); ++i) {
        switch (netlist.elements()[i].kind()) {
            case ElementKind::ideal_transformer:
                layout.aux_offset[i] = static_cast<std::ptrdiff_t>(layout.size);
                layout.size += 1;
                break;
            case ElementKind::coupled_inductor:
            case ElementKind::transmission_line:
                layout.aux_offset[i] = static_cast<std::ptrdiff_t>(layout.size);
                layout.size += 2;
                break;
            default:
                break;
        }
    }
    return layout;
}

/// Admittance of a two-terminal passive element including its loss model.
Complex two_terminal_admittance(const Element& e, double omega) {
    if (const auto* r = std::get_if<Resistor>(&e.value)) {
        return 1.0 / r->resistance;
    }
    if (const auto* l = std::get_if<Inductor>(&e.value)) {
        const double x = omega * l->inductance;
        const double r = std::isinf(l->q) ? 0.0 : x / l->q;
        return 1.0 / Complex(r, x);
    }
    if (const auto* c = std::get_if<Capacitor>(&e.value)) {
        const double b = omega * c->capacitance;
        const double g = std::isinf(c->q) ? 0.0 : b / c->q;
        return {g, b};
    }
    return {};
}

struct Stamper {
    Matrix& a;
    Vector& rhs;
    const Layout& layout;

    void add(std::ptrdiff_t r, std::ptrdiff_t c, Complex v) {
        if (r >= 0 && c >= 0) {
            a(r, c) += v;
        }
    }
    void inject(std::ptrdiff_t r, Complex v) {
        if (r >= 0) {
            rhs(r) += v;
        }
    }
    void admittance(NodeId n0, NodeId n1, Complex y) {
        const auto i = layout.v(n0);
        const auto j = layout.v(n1);
        add(i, i, y);
        add(j, j, y);
        add(i, j, -y);
        add(j, i, -y);
    }
    /// Branch current unknown `k` enters `plus` and leaves `minus`.
    void branch(NodeId plus, NodeId minus, std::ptrdiff_t k, Complex scale = 1.0) {
        add(layout.v(plus), k, scale);
        add(layout.v(minus), k, -scale);
    }
    /// Adds `scale * (V(plus) - V(minus))` to equation row `k`.
    void voltage_term(std::ptrdiff_t k, NodeId plus, NodeId minus, Complex scale) {
        add(k, layout.v(plus), scale);
        add(k, layout.v(minus), -scale);
    }
};

struct LineAbcd {
    Complex a, b, c, d;
    bool lossless;
};

LineAbcd line_abcd(const TransmissionLine& t, double frequency, double reference_frequency) {
    const double theta = t.electrical_length_deg * std::numbers::pi / 180.0 * frequency / reference_frequency;
    const double loss_np = t.atten_db_per_quarter_wave / kNeperToDb * theta / (std::numbers::pi / 2.0);
    const Complex gl(loss_np, theta);
    return {std::cosh(gl), t.z0 * std::sinh(gl), std::sinh(gl) / t.z0, std::cosh(gl), loss_np == 0.0};
}

std::string unknown_name(const Netlist& netlist, const Layout& layout, Eigen::Index index) {
    if (static_cast<std::size_t>(index) < layout.nodes) {
        return netlist.node_name(static_cast<NodeId>(index + 1));
    }
    for (std::size_t i = 0; i < layout.aux_offset.size(); ++i) {
        const auto off = layout.aux_offset[i];
        if (off < 0) {
            continue;
        }
        const auto width = netlist.elements()[i].kind() == ElementKind::ideal_transformer ? 1 : 2;
        if (index >= off && index < off + width) {
            return netlist.elements()[i].name;
        }
    }
    return "?";
}

}  // namespace

AnalysisResult solve(const Netlist& netlist, double frequency, std::span<const Complex> port_currents) {
    if (!(frequency > 0.0) || !std::isfinite(frequency)) {
        throw ArgumentError("analysis frequency must be positive");
    }
    if (port_currents.size() > netlist.ports().size()) {
        throw ArgumentError("more excitations than ports");
    }
    netlist.validate();

    const double omega = 2.0 * std::numbers::pi * frequency;
    const Layout layout = make_layout(netlist);
    const auto n = static_cast<Eigen::Index>(layout.size);
    Matrix a = Matrix::Zero(n, n);
    Vector rhs = Vector::Zero(n);
    Stamper s{a, rhs, layout};

    std::vector<LineAbcd> lines(netlist.elements().size());
    for (std::size_t i = 0; i < netlist.elements().size(); ++i) {
        const Element& e = netlist.elements()[i];
        const auto k = layout.aux_offset[i];
        switch (e.kind()) {
            case ElementKind::resistor:
            case ElementKind::inductor:
            case ElementKind::capacitor:
                s.admittance(e.nodes[0], e.nodes[1], two_terminal_admittance(e, omega));
                break;
            case ElementKind::current_source: {
                const Complex amp = std::get<CurrentSource>(e.value).amplitude;
                s.inject(layout.v(e.nodes[1]), amp);
                s.inject(layout.v(e.nodes[0]), -amp);
                break;
            }
            case ElementKind::ideal_transformer: {
                const double nt = std::get<IdealTransformer>(e.value).turn_ratio;
                s.branch(e.nodes[0], e.nodes[1], k, 1.0);
                s.branch(e.nodes[2], e.nodes[3], k, -1.0 / nt);
                s.voltage_term(k, e.nodes[2], e.nodes[3], 1.0);
                s.voltage_term(k, e.nodes[0], e.nodes[1], -nt);
                break;
            }
            case ElementKind::coupled_inductor: {
                const auto& m = std::get<CoupledInductor>(e.value);
                const double xp = omega * m.primary_inductance;
                const double xs = omega * m.secondary_inductance();
                const double rp = std::isinf(m.q) ? 0.0 : xp / m.q;
                const double rs = std::isinf(m.q) ? 0.0 : xs / m.q;
                const Complex zp(rp, xp);
                const Complex zs(rs, xs);
                const Complex zm(0.0, omega * m.mutual_inductance());
                s.branch(e.nodes[0], e.nodes[1], k);
                s.branch(e.nodes[2], e.nodes[3], k + 1);
                s.voltage_term(k, e.nodes[0], e.nodes[1], 1.0);
                s.add(k, k, -zp);
                s.add(k, k + 1, -zm);
                s.voltage_term(k + 1, e.nodes[2], e.nodes[3], 1.0);
                s.add(k + 1, k, -zm);
                s.add(k + 1, k + 1, -zs);
                break;
            }
            case ElementKind::transmission_line: {
                const auto abcd =
                    line_abcd(std::get<TransmissionLine>(e.value), frequency, netlist.reference_frequency());
                lines[i] = abcd;
                s.branch(e.nodes[0], e.nodes[1], k);
                s.branch(e.nodes[2], e.nodes[3], k + 1);
                // V1 = A V2 + B (-i2);  i1 = C V2 + D (-i2)
                s.voltage_term(k, e.nodes[0], e.nodes[1], 1.0);
                s.voltage_term(k, e.nodes[2], e.nodes[3], -abcd.a);
                s.add(k, k + 1, abcd.b);
                s.add(k + 1, k, 1.0);
                s.voltage_term(k + 1, e.nodes[2], e.nodes[3], -abcd.c);
                s.add(k + 1, k + 1, abcd.d);
                break;
            }
        }
    }

    std::vector<Complex> drive(netlist.ports().size());
    std::copy(port_currents.begin(), port_currents.end(), drive.begin());
    for (std::size_t p = 0; p < drive.size(); ++p) {
        const Port& port = netlist.ports()[p];
        s.inject(layout.v(port.node), drive[p]);
        s.inject(layout.v(port.reference), -drive[p]);
    }

    // Row equilibration keeps admittance rows (~1e-2 S) and impedance rows
    // (~1e2 ohm) comparable before the rank decision.
    for (Eigen::Index r = 0; r < n; ++r) {
        const double scale = a.row(r).cwiseAbs().maxCoeff();
        if (scale > 0.0) {
            a.row(r) /= scale;
            rhs(r) /= scale;
        }
    }

    Vector x = Vector::Zero(n);
    if (n > 0) {
        Eigen::FullPivLU<Matrix> lu(a);
        lu.setThreshold(kRankThreshold);
        if (!lu.isInvertible()) {
            const Matrix kernel = lu.kernel();
            Eigen::Index worst = 0;
            kernel.col(0).cwiseAbs().maxCoeff(&worst);
            const std::string who = unknown_name(netlist, layout, worst);
            throw SingularSystemError("singular nodal system at " + std::to_string(frequency) +
                                          " Hz; unknown of '" + who + "' is undetermined",
                                      who);
        }
        x = lu.solve(rhs);
    }

    AnalysisResult result;
    result.frequency = frequency;
    result.node_voltages.assign(netlist.node_count(), Complex{});
    for (NodeId node = 1; node < netlist.node_count(); ++node) {
        result.node_voltages[node] = x(static_cast<Eigen::Index>(node - 1));
    }
    auto vdiff = [&](NodeId p, NodeId m) { return result.node_voltages[p] - result.node_voltages[m]; };

    const auto& elements = netlist.elements();
    result.branch_currents.resize(elements.size());
    result.dissipated.assign(elements.size(), 0.0);
    std::vector<Complex> leaving(netlist.node_count());
    double current_scale = 0.0;

    for (std::size_t i = 0; i < elements.size(); ++i) {
        const Element& e = elements[i];
        const auto k = layout.aux_offset[i];
        BranchCurrents& bc = result.branch_currents[i];
        double& loss = result.dissipated[i];
        switch (e.kind()) {
            case ElementKind::resistor: {
                const Complex v = vdiff(e.nodes[0], e.nodes[1]);
                bc.primary = v / std::get<Resistor>(e.value).resistance;
                loss = 0.5 * std::norm(v) / std::get<Resistor>(e.value).resistance;
                break;
            }
            case ElementKind::inductor: {
                const Complex v = vdiff(e.nodes[0], e.nodes[1]);
                bc.primary = v * two_terminal_admittance(e, omega);
                const auto& l = std::get<Inductor>(e.value);
                loss = std::isinf(l.q) ? 0.0 : 0.5 * std::norm(bc.primary) * omega * l.inductance / l.q;
                break;
            }
            case ElementKind::capacitor: {
                const Complex v = vdiff(e.nodes[0], e.nodes[1]);
                bc.primary = v * two_terminal_admittance(e, omega);
                const auto& c = std::get<Capacitor>(e.value);
                loss = std::isinf(c.q) ? 0.0 : 0.5 * std::norm(v) * omega * c.capacitance / c.q;
                break;
            }
            case ElementKind::current_source: {
                const Complex amp = std::get<CurrentSource>(e.value).amplitude;
                bc.primary = amp;
                // Source pushes `amp` out of nodes[1]; power it delivers:
                result.source_injected += 0.5 * std::real(vdiff(e.nodes[1], e.nodes[0]) * std::conj(amp));
                break;
            }
            case ElementKind::ideal_transformer:
                bc.primary = x(k);
                bc.secondary = -x(k) / std::get<IdealTransformer>(e.value).turn_ratio;
                break;
            case ElementKind::coupled_inductor: {
                bc.primary = x(k);
                bc.secondary = x(k + 1);
                const auto& m = std::get<CoupledInductor>(e.value);
                if (!std::isinf(m.q)) {
                    loss = 0.5 * omega / m.q *
                           (std::norm(bc.primary) * m.primary_inductance +
                            std::norm(bc.secondary) * m.secondary_inductance());
                }
                break;
            }
            case ElementKind::transmission_line:
                bc.primary = x(k);
                bc.secondary = x(k + 1);
                if (!lines[i].lossless) {
                    loss = 0.5 * std::real(vdiff(e.nodes[0], e.nodes[1]) * std::conj(bc.primary) +
                                           vdiff(e.nodes[2], e.nodes[3]) * std::conj(bc.secondary));
                }
                break;
        }

        if (e.kind() == ElementKind::current_source) {
            // Injection handled below with the ports.
            leaving[e.nodes[1]] -= bc.primary;
            leaving[e.nodes[0]] += bc.primary;
        } else {
            leaving[e.nodes[0]] += bc.primary;
            leaving[e.nodes[1]] -= bc.primary;
            if (e.is_four_terminal()) {
                leaving[e.nodes[2]] += bc.secondary;
                leaving[e.nodes[3]] -= bc.secondary;
            }
        }
        current_scale = std::max({current_scale, std::abs(bc.primary), std::abs(bc.secondary)});
        if (e.termination) {
            result.delivered += loss;
        }
    }

    result.port_voltages.resize(drive.size());
    result.port_currents = drive;
    result.port_injected.resize(drive.size());
    for (std::size_t p = 0; p < drive.size(); ++p) {
        const Port& port = netlist.ports()[p];
        result.port_voltages[p] = vdiff(port.node, port.reference);
        result.port_injected[p] = 0.5 * std::real(result.port_voltages[p] * std::conj(drive[p]));
        leaving[port.node] -= drive[p];
        leaving[port.reference] += drive[p];
        current_scale = std::max(current_scale, std::abs(drive[p]));
    }

    double worst = 0.0;
    for (NodeId node = 1; node < netlist.node_count(); ++node) {
        worst = std::max(worst, std::abs(leaving[node]));
    }
    result.kcl_residual = current_scale > 0.0 ? worst / current_scale : worst;
    return result;
}

double passive_efficiency(const AnalysisResult& result, const Netlist& netlist, std::string_view load_port) {
    const Port& port = netlist.port(load_port);
    double delivered = 0.0;
    bool terminated = false;
    for (std::size_t i = 0; i < netlist.elements().size(); ++i) {
        const Element& e = netlist.elements()[i];
        if (!e.termination) {
            continue;
        }
        const bool across = (e.nodes[0] == port.node && e.nodes[1] == port.reference) ||
                            (e.nodes[1] == port.node && e.nodes[0] == port.reference);
        if (across) {
            delivered += result.dissipated[i];
            terminated = true;
        }
    }
    if (!terminated) {
        throw ArgumentError("load port '" + std::string(load_port) + "' has no resistive termination");
    }
    const double injected = result.total_injected();
    if (!(std::abs(injected) > 1e-300)) {
        throw DomainError("passive efficiency undefined: no power injected");
    }
    return delivered / injected;
}

double passive_efficiency(const Netlist& netlist, double frequency, std::span<const Complex> port_currents,
                          std::string_view load_port) {
    return passive_efficiency(solve(netlist, frequency, port_currents), netlist, load_port);
}

double impedance_transformation_ratio(const AnalysisResult& result, const Netlist& netlist,
                                      std::string_view element_name) {
    const auto index = netlist.find_element(element_name);
    if (!index) {
        throw ArgumentError("unknown element '" + std::string(element_name) + "'");
    }
    const Element& e = netlist.elements()[*index];
    if (!e.is_four_terminal()) {
        throw ArgumentError("element '" + e.name + "' is not a two-port");
    }
    const BranchCurrents& bc = result.branch_currents[*index];
    const Complex v1 = result.voltage(e.nodes[0]) - result.voltage(e.nodes[1]);
    const Complex v2 = result.voltage(e.nodes[2]) - result.voltage(e.nodes[3]);
    const double r_in = std::real(v1 / bc.primary);
    const double r_out = std::real(v2 / -bc.secondary);
    if (!(r_in > 0.0) || !(r_out > 0.0)) {
        throw DomainError("inverter faces are not resistive; ITR undefined");
    }
    return std::max(r_in / r_out, r_out / r_in);
}

}  // namespace doherty::net
