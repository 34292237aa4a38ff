#pragma once

#include "dohertycad/netkit/netlist.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace doherty::net {

/// Terminal currents of one element. For two-terminal elements `primary` flows
/// from nodes[0] to nodes[1] through the element. For four-terminal elements
/// `primary` enters nodes[0] and `secondary` enters nodes[2].
struct BranchCurrents {
    Complex primary{};
    Complex secondary{};
};

struct AnalysisResult {
    double frequency = 0.0;
    std::vector<Complex> node_voltages;   // indexed by NodeId, ground included
    std::vector<BranchCurrents> branch_currents;  // per element
    std::vector<double> dissipated;       // per element, W (average); sources report 0
    std::vector<Complex> port_voltages;   // per port, V(node) - V(reference)
    std::vector<Complex> port_currents;   // per port, injected current
    std::vector<double> port_injected;    // per port, W
    double source_injected = 0.0;         // W from current-source elements
    double delivered = 0.0;               // W absorbed by termination elements
    double kcl_residual = 0.0;            // max |KCL mismatch| / max |current|

    Complex voltage(NodeId node) const { return node_voltages[node]; }
    Complex port_impedance(std::size_t port) const { return port_voltages[port] / port_currents[port]; }
    double total_injected() const;
    /// Dissipation in non-termination elements.
    double total_loss() const;
};

/// Port excitation vector in netlist port order, built from name/current pairs.
/// Ports that are not named carry zero current (open).
std::vector<Complex> excitation(const Netlist& netlist, const std::map<std::string, Complex>& currents);

/// Modified nodal analysis at `frequency`. `port_currents` is in netlist port
/// order (missing trailing entries are zero).
AnalysisResult solve(const Netlist& netlist, double frequency, std::span<const Complex> port_currents);

/// Fraction of injected power that reaches the termination(s) across `load_port`.
double passive_efficiency(const Netlist& netlist, double frequency, std::span<const Complex> port_currents,
                          std::string_view load_port);
double passive_efficiency(const AnalysisResult& result, const Netlist& netlist, std::string_view load_port);

/// Impedance ratio (>= 1) across a two-port element such as an inverter line:
/// input-face impedance V1/I1 against output-face impedance V2/I_out, compared
/// on their real parts.
double impedance_transformation_ratio(const AnalysisResult& result, const Netlist& netlist,
                                      std::string_view element_name);

}  // namespace doherty::net
