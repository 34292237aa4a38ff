#pragma once

#include "dohertycad/netkit/element.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace doherty::net {

/// Named port: a current injected into `node` and returned through `reference`.
struct Port {
    std::string name;
    NodeId node = kGround;
    NodeId reference = kGround;
};

/// Multiport linear AC circuit. Node 0 is ground and always exists under the
/// name "0" (alias "gnd").
class Netlist {
public:
    explicit Netlist(double reference_frequency = 0.0);

    static constexpr NodeId ground() { return kGround; }

    /// Returns the id of `name`, creating the node when it does not exist.
    NodeId add_node(std::string_view name);
    NodeId node(std::string_view name) const;
    std::optional<NodeId> find_node(std::string_view name) const;
    const std::string& node_name(NodeId id) const;
    std::size_t node_count() const { return node_names_.size(); }

    Element& add_element(Element element);
    Element& add_resistor(std::string name, NodeId a, NodeId b, double resistance);
    Element& add_inductor(std::string name, NodeId a, NodeId b, double inductance, double q = kLossless);
    Element& add_capacitor(std::string name, NodeId a, NodeId b, double capacitance, double q = kLossless);
    Element& add_coupled_inductor(std::string name, NodeId p_plus, NodeId p_minus, NodeId s_plus,
                                  NodeId s_minus, const CoupledInductor& value);
    Element& add_ideal_transformer(std::string name, NodeId p_plus, NodeId p_minus, NodeId s_plus,
                                   NodeId s_minus, double turn_ratio);
    Element& add_transmission_line(std::string name, NodeId in_plus, NodeId in_minus, NodeId out_plus,
                                   NodeId out_minus, const TransmissionLine& value);
    Element& add_current_source(std::string name, NodeId from, NodeId to, Complex amplitude);

    const std::vector<Element>& elements() const { return elements_; }
    const Element& element(std::string_view name) const;
    std::optional<std::size_t> find_element(std::string_view name) const;
    Element& mutable_element(std::string_view name);

    void add_port(std::string name, NodeId node, NodeId reference = kGround);
    const std::vector<Port>& ports() const { return ports_; }
    std::size_t port_index(std::string_view name) const;
    const Port& port(std::string_view name) const { return ports_[port_index(name)]; }

    double reference_frequency() const { return reference_frequency_; }
    void set_reference_frequency(double f) { reference_frequency_ = f; }

    /// Checks element invariants, port nodes and that every node is reachable
    /// from ground. Floating nodes raise SingularSystemError naming the node.
    void validate() const;

private:
    double reference_frequency_;
    std::vector<std::string> node_names_;
    std::vector<Element> elements_;
    std::vector<Port> ports_;
};

}  // namespace doherty::net
