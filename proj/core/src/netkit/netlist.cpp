#include "dohertycad/netkit/netlist.hpp"

#include "dohertycad/errors.hpp"

#include <numeric>
#include <unordered_set>

namespace doherty::net {

Netlist::Netlist(double reference_frequency) : reference_frequency_(reference_frequency), node_names_{"0"} {}

NodeId Netlist::add_node(std::string_view name) {
    if (auto id = find_node(name)) {
        return *id;
    }
    if (name.empty()) {
        throw ArgumentError("node name must not be empty");
    }
    node_names_.emplace_back(name);
    return node_names_.size() - 1;
}

std::optional<NodeId> Netlist::find_node(std::string_view name) const {
    if (name == "gnd" || name == "GND") {
        return kGround;
    }
    for (NodeId i = 0; i < node_names_.size(); ++i) {
        if (node_names_[i] == name) {
            return i;
        }
    }
    return std::nullopt;
}

NodeId Netlist::node(std::string_view name) const {
    if (auto id = find_node(name)) {
        return *id;
    }
    throw ArgumentError("unknown node '" + std::string(name) + "'");
}

const std::string& Netlist::node_name(NodeId id) const {
    if (id >= node_names_.size()) {
        throw ArgumentError("node id out of range");
    }
    return node_names_[id];
}

Element& Netlist::add_element(Element element) {
    if (find_element(element.name)) {
        throw ArgumentError("duplicate element name '" + element.name + "'");
    }
    for (NodeId n : element.nodes) {
        if (n >= node_names_.size()) {
            throw ArgumentError("element '" + element.name + "' references an unknown node");
        }
    }
    validate_element(element);
    elements_.push_back(std::move(element));
    return elements_.back();
}

Element& Netlist::add_resistor(std::string name, NodeId a, NodeId b, double resistance) {
    return add_element({std::move(name), {a, b}, Resistor{resistance}});
}

Element& Netlist::add_inductor(std::string name, NodeId a, NodeId b, double inductance, double q) {
    return add_element({std::move(name), {a, b}, Inductor{inductance, q}});
}

Element& Netlist::add_capacitor(std::string name, NodeId a, NodeId b, double capacitance, double q) {
    return add_element({std::move(name), {a, b}, Capacitor{capacitance, q}});
}

Element& Netlist::add_coupled_inductor(std::string name, NodeId p_plus, NodeId p_minus, NodeId s_plus,
                                       NodeId s_minus, const CoupledInductor& value) {
    return add_element({std::move(name), {p_plus, p_minus, s_plus, s_minus}, value});
}

Element& Netlist::add_ideal_transformer(std::string name, NodeId p_plus, NodeId p_minus, NodeId s_plus,
                                        NodeId s_minus, double turn_ratio) {
    return add_element({std::move(name), {p_plus, p_minus, s_plus, s_minus}, IdealTransformer{turn_ratio}});
}

Element& Netlist::add_transmission_line(std::string name, NodeId in_plus, NodeId in_minus, NodeId out_plus,
                                        NodeId out_minus, const TransmissionLine& value) {
    return add_element({std::move(name), {in_plus, in_minus, out_plus, out_minus}, value});
}

Element& Netlist::add_current_source(std::string name, NodeId from, NodeId to, Complex amplitude) {
    return add_element({std::move(name), {from, to}, CurrentSource{amplitude}});
}

std::optional<std::size_t> Netlist::find_element(std::string_view name) const {
    for (std::size_t i = 0; i < elements_.size(); ++i) {
        if (elements_[i].name == name) {
            return i;
        }
    }
    return std::nullopt;
}

const Element& Netlist::element(std::string_view name) const {
    if (auto i = find_element(name)) {
        return elements_[*i];
    }
    throw ArgumentError("unknown element '" + std::string(name) + "'");
}

Element& Netlist::mutable_element(std::string_view name) {
    if (auto i = find_element(name)) {
        return elements_[*i];
    }
    throw ArgumentError("unknown element '" + std::string(name) + "'");
}

void Netlist::add_port(std::string name, NodeId node, NodeId reference) {
    if (name.empty()) {
        throw ArgumentError("port name must not be empty");
    }
    for (const auto& p : ports_) {
        if (p.name == name) {
            throw ArgumentError("duplicate port '" + name + "'");
        }
    }
    if (node >= node_names_.size() || reference >= node_names_.size()) {
        throw ArgumentError("port '" + name + "' references an unknown node");
    }
    if (node == reference) {
        throw ArgumentError("port '" + name + "' is shorted (node equals reference)");
    }
    ports_.push_back({std::move(name), node, reference});
}

std::size_t Netlist::port_index(std::string_view name) const {
    for (std::size_t i = 0; i < ports_.size(); ++i) {
        if (ports_[i].name == name) {
            return i;
        }
    }
    throw ArgumentError("unknown port '" + std::string(name) + "'");
}

void Netlist::validate() const {
    for (const auto& e : elements_) {
        validate_element(e);
        if (e.kind() == ElementKind::transmission_line && !(reference_frequency_ > 0.0)) {
            throw ArgumentError("netlist with transmission lines needs a positive reference frequency");
        }
    }

    // Union-find over conducting element paths. Current sources do not fix any
    // potential, so they do not connect their nodes.
    std::vector<NodeId> parent(node_names_.size());
    std::iota(parent.begin(), parent.end(), NodeId{0});
    auto find = [&](NodeId x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    auto unite = [&](NodeId a, NodeId b) { parent[find(a)] = find(b); };

    for (const auto& e : elements_) {
        if (e.kind() == ElementKind::current_source) {
            continue;
        }
        unite(e.nodes[0], e.nodes[1]);
        if (e.is_four_terminal()) {
            unite(e.nodes[2], e.nodes[3]);
        }
    }
    for (NodeId n = 1; n < node_names_.size(); ++n) {
        if (find(n) != find(kGround)) {
            throw SingularSystemError("node '" + node_names_[n] + "' is not connected to ground", node_names_[n]);
        }
    }
}

}  // namespace doherty::net
