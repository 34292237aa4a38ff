#include "dohertycad/netkit/touchstone.hpp"

#include "dohertycad/errors.hpp"
#include "dohertycad/netkit/solver.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace doherty::net {

namespace {

Netlist network_only(const Netlist& netlist) {
    Netlist out(netlist.reference_frequency());
    for (NodeId n = 1; n < netlist.node_count(); ++n) {
        out.add_node(netlist.node_name(n));
    }
    for (const auto& e : netlist.elements()) {
        if (!e.termination) {
            out.add_element(e);
        }
    }
    for (const auto& p : netlist.ports()) {
        out.add_port(p.name, p.node, p.reference);
    }
    return out;
}

std::string format_number(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, v);
    return buf;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

double parse_double(std::string_view token) {
    double v = 0.0;
    const auto* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw ArgumentError("touchstone: bad number '" + std::string(token) + "'");
    }
    return v;
}

/// Index into the row-major matrix for the k-th pair of a record.
std::size_t record_slot(std::size_t k, std::size_t ports) {
    if (ports == 2) {
        static constexpr std::size_t order[] = {0, 2, 1, 3};  // S11 S21 S12 S22
        return order[k];
    }
    return k;
}

}  // namespace

std::vector<double> linear_grid(double start, double stop, std::size_t points) {
    if (points == 0) {
        throw ArgumentError("grid needs at least one point");
    }
    std::vector<double> out(points);
    for (std::size_t i = 0; i < points; ++i) {
        out[i] = points == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    return out;
}

SParameterData s_parameters(const Netlist& netlist, const std::vector<std::string>& ports,
                            const std::vector<double>& frequencies, double z_ref) {
    if (ports.empty()) {
        throw ArgumentError("at least one port is required");
    }
    if (!(z_ref > 0.0)) {
        throw ArgumentError("reference impedance must be positive");
    }
    for (std::size_t i = 1; i < frequencies.size(); ++i) {
        if (!(frequencies[i] > frequencies[i - 1])) {
            throw ArgumentError("frequency grid must be strictly increasing");
        }
    }

    Netlist net = network_only(netlist);
    std::vector<std::size_t> index;
    for (std::size_t k = 0; k < ports.size(); ++k) {
        const std::size_t p = net.port_index(ports[k]);
        if (std::find(index.begin(), index.end(), p) != index.end()) {
            throw ArgumentError("port '" + ports[k] + "' listed twice");
        }
        index.push_back(p);
        const Port& port = net.ports()[p];
        net.add_resistor("__zref_" + port.name, port.node, port.reference, z_ref);
    }

    // Norton drive of port k with 1 A behind z_ref: a_k = sqrt(z)/2 and
    // b_j = (2 V_j - z delta_jk) / (2 sqrt(z)), so S_jk = 2 V_j / z - delta_jk.
    SParameterData out;
    out.ports = ports.size();
    out.z_ref = z_ref;
    out.frequencies = frequencies;
    out.data.reserve(frequencies.size());
    const std::size_t n = ports.size();
    for (double f : frequencies) {
        std::vector<Complex> s(n * n);
        for (std::size_t k = 0; k < n; ++k) {
            std::vector<Complex> drive(net.ports().size());
            drive[index[k]] = 1.0;
            const AnalysisResult r = solve(net, f, drive);
            for (std::size_t j = 0; j < n; ++j) {
                s[j * n + k] = 2.0 * r.port_voltages[index[j]] / z_ref - (j == k ? 1.0 : 0.0);
            }
        }
        out.data.push_back(std::move(s));
    }
    return out;
}

std::string write_touchstone(const SParameterData& data, int significant_digits) {
    if (data.ports < 1 || data.ports > 4) {
        throw UnsupportedError("touchstone export supports 1 to 4 ports, got " + std::to_string(data.ports));
    }
    const std::size_t n = data.ports;
    std::ostringstream os;
    char zbuf[32];
    std::snprintf(zbuf, sizeof zbuf, "%.12g", data.z_ref);
    os << "! " << n << "-port S-parameters\n";
    os << "# GHz S RI R " << zbuf << '\n';
    for (std::size_t f = 0; f < data.frequencies.size(); ++f) {
        os << format_number(data.frequencies[f] / 1e9, significant_digits);
        for (std::size_t k = 0; k < n * n; ++k) {
            if (n > 2 && k > 0 && k % n == 0) {
                os << '\n';
            }
            const Complex v = data.data[f][record_slot(k, n)];
            os << ' ' << format_number(v.real(), significant_digits) << ' '
               << format_number(v.imag(), significant_digits);
        }
        os << '\n';
    }
    return os.str();
}

SParameterData read_touchstone(std::string_view text, std::size_t ports) {
    if (ports < 1) {
        throw ArgumentError("touchstone: port count must be positive");
    }
    double unit = 1e9;
    std::string format = "ma";
    SParameterData out;
    out.ports = ports;
    out.z_ref = 50.0;

    std::vector<double> values;
    bool seen_option = false;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (auto bang = line.find('!'); bang != std::string::npos) {
            line.erase(bang);
        }
        std::istringstream tokens(line);
        std::string token;
        if (!(tokens >> token)) {
            continue;
        }
        if (token[0] == '#') {
            if (seen_option) {
                continue;  // only the first option line counts
            }
            seen_option = true;
            std::vector<std::string> opts;
            if (token.size() > 1) {
                opts.push_back(lower(token.substr(1)));
            }
            while (tokens >> token) {
                opts.push_back(lower(token));
            }
            for (std::size_t i = 0; i < opts.size(); ++i) {
                const std::string& o = opts[i];
                if (o == "hz") unit = 1.0;
                else if (o == "khz") unit = 1e3;
                else if (o == "mhz") unit = 1e6;
                else if (o == "ghz") unit = 1e9;
                else if (o == "s") {}
                else if (o == "y" || o == "z" || o == "h" || o == "g") {
                    throw UnsupportedError("touchstone: only S parameters are supported");
                } else if (o == "ri" || o == "ma" || o == "db") format = o;
                else if (o == "r") {
                    if (i + 1 >= opts.size()) {
                        throw ArgumentError("touchstone: 'R' without a value");
                    }
                    out.z_ref = parse_double(opts[++i]);
                } else {
                    throw ArgumentError("touchstone: unknown option '" + o + "'");
                }
            }
            continue;
        }
        do {
            values.push_back(parse_double(token));
        } while (tokens >> token);
    }

    const std::size_t n = ports;
    const std::size_t record = 1 + 2 * n * n;
    if (values.size() % record != 0) {
        throw ArgumentError("touchstone: data length does not match a " + std::to_string(n) + "-port file");
    }
    for (std::size_t r = 0; r < values.size() / record; ++r) {
        const double* v = values.data() + r * record;
        out.frequencies.push_back(v[0] * unit);
        std::vector<Complex> s(n * n);
        for (std::size_t k = 0; k < n * n; ++k) {
            const double x = v[1 + 2 * k];
            const double y = v[2 + 2 * k];
            Complex c;
            if (format == "ri") {
                c = {x, y};
            } else {
                const double mag = format == "ma" ? x : std::pow(10.0, x / 20.0);
                c = std::polar(mag, y * std::numbers::pi / 180.0);
            }
            s[record_slot(k, n)] = c;
        }
        out.data.push_back(std::move(s));
    }
    return out;
}

std::string export_touchstone(const Netlist& netlist, const std::vector<std::string>& ports,
                              const std::vector<double>& frequencies, double z_ref) {
    if (ports.empty() || ports.size() > 4) {
        throw UnsupportedError("touchstone export supports 1 to 4 ports, got " + std::to_string(ports.size()));
    }
    return write_touchstone(s_parameters(netlist, ports, frequencies, z_ref));
}

}  // namespace doherty::net
