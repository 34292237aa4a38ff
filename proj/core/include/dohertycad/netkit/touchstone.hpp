#pragma once

#include "dohertycad/netkit/netlist.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace doherty::net {

/// Multiport S-parameter data. `data[f]` holds the row-major N x N matrix at
/// `frequencies[f]`.
struct SParameterData {
    std::size_t ports = 0;
    double z_ref = 50.0;
    std::vector<double> frequencies;  // Hz
    std::vector<std::vector<Complex>> data;

    Complex at(std::size_t f, std::size_t row, std::size_t col) const { return data[f][row * ports + col]; }
};

/// S-parameters of the network seen at `ports`, each port terminated in z_ref.
/// Termination elements of the netlist are removed first.
SParameterData s_parameters(const Netlist& netlist, const std::vector<std::string>& ports,
                            const std::vector<double>& frequencies, double z_ref = 50.0);

/// Touchstone v1 text, `# GHz S RI R <z_ref>`. 1 to 4 ports.
std::string write_touchstone(const SParameterData& data, int significant_digits = 12);

/// Parses Touchstone v1 (S parameters; RI, MA or DB; Hz/kHz/MHz/GHz). The port
/// count must be supplied because v1 files do not carry it.
SParameterData read_touchstone(std::string_view text, std::size_t ports);

/// Convenience wrapper: s_parameters followed by write_touchstone.
std::string export_touchstone(const Netlist& netlist, const std::vector<std::string>& ports,
                              const std::vector<double>& frequencies, double z_ref = 50.0);

/// Evenly spaced grid of `points` frequencies between start and stop inclusive.
std::vector<double> linear_grid(double start, double stop, std::size_t points);

}  // namespace doherty::net
