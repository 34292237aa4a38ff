#pragma once

#include "dohertycad/ideal/doherty.hpp"
#include "dohertycad/netkit/netlist.hpp"
#include "dohertycad/netkit/solver.hpp"
#include "dohertycad/synth/synth.hpp"

#include <cstddef>
#include <functional>
#include <string_view>
#include <utility>
#include <vector>

namespace doherty::eval {

using ideal::CurrentPoint;
using ideal::DohertyConfig;
using net::Complex;

/// Normalized drive grid. Port currents are i * current_scale * exp(j phase).
struct DriveProfile {
    std::vector<CurrentPoint> grid;  // ascending i_main
    double main_phase_deg = 0.0;
    double aux_phase_deg = 0.0;
    double current_scale = 1.0;  // A

    Complex main_current(std::size_t k) const;
    Complex aux_current(std::size_t k) const;
};

/// `points` samples of i_main spread uniformly from `max_pbo_db` of back-off
/// up to the peak, plus the auxiliary turn-on point.
std::vector<CurrentPoint> current_grid(double alpha, std::size_t points, double max_pbo_db = 12.0);

/// Grid with main phase 0 and auxiliary phase -offset_deg.
DriveProfile make_drive_profile(const DohertyConfig& cfg, double offset_deg, std::size_t points = 51,
                                double max_pbo_db = 12.0);

/// Transimpedance from one PA port to the "load" port. The other PA port is
/// loaded by `other_port_ohm` (its source resistance).
Complex transimpedance(const net::Netlist& netlist, double frequency, std::string_view from_port,
                       double other_port_ohm);

/// arg(T_aux) - arg(T_main) in degrees, wrapped to (-180, 180]. Each path is
/// evaluated with the opposite PA port loaded by its peak load-pull resistance.
double required_phase_offset(const net::Netlist& netlist, double frequency, double r_main_ohm, double r_aux_ohm);
double required_phase_offset(const net::Netlist& netlist, const DohertyConfig& cfg);

/// Load power with Norton sources (current plus shunt source resistance) at
/// both PA ports.
double norton_delivered_power(const net::Netlist& netlist, double frequency, Complex i_main, Complex i_aux,
                              double r_main_ohm, double r_aux_ohm);

struct LoadModulationPoint {
    CurrentPoint drive;
    Complex z_main{};
    /// Impedance while the auxiliary path conducts; admittance when i_aux = 0.
    Complex z_aux{};
    bool aux_is_admittance = false;
    double delivered = 0.0;  // W
    double passive_efficiency = 1.0;
};

struct LoadModulationSweep {
    double frequency = 0.0;
    std::vector<LoadModulationPoint> points;
};

LoadModulationSweep load_modulation(const net::Netlist& netlist, const DohertyConfig& cfg,
                                    const DriveProfile& profile);
LoadModulationSweep load_modulation(const net::Netlist& netlist, const DohertyConfig& cfg,
                                    const DriveProfile& profile, double frequency);

/// Ideal main-path load: R_opt / i_main while the auxiliary path conducts,
/// (1 + alpha)^2 R_opt / 2 below turn-on.
double target_main_resistance(const DohertyConfig& cfg, double i_main);
/// Ideal auxiliary-path load (infinite below turn-on).
double target_aux_resistance(const DohertyConfig& cfg, double i_main);

struct EfficiencyPoint {
    double pbo_db = 0.0;
    double efficiency = 0.0;
};

std::vector<EfficiencyPoint> passive_eff_vs_pbo(const net::Netlist& netlist, const DohertyConfig& cfg,
                                                const DriveProfile& profile);

struct PassiveComparison {
    std::vector<EfficiencyPoint> transformer;
    std::vector<EfficiencyPoint> two_line;
};

/// Transformer combiner against the two-line reference under one Q budget,
/// each driven with its own required phase offset.
PassiveComparison compare_passive_efficiency(const DohertyConfig& cfg, const synth::QBudget& q,
                                             const synth::TransformerFreeParams& params = {},
                                             std::size_t points = 51, double max_pbo_db = 12.0,
                                             synth::LineRealization two_line_realization =
                                                 synth::LineRealization::transmission_line);

enum class BandwidthMetric { passive_efficiency, load_match };

std::string_view to_string(BandwidthMetric metric);
BandwidthMetric parse_bandwidth_metric(std::string_view text);

struct SweepWindow {
    double span = 0.4;  // fraction of f0 on each side
    std::size_t points = 201;
};

struct BandwidthReport {
    BandwidthMetric metric = BandwidthMetric::passive_efficiency;
    double f0 = 0.0;
    double f_lo = 0.0;
    double f_hi = 0.0;
    double fraction = 0.0;  // (f_hi - f_lo) / f0
    std::vector<double> frequencies;
    std::vector<double> values;  // efficiency (fraction) or |Gamma| (dB)
};

std::vector<double> sweep_frequencies(double f0, const SweepWindow& window);

/// Widest contiguous band around f0 where margin(f) >= 0. Edges are linearly
/// interpolated on the margin. A failing center gives a zero-width report.
std::pair<double, double> contiguous_band(const std::vector<double>& frequencies, const std::vector<double>& margin,
                                          double f0);

/// Peak-drive sweep of the combiner with phases fixed at the f0 offset.
/// passive_efficiency: eta(f) >= eta(f0) - 1 dB. load_match: main-port
/// |Gamma| < -10 dB, Gamma = (Z - Z(f0)) / (Z + conj(Z(f0))).
BandwidthReport bandwidth_report(const net::Netlist& netlist, const DohertyConfig& cfg, BandwidthMetric metric,
                                 const SweepWindow& window = {});

/// Single-port match: port driven alone, |Gamma| against the f0 port
/// impedance as above, -10 dB criterion.
BandwidthReport load_match_bandwidth(const net::Netlist& netlist, std::string_view port, double f0,
                                     const SweepWindow& window = {});

/// Conduction-angle current cell. Phi = pi is class B, larger is class AB,
/// smaller is class C.
struct ActiveCellModel {
    double conduction_angle = 3.14159265358979323846;  // rad, quiescent
    double i_max = 1.0;   // A, peak drain current at full drive
    double v_dc = 1.0;    // V
    double v_knee = 0.0;  // V
    /// Input gating: the device sees max(0, (v - turn_on) / (1 - turn_on)).
    double turn_on_drive = 0.0;
};

struct CellCurrents {
    double i_dc = 0.0;
    Complex i_fund{};
    double conduction_angle = 0.0;  // rad, at this drive
};

CellCurrents cell_currents(const ActiveCellModel& cell, double drive);

/// Class-C cell whose conduction starts at `turn_on_drive`.
ActiveCellModel class_c_cell(double turn_on_drive, double i_max, double v_dc);

/// Ideal class-B main cell and gated class-B auxiliary cell that reproduce the
/// ideal Doherty current profile with V_dc = R_opt.
std::pair<ActiveCellModel, ActiveCellModel> ideal_doherty_cells(const DohertyConfig& cfg);

struct PASimPoint {
    double drive = 0.0;
    double pbo_db = 0.0;  // from the largest output power in the sweep
    Complex i_main{};
    Complex i_aux{};
    Complex v_main{};
    Complex v_aux{};
    Complex v_load{};
    double p_out = 0.0;       // W into the load termination
    double p_dc = 0.0;        // W
    double p_injected = 0.0;  // W at the PA ports
    double p_loss = 0.0;      // W in the combiner
    double efficiency = 0.0;  // drain
    double am_am_db = 0.0;    // gain relative to the lowest drive
    double am_pm_deg = 0.0;   // phase relative to the lowest drive
    bool overdrive = false;   // |V_port| above V_dc - V_knee
};

struct PASimResult {
    std::vector<PASimPoint> points;
};

/// Drives must be in (0, 1], ascending.
PASimResult simulate_pa(const ActiveCellModel& main_cell, const ActiveCellModel& aux_cell,
                        const net::Netlist& netlist, const std::vector<double>& drives, double frequency,
                        double main_phase_deg, double aux_phase_deg);

std::vector<double> drive_grid(std::size_t points, double min_drive, std::vector<double> breakpoints = {});

/// Piecewise-linear map over ascending x.
struct LevelMap {
    std::vector<double> x;
    std::vector<double> y;

    double at(double value) const;  // DomainError outside [x.front(), x.back()]
};

/// Drive-to-|V_load| and drive-to-phase maps of a PA sweep.
std::pair<LevelMap, LevelMap> level_maps(const PASimResult& result);

/// 64 symbols on the +-1, +-3, +-5, +-7 grid scaled to unit average power.
std::vector<Complex> qam64_constellation();

/// EVM in percent rms. The rms symbol input sits `backoff_db` below the input
/// where the AM-AM map first reaches its maximum.
double evm_64qam(const LevelMap& am_am, const LevelMap& am_pm_deg, double backoff_db);

}  // namespace doherty::eval
