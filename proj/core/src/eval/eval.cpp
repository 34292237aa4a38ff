#include "dohertycad/eval/eval.hpp"

#include "dohertycad/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace doherty::eval {

namespace {

constexpr double kPi = std::numbers::pi;

double deg2rad(double d) { return d * kPi / 180.0; }
double rad2deg(double r) { return r * 180.0 / kPi; }

double wrap_deg(double d) {
    double w = std::remainder(d, 360.0);
    if (w <= -180.0) {
        w += 360.0;
    }
    return w;
}

double peak_aux_for(const DohertyConfig& cfg) { return cfg.aux_peak_current(); }

std::string other_pa_port(std::string_view port) {
    if (port == "main") {
        return "aux";
    }
    if (port == "aux") {
        return "main";
    }
    throw ArgumentError("PA port must be \"main\" or \"aux\", got \"" + std::string(port) + "\"");
}

void add_source_resistance(net::Netlist& netlist, std::string_view port, double ohm) {
    if (!(ohm > 0.0)) {
        throw ArgumentError("source resistance must be positive");
    }
    const auto& p = netlist.port(port);
    netlist.add_resistor("Rsrc_" + std::string(port), p.node, p.reference, ohm);
}

net::AnalysisResult solve_pa(const net::Netlist& netlist, double frequency, Complex i_main, Complex i_aux) {
    const auto currents = net::excitation(netlist, {{"main", i_main}, {"aux", i_aux}});
    return net::solve(netlist, frequency, currents);
}

double sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return s;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = a;
        return out;
    }
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
    }
    out.back() = b;
    return out;
}

void sort_unique(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end(),
                        [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), 1.0); }),
            v.end());
}

double gamma_db(Complex z, Complex z_target) {
    const Complex g = (z - z_target) / (z + std::conj(z_target));
    return 20.0 * std::log10(std::max(std::abs(g), 1e-15));
}

}  // namespace

Complex DriveProfile::main_current(std::size_t k) const {
    return grid.at(k).i_main * current_scale * std::polar(1.0, deg2rad(main_phase_deg));
}

Complex DriveProfile::aux_current(std::size_t k) const {
    return grid.at(k).i_aux * current_scale * std::polar(1.0, deg2rad(aux_phase_deg));
}

std::vector<CurrentPoint> current_grid(double alpha, std::size_t points, double max_pbo_db) {
    if (points < 2) {
        throw ArgumentError("a drive grid needs at least two points");
    }
    if (!(max_pbo_db > 0.0)) {
        throw ArgumentError("maximum back-off must be positive");
    }
    const double hi = 2.0 / (1.0 + alpha);
    const double lo = ideal::main_current_at_pbo(alpha, max_pbo_db);
    auto currents = linspace(lo, hi, points);
    const double turn_on = 2.0 / ((1.0 + alpha) * (1.0 + alpha));
    if (turn_on > lo && turn_on < hi) {
        currents.push_back(turn_on);
    }
    sort_unique(currents);
    std::vector<CurrentPoint> grid;
    grid.reserve(currents.size());
    for (double i : currents) {
        grid.push_back(ideal::current_point(alpha, i));
    }
    return grid;
}

DriveProfile make_drive_profile(const DohertyConfig& cfg, double offset_deg, std::size_t points, double max_pbo_db) {
    cfg.validate();
    DriveProfile p;
    p.grid = current_grid(cfg.alpha, points, max_pbo_db);
    p.main_phase_deg = 0.0;
    p.aux_phase_deg = -offset_deg;
    return p;
}

Complex transimpedance(const net::Netlist& netlist, double frequency, std::string_view from_port,
                       double other_port_ohm) {
    net::Netlist loaded = netlist;
    add_source_resistance(loaded, other_pa_port(from_port), other_port_ohm);
    const auto currents = net::excitation(loaded, {{std::string(from_port), Complex{1.0, 0.0}}});
    const auto result = net::solve(loaded, frequency, currents);
    return result.port_voltages[loaded.port_index("load")];
}

double required_phase_offset(const net::Netlist& netlist, double frequency, double r_main_ohm, double r_aux_ohm) {
    const Complex t_main = transimpedance(netlist, frequency, "main", r_aux_ohm);
    const Complex t_aux = transimpedance(netlist, frequency, "aux", r_main_ohm);
    if (std::abs(t_main) < 1e-15 || std::abs(t_aux) < 1e-15) {
        throw DomainError("degenerate transfer to the load port");
    }
    return wrap_deg(rad2deg(std::arg(t_aux / t_main)));
}

double required_phase_offset(const net::Netlist& netlist, const DohertyConfig& cfg) {
    cfg.validate();
    return required_phase_offset(netlist, cfg.f0, cfg.main_peak_load(), cfg.aux_peak_load());
}

double norton_delivered_power(const net::Netlist& netlist, double frequency, Complex i_main, Complex i_aux,
                              double r_main_ohm, double r_aux_ohm) {
    net::Netlist loaded = netlist;
    add_source_resistance(loaded, "main", r_main_ohm);
    add_source_resistance(loaded, "aux", r_aux_ohm);
    return solve_pa(loaded, frequency, i_main, i_aux).delivered;
}

LoadModulationSweep load_modulation(const net::Netlist& netlist, const DohertyConfig& cfg,
                                    const DriveProfile& profile) {
    return load_modulation(netlist, cfg, profile, cfg.f0);
}

LoadModulationSweep load_modulation(const net::Netlist& netlist, const DohertyConfig& cfg,
                                    const DriveProfile& profile, double frequency) {
    cfg.validate();
    const std::size_t main_idx = netlist.port_index("main");
    const std::size_t aux_idx = netlist.port_index("aux");
    LoadModulationSweep sweep;
    sweep.frequency = frequency;
    sweep.points.reserve(profile.grid.size());
    for (std::size_t k = 0; k < profile.grid.size(); ++k) {
        const Complex im = profile.main_current(k);
        const Complex ia = profile.aux_current(k);
        const auto r = solve_pa(netlist, frequency, im, ia);
        LoadModulationPoint pt;
        pt.drive = profile.grid[k];
        pt.z_main = r.port_voltages[main_idx] / im;
        if (profile.grid[k].i_aux == 0.0) {
            pt.z_aux = ia / r.port_voltages[aux_idx];
            pt.aux_is_admittance = true;
        } else {
            pt.z_aux = r.port_voltages[aux_idx] / ia;
        }
        pt.delivered = r.delivered;
        const double injected = sum(r.port_injected);
        if (!(injected > 0.0)) {
            throw DomainError("no power injected at drive point " + std::to_string(k));
        }
        pt.passive_efficiency = r.delivered / injected;
        sweep.points.push_back(pt);
    }
    return sweep;
}

double target_main_resistance(const DohertyConfig& cfg, double i_main) {
    cfg.validate();
    if (!(i_main > 0.0)) {
        throw ArgumentError("i_main must be positive");
    }
    if (i_main < cfg.turn_on_current()) {
        return (1.0 + cfg.alpha) * (1.0 + cfg.alpha) * cfg.r_opt / 2.0;
    }
    return cfg.r_opt / i_main;
}

double target_aux_resistance(const DohertyConfig& cfg, double i_main) {
    const double i_aux = ideal::aux_current(cfg.alpha, i_main);
    if (i_aux == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return (1.0 + cfg.alpha) * cfg.r_opt * i_main / (2.0 * i_aux);
}

std::vector<EfficiencyPoint> passive_eff_vs_pbo(const net::Netlist& netlist, const DohertyConfig& cfg,
                                                const DriveProfile& profile) {
    const auto sweep = load_modulation(netlist, cfg, profile);
    std::vector<EfficiencyPoint> curve;
    curve.reserve(sweep.points.size());
    for (const auto& p : sweep.points) {
        curve.push_back({p.drive.pbo_db, p.passive_efficiency});
    }
    return curve;
}

PassiveComparison compare_passive_efficiency(const DohertyConfig& cfg, const synth::QBudget& q,
                                             const synth::TransformerFreeParams& params, std::size_t points,
                                             double max_pbo_db, synth::LineRealization two_line_realization) {
    PassiveComparison out;
    const auto tf = synth::synth_transformer_combiner(cfg, params);
    const auto tf_net = synth::to_netlist(tf, cfg, q);
    out.transformer = passive_eff_vs_pbo(
        tf_net, cfg, make_drive_profile(cfg, required_phase_offset(tf_net, cfg), points, max_pbo_db));

    const auto tl = synth::synth_two_line(cfg);
    const auto tl_net = synth::to_netlist(tl, cfg, q, two_line_realization);
    out.two_line = passive_eff_vs_pbo(
        tl_net, cfg, make_drive_profile(cfg, required_phase_offset(tl_net, cfg), points, max_pbo_db));
    return out;
}

std::string_view to_string(BandwidthMetric metric) {
    return metric == BandwidthMetric::passive_efficiency ? "passive-efficiency" : "load-match";
}

BandwidthMetric parse_bandwidth_metric(std::string_view text) {
    std::string s(text);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "passive-efficiency") {
        return BandwidthMetric::passive_efficiency;
    }
    if (s == "load-match") {
        return BandwidthMetric::load_match;
    }
    throw ArgumentError("unknown bandwidth metric \"" + std::string(text) + "\"");
}

std::vector<double> sweep_frequencies(double f0, const SweepWindow& window) {
    if (!(f0 > 0.0)) {
        throw ArgumentError("center frequency must be positive");
    }
    if (!(window.span > 0.0 && window.span < 1.0) || window.points < 3) {
        throw ArgumentError("sweep span must lie in (0, 1) with at least 3 points");
    }
    auto f = linspace(f0 * (1.0 - window.span), f0 * (1.0 + window.span), window.points);
    if (window.points % 2 == 1) {
        f[window.points / 2] = f0;
    }
    return f;
}

std::pair<double, double> contiguous_band(const std::vector<double>& f, const std::vector<double>& margin,
                                          double f0) {
    if (f.size() != margin.size() || f.empty()) {
        throw ArgumentError("frequency and margin vectors must match");
    }
    const auto it = std::min_element(f.begin(), f.end(),
                                     [f0](double a, double b) { return std::abs(a - f0) < std::abs(b - f0); });
    const std::size_t c = static_cast<std::size_t>(it - f.begin());
    if (!(margin[c] >= 0.0)) {
        return {f0, f0};
    }
    auto edge = [&](std::size_t inside, std::size_t outside) {
        const double m0 = margin[inside];
        const double m1 = margin[outside];
        return f[inside] + (f[outside] - f[inside]) * m0 / (m0 - m1);
    };
    std::size_t hi = c;
    while (hi + 1 < f.size() && margin[hi + 1] >= 0.0) {
        ++hi;
    }
    std::size_t lo = c;
    while (lo > 0 && margin[lo - 1] >= 0.0) {
        --lo;
    }
    const double f_hi = hi + 1 < f.size() ? edge(hi, hi + 1) : f.back();
    const double f_lo = lo > 0 ? edge(lo, lo - 1) : f.front();
    return {f_lo, f_hi};
}

namespace {

BandwidthReport finish(BandwidthReport report, const std::vector<double>& margin) {
    const auto [lo, hi] = contiguous_band(report.frequencies, margin, report.f0);
    report.f_lo = lo;
    report.f_hi = hi;
    report.fraction = (hi - lo) / report.f0;
    return report;
}

}  // namespace

BandwidthReport bandwidth_report(const net::Netlist& netlist, const DohertyConfig& cfg, BandwidthMetric metric,
                                 const SweepWindow& window) {
    cfg.validate();
    const double offset = required_phase_offset(netlist, cfg);
    const Complex im{cfg.main_peak_current(), 0.0};
    const Complex ia = std::polar(peak_aux_for(cfg), deg2rad(-offset));
    const std::size_t main_idx = netlist.port_index("main");

    BandwidthReport report;
    report.metric = metric;
    report.f0 = cfg.f0;
    report.frequencies = sweep_frequencies(cfg.f0, window);

    const auto center = solve_pa(netlist, cfg.f0, im, ia);
    const double eta0 = center.delivered / sum(center.port_injected);
    const Complex z0 = center.port_voltages[main_idx] / im;

    std::vector<double> margin;
    for (double f : report.frequencies) {
        const auto r = solve_pa(netlist, f, im, ia);
        if (metric == BandwidthMetric::passive_efficiency) {
            const double eta = r.delivered / sum(r.port_injected);
            report.values.push_back(eta);
            margin.push_back(eta - eta0 * std::pow(10.0, -0.1));
        } else {
            const double g = gamma_db(r.port_voltages[main_idx] / im, z0);
            report.values.push_back(g);
            margin.push_back(-10.0 - g);
        }
    }
    return finish(std::move(report), margin);
}

BandwidthReport load_match_bandwidth(const net::Netlist& netlist, std::string_view port, double f0,
                                     const SweepWindow& window) {
    const std::size_t idx = netlist.port_index(port);
    const auto currents = net::excitation(netlist, {{std::string(port), Complex{1.0, 0.0}}});
    const Complex z0 = net::solve(netlist, f0, currents).port_voltages[idx];

    BandwidthReport report;
    report.metric = BandwidthMetric::load_match;
    report.f0 = f0;
    report.frequencies = sweep_frequencies(f0, window);
    std::vector<double> margin;
    for (double f : report.frequencies) {
        const double g = gamma_db(net::solve(netlist, f, currents).port_voltages[idx], z0);
        report.values.push_back(g);
        margin.push_back(-10.0 - g);
    }
    return finish(std::move(report), margin);
}

CellCurrents cell_currents(const ActiveCellModel& cell, double drive) {
    if (!(drive >= 0.0 && drive <= 1.0)) {
        throw ArgumentError("normalized drive must lie in [0, 1]");
    }
    if (!(cell.conduction_angle > 0.0 && cell.conduction_angle <= 2.0 * kPi)) {
        throw ArgumentError("conduction angle must lie in (0, 2 pi]");
    }
    if (!(cell.i_max > 0.0)) {
        throw ArgumentError("cell I_max must be positive");
    }
    if (!(cell.turn_on_drive >= 0.0 && cell.turn_on_drive < 1.0)) {
        throw ArgumentError("turn-on drive must lie in [0, 1)");
    }
    const double t = cell.turn_on_drive;
    const double v = t > 0.0 ? std::max(0.0, (drive - t) / (1.0 - t)) : drive;

    const double c = std::cos(cell.conduction_angle / 2.0);
    const double ip1 = cell.i_max / (1.0 - c);
    const double iq = -ip1 * c;
    const double ip = v * ip1;

    CellCurrents out;
    if (ip == 0.0) {
        out.i_dc = std::max(0.0, iq);
        out.conduction_angle = iq > 0.0 ? 2.0 * kPi : 0.0;
        return out;
    }
    const double theta = std::acos(std::clamp(c / v, -1.0, 1.0));
    const double s = std::sin(theta);
    out.i_dc = (iq * theta + ip * s) / kPi;
    out.i_fund = Complex{(2.0 * iq * s + ip * (theta + s * std::cos(theta))) / kPi, 0.0};
    out.conduction_angle = 2.0 * theta;
    return out;
}

ActiveCellModel class_c_cell(double turn_on_drive, double i_max, double v_dc) {
    if (!(turn_on_drive > 0.0 && turn_on_drive < 1.0)) {
        throw ArgumentError("class-C turn-on drive must lie in (0, 1)");
    }
    ActiveCellModel cell;
    cell.conduction_angle = 2.0 * std::acos(turn_on_drive);
    cell.i_max = i_max;
    cell.v_dc = v_dc;
    return cell;
}

std::pair<ActiveCellModel, ActiveCellModel> ideal_doherty_cells(const DohertyConfig& cfg) {
    cfg.validate();
    ActiveCellModel main;
    main.i_max = 4.0 / (1.0 + cfg.alpha);
    main.v_dc = cfg.r_opt;
    ActiveCellModel aux;
    aux.i_max = 4.0 * cfg.alpha / (1.0 + cfg.alpha);
    aux.v_dc = cfg.r_opt;
    aux.turn_on_drive = 1.0 / (1.0 + cfg.alpha);
    return {main, aux};
}

std::vector<double> drive_grid(std::size_t points, double min_drive, std::vector<double> breakpoints) {
    if (points < 2 || !(min_drive > 0.0 && min_drive < 1.0)) {
        throw ArgumentError("drive grid needs >= 2 points and a minimum drive in (0, 1)");
    }
    auto grid = linspace(min_drive, 1.0, points);
    for (double b : breakpoints) {
        if (b > min_drive && b < 1.0) {
            grid.push_back(b);
        }
    }
    sort_unique(grid);
    return grid;
}

PASimResult simulate_pa(const ActiveCellModel& main_cell, const ActiveCellModel& aux_cell,
                        const net::Netlist& netlist, const std::vector<double>& drives, double frequency,
                        double main_phase_deg, double aux_phase_deg) {
    if (drives.empty()) {
        throw ArgumentError("empty drive grid");
    }
    for (std::size_t k = 0; k < drives.size(); ++k) {
        if (!(drives[k] > 0.0 && drives[k] <= 1.0) || (k > 0 && !(drives[k] > drives[k - 1]))) {
            throw ArgumentError("drives must be ascending in (0, 1]");
        }
    }
    const std::size_t main_idx = netlist.port_index("main");
    const std::size_t aux_idx = netlist.port_index("aux");
    const std::size_t load_idx = netlist.port_index("load");
    const Complex rot_main = std::polar(1.0, deg2rad(main_phase_deg));
    const Complex rot_aux = std::polar(1.0, deg2rad(aux_phase_deg));

    PASimResult out;
    out.points.reserve(drives.size());
    for (double v : drives) {
        const auto cm = cell_currents(main_cell, v);
        const auto ca = cell_currents(aux_cell, v);
        PASimPoint p;
        p.drive = v;
        p.i_main = cm.i_fund * rot_main;
        p.i_aux = ca.i_fund * rot_aux;
        const auto r = solve_pa(netlist, frequency, p.i_main, p.i_aux);
        p.v_main = r.port_voltages[main_idx];
        p.v_aux = r.port_voltages[aux_idx];
        p.v_load = r.port_voltages[load_idx];
        p.p_out = r.delivered;
        p.p_injected = sum(r.port_injected);
        p.p_loss = r.total_loss();
        p.p_dc = main_cell.v_dc * cm.i_dc + aux_cell.v_dc * ca.i_dc;
        p.efficiency = p.p_dc > 0.0 ? p.p_out / p.p_dc : 0.0;
        const double slack = 1.0 + 1e-9;
        p.overdrive = std::abs(p.v_main) > (main_cell.v_dc - main_cell.v_knee) * slack ||
                      std::abs(p.v_aux) > (aux_cell.v_dc - aux_cell.v_knee) * slack;
        out.points.push_back(p);
    }

    const auto& ref = out.points.front();
    if (std::abs(ref.v_load) == 0.0) {
        throw DomainError("no output at the lowest drive; AM-AM reference undefined");
    }
    const double gain0 = std::abs(ref.v_load) / ref.drive;
    const double phase0 = std::arg(ref.v_load);
    double p_max = 0.0;
    for (const auto& p : out.points) {
        p_max = std::max(p_max, p.p_out);
    }
    for (auto& p : out.points) {
        p.am_am_db = 20.0 * std::log10(std::abs(p.v_load) / p.drive / gain0);
        p.am_pm_deg = wrap_deg(rad2deg(std::arg(p.v_load) - phase0));
        p.pbo_db = p.p_out > 0.0 ? 10.0 * std::log10(p_max / p.p_out) : std::numeric_limits<double>::infinity();
    }
    return out;
}

double LevelMap::at(double value) const {
    if (x.size() < 2 || x.size() != y.size()) {
        throw ArgumentError("level map needs at least two (x, y) samples");
    }
    const double span = x.back() - x.front();
    const double slack = 1e-12 * std::max(std::abs(span), 1.0);
    if (!(value >= x.front() - slack && value <= x.back() + slack)) {
        throw DomainError("amplitude " + std::to_string(value) + " outside the characterized range [" +
                          std::to_string(x.front()) + ", " + std::to_string(x.back()) + "]");
    }
    const double v = std::clamp(value, x.front(), x.back());
    auto it = std::upper_bound(x.begin(), x.end(), v);
    std::size_t k = it == x.end() ? x.size() - 1 : static_cast<std::size_t>(it - x.begin());
    if (k == 0) {
        k = 1;
    }
    const double t = (v - x[k - 1]) / (x[k] - x[k - 1]);
    return y[k - 1] + t * (y[k] - y[k - 1]);
}

std::pair<LevelMap, LevelMap> level_maps(const PASimResult& result) {
    LevelMap am, pm;
    if (!result.points.empty() && result.points.front().drive > 0.0) {
        am.x.push_back(0.0);
        am.y.push_back(0.0);
        pm.x.push_back(0.0);
        pm.y.push_back(result.points.front().am_pm_deg);
    }
    for (const auto& p : result.points) {
        am.x.push_back(p.drive);
        am.y.push_back(std::abs(p.v_load));
        pm.x.push_back(p.drive);
        pm.y.push_back(p.am_pm_deg);
    }
    return {am, pm};
}

std::vector<Complex> qam64_constellation() {
    std::vector<Complex> s;
    s.reserve(64);
    const double norm = std::sqrt(42.0);
    for (int i = -7; i <= 7; i += 2) {
        for (int q = -7; q <= 7; q += 2) {
            s.emplace_back(i / norm, q / norm);
        }
    }
    return s;
}

double evm_64qam(const LevelMap& am_am, const LevelMap& am_pm_deg, double backoff_db) {
    if (am_am.x.size() < 2 || am_am.x.size() != am_am.y.size()) {
        throw ArgumentError("AM-AM map needs at least two (x, y) samples");
    }
    if (!std::isfinite(backoff_db)) {
        throw ArgumentError("backoff must be finite");
    }
    const auto peak = std::max_element(am_am.y.begin(), am_am.y.end());
    const double x_sat = am_am.x[static_cast<std::size_t>(peak - am_am.y.begin())];
    if (!(x_sat > 0.0)) {
        throw DomainError("AM-AM map has no positive saturation input");
    }
    const double rms_in = x_sat * std::pow(10.0, -backoff_db / 20.0);

    const auto symbols = qam64_constellation();
    Complex num{};
    double den = 0.0;
    std::vector<Complex> out;
    out.reserve(symbols.size());
    for (const auto& s : symbols) {
        const double a = std::abs(s) * rms_in;
        const Complex y = am_am.at(a) * std::polar(1.0, deg2rad(am_pm_deg.at(a))) * (s / std::abs(s));
        out.push_back(y);
        num += y * std::conj(s);
        den += std::norm(s);
    }
    const Complex g = num / den;
    double err = 0.0, ref = 0.0;
    for (std::size_t k = 0; k < symbols.size(); ++k) {
        err += std::norm(out[k] - g * symbols[k]);
        ref += std::norm(g * symbols[k]);
    }
    if (!(ref > 0.0)) {
        throw DomainError("zero reference power after gain normalization");
    }
    return 100.0 * std::sqrt(err / ref);
}

}  // namespace doherty::eval
