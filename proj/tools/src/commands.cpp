#include "dohertycad/cli/commands.hpp"

#include "dohertycad/cli/io.hpp"
#include "dohertycad/errors.hpp"
#include "dohertycad/eval/eval.hpp"
#include "dohertycad/netkit/touchstone.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace doherty::cli {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Options {
    std::string input;
    std::string out;
    std::string mode;
    std::optional<double> q_l;
    std::optional<double> q_c;
    std::string compare;
    std::size_t points = 51;
    double max_pbo_db = 12.0;
    std::string metric = "passive-efficiency";
    double span = 0.4;
    std::size_t sweep_points = 201;
    std::string cells;
    double main_conduction_deg = 200.0;
    std::optional<double> alpha;
    std::optional<double> r_opt_ohm;
    std::optional<double> r_l_ohm;
    std::optional<double> f0_hz;
    std::string touchstone;
    std::optional<double> f_start_hz;
    std::optional<double> f_stop_hz;
    double z_ref = 50.0;
    std::vector<std::string> ports;
};

/// Loaded input: a design (synthesized on load) or a bare netlist.
struct Input {
    std::optional<DesignFile> design;
    net::Netlist netlist;
    std::optional<ideal::DohertyConfig> config;
};

Input load_input(const std::string& path) {
    const Json doc = parse_json_text(read_file(path, "input"), "input");
    if (is_netlist_document(doc)) {
        auto nf = netlist_from_json(doc);
        return {std::nullopt, std::move(nf.netlist), nf.config};
    }
    auto design = parse_design(doc);
    auto synthesized = synthesize(design);
    return {design, std::move(synthesized.netlist), design.config};
}

ideal::DohertyConfig resolve_config(const Input* input, const Options& o) {
    ideal::DohertyConfig cfg;
    bool have = false;
    if (input && input->config) {
        cfg = *input->config;
        have = true;
    } else if (input) {
        cfg.f0 = input->netlist.reference_frequency();
    }
    if (o.alpha || o.r_opt_ohm || o.r_l_ohm) {
        if (!(o.alpha && o.r_opt_ohm && o.r_l_ohm)) {
            throw ValidationError("--alpha", "--alpha, --r-opt-ohm and --r-l-ohm must be given together");
        }
        cfg.alpha = *o.alpha;
        cfg.r_opt = *o.r_opt_ohm;
        cfg.r_load = *o.r_l_ohm;
        have = true;
    }
    if (o.f0_hz) {
        cfg.f0 = *o.f0_hz;
    }
    if (!have) {
        throw ValidationError("config", "no Doherty configuration: use a design file, a netlist with a config block, "
                                        "or --alpha/--r-opt-ohm/--r-l-ohm");
    }
    try {
        cfg.validate();
    } catch (const ArgumentError& e) {
        throw ValidationError("config", e.what());
    }
    return cfg;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json rounded(const Json& j, int digits) {
    if (j.is_number_float()) {
        return round_significant(j.get<double>(), digits);
    }
    if (j.is_structured()) {
        Json out = j;
        for (auto it = out.begin(); it != out.end(); ++it) {
            *it = rounded(*it, digits);
        }
        return out;
    }
    return j;
}

void emit(const Options& o, const std::string& content, std::ostream& out) {
    if (o.out.empty()) {
        out << content;
    } else {
        write_file(o.out, content);
    }
}

std::vector<SweepRow> load_mod_rows(const eval::LoadModulationSweep& sweep) {
    std::vector<SweepRow> rows;
    for (const auto& p : sweep.points) {
        SweepRow r;
        r.pbo_db = p.drive.pbo_db;
        r.i_main = p.drive.i_main;
        r.i_aux = p.drive.i_aux;
        r.re_z_main = p.z_main.real();
        r.im_z_main = p.z_main.imag();
        if (p.aux_is_admittance) {
            r.re_z_aux = kInf;
            r.im_z_aux = kNan;
        } else {
            r.re_z_aux = p.z_aux.real();
            r.im_z_aux = p.z_aux.imag();
        }
        r.eta_passive = p.passive_efficiency;
        r.eta_drain = kNan;
        r.am_am_db = kNan;
        r.am_pm_deg = kNan;
        rows.push_back(r);
    }
    return rows;
}

eval::LoadModulationSweep sweep_for(const net::Netlist& netlist, const ideal::DohertyConfig& cfg, const Options& o) {
    const double offset = eval::required_phase_offset(netlist, cfg);
    return eval::load_modulation(netlist, cfg, eval::make_drive_profile(cfg, offset, o.points, o.max_pbo_db));
}

const DesignFile& require_design(const Input& in, const std::string& mode) {
    if (!in.design) {
        throw ValidationError("input", "mode " + mode + " needs a design file, not a netlist");
    }
    return *in.design;
}

void check_compare(const Options& o) {
    if (!o.compare.empty() && o.compare != "two-line") {
        throw ValidationError("--compare", "--compare accepts only \"two-line\"");
    }
}

int cmd_synth(const Options& o, std::ostream& out) {
    const int digits = output_precision();
    const Json doc = parse_json_text(read_file(o.input, "design"), "design");
    const DesignFile design = parse_design(doc);
    const auto s = synthesize(design);
    if (!synth::all_pass(s.identities)) {
        for (const auto& id : s.identities) {
            if (!(id.residual < synth::kIdentityTolerance)) {
                throw ConsistencyError("identity " + id.name + " violated (residual " + std::to_string(id.residual) + ")");
            }
        }
    }
    const auto& cfg = design.config;
    const std::filesystem::path dir = o.out.empty() ? std::filesystem::path(".") : std::filesystem::path(o.out);
    std::filesystem::create_directories(dir);

    write_file((dir / "netlist.json").string(), dump(netlist_to_json(s.netlist, cfg)));

    const auto freqs = net::linear_grid(cfg.f0 * 0.6, cfg.f0 * 1.4, 201);
    write_file((dir / "combiner.s3p").string(), net::export_touchstone(s.netlist, {"main", "aux", "load"}, freqs, 50.0));

    Options sweep_opts = o;
    sweep_opts.points = 51;
    sweep_opts.max_pbo_db = 12.0;
    const double offset = eval::required_phase_offset(s.netlist, cfg);
    const auto sweep = sweep_for(s.netlist, cfg, sweep_opts);
    std::vector<std::vector<double>> rows;
    for (const auto& r : load_mod_rows(sweep)) {
        rows.push_back(to_values(r));
    }
    write_file((dir / "load_modulation.csv").string(), write_csv(kSweepColumns, rows, digits));

    const auto bw_eff = eval::bandwidth_report(s.netlist, cfg, eval::BandwidthMetric::passive_efficiency);
    const auto bw_match = eval::bandwidth_report(s.netlist, cfg, eval::BandwidthMetric::load_match);

    Json report;
    report["tool"] = "doherty-cad";
    report["design"] = design_to_json(design);
    report["components"] = s.components;
    Json ids = Json::array();
    for (const auto& id : s.identities) {
        ids.push_back({{"name", id.name},
                       {"relation", id.relation},
                       {"lhs", id.lhs},
                       {"rhs", id.rhs},
                       {"residual", id.residual},
                       {"pass", id.residual < synth::kIdentityTolerance}});
    }
    report["identities"] = ids;
    report["all_identities_pass"] = synth::all_pass(s.identities);
    report["warnings"] = s.warnings;
    report["phase_offset_deg"] = offset;
    report["bandwidth"] = {{"window_fraction", 0.8},
                           {"points", 201},
                           {"passive_efficiency_fraction", bw_eff.fraction},
                           {"load_match_fraction", bw_match.fraction}};
    report["outputs"] = {{"netlist", "netlist.json"},
                         {"touchstone", "combiner.s3p"},
                         {"load_modulation_csv", "load_modulation.csv"}};
    write_file((dir / "report.json").string(), dump(rounded(report, digits)));
    out << (dir / "report.json").string() << "\n";
    return kOk;
}

void append_paired(std::vector<std::string>& header, std::vector<std::vector<double>>& values,
                   const std::vector<SweepRow>& ref) {
    for (const auto& c : kSweepColumns) {
        header.push_back(c + "_two_line");
    }
    for (std::size_t k = 0; k < values.size(); ++k) {
        const auto extra = to_values(ref[k]);
        values[k].insert(values[k].end(), extra.begin(), extra.end());
    }
}

std::string analyze_load_mod(const Input& in, const ideal::DohertyConfig& cfg, const Options& o, int digits) {
    check_compare(o);
    const auto rows = load_mod_rows(sweep_for(in.netlist, cfg, o));
    std::vector<std::string> header = kSweepColumns;
    std::vector<std::vector<double>> values;
    for (const auto& r : rows) {
        values.push_back(to_values(r));
    }
    if (o.compare == "two-line") {
        const auto ref = load_mod_rows(sweep_for(two_line_reference(require_design(in, "load-mod --compare")), cfg, o));
        append_paired(header, values, ref);
    }
    return write_csv(header, values, digits);
}

std::string analyze_pbo_eff(const Input& in, const ideal::DohertyConfig& cfg, const Options& o, int digits) {
    check_compare(o);
    if (!o.q_l || !o.q_c) {
        throw ValidationError(o.q_l ? "--q-c" : "--q-l", "mode pbo-eff requires --q-l and --q-c");
    }
    DesignFile design = require_design(in, "pbo-eff");
    design.q_budget = {*o.q_l, *o.q_c};
    const auto netlist = synthesize(design).netlist;
    const auto rows = load_mod_rows(sweep_for(netlist, cfg, o));
    std::vector<std::string> header = kSweepColumns;
    std::vector<std::vector<double>> values;
    for (const auto& r : rows) {
        values.push_back(to_values(r));
    }
    if (o.compare == "two-line") {
        const auto ref = load_mod_rows(sweep_for(two_line_reference(design), cfg, o));
        append_paired(header, values, ref);
    }
    return write_csv(header, values, digits);
}

int analyze_bandwidth(const Input& in, const ideal::DohertyConfig& cfg, const Options& o, int digits,
                      std::ostream& out) {
    check_compare(o);
    eval::BandwidthMetric metric;
    try {
        metric = eval::parse_bandwidth_metric(o.metric);
    } catch (const ArgumentError& e) {
        throw ValidationError("--metric", e.what());
    }
    const eval::SweepWindow window{o.span, o.sweep_points};
    const auto rep = eval::bandwidth_report(in.netlist, cfg, metric, window);
    std::optional<eval::BandwidthReport> ref;
    if (o.compare == "two-line") {
        ref = eval::bandwidth_report(two_line_reference(require_design(in, "bandwidth --compare")), cfg, metric, window);
    }
    auto summary = [](const eval::BandwidthReport& r) {
        return Json{{"f_lo_hz", r.f_lo}, {"f_hi_hz", r.f_hi}, {"fraction", r.fraction}};
    };
    Json s;
    s["metric"] = std::string(eval::to_string(metric));
    s["f0_hz"] = cfg.f0;
    s["design"] = summary(rep);
    if (ref) {
        s["two_line"] = summary(*ref);
    }
    out << dump(rounded(s, digits));

    if (!o.out.empty()) {
        std::vector<std::string> header = {"freq_hz", "value"};
        if (ref) {
            header.push_back("value_two_line");
        }
        std::vector<std::vector<double>> rows;
        for (std::size_t k = 0; k < rep.frequencies.size(); ++k) {
            std::vector<double> row = {rep.frequencies[k], rep.values[k]};
            if (ref) {
                row.push_back(ref->values[k]);
            }
            rows.push_back(row);
        }
        write_file(o.out, write_csv(header, rows, digits));
    }
    return kOk;
}

std::string analyze_pa_sim(const Input& in, const ideal::DohertyConfig& cfg, const Options& o, int digits) {
    if (o.cells.empty()) {
        throw ValidationError("--cells", "mode pa-sim requires --cells ideal|conduction");
    }
    auto [main_cell, aux_cell] = eval::ideal_doherty_cells(cfg);
    if (o.cells == "conduction") {
        main_cell.conduction_angle = o.main_conduction_deg * std::numbers::pi / 180.0;
        aux_cell = eval::class_c_cell(1.0 / (1.0 + cfg.alpha), aux_cell.i_max, aux_cell.v_dc);
    } else if (o.cells != "ideal") {
        throw ValidationError("--cells", "--cells accepts \"ideal\" or \"conduction\"");
    }
    const double offset = eval::required_phase_offset(in.netlist, cfg);
    const auto drives = eval::drive_grid(o.points, std::pow(10.0, -o.max_pbo_db / 20.0), {1.0 / (1.0 + cfg.alpha)});
    const auto sim = eval::simulate_pa(main_cell, aux_cell, in.netlist, drives, cfg.f0, 0.0, -offset);
    std::vector<std::vector<double>> rows;
    for (const auto& p : sim.points) {
        SweepRow r;
        r.pbo_db = p.pbo_db;
        r.i_main = std::abs(p.i_main);
        r.i_aux = std::abs(p.i_aux);
        const auto zm = p.v_main / p.i_main;
        r.re_z_main = zm.real();
        r.im_z_main = zm.imag();
        if (std::abs(p.i_aux) == 0.0) {
            r.re_z_aux = kInf;
            r.im_z_aux = kNan;
        } else {
            const auto za = p.v_aux / p.i_aux;
            r.re_z_aux = za.real();
            r.im_z_aux = za.imag();
        }
        r.eta_passive = p.p_injected > 0.0 ? p.p_out / p.p_injected : kNan;
        r.eta_drain = p.efficiency;
        r.am_am_db = p.am_am_db;
        r.am_pm_deg = p.am_pm_deg;
        rows.push_back(to_values(r));
    }
    return write_csv(kSweepColumns, rows, digits);
}

std::string analyze_itr_curves(const ideal::DohertyConfig& cfg, const Options& o, int digits) {
    const double lo = cfg.turn_on_current();
    const double hi = cfg.main_peak_current();
    std::vector<double> currents;
    const std::size_t n = std::max<std::size_t>(o.points, 2);
    for (std::size_t k = 0; k < n; ++k) {
        currents.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1));
    }
    currents.back() = hi;
    if (const auto unity = ideal::itr_intro_unity_current(cfg.alpha, cfg.r_opt, cfg.r_load)) {
        currents.push_back(*unity);
    }
    std::sort(currents.begin(), currents.end());
    currents.erase(std::unique(currents.begin(), currents.end()), currents.end());
    std::vector<std::vector<double>> rows;
    for (double i : currents) {
        const auto pt = ideal::current_point(cfg.alpha, i);
        rows.push_back({pt.pbo_db, pt.i_main, pt.i_aux, ideal::itr_conv(cfg.alpha, i),
                        ideal::itr_intro(cfg.alpha, i, cfg.r_opt, cfg.r_load)});
    }
    return write_csv({"pbo_db", "i_main", "i_aux", "itr_conv", "itr_intro"}, rows, digits);
}

int cmd_analyze(const Options& o, std::ostream& out) {
    const int digits = output_precision();
    static const std::vector<std::string> modes = {"load-mod", "pbo-eff", "bandwidth", "pa-sim", "itr-curves"};
    if (std::find(modes.begin(), modes.end(), o.mode) == modes.end()) {
        throw ValidationError("--mode", "unknown mode \"" + o.mode + "\"");
    }
    if (!(o.points >= 2)) {
        throw ValidationError("--points", "--points must be at least 2");
    }
    if (!(o.max_pbo_db > 0.0)) {
        throw ValidationError("--max-pbo-db", "--max-pbo-db must be positive");
    }
    std::optional<Input> in;
    if (!o.input.empty()) {
        in = load_input(o.input);
    } else if (o.mode != "itr-curves") {
        throw ValidationError("input", "mode " + o.mode + " needs an input file");
    }
    const auto cfg = resolve_config(in ? &*in : nullptr, o);

    if (o.mode == "itr-curves") {
        emit(o, analyze_itr_curves(cfg, o, digits), out);
    } else if (o.mode == "load-mod") {
        emit(o, analyze_load_mod(*in, cfg, o, digits), out);
    } else if (o.mode == "pbo-eff") {
        emit(o, analyze_pbo_eff(*in, cfg, o, digits), out);
    } else if (o.mode == "pa-sim") {
        emit(o, analyze_pa_sim(*in, cfg, o, digits), out);
    } else {
        return analyze_bandwidth(*in, cfg, o, digits, out);
    }
    return kOk;
}

int cmd_export(const Options& o, std::ostream& out) {
    const auto in = load_input(o.input);
    const double f_ref = in.netlist.reference_frequency();
    const double start = o.f_start_hz.value_or(0.6 * f_ref);
    const double stop = o.f_stop_hz.value_or(1.4 * f_ref);
    if (!(start > 0.0) || !(stop >= start)) {
        throw ValidationError("--f-start-hz", "frequency grid must be positive and ascending");
    }
    if (o.sweep_points < 1 || (o.sweep_points > 1 && stop == start)) {
        throw ValidationError("--points", "invalid number of frequency points");
    }
    if (!(o.z_ref > 0.0)) {
        throw ValidationError("--z-ref", "--z-ref must be positive");
    }
    std::vector<std::string> ports = o.ports;
    if (ports.empty()) {
        for (const auto& p : in.netlist.ports()) {
            ports.push_back(p.name);
        }
    }
    const auto text =
        net::export_touchstone(in.netlist, ports, net::linear_grid(start, stop, o.sweep_points), o.z_ref);
    write_file(o.touchstone, text);
    out << o.touchstone << "\n";
    return kOk;
}

void report_error(std::ostream& err, const std::string& kind, const std::string& key, const std::string& message) {
    Json j;
    j["error"] = kind;
    if (!key.empty()) {
        j["key"] = key;
    }
    j["message"] = message;
    err << j.dump() << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Doherty power-combiner synthesis and verification", "doherty-cad"};
    app.require_subcommand(1);
    Options o;

    auto* synth = app.add_subcommand("synth", "Synthesize a combiner from a design file");
    synth->add_option("design", o.input, "Design JSON")->required();
    synth->add_option("-o,--out", o.out, "Output directory (default .)");

    auto* analyze = app.add_subcommand("analyze", "Run a sweep on a design or netlist");
    analyze->add_option("input", o.input, "Design or netlist JSON");
    analyze->add_option("-m,--mode", o.mode, "load-mod | pbo-eff | bandwidth | pa-sim | itr-curves")->required();
    analyze->add_option("-o,--out", o.out, "Output CSV (default stdout)");
    analyze->add_option("--q-l", o.q_l, "Inductor quality factor");
    analyze->add_option("--q-c", o.q_c, "Capacitor quality factor");
    analyze->add_option("--compare", o.compare, "Append two-line reference columns (two-line)");
    analyze->add_option("--points", o.points, "Drive grid points (default 51)");
    analyze->add_option("--max-pbo-db", o.max_pbo_db, "Deepest back-off of the drive grid (default 12)");
    analyze->add_option("--metric", o.metric, "Bandwidth metric: passive-efficiency | load-match");
    analyze->add_option("--span", o.span, "Bandwidth window, fraction of f0 each side (default 0.4)");
    analyze->add_option("--sweep-points", o.sweep_points, "Bandwidth window points (default 201)");
    analyze->add_option("--cells", o.cells, "pa-sim cells: ideal | conduction");
    analyze->add_option("--main-conduction-deg", o.main_conduction_deg, "Main cell conduction angle (default 200)");
    analyze->add_option("--alpha", o.alpha, "Auxiliary/main current ratio");
    analyze->add_option("--r-opt-ohm", o.r_opt_ohm, "Main-PA load-pull resistance");
    analyze->add_option("--r-l-ohm", o.r_l_ohm, "System load");
    analyze->add_option("--f0-hz", o.f0_hz, "Center frequency");

    auto* exp = app.add_subcommand("export", "Export a netlist as Touchstone");
    exp->add_option("input", o.input, "Netlist or design JSON")->required();
    exp->add_option("--touchstone", o.touchstone, "Output .sNp path")->required();
    exp->add_option("--f-start-hz", o.f_start_hz, "First frequency (default 0.6 f0)");
    exp->add_option("--f-stop-hz", o.f_stop_hz, "Last frequency (default 1.4 f0)");
    exp->add_option("--points", o.sweep_points, "Frequency points (default 201)");
    exp->add_option("--z-ref", o.z_ref, "Reference impedance (default 50)");
    exp->add_option("--ports", o.ports, "Port names in order (default all)")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        report_error(err, "usage", "arguments", e.what());
        return kValidation;
    }

    try {
        if (synth->parsed()) {
            return cmd_synth(o, out);
        }
        if (analyze->parsed()) {
            return cmd_analyze(o, out);
        }
        return cmd_export(o, out);
    } catch (const ValidationError& e) {
        report_error(err, "validation", e.key(), e.what());
        return kValidation;
    } catch (const UnsupportedError& e) {
        report_error(err, "unsupported", "", e.what());
        return kValidation;
    } catch (const ArgumentError& e) {
        report_error(err, "validation", "", e.what());
        return kValidation;
    } catch (const DomainError& e) {
        report_error(err, "validation", "", e.what());
        return kValidation;
    } catch (const ConsistencyError& e) {
        report_error(err, "consistency", "", e.what());
        return kConsistency;
    } catch (const SingularSystemError& e) {
        report_error(err, "singular", e.offender(), e.what());
        return kOther;
    } catch (const std::exception& e) {
        report_error(err, "internal", "", e.what());
        return kOther;
    }
}

}  // namespace doherty::cli
