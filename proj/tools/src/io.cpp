#include "dohertycad/cli/io.hpp"

#include "dohertycad/errors.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace doherty::cli {

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void require_object(const Json& j, const std::string& path) {
    if (!j.is_object()) {
        const std::string name = path.empty() ? "document" : path;
        throw ValidationError(name, "\"" + name + "\" must be a JSON object");
    }
}

void reject_unknown(const Json& j, const std::string& path, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) {
            throw ValidationError(join(path, key), "unknown key \"" + join(path, key) + "\"");
        }
    }
}

const Json& require_key(const Json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key)) {
        throw ValidationError(join(path, key), "missing key \"" + join(path, key) + "\"");
    }
    return j.at(key);
}

double as_number(const Json& v, const std::string& key) {
    if (!v.is_number()) {
        throw ValidationError(key, "\"" + key + "\" must be a number");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
        throw ValidationError(key, "\"" + key + "\" must be finite");
    }
    return x;
}

double positive(const Json& j, const std::string& path, const std::string& key) {
    const std::string full = join(path, key);
    const double x = as_number(require_key(j, path, key), full);
    if (!(x > 0.0)) {
        throw ValidationError(full, "\"" + full + "\" must be positive");
    }
    return x;
}

std::string as_string(const Json& v, const std::string& key) {
    if (!v.is_string()) {
        throw ValidationError(key, "\"" + key + "\" must be a string");
    }
    return v.get<std::string>();
}

/// Quality factor: positive number, or null for lossless.
double quality(const Json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key) || j.at(key).is_null()) {
        return net::kLossless;
    }
    return positive(j, path, key);
}

Json quality_json(double q) { return std::isinf(q) ? Json(nullptr) : Json(q); }

}  // namespace

int output_precision() {
    const char* env = std::getenv("DOHERTY_CAD_PRECISION");
    if (env == nullptr || *env == '\0') {
        return 9;
    }
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 17) {
        throw ValidationError("DOHERTY_CAD_PRECISION", "DOHERTY_CAD_PRECISION must be an integer in [1, 17]");
    }
    return static_cast<int>(v);
}

std::string format_number(double value, int digits) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0.0 ? "inf" : "-inf";
    }
    if (value == 0.0) {
        value = 0.0;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, value);
    return buf;
}

double round_significant(double value, int digits) {
    if (!std::isfinite(value)) {
        return value;
    }
    return std::strtod(format_number(value, digits).c_str(), nullptr);
}

std::string_view to_string(Topology t) {
    switch (t) {
        case Topology::two_line: return "two-line";
        case Topology::three_line: return "three-line";
        case Topology::transformer: return "transformer";
    }
    return "?";
}

DesignFile parse_design(const Json& doc) {
    require_object(doc, "");
    reject_unknown(doc, "", {"config", "topology", "free_params", "q_budget", "parasitics"});
    DesignFile d;

    const Json& cfg = require_key(doc, "", "config");
    require_object(cfg, "config");
    reject_unknown(cfg, "config", {"alpha", "r_opt_ohm", "r_l_ohm", "f0_hz"});
    d.config.alpha = positive(cfg, "config", "alpha");
    d.config.r_opt = positive(cfg, "config", "r_opt_ohm");
    d.config.r_load = positive(cfg, "config", "r_l_ohm");
    d.config.f0 = positive(cfg, "config", "f0_hz");

    const std::string topo = as_string(require_key(doc, "", "topology"), "topology");
    if (topo == "two-line") {
        d.topology = Topology::two_line;
    } else if (topo == "three-line") {
        d.topology = Topology::three_line;
    } else if (topo == "transformer") {
        d.topology = Topology::transformer;
    } else {
        throw ValidationError("topology", "topology must be \"two-line\", \"three-line\" or \"transformer\"");
    }

    if (doc.contains("free_params")) {
        const Json& fp = doc.at("free_params");
        require_object(fp, "free_params");
        reject_unknown(fp, "free_params", {"n1", "k1", "n2", "z02_ohm"});
        if (fp.contains("n1")) {
            d.free_params.n1 = positive(fp, "free_params", "n1");
        }
        if (fp.contains("n2")) {
            d.free_params.n2 = positive(fp, "free_params", "n2");
        }
        if (fp.contains("k1")) {
            const double k1 = as_number(fp.at("k1"), "free_params.k1");
            if (!(k1 > 0.0 && k1 < 1.0)) {
                throw ValidationError("free_params.k1", "\"free_params.k1\" must lie in (0, 1)");
            }
            d.free_params.k1 = k1;
        }
        if (fp.contains("z02_ohm")) {
            d.z02_ohm = positive(fp, "free_params", "z02_ohm");
        }
    }

    if (doc.contains("q_budget")) {
        const Json& q = doc.at("q_budget");
        require_object(q, "q_budget");
        reject_unknown(q, "q_budget", {"q_l", "q_c"});
        d.q_budget.q_l = quality(q, "q_budget", "q_l");
        d.q_budget.q_c = quality(q, "q_budget", "q_c");
    }

    if (doc.contains("parasitics")) {
        const Json& p = doc.at("parasitics");
        require_object(p, "parasitics");
        reject_unknown(p, "parasitics", {"c_pad_f"});
        if (p.contains("c_pad_f")) {
            const double c = as_number(p.at("c_pad_f"), "parasitics.c_pad_f");
            if (!(c >= 0.0)) {
                throw ValidationError("parasitics.c_pad_f", "\"parasitics.c_pad_f\" must be nonnegative");
            }
            d.c_pad_f = c;
        }
    }
    return d;
}

Json design_to_json(const DesignFile& d) {
    Json doc;
    doc["config"] = {{"alpha", d.config.alpha},
                     {"r_opt_ohm", d.config.r_opt},
                     {"r_l_ohm", d.config.r_load},
                     {"f0_hz", d.config.f0}};
    doc["topology"] = std::string(to_string(d.topology));
    Json fp = {{"n1", d.free_params.n1}, {"k1", d.free_params.k1}, {"n2", d.free_params.n2}};
    if (d.z02_ohm) {
        fp["z02_ohm"] = *d.z02_ohm;
    }
    doc["free_params"] = fp;
    doc["q_budget"] = {{"q_l", quality_json(d.q_budget.q_l)}, {"q_c", quality_json(d.q_budget.q_c)}};
    doc["parasitics"] = {{"c_pad_f", d.c_pad_f}};
    return doc;
}

std::string read_file(const std::string& path, const std::string& what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError(what, "cannot open " + what + " \"" + path + "\"");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(what, "malformed JSON in " + what + ": " + e.what());
    }
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write \"" + path + "\"");
    }
    out << content;
    if (!out) {
        throw std::runtime_error("failed writing \"" + path + "\"");
    }
}

Json netlist_to_json(const net::Netlist& netlist, const std::optional<ideal::DohertyConfig>& config) {
    Json doc;
    doc["format"] = "dohertycad-netlist";
    doc["version"] = 1;
    doc["reference_frequency_hz"] = netlist.reference_frequency();
    if (config) {
        doc["config"] = {{"alpha", config->alpha},
                         {"r_opt_ohm", config->r_opt},
                         {"r_l_ohm", config->r_load},
                         {"f0_hz", config->f0}};
    }
    Json elements = Json::array();
    for (const auto& e : netlist.elements()) {
        Json j;
        j["name"] = e.name;
        j["kind"] = std::string(net::to_string(e.kind()));
        Json nodes = Json::array();
        for (auto n : e.nodes) {
            nodes.push_back(netlist.node_name(n));
        }
        j["nodes"] = nodes;
        std::visit(
            [&j](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, net::Resistor>) {
                    j["resistance_ohm"] = v.resistance;
                } else if constexpr (std::is_same_v<T, net::Inductor>) {
                    j["inductance_h"] = v.inductance;
                    j["q"] = quality_json(v.q);
                } else if constexpr (std::is_same_v<T, net::Capacitor>) {
                    j["capacitance_f"] = v.capacitance;
                    j["q"] = quality_json(v.q);
                } else if constexpr (std::is_same_v<T, net::CoupledInductor>) {
                    j["primary_inductance_h"] = v.primary_inductance;
                    j["turn_ratio"] = v.turn_ratio;
                    j["coupling"] = v.coupling;
                    j["q"] = quality_json(v.q);
                } else if constexpr (std::is_same_v<T, net::IdealTransformer>) {
                    j["turn_ratio"] = v.turn_ratio;
                } else if constexpr (std::is_same_v<T, net::TransmissionLine>) {
                    j["z0_ohm"] = v.z0;
                    j["electrical_length_deg"] = v.electrical_length_deg;
                    j["atten_db_per_quarter_wave"] = v.atten_db_per_quarter_wave;
                } else if constexpr (std::is_same_v<T, net::CurrentSource>) {
                    j["amplitude_re_a"] = v.amplitude.real();
                    j["amplitude_im_a"] = v.amplitude.imag();
                }
            },
            e.value);
        if (e.termination) {
            j["termination"] = true;
        }
        elements.push_back(j);
    }
    doc["elements"] = elements;
    Json ports = Json::array();
    for (const auto& p : netlist.ports()) {
        ports.push_back({{"name", p.name}, {"node", netlist.node_name(p.node)}, {"reference", netlist.node_name(p.reference)}});
    }
    doc["ports"] = ports;
    return doc;
}

bool is_netlist_document(const Json& doc) { return doc.is_object() && doc.contains("elements"); }

NetlistFile netlist_from_json(const Json& doc) {
    require_object(doc, "");
    reject_unknown(doc, "", {"format", "version", "reference_frequency_hz", "config", "elements", "ports"});
    if (doc.contains("format") && (!doc.at("format").is_string() || doc.at("format") != "dohertycad-netlist")) {
        throw ValidationError("format", "\"format\" must be \"dohertycad-netlist\"");
    }
    if (doc.contains("version") && (!doc.at("version").is_number_integer() || doc.at("version") != 1)) {
        throw ValidationError("version", "unsupported netlist version");
    }
    NetlistFile out{net::Netlist(positive(doc, "", "reference_frequency_hz")), std::nullopt};
    auto& net = out.netlist;

    if (doc.contains("config")) {
        const Json& cfg = doc.at("config");
        require_object(cfg, "config");
        reject_unknown(cfg, "config", {"alpha", "r_opt_ohm", "r_l_ohm", "f0_hz"});
        ideal::DohertyConfig c;
        c.alpha = positive(cfg, "config", "alpha");
        c.r_opt = positive(cfg, "config", "r_opt_ohm");
        c.r_load = positive(cfg, "config", "r_l_ohm");
        c.f0 = positive(cfg, "config", "f0_hz");
        out.config = c;
    }

    const Json& elements = require_key(doc, "", "elements");
    if (!elements.is_array()) {
        throw ValidationError("elements", "\"elements\" must be an array");
    }
    for (std::size_t i = 0; i < elements.size(); ++i) {
        const std::string path = "elements[" + std::to_string(i) + "]";
        const Json& e = elements[i];
        require_object(e, path);
        const std::string name = as_string(require_key(e, path, "name"), join(path, "name"));
        const std::string kind = as_string(require_key(e, path, "kind"), join(path, "kind"));
        const Json& nodes_j = require_key(e, path, "nodes");
        if (!nodes_j.is_array()) {
            throw ValidationError(join(path, "nodes"), "\"" + join(path, "nodes") + "\" must be an array");
        }
        std::vector<net::NodeId> nodes;
        for (std::size_t k = 0; k < nodes_j.size(); ++k) {
            nodes.push_back(net.add_node(as_string(nodes_j[k], join(path, "nodes"))));
        }
        const std::set<std::string> common = {"name", "kind", "nodes", "termination"};
        auto allow = [&](std::set<std::string> extra) {
            extra.insert(common.begin(), common.end());
            reject_unknown(e, path, extra);
        };
        net::Element el;
        el.name = name;
        el.nodes = nodes;
        if (kind == "resistor") {
            allow({"resistance_ohm"});
            el.value = net::Resistor{positive(e, path, "resistance_ohm")};
        } else if (kind == "inductor") {
            allow({"inductance_h", "q"});
            el.value = net::Inductor{positive(e, path, "inductance_h"), quality(e, path, "q")};
        } else if (kind == "capacitor") {
            allow({"capacitance_f", "q"});
            el.value = net::Capacitor{positive(e, path, "capacitance_f"), quality(e, path, "q")};
        } else if (kind == "coupled_inductor") {
            allow({"primary_inductance_h", "turn_ratio", "coupling", "q"});
            el.value = net::CoupledInductor{positive(e, path, "primary_inductance_h"), positive(e, path, "turn_ratio"),
                                            positive(e, path, "coupling"), quality(e, path, "q")};
        } else if (kind == "ideal_transformer") {
            allow({"turn_ratio"});
            el.value = net::IdealTransformer{positive(e, path, "turn_ratio")};
        } else if (kind == "transmission_line") {
            allow({"z0_ohm", "electrical_length_deg", "atten_db_per_quarter_wave"});
            const double atten = e.contains("atten_db_per_quarter_wave")
                                     ? as_number(e.at("atten_db_per_quarter_wave"), join(path, "atten_db_per_quarter_wave"))
                                     : 0.0;
            el.value = net::TransmissionLine{positive(e, path, "z0_ohm"), positive(e, path, "electrical_length_deg"), atten};
        } else if (kind == "current_source") {
            allow({"amplitude_re_a", "amplitude_im_a"});
            const double re = as_number(require_key(e, path, "amplitude_re_a"), join(path, "amplitude_re_a"));
            const double im = e.contains("amplitude_im_a") ? as_number(e.at("amplitude_im_a"), join(path, "amplitude_im_a")) : 0.0;
            el.value = net::CurrentSource{net::Complex{re, im}};
        } else {
            throw ValidationError(join(path, "kind"), "unknown element kind \"" + kind + "\"");
        }
        if (e.contains("termination")) {
            if (!e.at("termination").is_boolean()) {
                throw ValidationError(join(path, "termination"), "\"" + join(path, "termination") + "\" must be a boolean");
            }
            el.termination = e.at("termination").get<bool>();
        }
        try {
            net.add_element(std::move(el));
        } catch (const Error& err) {
            throw ValidationError(path, err.what());
        }
    }

    const Json& ports = require_key(doc, "", "ports");
    if (!ports.is_array()) {
        throw ValidationError("ports", "\"ports\" must be an array");
    }
    for (std::size_t i = 0; i < ports.size(); ++i) {
        const std::string path = "ports[" + std::to_string(i) + "]";
        const Json& p = ports[i];
        require_object(p, path);
        reject_unknown(p, path, {"name", "node", "reference"});
        const std::string name = as_string(require_key(p, path, "name"), join(path, "name"));
        const std::string node = as_string(require_key(p, path, "node"), join(path, "node"));
        const std::string ref = p.contains("reference") ? as_string(p.at("reference"), join(path, "reference")) : "0";
        const auto n = net.find_node(node);
        const auto r = net.find_node(ref);
        if (!n || !r) {
            throw ValidationError(join(path, "node"), "port \"" + name + "\" references an unknown node");
        }
        try {
            net.add_port(name, *n, *r);
        } catch (const Error& err) {
            throw ValidationError(path, err.what());
        }
    }
    try {
        net.validate();
    } catch (const ArgumentError& err) {
        throw ValidationError("elements", err.what());
    }
    return out;
}

SynthesizedDesign synthesize(const DesignFile& d) {
    SynthesizedDesign out{net::Netlist(d.config.f0), Json::object(), {}, {}};
    const auto& cfg = d.config;
    switch (d.topology) {
        case Topology::two_line: {
            const auto s = synth::synth_two_line(cfg);
            out.components = {{"z01_ohm", s.z01}, {"z02_ohm", s.z02}, {"f0_hz", s.f0}};
            out.identities = synth::identities(s, cfg);
            out.warnings = s.warnings;
            out.netlist = synth::to_netlist(s, cfg, d.q_budget);
            break;
        }
        case Topology::three_line: {
            const auto s = synth::synth_three_line(cfg, d.z02_ohm);
            out.components = {{"z01_ohm", s.z01}, {"z02_ohm", s.z02}, {"z03_ohm", s.z03}, {"f0_hz", s.f0}};
            out.identities = synth::identities(s, cfg);
            out.warnings = s.warnings;
            out.netlist = synth::to_netlist(s, cfg, d.q_budget);
            break;
        }
        case Topology::transformer: {
            const auto s = synth::synth_transformer_combiner(cfg, d.free_params, d.c_pad_f);
            auto tf = [](const synth::TransformerSpec& t) {
                return Json{{"primary_inductance_h", t.primary_inductance},
                            {"turn_ratio", t.turn_ratio},
                            {"coupling", t.coupling}};
            };
            out.components = {{"tf1", tf(s.tf1)},
                              {"tf2", tf(s.tf2)},
                              {"c1_f", s.c[0]},
                              {"c2_f", s.c[1]},
                              {"c3_f", s.c[2]},
                              {"c4_f", s.c[3]},
                              {"c5_f", s.c[4]},
                              {"c3_total_f", s.c3_total},
                              {"c_pad_f", s.c_pad},
                              {"z0_lp_main_ohm", s.z0_lp_main},
                              {"z0_lp_aux_ohm", s.z0_lp_aux},
                              {"z0_hp_aux_ohm", s.z0_hp_aux},
                              {"lm1_h", s.lm1},
                              {"lm2_h", s.lm2},
                              {"f0_hz", s.f0}};
            out.identities = s.identities;
            out.warnings = s.warnings;
            out.netlist = synth::to_netlist(s, cfg, d.q_budget);
            break;
        }
    }
    return out;
}

net::Netlist two_line_reference(const DesignFile& d) {
    return synth::to_netlist(synth::synth_two_line(d.config), d.config, d.q_budget);
}

const std::vector<std::string> kSweepColumns = {"pbo_db",    "i_main",   "i_aux",       "re_z_main",
                                                "im_z_main", "re_z_aux", "im_z_aux",    "eta_passive",
                                                "eta_drain", "am_am_db", "am_pm_deg"};

std::vector<double> to_values(const SweepRow& r) {
    return {r.pbo_db,   r.i_main,      r.i_aux,     r.re_z_main, r.im_z_main, r.re_z_aux,
            r.im_z_aux, r.eta_passive, r.eta_drain, r.am_am_db,  r.am_pm_deg};
}

std::string write_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows,
                      int digits) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        out += (i ? "," : "") + header[i];
    }
    out += "\n";
    for (const auto& row : rows) {
        if (row.size() != header.size()) {
            throw ConsistencyError("CSV row width does not match the header");
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            out += (i ? "," : "") + format_number(row[i], digits);
        }
        out += "\n";
    }
    return out;
}

CsvTable read_csv(std::string_view text) {
    CsvTable t;
    std::istringstream in{std::string(text)};
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(s);
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        return cells;
    };
    if (!std::getline(in, line)) {
        throw ValidationError("csv", "empty CSV");
    }
    t.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != t.header.size()) {
            throw ValidationError("csv", "CSV row width does not match the header");
        }
        std::vector<double> row;
        for (const auto& c : cells) {
            char* end = nullptr;
            const double v = std::strtod(c.c_str(), &end);
            if (end == c.c_str() || *end != '\0') {
                throw ValidationError("csv", "non-numeric CSV cell \"" + c + "\"");
            }
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace doherty::cli
