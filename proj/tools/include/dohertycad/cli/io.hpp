#pragma once

#include "dohertycad/ideal/doherty.hpp"
#include "dohertycad/netkit/netlist.hpp"
#include "dohertycad/synth/synth.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace doherty::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int { kOk = 0, kOther = 1, kValidation = 2, kConsistency = 3 };

/// Input rejected by a schema or flag check. `key` is the dotted path of the
/// offending JSON key or the flag name.
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string key, const std::string& message)
        : std::runtime_error(message), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Significant digits for CSV and report numbers (DOHERTY_CAD_PRECISION, default 9).
int output_precision();

/// Scientific notation with `digits` significant digits; "inf", "-inf", "nan".
std::string format_number(double value, int digits);

/// Rounds to `digits` significant digits so JSON output is stable.
double round_significant(double value, int digits);

enum class Topology { two_line, three_line, transformer };

std::string_view to_string(Topology t);

struct DesignFile {
    ideal::DohertyConfig config;
    Topology topology = Topology::transformer;
    synth::TransformerFreeParams free_params;
    std::optional<double> z02_ohm;
    synth::QBudget q_budget;
    double c_pad_f = 0.0;
};

/// Strict parse: unknown keys, wrong types and invalid values raise ValidationError.
DesignFile parse_design(const Json& doc);
Json design_to_json(const DesignFile& design);

/// Reads a whole file. Missing files raise ValidationError keyed by `what`.
std::string read_file(const std::string& path, const std::string& what);
/// Parses JSON text; syntax errors raise ValidationError.
Json parse_json_text(const std::string& text, const std::string& what);
void write_file(const std::string& path, const std::string& content);

struct NetlistFile {
    net::Netlist netlist;
    std::optional<ideal::DohertyConfig> config;
};

/// Values are written with round-trip precision; node names are used as references.
Json netlist_to_json(const net::Netlist& netlist, const std::optional<ideal::DohertyConfig>& config = std::nullopt);
NetlistFile netlist_from_json(const Json& doc);

/// True for netlist documents, false for design documents.
bool is_netlist_document(const Json& doc);

struct SynthesizedDesign {
    net::Netlist netlist;
    Json components;
    std::vector<synth::IdentityCheck> identities;
    std::vector<std::string> warnings;
};

SynthesizedDesign synthesize(const DesignFile& design);

/// Two-line reference under the same configuration and Q budget.
net::Netlist two_line_reference(const DesignFile& design);

/// One CSV row of the sweep schema.
struct SweepRow {
    double pbo_db = 0.0;
    double i_main = 0.0;
    double i_aux = 0.0;
    double re_z_main = 0.0;
    double im_z_main = 0.0;
    double re_z_aux = 0.0;
    double im_z_aux = 0.0;
    double eta_passive = 0.0;
    double eta_drain = 0.0;
    double am_am_db = 0.0;
    double am_pm_deg = 0.0;
};

extern const std::vector<std::string> kSweepColumns;

/// Header row followed by one line per row.
std::string write_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows,
                      int digits);
std::vector<double> to_values(const SweepRow& row);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv(std::string_view text);

}  // namespace doherty::cli
