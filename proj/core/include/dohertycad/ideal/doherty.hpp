#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace doherty::ideal {

/// Shared design inputs of a two-way Doherty amplifier.
struct DohertyConfig {
    double alpha = 1.0;   // auxiliary / main maximum RF current ratio
    double r_opt = 41.3;  // ohm, main-PA load-pull resistance
    double r_load = 50.0; // ohm, system load
    double f0 = 37e9;     // Hz

    /// Throws ArgumentError unless every field is positive and finite.
    void validate() const;

    double main_peak_current() const { return 2.0 / (1.0 + alpha); }
    double aux_peak_current() const { return 2.0 * alpha / (1.0 + alpha); }
    /// Main current at which the auxiliary path turns on (second efficiency peak).
    double turn_on_current() const { return 2.0 / ((1.0 + alpha) * (1.0 + alpha)); }
    double main_peak_load() const { return (1.0 + alpha) * r_opt / 2.0; }
    double aux_peak_load() const { return (1.0 + alpha) * r_opt / (2.0 * alpha); }
};

/// Normalized current pair of the ideal Doherty drive.
struct CurrentPoint {
    double i_main = 0.0;
    double i_aux = 0.0;
    double pbo_db = 0.0;
};

/// Auxiliary current demanded by the ideal Doherty relation for a given main current.
double aux_current(double alpha, double i_main);

/// Back-off in dB from the peak output, 20 log10(2 / ((1 + alpha) i_main)).
double pbo_level(double alpha, double i_main);

/// Main current that produces `pbo_db` of back-off.
double main_current_at_pbo(double alpha, double pbo_db);

CurrentPoint current_point(double alpha, double i_main);

/// ITR of the main-path inverter in the two-quarter-wave-line combiner. Only
/// defined while the auxiliary path conducts.
double itr_conv(double alpha, double i_main);

/// beta = (R_opt / 2 R_L) * itr_conv for the three-quarter-wave-line combiner.
double itr_intro_beta(double alpha, double i_main, double r_opt, double r_load);

/// max(beta, 1/beta).
double itr_intro(double alpha, double i_main, double r_opt, double r_load);

/// Main current where beta crosses unity, if it lies in the auxiliary-on region.
std::optional<double> itr_intro_unity_current(double alpha, double r_opt, double r_load);

struct ZeroItrDesign {
    double alpha = 0.0;
    /// True when the design needs a stronger auxiliary path (R_opt < R_L / 2).
    bool stronger_aux = false;
};

/// Asymmetry that removes impedance transformation at the second efficiency
/// peak of the three-line combiner. None when R_opt >= 2 R_L.
std::optional<ZeroItrDesign> zero_itr_alpha(double r_opt, double r_load);

enum class AmplifierClass { class_a, class_b, doherty };

std::string_view to_string(AmplifierClass cls);
/// Accepts "class-A", "class-B", "doherty" (case-insensitive). Throws ArgumentError otherwise.
AmplifierClass parse_amplifier_class(std::string_view text);

/// Ideal drain efficiency at a back-off level. `alpha` only matters for doherty.
double ideal_efficiency(AmplifierClass cls, double pbo_db, double alpha = 1.0);

/// Tabulated efficiency versus back-off; linear interpolation between samples.
struct EfficiencyCurve {
    AmplifierClass cls = AmplifierClass::class_b;
    double alpha = 1.0;
    std::vector<std::pair<double, double>> points;  // (pbo_db, efficiency), ascending pbo

    bool covers(double pbo_db) const;
    /// Throws DomainError outside the tabulated range.
    double at(double pbo_db) const;
};

/// Samples `ideal_efficiency` on [0, max_pbo_db] with `step_db`, always
/// including the Doherty second-peak breakpoint.
EfficiencyCurve make_efficiency_curve(AmplifierClass cls, double alpha, double max_pbo_db, double step_db = 0.05);

/// Output-power probability density over back-off. Discrete densities are
/// point masses; otherwise `weight` samples a continuous density integrated by
/// the trapezoid rule.
struct PowerPdf {
    std::vector<double> pbo_db;
    std::vector<double> weight;
    bool discrete = true;
};

/// Power-weighted average efficiency E[P_out] / E[P_dc].
double average_efficiency(const EfficiencyCurve& curve, const PowerPdf& pdf);

}  // namespace doherty::ideal
