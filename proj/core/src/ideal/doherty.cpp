#include "dohertycad/ideal/doherty.hpp"

#include "dohertycad/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

namespace doherty::ideal {

namespace {

constexpr double kEdge = 1e-12;  // relative slack at interval endpoints

void check_alpha(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw ArgumentError("alpha must be positive");
    }
}

void check_aux_on(double alpha, double i_main) {
    check_alpha(alpha);
    const double lo = 2.0 / ((1.0 + alpha) * (1.0 + alpha));
    const double hi = 2.0 / (1.0 + alpha);
    if (!(i_main >= lo * (1.0 - kEdge) && i_main <= hi * (1.0 + kEdge))) {
        throw DomainError("i_main outside the auxiliary-on region [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
    }
}

void check_resistances(double r_opt, double r_load) {
    if (!(r_opt > 0.0) || !(r_load > 0.0) || !std::isfinite(r_opt) || !std::isfinite(r_load)) {
        throw ArgumentError("R_opt and R_L must be positive");
    }
}

}  // namespace

void DohertyConfig::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw ArgumentError(std::string(name) + " must be positive");
        }
    };
    positive(alpha, "alpha");
    positive(r_opt, "R_opt");
    positive(r_load, "R_L");
    positive(f0, "f0");
}

double aux_current(double alpha, double i_main) {
    check_alpha(alpha);
    const double hi = 2.0 / (1.0 + alpha);
    if (!(i_main >= 0.0 && i_main <= hi * (1.0 + kEdge))) {
        throw ArgumentError("i_main must lie in [0, 2/(1+alpha)]");
    }
    if (i_main < 2.0 / ((1.0 + alpha) * (1.0 + alpha))) {
        return 0.0;
    }
    return std::max(0.0, (1.0 + alpha) * i_main - 2.0 / (1.0 + alpha));
}

double pbo_level(double alpha, double i_main) {
    check_alpha(alpha);
    if (!(i_main > 0.0)) {
        throw ArgumentError("i_main must be positive for a back-off level");
    }
    return 20.0 * std::log10(2.0 / ((1.0 + alpha) * i_main));
}

double main_current_at_pbo(double alpha, double pbo_db) {
    check_alpha(alpha);
    return 2.0 / (1.0 + alpha) * std::pow(10.0, -pbo_db / 20.0);
}

CurrentPoint current_point(double alpha, double i_main) {
    return {i_main, aux_current(alpha, i_main), pbo_level(alpha, i_main)};
}

double itr_conv(double alpha, double i_main) {
    check_aux_on(alpha, i_main);
    const double ratio = (1.0 + alpha) / ((2.0 + alpha) - 2.0 / ((1.0 + alpha) * i_main));
    return ratio * ratio;
}

double itr_intro_beta(double alpha, double i_main, double r_opt, double r_load) {
    check_resistances(r_opt, r_load);
    return r_opt / (2.0 * r_load) * itr_conv(alpha, i_main);
}

double itr_intro(double alpha, double i_main, double r_opt, double r_load) {
    const double beta = itr_intro_beta(alpha, i_main, r_opt, r_load);
    return beta >= 1.0 ? beta : 1.0 / beta;
}

std::optional<double> itr_intro_unity_current(double alpha, double r_opt, double r_load) {
    check_alpha(alpha);
    check_resistances(r_opt, r_load);
    // beta = 1  <=>  (2 + a) - 2 / ((1 + a) i) = (1 + a) sqrt(R_opt / 2R_L)
    const double den = (2.0 + alpha) - (1.0 + alpha) * std::sqrt(r_opt / (2.0 * r_load));
    if (!(den > 0.0)) {
        return std::nullopt;
    }
    const double i = 2.0 / ((1.0 + alpha) * den);
    const double lo = 2.0 / ((1.0 + alpha) * (1.0 + alpha));
    const double hi = 2.0 / (1.0 + alpha);
    if (i < lo || i > hi) {
        return std::nullopt;
    }
    return i;
}

std::optional<ZeroItrDesign> zero_itr_alpha(double r_opt, double r_load) {
    check_resistances(r_opt, r_load);
    const double alpha = std::sqrt(2.0 * r_load / r_opt) - 1.0;
    if (!(alpha > 0.0)) {
        return std::nullopt;
    }
    return ZeroItrDesign{alpha, r_opt < r_load / 2.0};
}

std::string_view to_string(AmplifierClass cls) {
    switch (cls) {
        case AmplifierClass::class_a: return "class-A";
        case AmplifierClass::class_b: return "class-B";
        case AmplifierClass::doherty: return "doherty";
    }
    return "?";
}

AmplifierClass parse_amplifier_class(std::string_view text) {
    std::string t(text);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "class-a" || t == "a") return AmplifierClass::class_a;
    if (t == "class-b" || t == "b") return AmplifierClass::class_b;
    if (t == "doherty") return AmplifierClass::doherty;
    throw ArgumentError("unknown amplifier class '" + std::string(text) + "'");
}

double ideal_efficiency(AmplifierClass cls, double pbo_db, double alpha) {
    if (!(pbo_db >= 0.0)) {
        throw ArgumentError("back-off must be nonnegative");
    }
    const double x = std::pow(10.0, -pbo_db / 20.0);  // output voltage relative to peak
    constexpr double peak_b = std::numbers::pi / 4.0;
    switch (cls) {
        case AmplifierClass::class_a:
            return 0.5 * x * x;
        case AmplifierClass::class_b:
            return peak_b * x;
        case AmplifierClass::doherty: {
            check_alpha(alpha);
            // Class-B DC law on both paths, main held at voltage saturation
            // once the auxiliary conducts.
            if (x <= 1.0 / (1.0 + alpha)) {
                return peak_b * (1.0 + alpha) * x;
            }
            return peak_b * (1.0 + alpha) * x * x / ((2.0 + alpha) * x - 1.0);
        }
    }
    throw ArgumentError("unknown amplifier class");
}

bool EfficiencyCurve::covers(double pbo_db) const {
    return !points.empty() && pbo_db >= points.front().first - 1e-12 && pbo_db <= points.back().first + 1e-12;
}

double EfficiencyCurve::at(double pbo_db) const {
    if (!covers(pbo_db)) {
        throw DomainError("efficiency curve undefined at " + std::to_string(pbo_db) + " dB back-off");
    }
    auto hi = std::lower_bound(points.begin(), points.end(), pbo_db,
                               [](const auto& p, double v) { return p.first < v; });
    if (hi == points.begin()) {
        return hi->second;
    }
    if (hi == points.end()) {
        return points.back().second;
    }
    auto lo = hi - 1;
    const double t = (pbo_db - lo->first) / (hi->first - lo->first);
    return lo->second + t * (hi->second - lo->second);
}

EfficiencyCurve make_efficiency_curve(AmplifierClass cls, double alpha, double max_pbo_db, double step_db) {
    if (!(max_pbo_db >= 0.0) || !(step_db > 0.0)) {
        throw ArgumentError("curve range must be nonnegative with a positive step");
    }
    EfficiencyCurve curve{cls, alpha, {}};
    std::vector<double> grid;
    for (double p = 0.0; p < max_pbo_db + 1e-12; p += step_db) {
        grid.push_back(std::min(p, max_pbo_db));
    }
    if (grid.back() < max_pbo_db) {
        grid.push_back(max_pbo_db);
    }
    if (cls == AmplifierClass::doherty) {
        const double knee = 20.0 * std::log10(1.0 + alpha);
        if (knee <= max_pbo_db) {
            grid.push_back(knee);
        }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               grid.end());
    for (double p : grid) {
        curve.points.emplace_back(p, ideal_efficiency(cls, p, alpha));
    }
    return curve;
}

double average_efficiency(const EfficiencyCurve& curve, const PowerPdf& pdf) {
    if (pdf.pbo_db.empty() || pdf.pbo_db.size() != pdf.weight.size()) {
        throw ArgumentError("pdf needs matching, nonempty back-off and weight vectors");
    }
    for (double w : pdf.weight) {
        if (!(w >= 0.0)) {
            throw ArgumentError("pdf weights must be nonnegative");
        }
    }

    const std::size_t n = pdf.pbo_db.size();
    std::vector<double> mass(n, 0.0);
    if (pdf.discrete) {
        mass = pdf.weight;
    } else {
        for (std::size_t i = 1; i < n; ++i) {
            const double h = pdf.pbo_db[i] - pdf.pbo_db[i - 1];
            if (!(h > 0.0)) {
                throw ArgumentError("continuous pdf grid must be strictly increasing");
            }
            mass[i - 1] += 0.5 * h * pdf.weight[i - 1];
            mass[i] += 0.5 * h * pdf.weight[i];
        }
    }
    double total = 0.0;
    for (double m : mass) {
        total += m;
    }
    if (std::abs(total - 1.0) > 1e-6) {
        throw ArgumentError("pdf must integrate to 1 (got " + std::to_string(total) + ")");
    }

    double p_out = 0.0;
    double p_dc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (mass[i] == 0.0) {
            continue;
        }
        const double eta = curve.at(pdf.pbo_db[i]);  // throws where the curve is undefined
        if (!(eta > 0.0)) {
            throw DomainError("efficiency must be positive where the pdf has mass");
        }
        const double p = std::pow(10.0, -pdf.pbo_db[i] / 10.0);
        p_out += mass[i] * p;
        p_dc += mass[i] * p / eta;
    }
    return p_out / p_dc;
}

}  // namespace doherty::ideal
