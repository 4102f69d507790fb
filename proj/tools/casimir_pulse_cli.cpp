#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "casimir_pulse/casimir_pulse.hpp"

namespace cp = casimir_pulse;

namespace {

enum ExitCode : int { success = 0, failure = 1, usage = 2, domain = 3, convergence = 4 };

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A value printed with a fixed number of decimals in CSV; JSON keeps full precision.
struct Fixed {
    double value;
    int places;
};

using Cell = std::variant<double, long long, std::string, bool, Fixed>;

std::string to_text(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    // Shortest representation that round-trips.
    return fmt::format("{}", v);
}

std::string cell_text(const Cell& cell) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
                return to_text(v);
            } else if constexpr (std::is_same_v<T, long long>) {
                return std::to_string(v);
            } else if constexpr (std::is_same_v<T, bool>) {
                return v ? "true" : "false";
            } else if constexpr (std::is_same_v<T, Fixed>) {
                return fmt::format("{:.{}f}", v.value, v.places);
            } else {
                return v;
            }
        },
        cell);
}

nlohmann::ordered_json cell_json(const Cell& cell) {
    return std::visit(
        [](const auto& v) -> nlohmann::ordered_json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Fixed>) {
                return std::isfinite(v.value) ? nlohmann::ordered_json(v.value) : nlohmann::ordered_json(nullptr);
            } else if constexpr (std::is_same_v<T, double>) {
                return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(to_text(v));
            } else {
                return nlohmann::ordered_json(v);
            }
        },
        cell);
}

using Pairs = std::vector<std::pair<std::string, std::string>>;

struct Manifest {
    std::string command;
    Pairs parameters{};
    Pairs truncations{};
    Pairs tolerances{};
    std::string output_path = "-";
    std::string format = "csv";
    std::optional<std::string> timestamp{};
    std::vector<std::string> notes{};
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct Common {
    std::string format = "csv";
    std::string out;
    unsigned threads = 0;
    bool stamp = false;
};

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

void write_csv(std::ostream& os, const Manifest& m, const Table& t) {
    os << "# casimir-pulse " << m.command << '\n';
    const auto line = [&](const char* label, const Pairs& pairs) {
        os << "# " << label << ':';
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            os << (i == 0 ? " " : ", ") << pairs[i].first << '=' << pairs[i].second;
        }
        os << '\n';
    };
    line("parameters", m.parameters);
    line("truncations", m.truncations);
    line("tolerances", m.tolerances);
    os << "# output: " << m.output_path << '\n';
    os << "# format: " << m.format << '\n';
    if (m.timestamp) {
        os << "# timestamp: " << *m.timestamp << '\n';
    }
    for (const auto& note : m.notes) {
        os << "# note: " << note << '\n';
    }
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        os << (i ? "," : "") << t.columns[i];
    }
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << (i ? "," : "") << cell_text(row[i]);
        }
        os << '\n';
    }
}

void write_json(std::ostream& os, const Manifest& m, const Table& t) {
    using json = nlohmann::ordered_json;
    const auto object = [](const Pairs& pairs) {
        json o = json::object();
        for (const auto& [k, v] : pairs) {
            o[k] = v;
        }
        return o;
    };
    json manifest;
    manifest["command"] = m.command;
    manifest["parameters"] = object(m.parameters);
    manifest["truncations"] = object(m.truncations);
    manifest["tolerances"] = object(m.tolerances);
    manifest["output_path"] = m.output_path;
    manifest["format"] = m.format;
    if (m.timestamp) {
        manifest["timestamp"] = *m.timestamp;
    }
    if (!m.notes.empty()) {
        manifest["notes"] = m.notes;
    }
    json rows = json::array();
    for (const auto& row : t.rows) {
        json r = json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            r[t.columns[i]] = cell_json(row[i]);
        }
        rows.push_back(std::move(r));
    }
    json doc;
    doc["manifest"] = std::move(manifest);
    doc["columns"] = t.columns;
    doc["rows"] = std::move(rows);
    os << doc.dump(2) << '\n';
}

void emit(const Common& common, Manifest manifest, const Table& table) {
    manifest.format = common.format;
    manifest.output_path = common.out.empty() ? "-" : common.out;
    if (common.stamp) {
        manifest.timestamp = utc_now();
    }
    std::ostringstream buffer;
    if (common.format == "json") {
        write_json(buffer, manifest, table);
    } else {
        write_csv(buffer, manifest, table);
    }
    if (common.out.empty()) {
        std::cout << buffer.str();
        std::cout.flush();
        return;
    }
    std::ofstream file(common.out, std::ios::binary);
    if (!file) {
        throw std::runtime_error("cannot open output file " + common.out);
    }
    file << buffer.str();
}

std::string num(double v) { return to_text(v); }

// Coupling given as --chi or as --xi together with --L.
struct Physics {
    std::optional<double> chi;
    std::optional<double> xi;
    double L = 1.0;
    std::optional<double> ell;

    [[nodiscard]] cp::ModelConfig config() const {
        const double ell_value = ell.value_or(L);
        if (chi) {
            return cp::ModelConfig::from_chi(*chi, L, ell_value);
        }
        if (xi) {
            return {*xi, L, ell_value};
        }
        throw UsageError("one of --chi or --xi is required");
    }

    void record(Pairs& parameters, const cp::ModelConfig& config, bool with_ell) const {
        parameters.emplace_back("chi", num(config.chi()));
        parameters.emplace_back("xi", num(config.xi()));
        parameters.emplace_back("L", num(config.L()));
        if (with_ell) {
            parameters.emplace_back("ell", num(config.ell()));
        }
    }
};

void add_common(CLI::App* app, Common& common) {
    app->add_option("--format", common.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app->add_option("--out", common.out, "Output file (default: standard output)");
    app->add_option("--threads", common.threads,
                    "Worker threads; falls back to CASIMIR_PULSE_THREADS, then 1. Results do not depend on it");
    app->add_flag("--stamp", common.stamp, "Add a UTC timestamp to the manifest");
}

void add_physics(CLI::App* app, Physics& physics, bool with_ell) {
    auto* chi = app->add_option("--chi", physics.chi, "Dimensionless coupling chi = xi L / 2");
    auto* xi = app->add_option("--xi", physics.xi, "Potential strength xi (inverse length)");
    chi->excludes(xi);
    app->add_option("--L", physics.L, "Circumference L")->capture_default_str();
    if (with_ell) {
        app->add_option("--ell", physics.ell, "Topological length scale (default: L)");
    }
}

// ---------------------------------------------------------------- commands

struct RootsArgs {
    Physics physics;
    std::size_t j_max = 10;
    double tol = 1e-12;
};

void run_roots(const RootsArgs& a, const Common& c) {
    const auto config = a.physics.config();
    const auto table = cp::solve_roots(config.chi(), a.j_max,
                                       {.tol_root = a.tol, .threads = cp::resolve_thread_count(c.threads)});
    Manifest m{.command = "roots"};
    a.physics.record(m.parameters, config, false);
    m.truncations = {{"j_max", std::to_string(a.j_max)}};
    m.tolerances = {{"tol_root", num(a.tol)}};
    Table t{{"j", "Z", "eps", "A2", "residual"}, {}};
    for (std::size_t j = 1; j <= table.j_max; ++j) {
        t.rows.push_back({static_cast<long long>(j), table.root(j), table.offset(j), table.norm2(j),
                          table.residual[j - 1]});
    }
    emit(c, m, t);
}

struct Table1Args {
    std::vector<double> xi{1.0, 5.0, 10.0, 100.0};
    double L = 1.0;
    std::optional<double> ell;
    std::size_t j_max = 500;
    std::size_t n_max = 10;
    double tol = 1e-12;
    bool convergence = false;
};

std::vector<double> occupations(double xi, double L, double ell, std::size_t j_max, std::size_t n_max, double tol,
                                unsigned threads) {
    const cp::ModelConfig config(xi, L, ell);
    auto eigen = cp::share(cp::solve_roots(config.chi(), j_max, {.tol_root = tol, .threads = threads}));
    const auto overlaps = cp::build_overlaps(eigen, config, n_max, threads);
    const auto bog = cp::build_bogolubov(overlaps, config, threads);
    const auto spectrum = cp::creation_spectrum(bog, overlaps, config);
    std::vector<double> out{spectrum.N0};
    out.insert(out.end(), spectrum.N.begin(), spectrum.N.end());
    return out;
}

void run_table1(const Table1Args& a, const Common& c) {
    const unsigned threads = cp::resolve_thread_count(c.threads);
    const double ell = a.ell.value_or(a.L);
    Manifest m{.command = "table1"};
    std::string xis;
    for (double x : a.xi) {
        xis += (xis.empty() ? "" : ";") + num(x);
    }
    m.parameters = {{"xi", xis}, {"L", num(a.L)}, {"ell", num(ell)}};
    m.truncations = {{"j_max", std::to_string(a.j_max)}, {"n_max", std::to_string(a.n_max)}};
    m.tolerances = {{"tol_root", num(a.tol)}};

    if (!a.convergence) {
        std::vector<std::vector<double>> columns;
        for (double xi : a.xi) {
            columns.push_back(occupations(xi, a.L, ell, a.j_max, a.n_max, a.tol, threads));
        }
        Table t;
        t.columns.emplace_back("n");
        for (double xi : a.xi) {
            t.columns.push_back("xi=" + num(xi));
        }
        for (std::size_t n = 0; n <= a.n_max; ++n) {
            std::vector<Cell> row{static_cast<long long>(n)};
            for (const auto& col : columns) {
                row.emplace_back(Fixed{col[n], 6});
            }
            t.rows.push_back(std::move(row));
        }
        emit(c, m, t);
        return;
    }

    // Levels J, 2J, 4J; observed order p from successive differences, then one Richardson step.
    m.truncations.emplace_back("levels", std::to_string(a.j_max) + ";" + std::to_string(2 * a.j_max) + ";" +
                                             std::to_string(4 * a.j_max));
    m.notes.emplace_back("extrapolated = N(4J) + (N(4J) - N(2J)) / (2^p - 1) with the observed order p");
    Table t{{"n", "xi", "N_J", "N_2J", "N_4J", "order", "extrapolated"}, {}};
    for (double xi : a.xi) {
        const auto n1 = occupations(xi, a.L, ell, a.j_max, a.n_max, a.tol, threads);
        const auto n2 = occupations(xi, a.L, ell, 2 * a.j_max, a.n_max, a.tol, threads);
        const auto n4 = occupations(xi, a.L, ell, 4 * a.j_max, a.n_max, a.tol, threads);
        for (std::size_t n = 0; n <= a.n_max; ++n) {
            const double d1 = n2[n] - n1[n];
            const double d2 = n4[n] - n2[n];
            const double p = (d1 != 0.0 && d2 != 0.0 && d1 / d2 > 1.0) ? std::log2(d1 / d2)
                                                                         : std::numeric_limits<double>::quiet_NaN();
            const double extrapolated = std::isfinite(p) ? n4[n] + d2 / (std::exp2(p) - 1.0) : n4[n];
            t.rows.push_back({static_cast<long long>(n), xi, n1[n], n2[n], n4[n], p, extrapolated});
        }
    }
    emit(c, m, t);
}

struct Fig2Args {
    double chi_min = 0.25;
    double chi_max = 20.0;
    std::size_t points = 80;
    std::size_t j_max = 1U << 15;
    double tol = 1e-12;
    bool fit = false;
};

void run_fig2(const Fig2Args& a, const Common& c) {
    if (!(a.chi_min > 0.0) || !(a.chi_max >= a.chi_min) || a.points < 1) {
        throw cp::DomainError("fig2 needs 0 < chi-min <= chi-max and at least one point");
    }
    const unsigned threads = cp::resolve_thread_count(c.threads);
    std::vector<double> chis(a.points);
    for (std::size_t i = 0; i < a.points; ++i) {
        chis[i] = a.points == 1 ? a.chi_min
                                : a.chi_min + (a.chi_max - a.chi_min) * static_cast<double>(i) /
                                                  static_cast<double>(a.points - 1);
    }
    struct Row {
        double A, A_lower, A_upper, B, B_tail, C, BmC, BmC_tail;
    };
    std::vector<Row> rows(a.points);
    cp::parallel_for(a.points, threads, [&](std::size_t i) {
        const double chi = chis[i];
        const auto eigen = cp::solve_roots(chi, a.j_max, {.tol_root = a.tol});
        const auto A = cp::constant_A(chi, eigen);
        const auto B = cp::constant_B(chi, eigen);
        const auto C = cp::constant_C(chi, eigen);
        const auto D = cp::constant_B_minus_C(chi, eigen);
        rows[i] = {A.constant.value, A.lower, A.upper, B.value, B.error_bound(), C.value, D.value, D.error_bound()};
    });
    Manifest m{.command = "fig2"};
    m.parameters = {{"chi_min", num(a.chi_min)}, {"chi_max", num(a.chi_max)}, {"points", std::to_string(a.points)},
                    {"L", "1"}};
    m.truncations = {{"j_max", std::to_string(a.j_max)}};
    m.tolerances = {{"tol_root", num(a.tol)}};
    m.notes.emplace_back("abs_A_minus_B is a diagnostic of an unproven conjecture; equality is not asserted");
    if (a.fit) {
        std::vector<double> values;
        for (const auto& r : rows) {
            values.push_back(r.B);
        }
        const auto fit = cp::fit_hyperbola(chis, values);
        m.notes.push_back("hyperbola fit B ~ sqrt(chi (chi - 2 b)) / pi: b=" + num(fit.b) +
                          " rms_residual=" + num(fit.rms_residual));
    }
    Table t{{"chi", "A", "A_lower", "A_upper", "B", "B_error_bound", "C", "B_minus_C", "B_minus_C_error_bound",
             "abs_A_minus_B"},
            {}};
    for (std::size_t i = 0; i < a.points; ++i) {
        const auto& r = rows[i];
        t.rows.push_back({chis[i], r.A, r.A_lower, r.A_upper, r.B, r.B_tail, r.C, r.BmC, r.BmC_tail,
                          std::abs(r.A - r.B)});
    }
    emit(c, m, t);
}

struct ConstantsArgs {
    Physics physics;
    std::size_t j_max = 10000;
    double tol = 1e-12;
};

void run_constants(const ConstantsArgs& a, const Common& c) {
    const auto config = a.physics.config();
    const double chi = config.chi();
    const auto eigen = cp::solve_roots(chi, a.j_max, {.tol_root = a.tol, .threads = cp::resolve_thread_count(c.threads)});
    Manifest m{.command = "constants"};
    a.physics.record(m.parameters, config, false);
    m.truncations = {{"j_max", std::to_string(a.j_max)}};
    m.tolerances = {{"tol_root", num(a.tol)}};
    Table t{{"name", "order", "value", "tail_bound", "rounding_bound", "reference"}, {}};
    const auto add = [&](const cp::SpectralConstant& s) {
        t.rows.push_back({cp::to_string(s.name), s.order, s.value, s.tail_bound, s.rounding_bound,
                          s.reference ? *s.reference : std::numeric_limits<double>::quiet_NaN()});
    };
    for (double p : {2.0, 3.0, 4.0, 6.0}) {
        add(cp::F_p(chi, p, eigen));
    }
    const auto sums = cp::inverse_power_sums(chi, eigen);
    add(sums.sum2);
    add(sums.sum4);
    add(cp::constant_C(chi, eigen));
    add(cp::constant_B(chi, eigen));
    add(cp::constant_B_minus_C(chi, eigen));
    add(cp::constant_A(chi, eigen).constant);
    emit(c, m, t);
}

struct StressArgs {
    Physics physics;
    std::size_t j_max = 4096;
    double tol = 1e-12;
};

void run_stress(const StressArgs& a, const Common& c) {
    const auto config = a.physics.config();
    const auto eigen = cp::solve_roots(config.chi(), a.j_max, {.tol_root = a.tol});
    const auto constants = cp::stress_constants(config.chi(), eigen);
    const auto out = cp::build_out_tensor(config, constants);
    Manifest m{.command = "stress"};
    a.physics.record(m.parameters, config, false);
    m.truncations = {{"j_max", std::to_string(a.j_max)}};
    m.tolerances = {{"tol_root", num(a.tol)}};
    Table t{{"quantity", "value"}, {}};
    t.rows.push_back({std::string("B"), constants.B});
    t.rows.push_back({std::string("C"), constants.C});
    t.rows.push_back({std::string("casimir_density"), out.casimir_density});
    t.rows.push_back({std::string("potential_shift"), out.potential_shift});
    t.rows.push_back({std::string("background_density"), out.background_density()});
    for (const auto& p : out.pulses) {
        t.rows.push_back({"pulse_" + cp::to_string(p.direction) + "_amplitude", p.amplitude});
        t.rows.push_back({"pulse_" + cp::to_string(p.direction) + "_flux_sign", static_cast<long long>(p.flux_sign)});
    }
    t.rows.push_back({std::string("trace"), out.trace()});
    t.rows.push_back({std::string("in_region_density_off_support"), cp::build_in_tensor(config, constants).background_density()});
    t.rows.push_back({std::string("total_energy"), cp::total_energy(config, constants)});
    emit(c, m, t);
}

struct CrossingsArgs {
    Physics physics;
    std::size_t j_max = 4096;
    double tol = 1e-12;
    double v = 0.0;
    double t0 = 0.0;
    double x0 = 0.0;
    std::string kind = "timelike";
    double tau_lo = 0.0;
    double tau_hi = 5.0;
};

cp::GeodesicKind parse_kind(const std::string& kind) {
    if (kind == "null_right") {
        return cp::GeodesicKind::null_right;
    }
    if (kind == "null_left") {
        return cp::GeodesicKind::null_left;
    }
    return cp::GeodesicKind::timelike;
}

void run_crossings(const CrossingsArgs& a, const Common& c) {
    const auto config = a.physics.config();
    const auto eigen = cp::solve_roots(config.chi(), a.j_max, {.tol_root = a.tol});
    const auto field = cp::build_out_tensor(config, cp::stress_constants(config.chi(), eigen));
    const cp::GeodesicSpec geo{a.v, a.t0, a.x0, parse_kind(a.kind)};
    const auto density = cp::energy_density_along(geo, field, a.tau_lo, a.tau_hi);
    Manifest m{.command = "crossings"};
    a.physics.record(m.parameters, config, false);
    m.parameters.insert(m.parameters.end(), {{"kind", a.kind},
                                             {"v", num(a.v)},
                                             {"t0", num(a.t0)},
                                             {"x0", num(a.x0)},
                                             {"tau_lo", num(a.tau_lo)},
                                             {"tau_hi", num(a.tau_hi)}});
    m.truncations = {{"j_max", std::to_string(a.j_max)}};
    m.tolerances = {{"tol_root", num(a.tol)}};
    m.notes.push_back("smooth_part=" + num(density.smooth_part));
    Table t{{"tau", "family", "n", "weight", "measure"}, {}};
    for (const auto& x : density.crossings) {
        t.rows.push_back({x.tau, cp::to_string(x.family), static_cast<long long>(x.n), x.weight, x.measure});
    }
    emit(c, m, t);
}

struct ConditionsArgs {
    Physics physics;
    std::size_t j_max = 4096;
    double tol = 1e-12;
};

void run_conditions(const ConditionsArgs& a, const Common& c) {
    const auto config = a.physics.config();
    const auto eigen = cp::solve_roots(config.chi(), a.j_max, {.tol_root = a.tol});
    const auto field = cp::build_out_tensor(config, cp::stress_constants(config.chi(), eigen));
    Manifest m{.command = "energy-conditions"};
    a.physics.record(m.parameters, config, false);
    m.truncations = {{"j_max", std::to_string(a.j_max)}};
    m.tolerances = {{"tol_root", num(a.tol)}};
    Table t{{"condition", "violated", "t", "x", "direction_t", "direction_x", "value"}, {}};
    for (const auto& v : cp::energy_conditions(field)) {
        t.rows.push_back({cp::to_string(v.condition), v.violated, v.witness.t, v.witness.x, v.witness.direction_t,
                          v.witness.direction_x, v.witness.value});
    }
    emit(c, m, t);
}

struct EnergyArgs {
    Physics physics;
    std::size_t j_max = 1U << 15;
    double tol = 1e-12;
    bool find_zero = false;
    double lo = 0.5;
    double hi = 1.0;
    double bisect_tol = 1e-7;
};

void run_energy(const EnergyArgs& a, const Common& c) {
    Manifest m{.command = "energy"};
    m.truncations = {{"j_max", std::to_string(a.j_max)}};
    m.tolerances = {{"tol_root", num(a.tol)}};
    if (a.find_zero) {
        m.parameters = {{"lo", num(a.lo)}, {"hi", num(a.hi)}, {"L", "1"}};
        m.tolerances.emplace_back("bisection", num(a.bisect_tol));
        const auto zero = cp::find_energy_zero(a.lo, a.hi, a.j_max, a.bisect_tol, {.tol_root = a.tol});
        Table t{{"chi_zero", "lo", "hi", "iterations"}, {}};
        t.rows.push_back({zero.chi, zero.lo, zero.hi, static_cast<long long>(zero.iterations)});
        emit(c, m, t);
        return;
    }
    const auto config = a.physics.config();
    const auto eigen = cp::solve_roots(config.chi(), a.j_max, {.tol_root = a.tol});
    const auto constants = cp::stress_constants(config.chi(), eigen);
    a.physics.record(m.parameters, config, false);
    Table t{{"chi", "B", "energy"}, {}};
    t.rows.push_back({config.chi(), constants.B, cp::total_energy(config, constants)});
    emit(c, m, t);
}

struct QweiArgs {
    Physics physics;
    std::size_t j_max = 4096;
    std::size_t n_cut = 10000;
    double tol = 1e-12;
    double v = 0.0;
    double t0 = 0.0;
    double x0 = 0.0;
    std::optional<double> center;
    std::optional<double> width;
    bool difference = false;
};

void run_qwei(const QweiArgs& a, const Common& c) {
    const auto config = a.physics.config();
    const double L = config.L();
    const auto eigen = cp::solve_roots(config.chi(), a.j_max, {.tol_root = a.tol});
    const auto constants = cp::stress_constants(config.chi(), eigen);
    const cp::GeodesicSpec geo{a.v, a.t0, a.x0, cp::GeodesicKind::timelike};
    const double width = a.width.value_or(0.25 * L);
    const double center = a.center.value_or(geo.entry_parameter() + width + 0.25 * L);
    const cp::TestFunction g(center, width);
    const auto report = a.difference ? cp::qwei_difference_verdict(g, geo, config, constants, a.n_cut)
                                     : cp::qwei_verdict(g, geo, config, constants, a.n_cut);
    Manifest m{.command = "qwei"};
    a.physics.record(m.parameters, config, a.difference);
    m.parameters.insert(m.parameters.end(), {{"form", a.difference ? "difference" : "absolute"},
                                             {"v", num(a.v)},
                                             {"t0", num(a.t0)},
                                             {"x0", num(a.x0)},
                                             {"center", num(center)},
                                             {"width", num(width)}});
    m.truncations = {{"j_max", std::to_string(a.j_max)}, {"n_cut", std::to_string(a.n_cut)}};
    m.tolerances = {{"tol_root", num(a.tol)}, {"mode_sum_relative_increment", "1e-12"}};
    for (const auto& w : report.rhs.warnings) {
        m.notes.push_back(w);
    }
    Table t{{"quantity", "value"}, {}};
    t.rows.push_back({std::string("lhs_casimir_term"), report.lhs.casimir_term});
    t.rows.push_back({std::string("lhs_b_minus_c_term"), report.lhs.b_minus_c_term});
    t.rows.push_back({std::string("lhs_left_pulse_term"), report.lhs.left_pulse_term});
    t.rows.push_back({std::string("lhs_right_pulse_term"), report.lhs.right_pulse_term});
    t.rows.push_back({std::string("lhs_crossings"), static_cast<long long>(report.lhs.crossings)});
    t.rows.push_back({std::string("lhs"), report.lhs_total()});
    t.rows.push_back({std::string("rhs_casimir_term"), report.rhs.casimir_term});
    t.rows.push_back({std::string("rhs_mode_sum_fast"), report.rhs.mode_sum_fast});
    t.rows.push_back({std::string("rhs_mode_sum_slow"), report.rhs.mode_sum_slow});
    t.rows.push_back({std::string("rhs_modes_used"), static_cast<long long>(report.rhs.n_used)});
    t.rows.push_back({std::string("rhs_converged"), report.rhs.converged});
    t.rows.push_back({std::string("rhs_alpha_tail_bound"), report.rhs.tail_bound});
    t.rows.push_back({std::string("rhs"), report.rhs_total()});
    t.rows.push_back({std::string("margin"), report.margin()});
    t.rows.push_back({std::string("flanagan_bound"), cp::flanagan_bound(g)});
    emit(c, m, t);
}

struct GreensArgs {
    double x = 0.1;
    double t = 0.3;
    double xp = 0.0;
    double tp = 0.0;
    double L = 1.0;
    std::size_t n_max = 1000;
};

void run_greens(const GreensArgs& a, const Common& c) {
    const double closed = cp::kernel_closed(a.x, a.t, a.xp, a.tp, a.L).value;
    const double series = cp::kernel_series(a.x, a.t, a.xp, a.tp, a.n_max, a.L).value;
    Manifest m{.command = "greens"};
    m.parameters = {{"x", num(a.x)}, {"t", num(a.t)}, {"xp", num(a.xp)}, {"tp", num(a.tp)}, {"L", num(a.L)}};
    m.truncations = {{"n_max", std::to_string(a.n_max)}};
    Table t{{"closed", "series", "difference"}, {}};
    t.rows.push_back({closed, series, series - closed});
    emit(c, m, t);
}

struct EtaArgs {
    double xi = 1.0;
    double a = 1.0;
};

void run_eta(const EtaArgs& a, const Common& c) {
    const double de = cp::mamev_trunov_eta(a.xi, a.a, cp::QuadratureScheme::double_exponential);
    const double gk = cp::mamev_trunov_eta(a.xi, a.a, cp::QuadratureScheme::gauss_kronrod);
    Manifest m{.command = "eta"};
    m.parameters = {{"xi", num(a.xi)}, {"a", num(a.a)}};
    m.tolerances = {{"double_exponential", "1e-15"}, {"gauss_kronrod", "1e-14"}};
    Table t{{"xi", "a", "eta_double_exponential", "eta_gauss_kronrod", "difference"}, {}};
    t.rows.push_back({a.xi, a.a, de, gk, de - gk});
    emit(c, m, t);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Particle creation and stress-energy after a delta potential switches off on a cylinder.\n"
                 "Every output embeds a manifest of its parameters, truncations and tolerances."};
    app.require_subcommand(1);
    Common common;
    std::function<void()> action;

    RootsArgs roots;
    auto* roots_cmd = app.add_subcommand("roots", "Roots Z_j of Z = chi cot Z with normalization data. Default j_max=10");
    add_physics(roots_cmd, roots.physics, false);
    roots_cmd->add_option("--jmax", roots.j_max, "Number of roots")->capture_default_str();
    roots_cmd->add_option("--tol", roots.tol, "Root residual tolerance, in (0, 1e-6]")->capture_default_str();
    add_common(roots_cmd, common);
    roots_cmd->callback([&] { action = [&] { run_roots(roots, common); }; });

    Table1Args table1;
    auto* table1_cmd = app.add_subcommand(
        "table1", "Created quanta per mode, n = 0..n_max, one column per xi. Defaults j_max=500, n_max=10, ell=L");
    table1_cmd->add_option("--xi", table1.xi, "Coupling values")->delimiter(',')->capture_default_str();
    table1_cmd->add_option("--L", table1.L, "Circumference L")->capture_default_str();
    table1_cmd->add_option("--ell", table1.ell, "Topological length scale (default: L)");
    table1_cmd->add_option("--jmax", table1.j_max, "Roots summed per entry")->capture_default_str();
    table1_cmd->add_option("--nmax", table1.n_max, "Highest OUT mode")->capture_default_str();
    table1_cmd->add_option("--tol", table1.tol, "Root residual tolerance")->capture_default_str();
    table1_cmd->add_flag("--convergence", table1.convergence,
                         "Report N at j_max, 2 j_max, 4 j_max with a Richardson-extrapolated value");
    add_common(table1_cmd, common);
    table1_cmd->callback([&] { action = [&] { run_table1(table1, common); }; });

    Fig2Args fig2;
    auto* fig2_cmd = app.add_subcommand(
        "fig2", "Constants A, B, C and B - C on a chi grid (L = 1). Default j_max=32768 (2^15), 80 points on [0.25, 20]");
    fig2_cmd->add_option("--chi-min", fig2.chi_min, "Smallest chi")->capture_default_str();
    fig2_cmd->add_option("--chi-max", fig2.chi_max, "Largest chi")->capture_default_str();
    fig2_cmd->add_option("--points", fig2.points, "Grid points")->capture_default_str();
    fig2_cmd->add_option("--jmax", fig2.j_max, "Roots per partial sum")->capture_default_str();
    fig2_cmd->add_option("--tol", fig2.tol, "Root residual tolerance")->capture_default_str();
    fig2_cmd->add_flag("--fit", fig2.fit, "Add a least-squares hyperbola fit of B to the manifest notes");
    add_common(fig2_cmd, common);
    fig2_cmd->callback([&] { action = [&] { run_fig2(fig2, common); }; });

    ConstantsArgs constants;
    auto* constants_cmd = app.add_subcommand(
        "constants", "Series F_p, inverse power sums, A, B, C, B - C with tail and rounding bounds. Default j_max=10000");
    add_physics(constants_cmd, constants.physics, false);
    constants_cmd->add_option("--jmax", constants.j_max, "Roots summed")->capture_default_str();
    constants_cmd->add_option("--tol", constants.tol, "Root residual tolerance")->capture_default_str();
    add_common(constants_cmd, common);
    constants_cmd->callback([&] { action = [&] { run_constants(constants, common); }; });

    StressArgs stress;
    auto* stress_cmd = app.add_subcommand("stress", "Renormalized stress tensor on the IN and OUT regions. Default j_max=4096");
    add_physics(stress_cmd, stress.physics, false);
    stress_cmd->add_option("--jmax", stress.j_max, "Roots summed for B")->capture_default_str();
    stress_cmd->add_option("--tol", stress.tol, "Root residual tolerance")->capture_default_str();
    add_common(stress_cmd, common);
    stress_cmd->callback([&] { action = [&] { run_stress(stress, common); }; });

    CrossingsArgs crossings;
    auto* crossings_cmd = app.add_subcommand(
        "crossings", "Pulse crossings of a geodesic on the OUT region. Defaults j_max=4096, tau in [0, 5]");
    add_physics(crossings_cmd, crossings.physics, false);
    crossings_cmd->add_option("--jmax", crossings.j_max, "Roots summed for B")->capture_default_str();
    crossings_cmd->add_option("--tol", crossings.tol, "Root residual tolerance")->capture_default_str();
    crossings_cmd->add_option("--v", crossings.v, "Velocity of a timelike geodesic")->capture_default_str();
    crossings_cmd->add_option("--t0", crossings.t0, "Time offset")->capture_default_str();
    crossings_cmd->add_option("--x0", crossings.x0, "Position offset")->capture_default_str();
    crossings_cmd->add_option("--kind", crossings.kind, "Geodesic kind")
        ->check(CLI::IsMember({"timelike", "null_right", "null_left"}))
        ->capture_default_str();
    crossings_cmd->add_option("--tau-lo", crossings.tau_lo, "Window start")->capture_default_str();
    crossings_cmd->add_option("--tau-hi", crossings.tau_hi, "Window end")->capture_default_str();
    add_common(crossings_cmd, common);
    crossings_cmd->callback([&] { action = [&] { run_crossings(crossings, common); }; });

    ConditionsArgs conditions;
    auto* conditions_cmd = app.add_subcommand(
        "energy-conditions", "NEC, WEC, SEC, DEC verdicts with witnesses on the OUT region. Default j_max=4096");
    add_physics(conditions_cmd, conditions.physics, false);
    conditions_cmd->add_option("--jmax", conditions.j_max, "Roots summed for B")->capture_default_str();
    conditions_cmd->add_option("--tol", conditions.tol, "Root residual tolerance")->capture_default_str();
    add_common(conditions_cmd, common);
    conditions_cmd->callback([&] { action = [&] { run_conditions(conditions, common); }; });

    EnergyArgs energy;
    auto* energy_cmd = app.add_subcommand(
        "energy", "Total energy -pi/(6L) + B/L, or with --find-zero its sign change in chi (L = 1). Default j_max=32768");
    add_physics(energy_cmd, energy.physics, false);
    energy_cmd->add_option("--jmax", energy.j_max, "Roots summed for B")->capture_default_str();
    energy_cmd->add_option("--tol", energy.tol, "Root residual tolerance")->capture_default_str();
    energy_cmd->add_flag("--find-zero", energy.find_zero, "Bisect for the zero of the energy in chi");
    energy_cmd->add_option("--lo", energy.lo, "Lower chi bracket")->capture_default_str();
    energy_cmd->add_option("--hi", energy.hi, "Upper chi bracket")->capture_default_str();
    energy_cmd->add_option("--bisect-tol", energy.bisect_tol, "Bracket width at which bisection stops")
        ->capture_default_str();
    add_common(energy_cmd, common);
    energy_cmd->callback([&] { action = [&] { run_energy(energy, common); }; });

    QweiArgs qwei;
    auto* qwei_cmd = app.add_subcommand(
        "qwei", "Quantum weak energy inequality along a timelike geodesic with a bump test function. "
                "Defaults j_max=4096, n_cut=10000 (stops once a term is below 1e-12 of the sum), width L/4");
    add_physics(qwei_cmd, qwei.physics, true);
    qwei_cmd->add_option("--jmax", qwei.j_max, "Roots summed for B")->capture_default_str();
    qwei_cmd->add_option("--ncut", qwei.n_cut, "Largest mode in the bound")->capture_default_str();
    qwei_cmd->add_option("--tol", qwei.tol, "Root residual tolerance")->capture_default_str();
    qwei_cmd->add_option("--v", qwei.v, "Velocity")->capture_default_str();
    qwei_cmd->add_option("--t0", qwei.t0, "Time offset")->capture_default_str();
    qwei_cmd->add_option("--x0", qwei.x0, "Position offset")->capture_default_str();
    qwei_cmd->add_option("--center", qwei.center, "Test function center (default: L/4 after support clears t = 0)");
    qwei_cmd->add_option("--width", qwei.width, "Test function half-width (default: L/4)");
    qwei_cmd->add_flag("--difference", qwei.difference, "Use the difference form, which depends on ell");
    add_common(qwei_cmd, common);
    qwei_cmd->callback([&] { action = [&] { run_qwei(qwei, common); }; });

    GreensArgs greens;
    auto* greens_cmd = app.add_subcommand(
        "greens", "Advanced-minus-retarded kernel in closed and series form. Default n_max=1000");
    greens_cmd->add_option("--x", greens.x, "x")->capture_default_str();
    greens_cmd->add_option("--t", greens.t, "t")->capture_default_str();
    greens_cmd->add_option("--xp", greens.xp, "x'")->capture_default_str();
    greens_cmd->add_option("--tp", greens.tp, "t'")->capture_default_str();
    greens_cmd->add_option("--L", greens.L, "Circumference L")->capture_default_str();
    greens_cmd->add_option("--nmax", greens.n_max, "Series terms")->capture_default_str();
    add_common(greens_cmd, common);
    greens_cmd->callback([&] { action = [&] { run_greens(greens, common); }; });

    EtaArgs eta;
    auto* eta_cmd = app.add_subcommand("eta", "Mamev-Trunov eta(xi, a) by two independent quadrature schemes");
    eta_cmd->add_option("--xi", eta.xi, "Coupling")->capture_default_str();
    eta_cmd->add_option("--a", eta.a, "Separation")->capture_default_str();
    add_common(eta_cmd, common);
    eta_cmd->callback([&] { action = [&] { run_eta(eta, common); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? success : usage;
    }

    try {
        action();
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return usage;
    } catch (const cp::ConvergenceError& e) {
        std::cerr << "convergence failure: " << e.what() << '\n';
        return convergence;
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return domain;
    } catch (const std::out_of_range& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return domain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return failure;
    }
    return success;
}
